"""SSA-based compiler toolkit for hybrid quantum-classical programs."""

__version__ = "0.1.0"
