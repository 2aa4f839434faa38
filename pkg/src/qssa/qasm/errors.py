from __future__ import annotations


class QasmError(Exception):
    """Base class for frontend errors. Carries a 1-based source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}" if line else message)


class QasmSyntaxError(QasmError):
    pass


class ResolutionError(QasmError):
    """Undeclared register or gate, index out of bounds, arity mismatch."""


class UnsupportedError(QasmError):
    """Valid input outside the supported subset (OpenQASM 3, opaque execution)."""
