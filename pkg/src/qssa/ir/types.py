"""Value types of the IR."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


class IRTypeError(TypeError):
    """An operation or type violates the IR's typing rules."""


@dataclass(frozen=True)
class QubitType:
    """Array of qubits; `size` is None for the dynamically sized `qubit<?>`."""

    size: Optional[int] = 1

    def __post_init__(self):
        if self.size is not None and (not isinstance(self.size, int) or self.size < 1):
            raise IRTypeError(f"qubit array size must be a positive integer, got {self.size!r}")

    @property
    def is_static(self) -> bool:
        return self.size is not None

    def __str__(self):
        return f"qubit<{'?' if self.size is None else self.size}>"


@dataclass(frozen=True)
class IntType:
    def __str__(self):
        return "i64"


@dataclass(frozen=True)
class BoolType:
    def __str__(self):
        return "i1"


@dataclass(frozen=True)
class AngleType:
    """Double-precision angle in radians."""

    def __str__(self):
        return "f64"


@dataclass(frozen=True)
class BitTensorType:
    """Measurement outcome vector; `size` is None when dynamic."""

    size: Optional[int] = 1

    def __str__(self):
        return f"tensor<{'?' if self.size is None else self.size}xi1>"


@dataclass(frozen=True)
class MemBitType:
    """A one-bit classical memory cell."""

    def __str__(self):
        return "memref<i1>"


I64 = IntType()
I1 = BoolType()
F64 = AngleType()
MEMBIT = MemBitType()
QUBIT = QubitType(1)


def is_qubit(t) -> bool:
    return isinstance(t, QubitType)


def qubit_width(t: QubitType) -> Optional[int]:
    return t.size
