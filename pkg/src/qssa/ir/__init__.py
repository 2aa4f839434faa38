"""The QSSA intermediate representation."""
from .analysis import def_use_index
from .core import (
    ARITH_KINDS,
    ARRAY_KINDS,
    CLASSICAL_KINDS,
    GATE_1Q,
    GATE_KINDS,
    ROTATIONS,
    TERMINATORS,
    Block,
    Effect,
    FunctionDef,
    ModuleIR,
    OpKind,
    Operation,
    Region,
    Value,
    build_op,
    clone_op,
    clone_region,
    effect_of,
    gate_angles,
    is_effectful,
    structurally_equal,
    type_errors,
    walk_op,
    walk_region,
)
from .text import IRSyntaxError, parse_ir, print_ir
from .types import (
    F64,
    I1,
    I64,
    MEMBIT,
    QUBIT,
    AngleType,
    BitTensorType,
    BoolType,
    IntType,
    IRTypeError,
    MemBitType,
    QubitType,
)

__all__ = [
    "ARITH_KINDS", "ARRAY_KINDS", "AngleType", "BitTensorType", "Block", "BoolType",
    "CLASSICAL_KINDS", "Effect", "F64", "FunctionDef", "GATE_1Q", "GATE_KINDS", "I1", "I64",
    "IRSyntaxError", "IRTypeError", "IntType", "MEMBIT", "MemBitType", "ModuleIR", "OpKind",
    "Operation", "QUBIT", "QubitType", "ROTATIONS", "Region", "TERMINATORS", "Value",
    "build_op", "clone_op", "clone_region", "def_use_index", "effect_of", "gate_angles",
    "is_effectful", "parse_ir", "print_ir", "structurally_equal", "type_errors", "walk_op",
    "walk_region",
]
