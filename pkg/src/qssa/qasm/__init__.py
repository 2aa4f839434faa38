"""OpenQASM 2.0 frontend: parser, AST and canonical printer."""
from .ast import (
    Barrier,
    CregDecl,
    GateApply,
    GateDef,
    IfStmt,
    Measure,
    OpaqueDecl,
    QasmProgram,
    QregDecl,
    Ref,
    Reset,
)
from .errors import QasmError, QasmSyntaxError, ResolutionError, UnsupportedError
from .parser import gate_signatures, parse_qasm
from .printer import print_qasm
from .qelib1 import qelib1_gates

__all__ = [
    "Barrier",
    "CregDecl",
    "GateApply",
    "GateDef",
    "IfStmt",
    "Measure",
    "OpaqueDecl",
    "QasmError",
    "QasmProgram",
    "QasmSyntaxError",
    "QregDecl",
    "Ref",
    "Reset",
    "ResolutionError",
    "UnsupportedError",
    "gate_signatures",
    "parse_qasm",
    "print_qasm",
    "qelib1_gates",
]
