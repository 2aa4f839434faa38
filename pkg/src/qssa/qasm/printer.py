"""Canonical OpenQASM 2.0 text output."""
from __future__ import annotations

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
    Reset,
)
from .qelib1 import qelib1_gates


def format_angle(value) -> str:
    # repr() is the shortest string that round-trips the double exactly
    return repr(float(value)) if not hasattr(value, "evaluate") else str(value)


def _gate_apply(stmt: GateApply) -> str:
    params = f"({','.join(format_angle(p) for p in stmt.params)})" if stmt.params else ""
    return f"{stmt.name}{params} {','.join(str(a) for a in stmt.qargs)};"


def _formals(params, qargs) -> str:
    head = f"({','.join(params)})" if params else ""
    return f"{head} {','.join(qargs)}"


def format_stmt(stmt) -> str:
    if isinstance(stmt, QregDecl):
        return f"qreg {stmt.name}[{stmt.size}];"
    if isinstance(stmt, CregDecl):
        return f"creg {stmt.name}[{stmt.size}];"
    if isinstance(stmt, GateApply):
        return _gate_apply(stmt)
    if isinstance(stmt, Measure):
        return f"measure {stmt.qubit} -> {stmt.bit};"
    if isinstance(stmt, Reset):
        return f"reset {stmt.qubit};"
    if isinstance(stmt, Barrier):
        return f"barrier {','.join(str(a) for a in stmt.qargs)};"
    if isinstance(stmt, IfStmt):
        return f"if({stmt.creg}=={stmt.value}) {format_stmt(stmt.body)}"
    if isinstance(stmt, GateDef):
        body = " ".join(format_stmt(s) for s in stmt.body)
        return f"gate {stmt.name}{_formals(stmt.params, stmt.qargs)} {{ {body} }}"
    if isinstance(stmt, OpaqueDecl):
        return f"opaque {stmt.name}{_formals(stmt.params, stmt.qargs)};"
    raise TypeError(f"not a QASM statement: {stmt!r}")


def print_qasm(program: QasmProgram) -> str:
    lines = ["OPENQASM 2.0;"]
    library = qelib1_gates()
    user_names = {s.name for s in program.statements if isinstance(s, (GateDef, OpaqueDecl))}
    # a program that redefines a library gate cannot have included the library
    if not user_names & library.keys():
        lines.append('include "qelib1.inc";')
    lines.extend(format_stmt(s) for s in program.statements)
    return "\n".join(lines) + "\n"
