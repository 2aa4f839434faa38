"""Raise an OpenQASM program into the IR with a latest-qubit map.

Each physical qubit `reg[i]` gets its own single-qubit allocation; every gate
consumes the latest SSA values of its qubits and the map is updated with the
gate's results.  Classical bits become one-bit memory cells, measurement
results are written to them with explicit stores, and `if (c == n)` becomes
loads + integer compare + `scf.if`.  `@main` returns the final values of all
qubits in declaration order.
"""
from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

from .ir.builder import Builder
from .ir.core import K, Block, FunctionDef, ModuleIR, Operation, Region, Value
from .ir.types import QUBIT
from .qasm import ast as qast
from .qasm.errors import QasmError, UnsupportedError
from .qasm.parser import GateSig, gate_signatures

MAX_IF_WIDTH = 62


class UnknownGate(QasmError):
    pass


# library gate -> (IR kind, angle builder).  Angle builders map the QASM
# parameters to the IR attributes of the primitive.
def _u(theta, phi, lam):
    return {"theta": float(theta), "phi": float(phi), "lambda": float(lam)}


_PRIMITIVES: dict[str, tuple[K, Callable[..., dict]]] = {
    "U": (K.U, _u),
    "u3": (K.U, _u),
    "u": (K.U, _u),
    "u2": (K.U, lambda phi, lam: _u(math.pi / 2, phi, lam)),
    "u1": (K.U, lambda lam: _u(0.0, 0.0, lam)),
    "p": (K.U, lambda lam: _u(0.0, 0.0, lam)),
    "id": (K.U, lambda: _u(0.0, 0.0, 0.0)),
    "CX": (K.CNOT, lambda: {}),
    "cx": (K.CNOT, lambda: {}),
    "x": (K.X, lambda: {}),
    "y": (K.Y, lambda: {}),
    "z": (K.Z, lambda: {}),
    "h": (K.H, lambda: {}),
    "s": (K.S, lambda: {}),
    "sdg": (K.SDG, lambda: {}),
    "t": (K.T, lambda: {}),
    "tdg": (K.TDG, lambda: {}),
    "rx": (K.RX, lambda a: {"angle": float(a)}),
    "ry": (K.RY, lambda a: {"angle": float(a)}),
    "rz": (K.RZ, lambda a: {"angle": float(a)}),
}


class _GateExpander:
    """Expands gate applications to primitive ops over SSA values."""

    def __init__(self, sigs: dict[str, GateSig], user_defs: set[str]):
        self.sigs = sigs
        self.user_defs = user_defs

    def expand(self, b: Builder, name: str, params: Sequence[float], qubits: list[Value]) -> list[Value]:
        """Emit ops for `name(params) qubits` and return the new qubit values."""
        if name not in self.user_defs and name in _PRIMITIVES:
            kind, attrs = _PRIMITIVES[name]
            op = b.op(kind, qubits, attrs(*params))
            return list(op.results)
        sig = self.sigs.get(name)
        if sig is None:
            raise UnknownGate(f"unknown gate {name!r}")
        if sig.opaque or sig.definition is None:
            raise UnsupportedError(f"opaque gate {name!r} has no definition to raise")
        gdef = sig.definition
        env = dict(zip(gdef.params, params))
        wires = dict(zip(gdef.qargs, qubits))
        for stmt in gdef.body:
            args = list(dict.fromkeys(stmt.qargs))
            if isinstance(stmt, qast.Barrier):
                op = b.op(K.BARRIER, [wires[a] for a in args])
                wires.update(zip(args, op.results))
                continue
            vals = [e.evaluate(env) for e in stmt.params]
            out = self.expand(b, stmt.name, vals, [wires[a] for a in stmt.qargs])
            wires.update(zip(stmt.qargs, out))
        return [wires[a] for a in gdef.qargs]


def expand_stdlib_gate(
    name: str, params: Sequence[float], qargs: list[Value], program: Optional[qast.QasmProgram] = None
) -> tuple[list[Operation], list[Value]]:
    """Primitive ops implementing a library (or `program`-defined) gate on `qargs`.

    Returns the emitted operations (in a scratch block) and the output values.
    """
    prog = program or qast.QasmProgram()
    expander = _GateExpander(gate_signatures(prog), set(prog.gate_defs()))
    scratch = Block()
    out = expander.expand(Builder(scratch), name, list(params), list(qargs))
    return list(scratch.ops), out


class _Raiser:
    def __init__(self, program: qast.QasmProgram):
        self.program = program
        self.expander = _GateExpander(gate_signatures(program), set(program.gate_defs()))
        self.latest: dict[tuple[str, int], Value] = {}
        self.cells: dict[tuple[str, int], Value] = {}
        self.cregs: dict[str, int] = {}

    def run(self) -> ModuleIR:
        main = FunctionDef("main")
        b = Builder(main.entry)
        for stmt in self.program.statements:
            self.statement(b, stmt)
        order = list(self.latest)
        results = [self.latest[key] for key in order]
        main.result_types = [QUBIT] * len(results)
        b.op(K.RETURN, results)
        return ModuleIR([main])

    def qubit(self, ref: qast.Ref) -> Value:
        return self.latest[(ref.reg, ref.index)]

    def statement(self, b: Builder, stmt):
        if isinstance(stmt, qast.QregDecl):
            for i in range(stmt.size):
                v = b.one(K.ALLOC, [], {"size": 1})
                v.name_hint = f"{stmt.name}{i}"
                self.latest[(stmt.name, i)] = v
        elif isinstance(stmt, qast.CregDecl):
            self.cregs[stmt.name] = stmt.size
            for i in range(stmt.size):
                cell = b.one(K.MEM_ALLOC_BIT, [], {"name": stmt.name, "index": i, "size": stmt.size})
                cell.name_hint = f"{stmt.name}{i}"
                self.cells[(stmt.name, i)] = cell
        elif isinstance(stmt, qast.GateApply):
            out = self.expander.expand(b, stmt.name, stmt.params, [self.qubit(r) for r in stmt.qargs])
            for r, v in zip(stmt.qargs, out):
                self.latest[(r.reg, r.index)] = v
        elif isinstance(stmt, qast.Measure):
            op = b.op(K.MEASURE, [self.qubit(stmt.qubit)])
            bits, q = op.results
            self.latest[(stmt.qubit.reg, stmt.qubit.index)] = q
            b.op(K.MEM_STORE_BIT, [bits, self.cells[(stmt.bit.reg, stmt.bit.index)]], {"index": 0})
        elif isinstance(stmt, qast.Reset):
            q = b.one(K.RESET, [self.qubit(stmt.qubit)])
            self.latest[(stmt.qubit.reg, stmt.qubit.index)] = q
        elif isinstance(stmt, qast.Barrier):
            keys = list(dict.fromkeys((r.reg, r.index) for r in stmt.qargs))
            op = b.op(K.BARRIER, [self.latest[k] for k in keys])
            self.latest.update(zip(keys, op.results))
        elif isinstance(stmt, qast.IfStmt):
            self.if_stmt(b, stmt)
        # gate and opaque declarations produce no code

    def creg_value(self, b: Builder, creg: str) -> Value:
        """Little-endian integer value of a classical register (c[0] is the LSB)."""
        acc = None
        for j in range(self.cregs[creg]):
            bit = b.one(K.MEM_LOAD_BIT, [self.cells[(creg, j)]])
            if j == 0:
                acc = bit
                continue
            weight = b.one(K.CONST_INT, [], {"value": 1 << j})
            acc = b.one(K.ADDI, [acc, b.one(K.MULI, [bit, weight])])
        return acc

    def if_stmt(self, b: Builder, stmt: qast.IfStmt):
        width = self.cregs[stmt.creg]
        if width > MAX_IF_WIDTH:
            raise UnsupportedError(f"creg {stmt.creg!r} of width {width} is too wide for an if comparison")
        value = self.creg_value(b, stmt.creg)
        target = b.one(K.CONST_INT, [], {"value": stmt.value})
        cond = b.one(K.CMPI, [value, target], {"pred": "eq"})
        body = stmt.body
        refs = [body.qubit] if isinstance(body, (qast.Measure, qast.Reset)) else list(body.qargs)
        keys = list(dict.fromkeys((r.reg, r.index) for r in refs))
        outer = {k: self.latest[k] for k in keys}

        then_block = Block()
        inner = Builder(then_block)
        self.statement(inner, body)
        inner.op(K.YIELD, [self.latest[k] for k in keys])
        else_block = Block()
        Builder(else_block).op(K.YIELD, [outer[k] for k in keys])

        op = b.op(
            K.SCF_IF,
            [cond],
            result_types=[QUBIT] * len(keys),
            regions=[Region([then_block]), Region([else_block])],
        )
        self.latest.update(zip(keys, op.results))


def raise_program(program: qast.QasmProgram) -> ModuleIR:
    """Raise a parsed OpenQASM program into a module with a single `@main`."""
    return _Raiser(program).run()


def raise_qasm(source: str) -> ModuleIR:
    from .qasm import parse_qasm

    return raise_program(parse_qasm(source))
