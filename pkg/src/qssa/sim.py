"""Exact statevector simulation: the correctness oracle for every transformation.

Qubit 0 is the least-significant bit of the amplitude index.  Distributions
are computed exactly by branching on each measurement (no sampling).  The
key of an outcome is the final content of the classical bit cells in
allocation order (character i is cell i); a module without bit cells is
keyed by its measurement record instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .gates import STANDARD_MATRICES, X, kind_matrix
from .ir.core import (
    ANGLE_ATTRS,
    GATE_1Q,
    K,
    TERMINATORS,
    Block,
    ModuleIR,
    Operation,
    Region,
)
from .ir.types import BitTensorType, QubitType
from .qasm import ast as qast
from .qasm.errors import UnsupportedError
from .qasm.parser import gate_signatures

MAX_QUBITS = 12
MAX_MEASURED = 20
MAX_UNITARY_QUBITS = 10
STATE_QUBIT_LIMIT = 14
PRUNE = 1e-14  # conditional branch probabilities below this are dropped


class SimulationError(ValueError):
    pass


class TooLarge(SimulationError):
    pass


class HasMeasurement(SimulationError):
    pass


class BadTarget(SimulationError):
    pass


class ShapeMismatch(SimulationError):
    pass


# ---------------------------------------------------------------------------
# statevector kernel


def apply_matrix(amps: np.ndarray, n: int, matrix: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to `targets` of an n-qubit amplitude array.

    Trailing axes of `amps` beyond the first are batch axes (used to evolve
    all columns of a unitary at once).
    """
    k = len(targets)
    if len(set(targets)) != k or any(not 0 <= t < n for t in targets):
        raise BadTarget(f"targets {list(targets)} invalid for {n} qubit(s)")
    if matrix.shape != (2**k, 2**k):
        raise BadTarget(f"{matrix.shape} matrix applied to {k} target(s)")
    batch = amps.shape[1:]
    tensor = amps.reshape((2,) * n + batch)
    axes = [n - 1 - q for q in reversed(targets)]
    m = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * k))
    out = np.tensordot(m, tensor, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(amps.shape)


@dataclass
class Statevector:
    n: int
    amps: np.ndarray

    @classmethod
    def zero(cls, n: int) -> "Statevector":
        if n > STATE_QUBIT_LIMIT:
            raise TooLarge(f"{n} qubits exceed the {STATE_QUBIT_LIMIT}-qubit limit")
        amps = np.zeros(2**n, dtype=complex)
        amps[0] = 1
        return cls(n, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


def apply_gate(state: Statevector, kind, angles: Sequence[float], targets: Sequence[int]) -> Statevector:
    """Apply a named gate kind (or an explicit unitary matrix) to `targets`."""
    matrix = np.asarray(kind, dtype=complex) if isinstance(kind, np.ndarray) else kind_matrix(kind, angles)
    return Statevector(state.n, apply_matrix(state.amps, state.n, matrix, targets))


def _measure_qubit(amps: np.ndarray, n: int, q: int):
    """Yield (bit, probability, collapsed and renormalised amplitudes)."""
    view = amps.reshape(2 ** (n - 1 - q), 2, 2**q)
    p1 = float(np.sum(np.abs(view[:, 1, :]) ** 2))
    p0 = max(0.0, 1.0 - p1)
    p1 = min(1.0, p1)
    for bit, p in ((0, p0), (1, p1)):
        if p < PRUNE:
            continue
        out = np.zeros_like(view)
        out[:, bit, :] = view[:, bit, :] / math.sqrt(p)
        yield bit, p, out.reshape(amps.shape)


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def equiv_up_to_global_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff a == c*b (max-norm within tol) for a unit complex c.

    c is taken from the ratio at the largest-magnitude entry of b.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ShapeMismatch(f"{a.shape} vs {b.shape}")
    if a.size == 0:
        return True
    idx = np.unravel_index(int(np.argmax(np.abs(b))), b.shape)
    if abs(b[idx]) == 0:
        return float(np.max(np.abs(a))) <= tol
    ratio = a[idx] / b[idx]
    c = ratio / abs(ratio) if abs(ratio) > 0 else 1.0
    return float(np.max(np.abs(a - c * b))) <= tol


# ---------------------------------------------------------------------------
# module interpreter


@dataclass
class _World:
    prob: float
    amps: np.ndarray
    n: int
    memory: list = field(default_factory=list)
    record: list = field(default_factory=list)
    measured: int = 0

    def fork(self, prob: float, amps: np.ndarray) -> "_World":
        return _World(prob, amps, self.n, list(self.memory), list(self.record), self.measured)


class _Interpreter:
    def __init__(self, module: ModuleIR, unitary: bool = False):
        self.module = module
        self.unitary = unitary

    # qubit bookkeeping
    def allocate(self, w: _World, count: int) -> tuple:
        limit = MAX_UNITARY_QUBITS if self.unitary else MAX_QUBITS
        if w.n + count > limit:
            raise TooLarge(f"more than {limit} qubits")
        start = w.n
        for _ in range(count):
            if self.unitary:
                w.amps = np.kron(np.eye(2, dtype=complex), w.amps)
            else:
                w.amps = np.concatenate([w.amps, np.zeros_like(w.amps)])
            w.n += 1
        return tuple(range(start, start + count))

    def measure(self, w: _World, qubits: tuple) -> Iterator[tuple[_World, tuple]]:
        if self.unitary:
            raise HasMeasurement("circuit contains a measurement or reset")
        if w.measured + len(qubits) > MAX_MEASURED:
            raise TooLarge(f"more than {MAX_MEASURED} measured bits on one path")

        def rec(i: int, world: _World, bits: tuple):
            if i == len(qubits):
                yield world, bits
                return
            for bit, p, amps in _measure_qubit(world.amps, world.n, qubits[i]):
                child = world.fork(world.prob * p, amps)
                child.measured += 1
                yield from rec(i + 1, child, bits + (bit,))

        yield from rec(0, w, ())

    # execution
    def run_function(self, func, args: list, w: _World) -> Iterator[tuple[_World, list]]:
        env: dict = dict(zip(func.args, args))
        yield from self.run_region(func.body, env, w)

    def run_region(self, region: Region, env: dict, w: _World, visits: int = 0) -> Iterator[tuple[_World, list]]:
        yield from self._run_from(region.entry, env, w, 0)

    def _run_from(self, block: Block, env: dict, w: _World, hops: int):
        if hops > 10_000:
            raise SimulationError("control flow does not terminate")
        for w2, env2, term in self.run_block(block, 0, env, w):
            vals = [env2[v] for v in term.operands]
            if term.kind in (K.RETURN, K.YIELD):
                yield w2, vals
            elif term.kind == K.BR:
                target = term.successors[0]
                yield from self._run_from(target, {**env2, **dict(zip(target.args, vals))}, w2, hops + 1)
            else:
                n_true = term.attrs.get("n_true", 0)
                if vals[0]:
                    target, passed = term.successors[0], vals[1 : 1 + n_true]
                else:
                    target, passed = term.successors[1], vals[1 + n_true :]
                yield from self._run_from(target, {**env2, **dict(zip(target.args, passed))}, w2, hops + 1)

    def run_block(self, block: Block, i: int, env: dict, w: _World):
        """Yield (world, env, terminator) for every branch leaving the block."""
        ops = block.ops
        while i < len(ops):
            op = ops[i]
            k = op.kind
            if k in TERMINATORS:
                yield w, env, op
                return
            if k == K.MEASURE:
                qs = env[op.operands[0]]
                for w2, bits in self.measure(w, qs):
                    w2.record.extend(bits)
                    env2 = dict(env)
                    env2[op.results[0]] = bits
                    env2[op.results[1]] = qs
                    yield from self.run_block(block, i + 1, env2, w2)
                return
            if k == K.RESET:
                qs = env[op.operands[0]]
                for w2, bits in self.measure(w, qs):
                    if bits[0]:
                        w2.amps = apply_matrix(w2.amps, w2.n, X, qs)
                    env2 = dict(env)
                    env2[op.results[0]] = qs
                    yield from self.run_block(block, i + 1, env2, w2)
                return
            if k in (K.SCF_IF, K.SCF_FOR, K.CALL):
                for w2, vals in self.run_nested(op, env, w):
                    env2 = dict(env)
                    env2.update(zip(op.results, vals))
                    yield from self.run_block(block, i + 1, env2, w2)
                return
            self.step(op, env, w)
            i += 1
        raise SimulationError("block without terminator")

    def run_nested(self, op: Operation, env: dict, w: _World) -> Iterator[tuple[_World, list]]:
        if op.kind == K.SCF_IF:
            region = op.regions[0] if env[op.operands[0]] else op.regions[1]
            yield from self.run_region(region, dict(env), w)
        elif op.kind == K.SCF_FOR:
            lo, hi, step = (env[v] for v in op.operands[:3])
            if step <= 0:
                raise SimulationError("scf.for step must be positive")
            body = op.regions[0].entry
            frontier = [(w, [env[v] for v in op.operands[3:]])]
            for iv in range(lo, hi, step):
                nxt = []
                for world, iters in frontier:
                    inner = dict(env)
                    inner.update(zip(body.args, [iv, *iters]))
                    nxt.extend(self.run_region(op.regions[0], inner, world))
                frontier = nxt
            yield from frontier
        else:
            callee = self.module.get(op.attrs["callee"])
            if callee is None:
                raise SimulationError(f"call to unknown function @{op.attrs['callee']}")
            yield from self.run_function(callee, [env[v] for v in op.operands], w)

    def step(self, op: Operation, env: dict, w: _World):
        k = op.kind
        get = env.__getitem__
        if k in GATE_1Q or k == K.CNOT or k == K.GATE:
            qubit_ops = [v for v in op.operands if isinstance(v.type, QubitType)]
            targets = tuple(q for v in qubit_ops for q in get(v))
            if k == K.GATE:
                matrix = op.attrs["matrix"]
            else:
                names = ANGLE_ATTRS.get(k, ())
                if len(op.operands) > 1:
                    angles = [get(v) for v in op.operands[1:]]
                else:
                    angles = [op.attrs[n] for n in names]
                matrix = kind_matrix(k, angles)
            w.amps = apply_matrix(w.amps, w.n, matrix, targets)
            for v, r in zip(qubit_ops, op.results):
                env[r] = get(v)
        elif k == K.ALLOC:
            size = get(op.operands[0]) if op.operands else op.attrs["size"]
            if size < 1:
                raise SimulationError("allocation of fewer than one qubit")
            env[op.result] = self.allocate(w, size)
        elif k == K.SPLIT:
            qs = get(op.operands[0])
            if len(op.operands) == 3:
                a, b = get(op.operands[1]), get(op.operands[2])
                if a + b != len(qs) or a < 1 or b < 1:
                    raise SimulationError(f"cannot split {len(qs)} qubits into ({a}, {b})")
            else:
                a = op.results[0].type.size
            env[op.results[0]], env[op.results[1]] = qs[:a], qs[a:]
        elif k == K.CONCAT:
            env[op.result] = get(op.operands[0]) + get(op.operands[1])
        elif k == K.CAST:
            qs = get(op.operands[0])
            size = op.result.type.size
            if size is not None and size != len(qs):
                raise SimulationError(f"cannot cast {len(qs)} qubits to qubit<{size}>")
            env[op.result] = qs
        elif k == K.DIM:
            qs = get(op.operands[0])
            env[op.results[0]] = len(qs)
            env[op.results[1]] = qs
        elif k == K.BARRIER:
            for v, r in zip(op.operands, op.results):
                env[r] = get(v)
        elif k in (K.CONST_INT, K.CONST_ANGLE):
            env[op.result] = op.attrs["value"]
        elif k == K.ADDI:
            env[op.result] = int(get(op.operands[0])) + int(get(op.operands[1]))
        elif k == K.SUBI:
            env[op.result] = int(get(op.operands[0])) - int(get(op.operands[1]))
        elif k == K.MULI:
            env[op.result] = int(get(op.operands[0])) * int(get(op.operands[1]))
        elif k == K.CMPI:
            a, b = int(get(op.operands[0])), int(get(op.operands[1]))
            env[op.result] = {
                "eq": a == b, "ne": a != b, "slt": a < b, "sle": a <= b, "sgt": a > b, "sge": a >= b
            }[op.attrs["pred"]]
        elif k == K.MEM_ALLOC_BIT:
            w.memory.append(0)
            env[op.result] = len(w.memory) - 1
        elif k == K.MEM_STORE_BIT:
            src = get(op.operands[0])
            bit = src[op.attrs.get("index", 0)] if isinstance(op.operands[0].type, BitTensorType) else src
            w.memory[get(op.operands[1])] = int(bool(bit))
        elif k == K.MEM_LOAD_BIT:
            env[op.result] = bool(w.memory[get(op.operands[0])])
        else:
            raise SimulationError(f"cannot simulate {k.value}")

    def entry_world(self) -> tuple[_World, list]:
        main = self.module.main
        if main is None:
            raise SimulationError("module has no @main")
        w = _World(1.0, np.ones((1, 1), dtype=complex) if self.unitary else np.ones(1, dtype=complex), 0)
        args = []
        for t in main.arg_types:
            if not isinstance(t, QubitType) or not t.is_static:
                raise SimulationError(f"@main argument of type {t} cannot be simulated")
            args.append(self.allocate(w, t.size))
        return w, args


def _has_cells(module: ModuleIR) -> bool:
    return any(op.kind == K.MEM_ALLOC_BIT for op in module.walk())


def run_distribution(module: ModuleIR) -> dict[str, float]:
    """Exact outcome distribution of `@main` (bitstring -> probability)."""
    interp = _Interpreter(module)
    w, args = interp.entry_world()
    cells = _has_cells(module)
    dist: dict[str, float] = {}
    for world, _ in interp.run_function(module.main, args, w):
        bits = world.memory if cells else world.record
        key = "".join(str(b) for b in bits)
        dist[key] = dist.get(key, 0.0) + world.prob
    return dist


def circuit_unitary(module: ModuleIR) -> np.ndarray:
    """Unitary of a measurement-free `@main`; qubit i is the i-th allocated qubit."""
    interp = _Interpreter(module, unitary=True)
    w, args = interp.entry_world()
    results = list(interp.run_function(module.main, args, w))
    if len(results) != 1:
        raise SimulationError("circuit is not deterministic")
    return results[0][0].amps


def final_state(module: ModuleIR) -> Statevector:
    """Statevector at the end of a measurement-free `@main`."""
    interp = _Interpreter(module)
    w, args = interp.entry_world()
    results = list(interp.run_function(module.main, args, w))
    if len(results) != 1:
        raise HasMeasurement("program branches on measurement")
    world = results[0][0]
    return Statevector(world.n, world.amps)


# ---------------------------------------------------------------------------
# reference semantics of OpenQASM programs


class _QasmRunner:
    def __init__(self, program: qast.QasmProgram):
        self.program = program
        self.sigs = gate_signatures(program)
        self.user_defs = program.gate_defs()
        self.opaque = {s.name for s in program.statements if isinstance(s, qast.OpaqueDecl)}
        self.qubit_index: dict = {}
        for reg in program.qregs():
            for i in range(reg.size):
                self.qubit_index[(reg.name, i)] = len(self.qubit_index)
        self.bit_index: dict = {}
        self.creg_bits: dict = {}
        for reg in program.cregs():
            self.creg_bits[reg.name] = []
            for i in range(reg.size):
                self.creg_bits[reg.name].append(len(self.bit_index))
                self.bit_index[(reg.name, i)] = len(self.bit_index)
        if len(self.qubit_index) > MAX_QUBITS:
            raise TooLarge(f"{len(self.qubit_index)} qubits exceed the limit of {MAX_QUBITS}")

    def gate_unitaries(self, name: str, params: Sequence[float], targets: Sequence[int]):
        """Expand a gate application to (matrix, targets) pairs."""
        if name in self.opaque:
            raise UnsupportedError(f"opaque gate {name!r} cannot be simulated")
        if name not in self.user_defs and name in STANDARD_MATRICES:
            yield STANDARD_MATRICES[name](*params), list(targets)
            return
        gdef = self.sigs[name].definition
        env = dict(zip(gdef.params, params))
        formals = dict(zip(gdef.qargs, targets))
        for stmt in gdef.body:
            if isinstance(stmt, qast.GateApply):
                vals = [e.evaluate(env) for e in stmt.params]
                yield from self.gate_unitaries(stmt.name, vals, [formals[a] for a in stmt.qargs])

    def run(self) -> dict[str, float]:
        n = len(self.qubit_index)
        start = _World(1.0, Statevector.zero(n).amps, n, [0] * len(self.bit_index))
        frontier = [start]
        for stmt in self.program.statements:
            nxt = []
            for w in frontier:
                nxt.extend(self.exec(stmt, w))
            frontier = nxt
        dist: dict[str, float] = {}
        for w in frontier:
            key = "".join(str(b) for b in w.memory)
            dist[key] = dist.get(key, 0.0) + w.prob
        return dist

    def _measure(self, w: _World, q: int):
        if w.measured >= MAX_MEASURED:
            raise TooLarge(f"more than {MAX_MEASURED} measurements on one path")
        for bit, p, amps in _measure_qubit(w.amps, w.n, q):
            child = w.fork(w.prob * p, amps)
            child.measured += 1
            yield bit, child

    def exec(self, stmt, w: _World) -> list[_World]:
        if isinstance(stmt, qast.GateApply):
            targets = [self.qubit_index[(r.reg, r.index)] for r in stmt.qargs]
            for matrix, tg in self.gate_unitaries(stmt.name, stmt.params, targets):
                w.amps = apply_matrix(w.amps, w.n, matrix, tg)
            return [w]
        if isinstance(stmt, qast.Measure):
            q = self.qubit_index[(stmt.qubit.reg, stmt.qubit.index)]
            out = []
            for bit, child in self._measure(w, q):
                child.memory[self.bit_index[(stmt.bit.reg, stmt.bit.index)]] = bit
                out.append(child)
            return out
        if isinstance(stmt, qast.Reset):
            q = self.qubit_index[(stmt.qubit.reg, stmt.qubit.index)]
            out = []
            for bit, child in self._measure(w, q):
                if bit:
                    child.amps = apply_matrix(child.amps, child.n, X, [q])
                out.append(child)
            return out
        if isinstance(stmt, qast.IfStmt):
            value = sum(w.memory[b] << j for j, b in enumerate(self.creg_bits[stmt.creg]))
            return self.exec(stmt.body, w) if value == stmt.value else [w]
        return [w]


def simulate_qasm(program: qast.QasmProgram) -> dict[str, float]:
    """Reference outcome distribution of an OpenQASM program, keyed by all creg bits in declaration order."""
    return _QasmRunner(program).run()
