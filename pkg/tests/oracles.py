"""Independent oracles and random program generators used by the tests.

None of these reuse the algorithm under test: single use is judged by
enumerating control-flow paths, unitaries are built from explicit Kronecker
products of textbook matrices, and phase equivalence is checked on a grid.
"""
from __future__ import annotations

import cmath
import math
import random
from itertools import product

import numpy as np

from qssa.ir.builder import Builder
from qssa.ir.core import K, Block, FunctionDef, ModuleIR, Region, build_op
from qssa.ir.types import I64, QUBIT, QubitType

# ---------------------------------------------------------------------------
# single use by path enumeration (structured programs)


def _is_qubit(v) -> bool:
    return isinstance(v.type, QubitType)


def _combine(paths_a: set, paths_b: set) -> set:
    out = set()
    for (ua, da), (ub, db) in product(paths_a, paths_b):
        out.add((ua | ub, da or db or bool(ua & ub)))
    return out


def _defined_in(block) -> set:
    """ids of every value defined in `block` or in regions nested below it."""
    out = {id(a) for a in block.args}
    for op in block.ops:
        out.update(id(r) for r in op.results)
        for region in op.regions:
            for inner in region.blocks:
                out |= _defined_in(inner)
    return out


def _block_paths(block, loop_iterations: int) -> set:
    """Per static path through `block`: (outer qubit values used, whether any value was used twice).

    Values defined inside the block cannot be used after it, so paths are
    projected onto outer values; this keeps the path set small without
    losing any violation.
    """
    paths = {(frozenset(), False)}
    for op in block.ops:
        own_ids = [id(v) for v in op.operands if _is_qubit(v)]
        own = {(frozenset(own_ids), len(set(own_ids)) != len(own_ids))}
        if op.kind == K.SCF_IF:
            alts = _block_paths(op.regions[0].entry, loop_iterations) | _block_paths(
                op.regions[1].entry, loop_iterations
            )
        elif op.kind == K.SCF_FOR:
            # body-local values are fresh each iteration and already projected away
            body = _block_paths(op.regions[0].entry, loop_iterations)
            alts = set()
            seq = {(frozenset(), False)}
            for _ in range(loop_iterations + 1):
                alts |= seq
                seq = _combine(seq, body)
        else:
            alts = {(frozenset(), False)}
        paths = _combine(_combine(paths, own), alts)
    local = _defined_in(block)
    return {(frozenset(u - local), dup) for u, dup in paths}


def path_single_use_violated(func: FunctionDef, loop_iterations: int = 2) -> bool:
    """True iff some static path (loops taken 0..loop_iterations times) uses a qubit value twice."""
    return any(dup for _, dup in _block_paths(func.body.entry, loop_iterations))


# ---------------------------------------------------------------------------
# single use by all-pairs reachability (flat acyclic CFGs)


def cfg_single_use_violated(func: FunctionDef) -> bool:
    blocks = list(func.body.blocks)
    reach = {b: set() for b in blocks}

    def visit(b, seen):
        for s in b.successors:
            if s not in seen:
                seen.add(s)
                visit(s, seen)

    for b in blocks:
        visit(b, reach[b])
    sites: dict = {}
    for b in blocks:
        for op in b.ops:
            for v in op.operands:
                if _is_qubit(v):
                    sites.setdefault(v, []).append(b)
    for uses in sites.values():
        for i in range(len(uses)):
            for j in range(i + 1, len(uses)):
                a, b = uses[i], uses[j]
                if a is b or b in reach[a] or a in reach[b]:
                    return True
    return False


# ---------------------------------------------------------------------------
# random programs


ONE_QUBIT = (K.X, K.Y, K.Z, K.H, K.S, K.SDG, K.T, K.TDG)


class StructuredGenerator:
    """Random structured functions (scf.if / scf.for) of bounded size and nesting.

    Qubits are usually picked among values not yet consumed, so most
    programs are legal; occasionally a consumed or outer value is chosen
    to provoke violations.
    """

    def __init__(self, rng: random.Random, max_ops: int = 30, max_depth: int = 4, reuse: float = 0.08):
        self.rng = rng
        self.max_ops = max_ops
        self.max_depth = max_depth
        self.reuse = reuse
        self.count = 0
        self.consumed: set = set()

    def pick(self, scope: list):
        fresh = [v for v in scope if id(v) not in self.consumed]
        pool = fresh if fresh and self.rng.random() > self.reuse else scope
        v = self.rng.choice(pool)
        self.consumed.add(id(v))
        return v

    def const_cond(self, b: Builder):
        x = b.one(K.CONST_INT, [], {"value": self.rng.randrange(3)})
        y = b.one(K.CONST_INT, [], {"value": self.rng.randrange(3)})
        return b.one(K.CMPI, [x, y], {"pred": "eq"})

    def fill(self, block: Block, scope: list, depth: int, outer: list):
        b = Builder(block)
        scope = list(scope)
        steps = self.rng.randint(1, 6)
        for _ in range(steps):
            if self.count >= self.max_ops:
                break
            self.count += 1
            r = self.rng.random()
            if r < 0.15 or not scope:
                scope.append(b.one(K.ALLOC, [], {"size": 1}))
            elif r < 0.55:
                v = self.pick(scope)
                scope.append(b.one(self.rng.choice(ONE_QUBIT), [v]))
            elif r < 0.7 and len(scope) >= 2:
                c = self.pick(scope)
                t = self.pick(scope)
                if c is t:
                    self.consumed.discard(id(t))
                    t = self.pick([x for x in scope if x is not c] or scope)
                scope.extend(b.op(K.CNOT, [c, t]).results)
            elif r < 0.85 and depth < self.max_depth:
                cond = self.const_cond(b)
                n = self.rng.randint(0, 2)
                before = set(self.consumed)
                after = set()
                regions = []
                for _branch in range(2):
                    # branches are siblings: each starts from the same consumption state
                    self.consumed = set(before)
                    region = Region([Block()])
                    inner = self.fill(region.entry, scope, depth + 1, outer)
                    region.entry.append(build_op(K.YIELD, [self.pick(inner) for _ in range(n)]))
                    regions.append(region)
                    after |= self.consumed
                self.consumed = after
                op = b.op(K.SCF_IF, [cond], None, [QUBIT] * n, regions)
                scope.extend(op.results)
            elif depth < self.max_depth:
                lo = b.one(K.CONST_INT, [], {"value": 0})
                hi = b.one(K.CONST_INT, [], {"value": self.rng.randint(1, 3)})
                st = b.one(K.CONST_INT, [], {"value": 1})
                n = self.rng.randint(0, min(2, len(scope)))
                inits = [self.pick(scope) for _ in range(n)]
                body = Block([I64] + [QUBIT] * n)
                region = Region([body])
                carried = list(body.args[1:])
                # occasionally let the body see outer values directly (illegal unless unused)
                visible = carried + ([self.rng.choice(scope)] if self.rng.random() < 0.2 else [])
                inner = self.fill(body, visible, depth + 1, outer) if visible or self.rng.random() < 0.5 else []
                ys = []
                for arg in carried:
                    cand = [v for v in (inner or carried) if id(v) not in self.consumed] or (inner or carried)
                    y = self.rng.choice(cand)
                    self.consumed.add(id(y))
                    ys.append(y)
                body.append(build_op(K.YIELD, ys))
                op = b.op(K.SCF_FOR, [lo, hi, st, *inits], None, [QUBIT] * n, [region])
                scope.extend(op.results)
        return scope

    def function(self) -> FunctionDef:
        func = FunctionDef("main")
        self.fill(func.entry, [], 0, [])
        func.entry.append(build_op(K.RETURN, []))
        return func


def random_structured_function(seed: int, max_ops: int = 30) -> FunctionDef:
    return StructuredGenerator(random.Random(seed), max_ops=max_ops).function()


def random_cfg_function(seed: int, max_blocks: int = 12) -> FunctionDef:
    """Flat acyclic CFG; qubits are allocated in the entry block and touched anywhere."""
    rng = random.Random(seed)
    n_blocks = rng.randint(2, max_blocks)
    func = FunctionDef("main")
    blocks = [func.entry] + [Block() for _ in range(n_blocks - 1)]
    for blk in blocks[1:]:
        func.body.add_block(blk)
    entry = Builder(blocks[0])
    wires = [entry.one(K.ALLOC, [], {"size": 1}) for _ in range(rng.randint(1, 3))]
    for i, blk in enumerate(blocks):
        b = Builder(blk)
        local = []
        for _ in range(rng.randint(0, 3)):
            r = rng.random()
            if local and r < 0.6:
                v = local.pop(rng.randrange(len(local)))
            elif r < 0.85:
                v = b.one(K.ALLOC, [], {"size": 1})
            else:
                v = rng.choice(wires)
            local.append(b.one(rng.choice(ONE_QUBIT), [v]))
        if i == len(blocks) - 1:
            b.op(K.RETURN, [])
        elif rng.random() < 0.6 and i + 2 < len(blocks):
            cond = b.one(K.CMPI, [b.one(K.CONST_INT, [], {"value": 0}), b.one(K.CONST_INT, [], {"value": 1})],
                         {"pred": "eq"})
            other = blocks[rng.randint(i + 2, len(blocks) - 1)]
            b.op(K.COND_BR, [cond], {"n_true": 0}, successors=[blocks[i + 1], other])
        else:
            b.op(K.BR, [], successors=[blocks[i + 1]])
    return func


def as_module(func: FunctionDef) -> ModuleIR:
    return ModuleIR([func])


# ---------------------------------------------------------------------------
# unitaries by Kronecker embedding

_I = np.eye(2, dtype=complex)
_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def textbook_matrix(kind: str, angles=()) -> np.ndarray:
    s2 = 1 / math.sqrt(2)
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "Y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if kind == "Z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if kind == "H":
        return np.array([[s2, s2], [s2, -s2]], dtype=complex)
    if kind == "S":
        return np.diag([1, 1j])
    if kind == "Sdg":
        return np.diag([1, -1j])
    if kind == "T":
        return np.diag([1, cmath.exp(1j * math.pi / 4)])
    if kind == "Tdg":
        return np.diag([1, cmath.exp(-1j * math.pi / 4)])
    if kind == "Rx":
        (a,) = angles
        return np.array([[math.cos(a / 2), -1j * math.sin(a / 2)], [-1j * math.sin(a / 2), math.cos(a / 2)]])
    if kind == "Ry":
        (a,) = angles
        return np.array([[math.cos(a / 2), -math.sin(a / 2)], [math.sin(a / 2), math.cos(a / 2)]], dtype=complex)
    if kind == "Rz":
        (a,) = angles
        return np.diag([cmath.exp(-0.5j * a), cmath.exp(0.5j * a)])
    if kind == "U":
        t, p, l = angles
        return np.array(
            [
                [math.cos(t / 2), -cmath.exp(1j * l) * math.sin(t / 2)],
                [cmath.exp(1j * p) * math.sin(t / 2), cmath.exp(1j * (p + l)) * math.cos(t / 2)],
            ]
        )
    raise KeyError(kind)


def embed_one(u: np.ndarray, target: int, n: int) -> np.ndarray:
    """Full matrix of a 1-qubit gate; qubit 0 is the least significant bit."""
    out = np.eye(1, dtype=complex)
    for q in reversed(range(n)):
        out = np.kron(out, u if q == target else _I)
    return out


def embed_cnot(control: int, target: int, n: int) -> np.ndarray:
    a = np.eye(1, dtype=complex)
    b = np.eye(1, dtype=complex)
    x = textbook_matrix("X")
    for q in reversed(range(n)):
        a = np.kron(a, _P0 if q == control else _I)
        b = np.kron(b, _P1 if q == control else (x if q == target else _I))
    return a + b


def circuit_matrix(gates, n: int) -> np.ndarray:
    """gates: sequence of (kind, angles, targets) applied left to right."""
    u = np.eye(2**n, dtype=complex)
    for kind, angles, targets in gates:
        if kind == "CNOT":
            g = embed_cnot(targets[0], targets[1], n)
        else:
            g = embed_one(textbook_matrix(kind, angles), targets[0], n)
        u = g @ u
    return u


_KIND_BY_NAME = {"X": K.X, "Y": K.Y, "Z": K.Z, "H": K.H, "S": K.S, "Sdg": K.SDG, "T": K.T, "Tdg": K.TDG,
                 "Rx": K.RX, "Ry": K.RY, "Rz": K.RZ, "U": K.U, "CNOT": K.CNOT}
_ANGLE_NAMES = {"Rx": ("angle",), "Ry": ("angle",), "Rz": ("angle",), "U": ("theta", "phi", "lambda")}


def random_gate_list(rng: random.Random, n: int, length: int) -> list:
    gates = []
    for _ in range(length):
        kind = rng.choice(list(_KIND_BY_NAME) if n > 1 else [k for k in _KIND_BY_NAME if k != "CNOT"])
        if kind == "CNOT":
            gates.append((kind, (), tuple(rng.sample(range(n), 2))))
        else:
            angles = tuple(rng.uniform(-math.pi, math.pi) for _ in _ANGLE_NAMES.get(kind, ()))
            gates.append((kind, angles, (rng.randrange(n),)))
    return gates


def module_from_gates(gates, n: int) -> ModuleIR:
    func = FunctionDef("main", (), [QUBIT] * n)
    b = Builder(func.entry)
    wires = [b.one(K.ALLOC, [], {"size": 1}) for _ in range(n)]
    for kind, angles, targets in gates:
        attrs = dict(zip(_ANGLE_NAMES.get(kind, ()), angles))
        op = b.op(_KIND_BY_NAME[kind], [wires[t] for t in targets], attrs)
        for t, r in zip(targets, op.results):
            wires[t] = r
    b.op(K.RETURN, wires)
    return ModuleIR([func])


# ---------------------------------------------------------------------------
# global phase by grid search


def phase_grid_distance(a: np.ndarray, b: np.ndarray, samples: int = 10_000) -> float:
    """min over sampled unit phases c of max|a - c b|."""
    phases = np.exp(2j * np.pi * np.arange(samples) / samples)
    diffs = np.abs(a[None, :, :] - phases[:, None, None] * b[None, :, :])
    return float(diffs.reshape(samples, -1).max(axis=1).min())


def phase_grid_resolution(b: np.ndarray, samples: int = 10_000) -> float:
    """Worst-case error the grid adds: |1 - e^{i pi/samples}| * max|b|."""
    return abs(1 - cmath.exp(1j * math.pi / samples)) * float(np.abs(b).max())


# ---------------------------------------------------------------------------
# random OpenQASM circuits

_QASM_1Q = ("x", "y", "z", "h", "s", "sdg", "t", "tdg", "sx")
_QASM_ROT = ("rx", "ry", "rz", "u1")


def random_qasm(rng: random.Random, n_qubits: int, length: int, measure_prob: float = 0.1) -> str:
    """A random circuit biased towards adjacent cancellable pairs."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{n_qubits}];", f"creg c[{n_qubits}];"]
    last = None
    for _ in range(length):
        r = rng.random()
        if last is not None and r < 0.25:
            lines.append(last)  # repeat: often cancels
            last = None
            continue
        if r < 0.25 + measure_prob:
            q = rng.randrange(n_qubits)
            lines.append(f"measure q[{q}] -> c[{q}];")
            last = None
            continue
        r = rng.random()
        q = rng.randrange(n_qubits)
        if r < 0.45:
            stmt = f"{rng.choice(_QASM_1Q)} q[{q}];"
        elif r < 0.65:
            stmt = f"{rng.choice(_QASM_ROT)}({rng.uniform(-3, 3):.6f}) q[{q}];"
        elif r < 0.75:
            angles = ",".join(f"{rng.uniform(-3, 3):.6f}" for _ in range(3))
            stmt = f"u3({angles}) q[{q}];"
        elif n_qubits > 1 and r < 0.92:
            a, b = rng.sample(range(n_qubits), 2)
            stmt = f"{rng.choice(('cx', 'cx', 'cz', 'swap'))} q[{a}],q[{b}];"
        elif r < 0.96:
            stmt = f"if(c=={rng.randrange(2 ** n_qubits)}) {rng.choice(_QASM_1Q)} q[{q}];"
        else:
            stmt = f"reset q[{q}];"
        lines.append(stmt)
        last = stmt if not stmt.startswith(("if", "reset")) else None
    return "\n".join(lines) + "\n"
