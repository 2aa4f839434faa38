"""Circuit metrics: gate count, depth and the optimization ratio.

Counting convention, shared by the IR and the OpenQASM side:

* gates, measurements and resets count one each; a measurement of a
  `qubit<n>` array is still one op;
* array plumbing (split/concat/cast/dim), barriers, memory and classical
  arithmetic are free;
* depth is tracked per physical wire; a counted op sets every wire it
  touches to one past the deepest of them, except measurement, which
  advances each of its wires independently;
* both branches of a conditional are counted, and its depth is the deeper
  branch; a loop with a constant trip count contributes its body that many
  times.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Union

from .ir.core import GATE_KINDS, K, FunctionDef, ModuleIR, Operation, Region, Value
from .ir.types import QubitType
from .opt.unroll import trip_count
from .qasm import ast as qast


class Unbounded(ValueError):
    """The op count depends on run-time values (a loop without constant bounds or recursion)."""


@dataclass
class CircuitMetrics:
    gate_count: int = 0
    depth: int = 0
    histogram: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"gate_count": self.gate_count, "depth": self.depth, "histogram": dict(sorted(self.histogram.items()))}


_HIST_NAMES = {
    K.X: "x", K.Y: "y", K.Z: "z", K.H: "h", K.S: "s", K.SDG: "sdg", K.T: "t", K.TDG: "tdg",
    K.RX: "rx", K.RY: "ry", K.RZ: "rz", K.U: "u3", K.CNOT: "cx", K.GATE: "gate",
    K.MEASURE: "measure", K.RESET: "reset",
}
# Loops longer than this are summarised instead of replayed; depth is then an upper bound.
_REPLAY_LIMIT = 100_000


def _wires(v: Value, depths: dict) -> tuple:
    return depths.get(v, (0,) * (v.type.size if v.type.is_static else 1))


class _ModuleCounter:
    def __init__(self, module: ModuleIR):
        self.module = module
        self.hist: Counter = Counter()
        self.stack: list[str] = []

    def function(self, func: FunctionDef, arg_depths: list, weight: int) -> list:
        if func.name in self.stack:
            raise Unbounded(f"recursive call to @{func.name}")
        self.stack.append(func.name)
        depths = {a: d for a, d in zip(func.args, arg_depths) if d is not None}
        out = self.region(func.body, depths, weight)
        self.stack.pop()
        return out

    def region(self, region: Region, depths: dict, weight: int) -> list:
        """Walk the entry block; return per-operand wire depths of its terminator."""
        if len(region.blocks) != 1:
            raise Unbounded("metrics are defined for structured control flow only")
        for op in region.entry.ops:
            if op.kind in (K.RETURN, K.YIELD):
                return [depths.get(v) if isinstance(v.type, QubitType) else None for v in op.operands]
            self.op(op, depths, weight)
        return []

    def op(self, op: Operation, depths: dict, weight: int):
        k = op.kind
        qs = [v for v in op.operands if isinstance(v.type, QubitType)]
        if k in GATE_KINDS or k == K.RESET:
            self.hist[_HIST_NAMES[k]] += weight
            d = max((x for v in qs for x in _wires(v, depths)), default=0) + 1
            for v, r in zip(qs, op.results):
                depths[r] = (d,) * len(_wires(v, depths))
        elif k == K.MEASURE:
            self.hist["measure"] += weight
            depths[op.results[1]] = tuple(x + 1 for x in _wires(qs[0], depths))
        elif k == K.BARRIER:
            for v, r in zip(qs, op.results):
                depths[r] = _wires(v, depths)
        elif k == K.SPLIT:
            src = _wires(qs[0], depths)
            a, b = op.results
            if a.type.is_static and b.type.is_static and len(src) == a.type.size + b.type.size:
                depths[a], depths[b] = src[: a.type.size], src[a.type.size :]
            else:
                depths[a] = depths[b] = (max(src),)
        elif k == K.CONCAT:
            a, b = (_wires(v, depths) for v in qs)
            depths[op.result] = a + b if op.result.type.is_static else (max(a + b),)
        elif k == K.CAST:
            src = _wires(qs[0], depths)
            depths[op.result] = src if op.result.type.is_static and len(src) == op.result.type.size else (
                (max(src),) * (op.result.type.size or 1)
            )
        elif k == K.DIM:
            depths[op.results[1]] = _wires(qs[0], depths)
        elif k == K.SCF_IF:
            branches = []
            for r in op.regions:
                branches.append(self.region(r, dict(depths), weight))
            for i, res in enumerate(op.results):
                if isinstance(res.type, QubitType):
                    ds = [b[i] for b in branches if b[i] is not None]
                    depths[res] = tuple(max(col) for col in zip(*ds)) if ds else _wires(res, depths)
        elif k == K.SCF_FOR:
            self.loop(op, depths, weight)
        elif k == K.CALL:
            callee = self.module.get(op.attrs["callee"])
            if callee is None:
                raise Unbounded(f"call to unknown function @{op.attrs['callee']}")
            outs = self.function(callee, [_wires(v, depths) if isinstance(v.type, QubitType) else None
                                          for v in op.operands], weight)
            for r, d in zip(op.results, outs):
                if d is not None:
                    depths[r] = d

    def loop(self, op: Operation, depths: dict, weight: int):
        n = trip_count(op)
        if n is None:
            raise Unbounded("loop without constant trip count")
        body = op.regions[0]
        _, *iter_args = body.entry.args
        carried = [_wires(v, depths) if isinstance(v.type, QubitType) else None for v in op.operands[3:]]
        if n == 0:
            outs = carried
        elif n <= _REPLAY_LIMIT:
            # count the body once with the full weight, replay only the depth
            saved, self.hist = self.hist, Counter()
            once = None
            for _ in range(n):
                local = {a: d for a, d in zip(iter_args, carried) if d is not None}
                carried = self.region(body, local, weight)
                if once is None:
                    once = self.hist
                self.hist = Counter()
            self.hist = saved
            for name, c in once.items():
                self.hist[name] += c * n
            outs = carried
        else:
            saved = self.hist
            self.hist = Counter()
            local = {a: (0,) * len(d) for a, d in zip(iter_args, carried) if d is not None}
            once = self.region(body, local, weight)
            for name, c in self.hist.items():
                saved[name] += c * n
            self.hist = saved
            outs = [None if c is None else tuple(x + n * max(o or (0,)) for x in c) for c, o in zip(carried, once)]
        for r, d in zip(op.results, outs):
            if d is not None:
                depths[r] = d


def _module_metrics(module: ModuleIR) -> CircuitMetrics:
    main = module.main
    if main is None:
        raise ValueError("module has no @main")
    counter = _ModuleCounter(module)
    depths: dict = {}
    counter.stack.append(main.name)
    counter.region(main.body, depths, 1)
    depth = max((x for d in depths.values() for x in d), default=0)
    hist = {k: v for k, v in counter.hist.items() if v}
    return CircuitMetrics(sum(hist.values()), depth, hist)


def _qasm_metrics(program: qast.QasmProgram) -> CircuitMetrics:
    hist: Counter = Counter()
    wire: dict = {}

    def touch(refs, each: bool):
        if each:
            for r in refs:
                wire[r] = wire.get(r, 0) + 1
        else:
            d = max((wire.get(r, 0) for r in refs), default=0) + 1
            for r in refs:
                wire[r] = d

    def stmt(s):
        if isinstance(s, qast.GateApply):
            hist[s.name] += 1
            touch(s.qargs, False)
        elif isinstance(s, qast.Measure):
            hist["measure"] += 1
            touch([s.qubit], True)
        elif isinstance(s, qast.Reset):
            hist["reset"] += 1
            touch([s.qubit], False)
        elif isinstance(s, qast.IfStmt):
            stmt(s.body)

    for s in program.statements:
        stmt(s)
    return CircuitMetrics(sum(hist.values()), max(wire.values(), default=0), dict(hist))


def compute_metrics(obj: Union[ModuleIR, qast.QasmProgram]) -> CircuitMetrics:
    """Gate count, depth and per-kind histogram of `@main` or of a QASM program."""
    if isinstance(obj, qast.QasmProgram):
        return _qasm_metrics(obj)
    return _module_metrics(obj)


def optimization_ratio(before: Union[CircuitMetrics, int], after: Union[CircuitMetrics, int]) -> float:
    """1 - after/before, or 0 when nothing was there to optimize."""
    b = before.gate_count if isinstance(before, CircuitMetrics) else int(before)
    a = after.gate_count if isinstance(after, CircuitMetrics) else int(after)
    return (b - a) / b if b > 0 else 0.0
