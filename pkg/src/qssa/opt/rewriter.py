"""Generic driver applying a pattern table to a fixpoint."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..ir.core import ModuleIR, Operation, Value, build_op
from ..ir.types import IRTypeError, QubitType
from .patterns import PATTERNS, Match, New, NewRes, RewritePattern, Var, match


@dataclass
class PassReport:
    name: str
    rewrites: int = 0
    ops_before: int = 0
    ops_after: int = 0
    notes: list = field(default_factory=list)
    by_pattern: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "pass": self.name,
            "rewrites": self.rewrites,
            "ops_before": self.ops_before,
            "ops_after": self.ops_after,
            "by_pattern": dict(sorted(self.by_pattern.items())),
            "notes": list(self.notes),
        }


def count_ops(module: ModuleIR) -> int:
    return sum(1 for _ in module.walk())


def _materialize(m: Match, exprs: tuple) -> tuple[list[Value], list[Operation]]:
    built: dict[str, Operation] = {}
    new_ops: list[Operation] = []
    used_qubits: list[Value] = []

    def value_of(e) -> Value:
        if isinstance(e, Value):
            return e
        if isinstance(e, Var):
            return m.vars[e.name]
        if isinstance(e, NewRes):
            return node(e.new).results[e.index]
        if isinstance(e, New):
            return node(e).results[0]
        raise TypeError(f"bad replacement expression {e!r}")

    def node(n: New) -> Operation:
        if n.key not in built:
            operands = [value_of(x) for x in n.operands]
            used_qubits.extend(v for v in operands if isinstance(v.type, QubitType))
            op = build_op(n.kind, operands, dict(n.attrs), loc=m.root.loc)
            built[n.key] = op
            new_ops.append(op)
        return built[n.key]

    values = [value_of(e) for e in exprs]
    forwarded = [v for e, v in zip(exprs, values) if not isinstance(e, (New, NewRes))]
    used_qubits.extend(v for v in forwarded if isinstance(v.type, QubitType))
    if len({id(v) for v in used_qubits}) != len(used_qubits):
        raise IRTypeError(f"pattern {m.pattern.name} would duplicate a qubit value")
    return values, new_ops


class PatternDriver:
    def __init__(self, patterns: list[RewritePattern] = PATTERNS, cap_factor: int = 100):
        # highest benefit first; table order breaks ties
        self.patterns = sorted(patterns, key=lambda p: -p.benefit)
        self.cap_factor = cap_factor

    def try_rewrite(self, op: Operation, report: PassReport) -> list[Operation]:
        """Apply the first matching pattern at `op`; return newly created ops."""
        for pattern in self.patterns:
            m = match(pattern, op)
            if m is None:
                continue
            exprs = pattern.rewrite(m) if pattern.rewrite is not None else pattern.replacement
            if exprs is None:
                continue
            values, new_ops = _materialize(m, exprs)
            block = op.parent
            for new in new_ops:
                block.insert_before(op, new)
            for old, new in zip(op.results, values):
                old.replace_all_uses_with(new)
            for dead in m.matched:
                dead.erase()
            report.rewrites += 1
            report.by_pattern[pattern.name] = report.by_pattern.get(pattern.name, 0) + 1
            if pattern.note and pattern.note not in report.notes:
                report.notes.append(pattern.note)
            return new_ops
        return []

    def run(self, module: ModuleIR, name: str = "peephole") -> PassReport:
        report = PassReport(name, ops_before=count_ops(module))
        cap = self.cap_factor * max(1, report.ops_before)
        changed = True
        while changed and report.rewrites < cap:
            changed = False
            worklist = deque(module.walk())
            while worklist and report.rewrites < cap:
                op = worklist.popleft()
                if op.parent is None:
                    continue  # erased earlier in this sweep
                new_ops = self.try_rewrite(op, report)
                if new_ops or op.parent is None:
                    changed = True
                    worklist.extendleft(reversed(new_ops))
        report.ops_after = count_ops(module)
        return report


def run_peepholes(module: ModuleIR, patterns: list[RewritePattern] = PATTERNS) -> tuple[ModuleIR, PassReport]:
    """Apply the peephole identity table to a fixpoint (in place)."""
    return module, PatternDriver(patterns).run(module)
