"""Full unrolling of constant-trip-count scf.for loops."""
from __future__ import annotations

from typing import Optional

from ..ir.core import K, ModuleIR, Operation, build_op, clone_op
from .rewriter import PassReport, count_ops

MAX_TRIP_COUNT = 32


def _const(v) -> Optional[int]:
    d = v.defining_op
    if d is not None and d.kind == K.CONST_INT:
        return d.attrs["value"]
    return None


def trip_count(op: Operation) -> Optional[int]:
    lo, hi, step = (_const(v) for v in op.operands[:3])
    if lo is None or hi is None or step is None or step <= 0:
        return None
    return len(range(lo, hi, step))


def unroll_loop(op: Operation):
    lo, _, step = (_const(v) for v in op.operands[:3])
    body = op.regions[0].entry
    block = op.parent
    current = list(op.operands[3:])
    for i in range(trip_count(op)):
        iv = build_op(K.CONST_INT, [], {"value": lo + i * step}, loc=op.loc)
        block.insert_before(op, iv)
        mapping: dict = dict(zip(body.args, [iv.result, *current]))
        for inner in body.ops:
            if inner.kind == K.YIELD:
                current = [mapping.get(v, v) for v in inner.operands]
                break
            block.insert_before(op, clone_op(inner, mapping))
    for old, new in zip(op.results, current):
        old.replace_all_uses_with(new)
    op.erase()


def run_unroll(module: ModuleIR, max_trip: int = MAX_TRIP_COUNT) -> tuple[ModuleIR, PassReport]:
    report = PassReport("unroll", ops_before=count_ops(module))
    changed = True
    while changed:
        changed = False
        for op in list(module.walk()):
            if op.kind != K.SCF_FOR or op.parent is None:
                continue
            n = trip_count(op)
            if n is None or n > max_trip:
                continue
            unroll_loop(op)
            report.rewrites += 1
            changed = True
            break  # the walk may hold ops of the erased loop body
    report.ops_after = count_ops(module)
    return module, report
