"""Dead code elimination.

An op is dead when none of its results are used and removing it cannot be
observed: pure ops, allocations (resource acquisition only), bit loads, and
control-flow / calls whose bodies are free of observable effects.  Stores,
resets, barriers and bit-cell allocations always stay; measurements go only
in aggressive mode.
"""
from __future__ import annotations

from ..ir.core import K, TERMINATORS, Effect, ModuleIR, Operation, Region, effect_of, walk_op
from .rewriter import PassReport, count_ops

_NEVER = frozenset({K.MEM_STORE_BIT, K.MEM_ALLOC_BIT, K.RESET, K.BARRIER}) | TERMINATORS


def _body_removable(op: Operation, aggressive: bool, pure_funcs: set) -> bool:
    for inner in walk_op(op):
        if inner is op:
            continue
        if inner.kind in (K.MEM_STORE_BIT, K.MEM_ALLOC_BIT, K.RESET, K.BARRIER):
            return False
        if inner.kind == K.MEASURE and not aggressive:
            return False
        if inner.kind == K.CALL and inner.attrs["callee"] not in pure_funcs:
            return False
    return True


def _pure_functions(module: ModuleIR, aggressive: bool) -> set:
    """Functions (transitively) free of effects other than allocation."""
    pure = {f.name for f in module.functions}
    changed = True
    while changed:
        changed = False
        for f in module.functions:
            if f.name not in pure:
                continue
            for op in f.walk():
                bad = op.kind in (K.MEM_STORE_BIT, K.MEM_ALLOC_BIT, K.RESET, K.BARRIER)
                bad = bad or (op.kind == K.MEASURE and not aggressive)
                bad = bad or (op.kind == K.CALL and op.attrs["callee"] not in pure)
                if bad:
                    pure.discard(f.name)
                    changed = True
                    break
    return pure


def is_dead(op: Operation, aggressive: bool = False, pure_funcs: set = frozenset()) -> bool:
    if op.kind in _NEVER or any(r.uses for r in op.results):
        return False
    if op.kind == K.MEASURE:
        return aggressive
    if op.kind in (K.SCF_IF, K.SCF_FOR):
        return _body_removable(op, aggressive, pure_funcs)
    if op.kind == K.CALL:
        return op.attrs["callee"] in pure_funcs
    eff = effect_of(op.kind)
    return eff in (Effect.PURE, Effect.RESOURCE) or op.kind == K.MEM_LOAD_BIT


def _sweep(region: Region, aggressive: bool, pure_funcs: set) -> int:
    removed = 0
    for block in region.blocks:
        for op in reversed(list(block.ops)):
            for r in op.regions:
                removed += _sweep(r, aggressive, pure_funcs)
            if is_dead(op, aggressive, pure_funcs):
                op.erase()
                removed += 1
    return removed


def run_dce(module: ModuleIR, aggressive: bool = False) -> tuple[ModuleIR, PassReport]:
    report = PassReport("dce", ops_before=count_ops(module))
    pure_funcs = _pure_functions(module, aggressive)
    while True:
        removed = sum(_sweep(f.body, aggressive, pure_funcs) for f in module.functions)
        if not removed:
            break
        report.rewrites += removed
    report.ops_after = count_ops(module)
    return module, report
