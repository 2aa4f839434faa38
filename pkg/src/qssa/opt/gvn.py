"""Value numbering for pure classical ops, plus hoisting and sinking of
quantum gates that appear identically in both branches of an `scf.if`.

Because qubit dependencies are explicit SSA edges, a gate in each branch
applied to the same outer value is the same computation and can move above
the conditional; the single-use rule still holds because the hoisted gate
consumes the outer value once and each branch consumes its result once.
"""
from __future__ import annotations

import numpy as np

from ..ir.core import (
    CLASSICAL_KINDS,
    GATE_KINDS,
    K,
    Block,
    ModuleIR,
    Operation,
    Region,
    Value,
    build_op,
)
from ..ir.types import QubitType
from .rewriter import PassReport, count_ops


def _attr_key(attrs: dict) -> tuple:
    items = []
    for k in sorted(attrs):
        v = attrs[k]
        if isinstance(v, np.ndarray):
            v = (v.shape, tuple(v.ravel().tolist()))
        items.append((k, type(v).__name__, v))
    return tuple(items)


def _op_key(op: Operation) -> tuple:
    return (op.kind, tuple(id(v) for v in op.operands), _attr_key(op.attrs))


# ---------------------------------------------------------------------------
# classical value numbering


def _cse_region(region: Region, scopes: list[dict], report: PassReport):
    for block in region.blocks:
        scope: dict = {}
        scopes.append(scope)
        for op in list(block.ops):
            if op.kind in CLASSICAL_KINDS:
                key = _op_key(op)
                existing = next((s[key] for s in reversed(scopes) if key in s), None)
                if existing is not None:
                    for old, new in zip(op.results, existing.results):
                        old.replace_all_uses_with(new)
                    op.erase()
                    report.rewrites += 1
                    continue
                scope[key] = op
            for r in op.regions:
                _cse_region(r, scopes, report)
        scopes.pop()


# ---------------------------------------------------------------------------
# hoisting / sinking across scf.if


def _hoistable(op: Operation, if_op: Operation) -> bool:
    if op.kind not in GATE_KINDS:
        return False
    return all(not _defined_inside(v, if_op) for v in op.operands)


def _defined_inside(v: Value, op: Operation) -> bool:
    owner = v.owner
    block = owner if isinstance(owner, Block) else owner.parent
    while block is not None:
        region = block.parent
        if region is None:
            return False
        parent = region.parent
        if parent is op:
            return True
        if not isinstance(parent, Operation):
            return False
        block = parent.parent
    return False


def _same(a: Operation, b: Operation) -> bool:
    return (
        a.kind == b.kind
        and len(a.operands) == len(b.operands)
        and all(x is y for x, y in zip(a.operands, b.operands))
        and _attr_key(a.attrs) == _attr_key(b.attrs)
    )


def _hoist_once(if_op: Operation) -> bool:
    then_b, else_b = if_op.regions[0].entry, if_op.regions[1].entry
    for a in then_b.ops:
        if not _hoistable(a, if_op):
            continue
        for b in else_b.ops:
            if _same(a, b):
                hoisted = build_op(a.kind, list(a.operands), dict(a.attrs), loc=a.loc)
                if_op.parent.insert_before(if_op, hoisted)
                for old, new in zip(a.results, hoisted.results):
                    old.replace_all_uses_with(new)
                for old, new in zip(b.results, hoisted.results):
                    old.replace_all_uses_with(new)
                a.erase()
                b.erase()
                return True
    return False


def _yield_slots(op: Operation, term: Operation):
    """Positions at which each result of `op` is yielded, if that is its only use."""
    slots = []
    for r in op.results:
        if len(r.uses) != 1 or r.uses[0][0] is not term:
            return None
        slots.append(r.uses[0][1])
    return slots


def _sink_once(if_op: Operation) -> bool:
    then_b, else_b = if_op.regions[0].entry, if_op.regions[1].entry
    t_term, e_term = then_b.terminator, else_b.terminator
    for a in then_b.ops:
        if a.kind not in GATE_KINDS:
            continue
        slots = _yield_slots(a, t_term)
        if slots is None:
            continue
        for b in else_b.ops:
            if b.kind != a.kind or _attr_key(a.attrs) != _attr_key(b.attrs) or len(a.operands) != len(b.operands):
                continue
            if _yield_slots(b, e_term) != slots:
                continue
            # classical operands must be the same outer values; qubit operands become yields
            pairs = list(zip(a.operands, b.operands))
            if any(
                not isinstance(x.type, QubitType) and (x is not y or _defined_inside(x, if_op)) for x, y in pairs
            ):
                continue
            qubit_pos = [i for i, v in enumerate(a.operands) if isinstance(v.type, QubitType)]
            if len(qubit_pos) != len(slots):
                continue
            for i, slot in zip(qubit_pos, slots):
                t_term.set_operand(slot, a.operands[i])
                e_term.set_operand(slot, b.operands[i])
            outer_results = [if_op.results[s] for s in slots]
            old_uses = [list(r.uses) for r in outer_results]
            operands = list(a.operands)
            for i, r in zip(qubit_pos, outer_results):
                operands[i] = r
            a.erase()
            b.erase()
            sunk = build_op(a.kind, operands, dict(a.attrs), loc=a.loc)
            if_op.parent.insert_after(if_op, sunk)
            for uses, new in zip(old_uses, sunk.results):
                for user, slot in uses:
                    user.set_operand(slot, new)
            return True
    return False


def _hoist_region(region: Region, report: PassReport):
    for block in region.blocks:
        for op in list(block.ops):
            for r in op.regions:
                _hoist_region(r, report)
            if op.kind == K.SCF_IF and op.parent is not None:
                while _hoist_once(op):
                    report.rewrites += 1
                while _sink_once(op):
                    report.rewrites += 1


def run_cse_gvn(module: ModuleIR) -> tuple[ModuleIR, PassReport]:
    """Deduplicate pure classical values and hoist/sink gates common to both branches of scf.if."""
    report = PassReport("gvn", ops_before=count_ops(module))
    for func in module.functions:
        _cse_region(func.body, [], report)
        _hoist_region(func.body, report)
    report.ops_after = count_ops(module)
    return module, report
