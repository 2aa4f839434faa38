"""Inlining of small non-recursive functions."""
from __future__ import annotations

from ..ir.core import K, FunctionDef, ModuleIR, Operation, clone_op
from .rewriter import PassReport, count_ops

MAX_INLINE_OPS = 64


def _callees(func: FunctionDef) -> set[str]:
    return {op.attrs["callee"] for op in func.walk() if op.kind == K.CALL}


def recursive_functions(module: ModuleIR) -> set[str]:
    """Functions that can reach themselves through calls."""
    graph = {f.name: _callees(f) for f in module.functions}
    out = set()
    for start in graph:
        stack, seen = list(graph[start]), set()
        while stack:
            name = stack.pop()
            if name == start:
                out.add(start)
                break
            if name in seen or name not in graph:
                continue
            seen.add(name)
            stack.extend(graph[name])
    return out


def _inlinable(callee: FunctionDef, recursive: set) -> bool:
    return (
        callee.name not in recursive
        and len(callee.body.blocks) == 1
        and sum(1 for _ in callee.walk()) <= MAX_INLINE_OPS
    )


def inline_call(call: Operation, callee: FunctionDef):
    """Replace `call` by a copy of the callee body, wiring arguments to operands."""
    mapping: dict = dict(zip(callee.args, call.operands))
    block = call.parent
    ret = None
    for op in callee.entry.ops:
        if op.kind == K.RETURN:
            ret = op
            break
        block.insert_before(call, clone_op(op, mapping))
    returned = [mapping.get(v, v) for v in ret.operands] if ret is not None else []
    for old, new in zip(call.results, returned):
        old.replace_all_uses_with(new)
    call.erase()


def run_inline(module: ModuleIR) -> tuple[ModuleIR, PassReport]:
    report = PassReport("inline", ops_before=count_ops(module))
    recursive = recursive_functions(module)
    changed = True
    while changed:
        changed = False
        for func in module.functions:
            for op in list(func.walk()):
                if op.kind != K.CALL or op.parent is None:
                    continue
                callee = module.get(op.attrs["callee"])
                if callee is None or callee is func or not _inlinable(callee, recursive):
                    continue
                inline_call(op, callee)
                report.rewrites += 1
                changed = True
    report.ops_after = count_ops(module)
    return module, report
