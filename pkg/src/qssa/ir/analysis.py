"""Def-use queries over a module."""
from __future__ import annotations

from .core import ModuleIR, Operation, Region, Value


def _collect(region: Region, index: dict):
    for block in region.blocks:
        for arg in block.args:
            index.setdefault(arg, [])
        for op in block.ops:
            for slot, v in enumerate(op.operands):
                index.setdefault(v, []).append((op, slot))
            for r in op.results:
                index.setdefault(r, [])
            for sub in op.regions:
                _collect(sub, index)


def def_use_index(module: ModuleIR) -> dict[Value, list[tuple[Operation, int]]]:
    """Every defined value mapped to its uses, in program order (pre-order walk)."""
    index: dict = {}
    for func in module.functions:
        _collect(func.body, index)
    return index


def defined_values(module: ModuleIR) -> list[Value]:
    """All values in definition order."""
    return list(def_use_index(module))
