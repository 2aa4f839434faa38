"""Convenience for appending type-checked operations to a block."""
from __future__ import annotations

from typing import Optional

from .core import Block, Operation, OpKind, build_op


class Builder:
    def __init__(self, block: Block, loc: Optional[int] = None):
        self.block = block
        self.loc = loc

    def op(self, kind: OpKind, operands=(), attrs=None, result_types=None, regions=(), successors=()) -> Operation:
        return self.block.append(build_op(kind, operands, attrs, regions, result_types, successors, self.loc))

    def one(self, kind: OpKind, operands=(), attrs=None, result_types=None):
        """Append an op and return its single result."""
        return self.op(kind, operands, attrs, result_types).result
