"""In-memory IR: values, operations, blocks, regions, functions, modules.

Every `Value` has exactly one definition (an operation result or a block
argument) and keeps a use list of `(operation, operand_slot)` pairs that the
mutation helpers below keep consistent.
"""
from __future__ import annotations

import itertools
from enum import Enum
from typing import Iterator, Optional

import numpy as np

from .types import (
    F64,
    I1,
    I64,
    MEMBIT,
    QUBIT,
    AngleType,
    BitTensorType,
    BoolType,
    IntType,
    IRTypeError,
    MemBitType,
    QubitType,
)


class OpKind(str, Enum):
    ALLOC = "qssa.alloc"
    CNOT = "qssa.CNOT"
    X = "qssa.X"
    Y = "qssa.Y"
    Z = "qssa.Z"
    H = "qssa.H"
    RX = "qssa.Rx"
    RY = "qssa.Ry"
    RZ = "qssa.Rz"
    S = "qssa.S"
    SDG = "qssa.Sdg"
    T = "qssa.T"
    TDG = "qssa.Tdg"
    U = "qssa.U"
    GATE = "qssa.gate"
    MEASURE = "qssa.measure"
    SPLIT = "qssa.split"
    CONCAT = "qssa.concat"
    DIM = "qssa.dim"
    CAST = "qssa.cast"
    BARRIER = "qssa.barrier"
    RESET = "qssa.reset"
    CALL = "call"
    RETURN = "return"
    BR = "br"
    COND_BR = "cond_br"
    SCF_IF = "scf.if"
    SCF_FOR = "scf.for"
    YIELD = "scf.yield"
    CONST_INT = "std.const_int"
    CONST_ANGLE = "std.const_angle"
    ADDI = "std.addi"
    SUBI = "std.subi"
    MULI = "std.muli"
    CMPI = "std.cmpi"
    MEM_ALLOC_BIT = "memref.alloc_bit"
    MEM_STORE_BIT = "memref.store_bit"
    MEM_LOAD_BIT = "memref.load_bit"

    def __str__(self):
        return self.value


K = OpKind

GATE_1Q = frozenset({K.X, K.Y, K.Z, K.H, K.S, K.SDG, K.T, K.TDG, K.RX, K.RY, K.RZ, K.U})
GATE_KINDS = GATE_1Q | {K.CNOT, K.GATE}
ROTATIONS = frozenset({K.RX, K.RY, K.RZ})
ARRAY_KINDS = frozenset({K.SPLIT, K.CONCAT, K.DIM, K.CAST})
ARITH_KINDS = frozenset({K.ADDI, K.SUBI, K.MULI})
CLASSICAL_KINDS = ARITH_KINDS | {K.CONST_INT, K.CONST_ANGLE, K.CMPI}
TERMINATORS = frozenset({K.RETURN, K.YIELD, K.BR, K.COND_BR})
REGION_KINDS = frozenset({K.SCF_IF, K.SCF_FOR})

ANGLE_ATTRS = {K.RX: ("angle",), K.RY: ("angle",), K.RZ: ("angle",), K.U: ("theta", "phi", "lambda")}
CMP_PREDICATES = ("eq", "ne", "slt", "sle", "sgt", "sge")


class Effect(str, Enum):
    PURE = "pure"
    RESOURCE = "resource-acquiring"
    OBSERVABLE = "observable"
    MEMORY = "memory"
    FENCE = "fence"


_EFFECTS = {
    K.ALLOC: Effect.RESOURCE,
    K.MEASURE: Effect.OBSERVABLE,
    K.RESET: Effect.OBSERVABLE,
    K.MEM_STORE_BIT: Effect.MEMORY,
    K.MEM_LOAD_BIT: Effect.MEMORY,
    K.BARRIER: Effect.FENCE,
}


def effect_of(kind: OpKind) -> Effect:
    return _EFFECTS.get(kind, Effect.PURE)


def is_effectful(kind: OpKind) -> bool:
    return kind in _EFFECTS


_value_ids = itertools.count()


class Value:
    __slots__ = ("id", "type", "owner", "index", "uses", "name_hint")

    def __init__(self, type_, owner, index: int, name_hint: Optional[str] = None):
        self.id = next(_value_ids)
        self.type = type_
        self.owner = owner  # Operation (result) or Block (argument)
        self.index = index
        self.uses: list[tuple[Operation, int]] = []
        self.name_hint = name_hint

    @property
    def defining_op(self) -> Optional["Operation"]:
        return self.owner if isinstance(self.owner, Operation) else None

    @property
    def is_block_arg(self) -> bool:
        return isinstance(self.owner, Block)

    def replace_all_uses_with(self, new: "Value"):
        for op, slot in list(self.uses):
            op.set_operand(slot, new)

    def __repr__(self):
        return f"<Value #{self.id} {self.type}>"


class Operation:
    def __init__(
        self,
        kind: OpKind,
        operands=(),
        result_types=(),
        attrs: Optional[dict] = None,
        regions=(),
        successors=(),
        loc: Optional[int] = None,
    ):
        self.kind = OpKind(kind)
        self.operands: list[Value] = []
        for v in operands:
            self._append_operand(v)
        self.results = [Value(t, self, i) for i, t in enumerate(result_types)]
        self.attrs = dict(attrs or {})
        self.regions: list[Region] = []
        for r in regions:
            self.add_region(r)
        self.successors: list[Block] = list(successors)
        self.parent: Optional[Block] = None
        self.loc = loc

    def _append_operand(self, v: Value):
        if not isinstance(v, Value):
            raise IRTypeError(f"operand must be a Value, got {v!r}")
        v.uses.append((self, len(self.operands)))
        self.operands.append(v)

    def set_operand(self, slot: int, v: Value):
        old = self.operands[slot]
        old.uses.remove((self, slot))
        self.operands[slot] = v
        v.uses.append((self, slot))

    def add_region(self, region: "Region") -> "Region":
        region.parent = self
        self.regions.append(region)
        return region

    @property
    def result(self) -> Value:
        if len(self.results) != 1:
            raise ValueError(f"{self.kind} has {len(self.results)} results")
        return self.results[0]

    def drop_references(self):
        for slot, v in enumerate(self.operands):
            v.uses.remove((self, slot))
        self.operands = []
        for region in self.regions:
            for block in region.blocks:
                for op in block.ops:
                    op.drop_references()

    def erase(self):
        """Detach from the parent block and drop operand uses (results must be dead)."""
        if self.parent is not None:
            self.parent.remove(self)
        self.drop_references()

    @property
    def parent_op(self) -> Optional["Operation"]:
        if self.parent is None or self.parent.parent is None:
            return None
        owner = self.parent.parent.parent
        return owner if isinstance(owner, Operation) else None

    def ancestors(self) -> Iterator["Operation"]:
        op = self.parent_op
        while op is not None:
            yield op
            op = op.parent_op

    def __repr__(self):
        return f"<Operation {self.kind.value} at {id(self):#x}>"


class Block:
    def __init__(self, arg_types=()):
        self.args: list[Value] = [Value(t, self, i) for i, t in enumerate(arg_types)]
        self.ops: list[Operation] = []
        self.parent: Optional[Region] = None

    def add_arg(self, type_) -> Value:
        v = Value(type_, self, len(self.args))
        self.args.append(v)
        return v

    def append(self, op: Operation) -> Operation:
        op.parent = self
        self.ops.append(op)
        return op

    def insert(self, index: int, op: Operation) -> Operation:
        op.parent = self
        self.ops.insert(index, op)
        return op

    def insert_before(self, anchor: Operation, op: Operation) -> Operation:
        return self.insert(self.index_of(anchor), op)

    def insert_after(self, anchor: Operation, op: Operation) -> Operation:
        return self.insert(self.index_of(anchor) + 1, op)

    def index_of(self, op: Operation) -> int:
        for i, candidate in enumerate(self.ops):
            if candidate is op:
                return i
        raise ValueError("operation not in block")

    def remove(self, op: Operation):
        del self.ops[self.index_of(op)]
        op.parent = None

    @property
    def terminator(self) -> Optional[Operation]:
        if self.ops and self.ops[-1].kind in TERMINATORS:
            return self.ops[-1]
        return None

    @property
    def successors(self) -> list["Block"]:
        term = self.terminator
        return list(term.successors) if term is not None else []


class Region:
    def __init__(self, blocks=()):
        self.blocks: list[Block] = []
        self.parent = None  # Operation or FunctionDef
        for b in blocks:
            self.add_block(b)

    def add_block(self, block: Block) -> Block:
        block.parent = self
        self.blocks.append(block)
        return block

    @property
    def entry(self) -> Block:
        return self.blocks[0]


class FunctionDef:
    def __init__(self, name: str, arg_types=(), result_types=(), body: Optional[Region] = None):
        self.name = name
        self.arg_types = list(arg_types)
        self.result_types = list(result_types)
        if body is None:
            body = Region([Block(self.arg_types)])
        self.body = body
        body.parent = self

    @property
    def args(self) -> list[Value]:
        return self.body.entry.args

    @property
    def entry(self) -> Block:
        return self.body.entry

    def walk(self) -> Iterator[Operation]:
        return walk_region(self.body)

    def __repr__(self):
        return f"<FunctionDef @{self.name}>"


class ModuleIR:
    def __init__(self, functions=()):
        self.functions: list[FunctionDef] = []
        for f in functions:
            self.add(f)

    def add(self, func: FunctionDef) -> FunctionDef:
        if any(f.name == func.name for f in self.functions):
            raise IRTypeError(f"duplicate function name @{func.name}")
        self.functions.append(func)
        return func

    def get(self, name: str) -> Optional[FunctionDef]:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    @property
    def main(self) -> Optional[FunctionDef]:
        return self.get("main")

    def walk(self) -> Iterator[Operation]:
        for f in self.functions:
            yield from f.walk()

    def __eq__(self, other):
        if not isinstance(other, ModuleIR):
            return NotImplemented
        return structurally_equal(self, other)

    __hash__ = None

    def __repr__(self):
        return f"<ModuleIR {[f.name for f in self.functions]}>"


def walk_region(region: Region) -> Iterator[Operation]:
    """Operations in program order, each before the contents of its regions."""
    for block in region.blocks:
        for op in list(block.ops):
            yield op
            for r in op.regions:
                yield from walk_region(r)


def walk_op(op: Operation) -> Iterator[Operation]:
    yield op
    for r in op.regions:
        yield from walk_region(r)


def enclosing_function(op: Operation) -> Optional[FunctionDef]:
    block = op.parent
    while block is not None and block.parent is not None:
        owner = block.parent.parent
        if isinstance(owner, FunctionDef):
            return owner
        if owner is None:
            return None
        block = owner.parent
    return None


# ---------------------------------------------------------------------------
# cloning


def clone_op(op: Operation, mapping: dict) -> Operation:
    """Deep copy of `op`; `mapping` maps old values/blocks to new ones and is extended."""
    new = Operation(
        op.kind,
        [mapping.get(v, v) for v in op.operands],
        [r.type for r in op.results],
        dict(op.attrs),
        (),
        [mapping.get(b, b) for b in op.successors],
        op.loc,
    )
    for old_r, new_r in zip(op.results, new.results):
        mapping[old_r] = new_r
        new_r.name_hint = old_r.name_hint
    for region in op.regions:
        new.add_region(clone_region(region, mapping))
    return new


def clone_region(region: Region, mapping: dict) -> Region:
    new_region = Region()
    for block in region.blocks:
        nb = Block([a.type for a in block.args])
        mapping[block] = nb
        for old_a, new_a in zip(block.args, nb.args):
            mapping[old_a] = new_a
        new_region.add_block(nb)
    for block in region.blocks:
        nb = mapping[block]
        for op in block.ops:
            nb.append(clone_op(op, mapping))
    return new_region


# ---------------------------------------------------------------------------
# type rules


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _int_like(t) -> bool:
    return isinstance(t, (IntType, BoolType))


def is_unitary(matrix, tol: float = 1e-9) -> bool:
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))) <= tol


def infer_result_types(kind: OpKind, operand_types: list, attrs: dict) -> list:
    """Result types implied by the operands; raises IRTypeError when they must be given."""
    k = kind
    if k == K.ALLOC:
        if operand_types:
            return [QubitType(None)]
        if "size" not in attrs:
            raise IRTypeError("qssa.alloc needs a 'size' attribute or an i64 operand")
        return [QubitType(attrs["size"])]
    if k in GATE_1Q:
        return [operand_types[0]] if operand_types else []
    if k in (K.CNOT, K.BARRIER, K.GATE):
        return [t for t in operand_types if isinstance(t, QubitType)]
    if k == K.RESET:
        return list(operand_types[:1])
    if k == K.MEASURE:
        q = operand_types[0] if operand_types else QUBIT
        return [BitTensorType(getattr(q, "size", 1)), q]
    if k == K.CONCAT:
        a, b = operand_types
        if isinstance(a, QubitType) and isinstance(b, QubitType) and a.is_static and b.is_static:
            return [QubitType(a.size + b.size)]
        return [QubitType(None)]
    if k == K.SPLIT:
        if len(operand_types) == 3:
            return [QubitType(None), QubitType(None)]
        raise IRTypeError("qssa.split needs explicit result types")
    if k == K.DIM:
        return [I64, operand_types[0]]
    if k in (K.CONST_INT, K.ADDI, K.SUBI, K.MULI):
        return [I64]
    if k == K.CONST_ANGLE:
        return [F64]
    if k in (K.CMPI, K.MEM_LOAD_BIT):
        return [I1]
    if k == K.MEM_ALLOC_BIT:
        return [MEMBIT]
    if k == K.SCF_FOR:
        return list(operand_types[3:])
    if k in (K.RETURN, K.YIELD, K.BR, K.COND_BR, K.MEM_STORE_BIT, K.SCF_IF):
        return []
    raise IRTypeError(f"{k.value} needs explicit result types")


def _region_shape_errors(op: Operation, fail):
    for i, region in enumerate(op.regions):
        if len(region.blocks) != 1:
            fail(f"region #{i} must have exactly one block")
            continue
        term = region.entry.terminator
        if term is None or term.kind != K.YIELD:
            fail(f"region #{i} must end in scf.yield")


def type_errors(op: Operation, signatures: Optional[dict] = None) -> list[str]:
    """Every typing-rule violation of `op` as a message (empty when well typed).

    `signatures` maps function names to `(arg_types, result_types)` and
    enables checking of `call` sites.
    """
    k = op.kind
    ins = [v.type for v in op.operands]
    outs = [v.type for v in op.results]
    errs: list[str] = []

    def fail(msg):
        errs.append(f"{k.value}: {msg}")

    if op.regions and k not in REGION_KINDS:
        fail("operation cannot carry regions")
    if op.successors and k not in (K.BR, K.COND_BR):
        fail("operation cannot have successors")

    if k == K.ALLOC:
        if not ins:
            size = op.attrs.get("size")
            if not _is_int(size) or size < 1:
                fail("static alloc needs a positive integer 'size' attribute")
            elif outs != [QubitType(size)]:
                fail(f"result must be qubit<{size}>")
        elif ins == [I64]:
            if outs != [QubitType(None)]:
                fail("dynamic alloc returns qubit<?>")
        else:
            fail("operands must be empty or a single i64 size")
    elif k in GATE_1Q:
        names = ANGLE_ATTRS.get(k, ())
        if not ins or ins[0] != QUBIT:
            fail("first operand must be qubit<1>")
        rest = ins[1:]
        if rest:
            if len(rest) != len(names) or any(t != F64 for t in rest):
                fail(f"expects {len(names)} f64 angle operand(s)")
            if any(n in op.attrs for n in names):
                fail("angles given both as attributes and operands")
        else:
            for n in names:
                if not _is_number(op.attrs.get(n)):
                    fail(f"missing angle attribute {n!r}")
        if outs != [QUBIT]:
            fail("result must be qubit<1>")
    elif k == K.CNOT:
        if ins != [QUBIT, QUBIT]:
            fail("operands must be (qubit<1>, qubit<1>)")
        if outs != [QUBIT, QUBIT]:
            fail("results must be (qubit<1>, qubit<1>)")
        if len(op.operands) == 2 and op.operands[0] is op.operands[1]:
            fail("control and target must be distinct values")
    elif k == K.GATE:
        m = op.attrs.get("matrix")
        if not ins or any(not isinstance(t, QubitType) or not t.is_static for t in ins):
            fail("operands must be statically sized qubit arrays")
        elif not isinstance(m, np.ndarray):
            fail("missing 'matrix' attribute")
        else:
            width = sum(t.size for t in ins)
            if m.shape != (2**width, 2**width):
                fail(f"matrix must be {2**width}x{2**width} for {width} qubit(s)")
            elif not is_unitary(m):
                fail("matrix is not unitary within 1e-9")
        if outs != ins:
            fail("results must mirror the qubit operands")
    elif k == K.MEASURE:
        if len(ins) != 1 or not isinstance(ins[0], QubitType):
            fail("expects one qubit operand")
        elif outs != [BitTensorType(ins[0].size), ins[0]]:
            fail(f"results must be ({BitTensorType(ins[0].size)}, {ins[0]})")
    elif k == K.SPLIT:
        if not ins or not isinstance(ins[0], QubitType):
            fail("first operand must be a qubit array")
        elif len(outs) != 2 or not all(isinstance(t, QubitType) for t in outs):
            fail("expects two qubit array results")
        elif len(ins) == 1:
            a, b = outs
            if not (ins[0].is_static and a.is_static and b.is_static):
                fail("static split needs static operand and result sizes")
            elif a.size + b.size != ins[0].size:
                fail(f"sizes {a.size}+{b.size} do not add up to {ins[0].size}")
        elif ins[1:] == [I64, I64]:
            if outs != [QubitType(None), QubitType(None)]:
                fail("dynamic split returns (qubit<?>, qubit<?>)")
        else:
            fail("dynamic split takes two i64 sizes")
    elif k == K.CONCAT:
        if len(ins) != 2 or not all(isinstance(t, QubitType) for t in ins):
            fail("expects two qubit array operands")
        elif len(outs) != 1 or not isinstance(outs[0], QubitType):
            fail("expects one qubit array result")
        else:
            a, b = ins
            if a.is_static and b.is_static:
                if outs[0].size != a.size + b.size:
                    fail(f"result qubit<{outs[0].size if outs[0].size else '?'}> != qubit<{a.size + b.size}>")
            elif outs[0].is_static:
                fail("concat of a dynamic array is dynamic")
    elif k == K.DIM:
        if len(ins) != 1 or not isinstance(ins[0], QubitType):
            fail("expects one qubit array operand")
        elif outs != [I64, ins[0]]:
            fail(f"results must be (i64, {ins[0]})")
    elif k == K.CAST:
        if len(ins) != 1 or len(outs) != 1 or not all(isinstance(t, QubitType) for t in ins + outs):
            fail("casts one qubit array to another")
        else:
            a, b = ins[0], outs[0]
            if a.is_static and b.is_static and a.size != b.size:
                fail(f"cannot cast {a} to {b}")
            elif not a.is_static and not b.is_static:
                fail("cast between two dynamic types")
    elif k == K.BARRIER:
        if not ins or not all(isinstance(t, QubitType) for t in ins):
            fail("expects one or more qubit operands")
        if outs != ins:
            fail("results must mirror operands")
    elif k == K.RESET:
        if ins != [QUBIT] or outs != [QUBIT]:
            fail("maps qubit<1> to qubit<1>")
    elif k == K.CONST_INT:
        if ins or outs != [I64] or not _is_int(op.attrs.get("value")):
            fail("needs integer 'value' and one i64 result")
    elif k == K.CONST_ANGLE:
        if ins or outs != [F64] or not _is_number(op.attrs.get("value")):
            fail("needs numeric 'value' and one f64 result")
    elif k in ARITH_KINDS:
        if len(ins) != 2 or not all(_int_like(t) for t in ins) or outs != [I64]:
            fail("maps two integer (i64 or i1) operands to i64")
    elif k == K.CMPI:
        if len(ins) != 2 or not all(_int_like(t) for t in ins) or outs != [I1]:
            fail("maps two integer operands to i1")
        if op.attrs.get("pred") not in CMP_PREDICATES:
            fail(f"predicate must be one of {CMP_PREDICATES}")
    elif k == K.MEM_ALLOC_BIT:
        if ins or outs != [MEMBIT]:
            fail("takes no operands and returns memref<i1>")
    elif k == K.MEM_STORE_BIT:
        if outs or len(ins) != 2 or not isinstance(ins[1], MemBitType):
            fail("stores a bit into a memref<i1>")
        elif isinstance(ins[0], BitTensorType):
            idx = op.attrs.get("index", 0)
            if not _is_int(idx) or idx < 0 or (ins[0].size is not None and idx >= ins[0].size):
                fail("'index' out of range for the bit tensor")
        elif ins[0] != I1:
            fail("stored value must be i1 or a bit tensor")
    elif k == K.MEM_LOAD_BIT:
        if ins != [MEMBIT] or outs != [I1]:
            fail("loads i1 from memref<i1>")
    elif k == K.SCF_IF:
        if ins != [I1]:
            fail("condition must be a single i1")
        if len(op.regions) != 2:
            fail("needs then and else regions")
        else:
            _region_shape_errors(op, fail)
            for region in op.regions:
                if region.blocks and region.entry.args:
                    fail("branch regions take no arguments")
                term = region.entry.terminator if region.blocks else None
                if term is not None and term.kind == K.YIELD and [v.type for v in term.operands] != outs:
                    fail("yielded types do not match results")
    elif k == K.SCF_FOR:
        if len(ins) < 3 or ins[:3] != [I64, I64, I64]:
            fail("bounds (lower, upper, step) must be i64")
        iters = ins[3:]
        if outs != iters:
            fail("results must match iter_args")
        if len(op.regions) != 1:
            fail("needs exactly one body region")
        else:
            _region_shape_errors(op, fail)
            body = op.regions[0]
            if body.blocks:
                if [a.type for a in body.entry.args] != [I64] + iters:
                    fail("body arguments must be (i64, iter_args...)")
                term = body.entry.terminator
                if term is not None and term.kind == K.YIELD and [v.type for v in term.operands] != iters:
                    fail("yielded types do not match iter_args")
    elif k in (K.YIELD, K.RETURN):
        if outs:
            fail("terminator has no results")
    elif k == K.BR:
        if len(op.successors) != 1:
            fail("needs one successor")
        elif ins != [a.type for a in op.successors[0].args]:
            fail("operands do not match successor arguments")
    elif k == K.COND_BR:
        n_true = op.attrs.get("n_true", 0)
        if not ins or ins[0] != I1:
            fail("condition must be i1")
        elif len(op.successors) != 2:
            fail("needs two successors")
        else:
            t_args, f_args = ins[1 : 1 + n_true], ins[1 + n_true :]
            if t_args != [a.type for a in op.successors[0].args]:
                fail("true-branch operands do not match successor arguments")
            if f_args != [a.type for a in op.successors[1].args]:
                fail("false-branch operands do not match successor arguments")
    elif k == K.CALL:
        callee = op.attrs.get("callee")
        if not isinstance(callee, str):
            fail("missing callee")
        elif signatures is not None:
            if callee not in signatures:
                fail(f"unknown function @{callee}")
            else:
                args, results = signatures[callee]
                if ins != list(args) or outs != list(results):
                    fail(f"signature does not match @{callee}")
    return errs


def build_op(kind, operands=(), attributes=None, regions=(), result_types=None, successors=(), loc=None) -> Operation:
    """Create a detached operation with fresh results, enforcing the type rules."""
    kind = OpKind(kind)
    attrs = dict(attributes or {})
    for name in ANGLE_ATTRS.get(kind, ()):
        if _is_int(attrs.get(name)):
            attrs[name] = float(attrs[name])
    if kind == K.GATE and "matrix" in attrs:
        attrs["matrix"] = np.asarray(attrs["matrix"], dtype=complex)
    operand_types = [v.type for v in operands]
    if result_types is None:
        result_types = infer_result_types(kind, operand_types, attrs)
    op = Operation(kind, operands, result_types, attrs, regions, successors, loc)
    errs = type_errors(op)
    if errs:
        op.drop_references()
        raise IRTypeError(errs[0])
    return op


def gate_angles(op: Operation) -> Optional[tuple[float, ...]]:
    """Angles of a rotation/U gate, resolving constant operands; None if not constant."""
    names = ANGLE_ATTRS.get(op.kind, ())
    if not names:
        return ()
    if len(op.operands) == 1:
        return tuple(float(op.attrs[n]) for n in names)
    out = []
    for v in op.operands[1:]:
        d = v.defining_op
        if d is None or d.kind != K.CONST_ANGLE:
            return None
        out.append(float(d.attrs["value"]))
    return tuple(out)


# ---------------------------------------------------------------------------
# structural equality


def _attrs_equal(a: dict, b: dict) -> bool:
    if a.keys() != b.keys():
        return False
    for key in a:
        x, y = a[key], b[key]
        if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
            if not (isinstance(x, np.ndarray) and isinstance(y, np.ndarray)) or x.shape != y.shape:
                return False
            if not np.array_equal(x, y):
                return False
        elif type(x) is not type(y) or x != y:
            return False
    return True


def _regions_equal(ra: Region, rb: Region, vmap: dict) -> bool:
    if len(ra.blocks) != len(rb.blocks):
        return False
    bmap = dict(zip(ra.blocks, rb.blocks))
    for ba, bb in zip(ra.blocks, rb.blocks):
        if [a.type for a in ba.args] != [a.type for a in bb.args]:
            return False
        vmap.update(zip(ba.args, bb.args))
    for ba, bb in zip(ra.blocks, rb.blocks):
        if len(ba.ops) != len(bb.ops):
            return False
        for oa, ob in zip(ba.ops, bb.ops):
            if oa.kind != ob.kind or not _attrs_equal(oa.attrs, ob.attrs):
                return False
            if len(oa.operands) != len(ob.operands):
                return False
            if any(vmap.get(x) is not y for x, y in zip(oa.operands, ob.operands)):
                return False
            if [r.type for r in oa.results] != [r.type for r in ob.results]:
                return False
            if len(oa.successors) != len(ob.successors):
                return False
            if any(bmap.get(x) is not y for x, y in zip(oa.successors, ob.successors)):
                return False
            vmap.update(zip(oa.results, ob.results))
            if len(oa.regions) != len(ob.regions):
                return False
            if not all(_regions_equal(x, y, vmap) for x, y in zip(oa.regions, ob.regions)):
                return False
    return True


def structurally_equal(a: ModuleIR, b: ModuleIR) -> bool:
    """Equality up to renaming of values (alpha-equivalence)."""
    if len(a.functions) != len(b.functions):
        return False
    for fa, fb in zip(a.functions, b.functions):
        if fa.name != fb.name or fa.arg_types != fb.arg_types or fa.result_types != fb.result_types:
            return False
        if not _regions_equal(fa.body, fb.body, {}):
            return False
    return True


__all__ = [
    "ANGLE_ATTRS",
    "ARITH_KINDS",
    "ARRAY_KINDS",
    "AngleType",
    "Block",
    "CLASSICAL_KINDS",
    "CMP_PREDICATES",
    "Effect",
    "FunctionDef",
    "GATE_1Q",
    "GATE_KINDS",
    "ModuleIR",
    "OpKind",
    "Operation",
    "REGION_KINDS",
    "ROTATIONS",
    "Region",
    "TERMINATORS",
    "Value",
    "build_op",
    "clone_op",
    "clone_region",
    "effect_of",
    "enclosing_function",
    "gate_angles",
    "infer_result_types",
    "is_effectful",
    "is_unitary",
    "structurally_equal",
    "type_errors",
    "walk_op",
    "walk_region",
]
