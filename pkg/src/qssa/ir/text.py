"""Textual form of the IR.

Grammar (informal)::

    module   := "module" "{" func* "}"
    func     := "func" @name "(" [%v ":" type {"," ...}] ")" "->" "(" types ")" "{" block+ "}"
    block    := [^label ["(" %v ":" type {"," ...} ")"] ":"] op*
    op       := [%r {"," %r} "="] opname operands [attrs] ":" signature region*
    operands := %v {"," %v}                      (most ops)
              | @callee "(" %v {"," %v} ")"      (call)
              | ^bb ["(" values ")"]             (br)
              | %c "," ^bb(...) "," ^bb(...)     (cond_br)
    attrs    := "{" name "=" attr {"," ...} "}"
    attr     := int | float | "string" | "[" "[" "(" re "," im ")" ... "]" "]"
    signature:= "(" types ")" "->" "(" types ")" | types     (result types only)
    region   := "{" block+ "}"

The printer numbers values `%0, %1, ...` per function in definition order,
so printing is canonical and `parse_ir(print_ir(m))` is structurally equal
to `m`.  Static allocations omit their redundant `size` attribute.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    Block,
    FunctionDef,
    ModuleIR,
    OpKind,
    Operation,
    Region,
    build_op,
)
from .types import (
    F64,
    I1,
    I64,
    MEMBIT,
    BitTensorType,
    IRTypeError,
    QubitType,
)

K = OpKind


class IRSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


# ---------------------------------------------------------------------------
# printer


def format_type(t) -> str:
    return str(t)


def _format_attr(value) -> str:
    if isinstance(value, str):
        return '"' + value + '"'
    if isinstance(value, np.ndarray):
        rows = ", ".join(
            "[" + ", ".join(f"({float(z.real)!r}, {float(z.imag)!r})" for z in row) + "]" for row in value
        )
        return f"[{rows}]"
    if isinstance(value, float):
        return repr(value)
    return str(int(value))


def _hidden_attrs(op: Operation) -> set:
    if op.kind == K.ALLOC and not op.operands:
        return {"size"}
    if op.kind == K.CALL:
        return {"callee"}
    if op.kind == K.COND_BR:
        return {"n_true"}
    return set()


class _Printer:
    def __init__(self):
        self.lines: list[str] = []

    def print_module(self, module: ModuleIR) -> str:
        if not module.functions:
            return "module { }\n"
        self.lines = ["module {"]
        for func in module.functions:
            self.print_function(func)
        self.lines.append("}")
        return "\n".join(self.lines) + "\n"

    def print_function(self, func: FunctionDef):
        self.names: dict = {}
        self.block_names: dict = {}
        self._label_all(func.body)
        args = ", ".join(f"{self.name(a)}: {a.type}" for a in func.args)
        results = ", ".join(str(t) for t in func.result_types)
        self.lines.append(f"  func @{func.name}({args}) -> ({results}) {{")
        self.print_region_blocks(func.body, 2, function_body=True)
        self.lines.append("  }")

    def _label_all(self, region: Region):
        for block in region.blocks:
            self.block_names[block] = f"^bb{len(self.block_names)}"
            for op in block.ops:
                for r in op.regions:
                    self._label_all(r)

    def name(self, value) -> str:
        if value not in self.names:
            self.names[value] = f"%{len(self.names)}"
        return self.names[value]

    def print_region_blocks(self, region: Region, depth: int, function_body: bool = False):
        pad = "  " * depth
        for i, block in enumerate(region.blocks):
            show_label = i > 0 or (not function_body and bool(block.args))
            if show_label:
                args = ", ".join(f"{self.name(a)}: {a.type}" for a in block.args)
                label = self.block_names[block] + (f"({args})" if block.args else "")
                self.lines.append(f"{'  ' * (depth - 1)} {label}:")
            for op in block.ops:
                self.print_op(op, pad, depth)

    def _use(self, value) -> str:
        return self.names[value]

    def _succ(self, block: Block, values) -> str:
        label = self.block_names[block]
        if values:
            label += "(" + ", ".join(self._use(v) for v in values) + ")"
        return label

    def print_op(self, op: Operation, pad: str, depth: int):
        parts = [pad]
        operand_text = ""
        if op.kind == K.CALL:
            operand_text = f"@{op.attrs['callee']}(" + ", ".join(self._use(v) for v in op.operands) + ")"
        elif op.kind == K.BR:
            operand_text = self._succ(op.successors[0], op.operands)
        elif op.kind == K.COND_BR:
            n_true = op.attrs.get("n_true", 0)
            operand_text = ", ".join(
                [
                    self._use(op.operands[0]),
                    self._succ(op.successors[0], op.operands[1 : 1 + n_true]),
                    self._succ(op.successors[1], op.operands[1 + n_true :]),
                ]
            )
        else:
            operand_text = ", ".join(self._use(v) for v in op.operands)
        # results are named after operands so numbering follows definition order
        if op.results:
            parts.append(", ".join(self.name(r) for r in op.results) + " = ")
        parts.append(op.kind.value)
        if operand_text:
            parts.append(" " + operand_text)
        hidden = _hidden_attrs(op)
        attrs = [(k, v) for k, v in sorted(op.attrs.items()) if k not in hidden]
        if attrs:
            parts.append(" {" + ", ".join(f"{k} = {_format_attr(v)}" for k, v in attrs) + "}")
        ins = ", ".join(str(v.type) for v in op.operands)
        outs = ", ".join(str(v.type) for v in op.results)
        parts.append(f" : ({ins}) -> ({outs})")
        if not op.regions:
            self.lines.append("".join(parts))
            return
        self.lines.append("".join(parts) + " {")
        for i, region in enumerate(op.regions):
            if i:
                self.lines.append(pad + "} {")
            self.print_region_blocks(region, depth + 1)
        self.lines.append(pad + "}")


def print_ir(module: ModuleIR) -> str:
    return _Printer().print_module(module)


# ---------------------------------------------------------------------------
# parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<value>%[A-Za-z0-9_.$]+)
  | (?P<symbol>@[A-Za-z_][A-Za-z0-9_.$]*)
  | (?P<label>\^[A-Za-z0-9_.$]+)
  | (?P<number>-?(?:\d+\.\d*(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+|\d+|inf\b|nan\b))
  | (?P<string>"[^"\n]*")
  | (?P<id>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<punct>->|[(){}\[\]<>,:=?])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise IRSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind, s = m.lastgroup, m.group()
        if kind not in ("ws", "comment"):
            out.append(_Tok(kind, s, line, pos - line_start + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rindex("\n") + 1
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - line_start + 1))
    return out


_OPCODES = {k.value: k for k in OpKind}


class _IRParser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    # token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.pos]

    def error(self, msg: str, tok: Optional[_Tok] = None):
        t = tok or self.tok
        raise IRSyntaxError(msg, t.line, t.col)

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("punct", "id")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def expect_kind(self, kind: str) -> _Tok:
        if self.tok.kind != kind:
            self.error(f"expected {kind}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    # types
    def parse_type(self):
        t = self.expect_kind("id")
        if t.text == "i64":
            return I64
        if t.text == "i1":
            return I1
        if t.text == "f64":
            return F64
        if t.text == "qubit":
            self.expect("<")
            size = self._size()
            self.expect(">")
            try:
                return QubitType(size)
            except IRTypeError as exc:
                raise IRTypeError(f"{t.line}:{t.col}: {exc}") from None
        if t.text == "tensor":
            self.expect("<")
            size = self._size()
            elem = self.expect_kind("id")
            if elem.text != "xi1":
                self.error("only i1 tensors are supported", elem)
            self.expect(">")
            return BitTensorType(size)
        if t.text == "memref":
            self.expect("<")
            self.expect("i1")
            self.expect(">")
            return MEMBIT
        self.error(f"unknown type {t.text!r}", t)

    def _size(self) -> Optional[int]:
        if self.accept("?"):
            return None
        t = self.expect_kind("number")
        try:
            return int(t.text)
        except ValueError:
            self.error("array size must be an integer", t)

    def parse_type_list(self) -> list:
        self.expect("(")
        types = []
        if not self.at(")"):
            types.append(self.parse_type())
            while self.accept(","):
                types.append(self.parse_type())
        self.expect(")")
        return types

    # values and scopes
    def define(self, tok: _Tok, value):
        for scope in self.scopes:
            if tok.text in scope:
                self.error(f"value {tok.text} redefined", tok)
        self.scopes[-1][tok.text] = value
        value.name_hint = tok.text[1:]

    def lookup(self, tok: _Tok):
        for scope in reversed(self.scopes):
            if tok.text in scope:
                return scope[tok.text]
        self.error(f"use of undefined value {tok.text}", tok)

    def block_for(self, tok: _Tok) -> Block:
        labels = self.labels[-1]
        if tok.text not in labels:
            labels[tok.text] = (Block(), tok)
        return labels[tok.text][0]

    # structure
    def parse_module(self) -> ModuleIR:
        self.expect("module")
        self.expect("{")
        module = ModuleIR()
        while self.at("func"):
            func = self.parse_function()
            try:
                module.add(func)
            except IRTypeError as exc:
                self.error(str(exc))
        self.expect("}")
        if self.tok.kind != "eof":
            self.error("trailing input after module")
        return module

    def parse_function(self) -> FunctionDef:
        self.expect("func")
        name = self.expect_kind("symbol").text[1:]
        self.scopes = [{}]
        self.labels = [{}]
        self.expect("(")
        arg_toks, arg_types = [], []
        if not self.at(")"):
            while True:
                arg_toks.append(self.expect_kind("value"))
                self.expect(":")
                arg_types.append(self.parse_type())
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect("->")
        result_types = self.parse_type_list()
        func = FunctionDef(name, arg_types, result_types)
        for tok, value in zip(arg_toks, func.args):
            self.define(tok, value)
        self.expect("{")
        self.parse_blocks(func.body, func.entry)
        self.expect("}")
        return func

    def parse_region(self) -> Region:
        self.expect("{")
        self.scopes.append({})
        self.labels.append({})
        region = Region()
        self.parse_blocks(region, None)
        self.labels.pop()
        self.scopes.pop()
        self.expect("}")
        return region

    def parse_blocks(self, region: Region, entry: Optional[Block]):
        block = entry
        if block is not None and block.parent is None:
            region.add_block(block)
        while not self.at("}"):
            if self.tok.kind == "label":
                block = self.parse_label(region)
                continue
            if block is None:
                block = region.add_block(Block())
            block.append(self.parse_op())
        if block is None:
            region.add_block(Block())
        for label, (blk, tok) in self.labels[-1].items():
            if blk.parent is None:
                self.error(f"reference to undefined block {label}", tok)

    def parse_label(self, region: Region) -> Block:
        tok = self.next()
        block = self.block_for(tok)
        if block.parent is not None:
            self.error(f"block {tok.text} redefined", tok)
        if self.accept("("):
            if not self.at(")"):
                while True:
                    vtok = self.expect_kind("value")
                    self.expect(":")
                    self.define(vtok, block.add_arg(self.parse_type()))
                    if not self.accept(","):
                        break
            self.expect(")")
        self.expect(":")
        region.add_block(block)
        return block

    def parse_value_list(self) -> list:
        values = [self.lookup(self.expect_kind("value"))]
        while self.accept(","):
            values.append(self.lookup(self.expect_kind("value")))
        return values

    def parse_successor(self):
        block = self.block_for(self.expect_kind("label"))
        args = []
        if self.accept("("):
            if not self.at(")"):
                args = [self.lookup(self.expect_kind("value"))]
                while self.accept(","):
                    args.append(self.lookup(self.expect_kind("value")))
            self.expect(")")
        return block, args

    def parse_attr_value(self):
        t = self.tok
        if t.kind == "string":
            self.next()
            return t.text[1:-1]
        if t.kind == "number":
            self.next()
            if re.fullmatch(r"-?\d+", t.text):
                return int(t.text)
            return float(t.text)
        if self.at("["):
            return self.parse_matrix()
        self.error(f"bad attribute value {t.text!r}")

    def _float(self) -> float:
        return float(self.expect_kind("number").text)

    def parse_matrix(self) -> np.ndarray:
        self.expect("[")
        rows = []
        while True:
            self.expect("[")
            row = []
            while True:
                self.expect("(")
                re_ = self._float()
                self.expect(",")
                im = self._float()
                self.expect(")")
                row.append(complex(re_, im))
                if not self.accept(","):
                    break
            self.expect("]")
            rows.append(row)
            if not self.accept(","):
                break
        self.expect("]")
        if len({len(r) for r in rows}) != 1:
            self.error("matrix rows have different lengths")
        return np.array(rows, dtype=complex)

    def parse_op(self) -> Operation:
        start = self.tok
        result_toks = []
        if self.tok.kind == "value":
            result_toks.append(self.next())
            while self.accept(","):
                result_toks.append(self.expect_kind("value"))
            self.expect("=")
        name_tok = self.expect_kind("id")
        kind = _OPCODES.get(name_tok.text)
        if kind is None:
            self.error(f"unknown operation {name_tok.text!r}", name_tok)
        attrs: dict = {}
        operands: list = []
        successors: list = []
        if kind == K.CALL:
            attrs["callee"] = self.expect_kind("symbol").text[1:]
            self.expect("(")
            if not self.at(")"):
                operands = self.parse_value_list()
            self.expect(")")
        elif kind == K.BR:
            block, operands = self.parse_successor()
            successors = [block]
        elif kind == K.COND_BR:
            cond = self.lookup(self.expect_kind("value"))
            self.expect(",")
            tb, targs = self.parse_successor()
            self.expect(",")
            fb, fargs = self.parse_successor()
            operands = [cond, *targs, *fargs]
            successors = [tb, fb]
            attrs["n_true"] = len(targs)
        elif self.tok.kind == "value":
            operands = self.parse_value_list()
        if self.accept("{"):
            while True:
                key = self.expect_kind("id").text
                self.expect("=")
                if key in attrs:
                    self.error(f"duplicate attribute {key!r}")
                attrs[key] = self.parse_attr_value()
                if not self.accept(","):
                    break
            self.expect("}")
        sig_tok = self.expect(":")
        operand_types, result_types = self.parse_signature()
        if operand_types is not None and operand_types != [v.type for v in operands]:
            raise IRTypeError(
                f"{sig_tok.line}:{sig_tok.col}: operand types of {kind.value} do not match the signature"
            )
        if kind == K.ALLOC and not operands and "size" not in attrs:
            if len(result_types) == 1 and isinstance(result_types[0], QubitType) and result_types[0].is_static:
                attrs["size"] = result_types[0].size
        regions = []
        while self.at("{"):
            regions.append(self.parse_region())
        if len(result_toks) != len(result_types):
            self.error(f"{len(result_toks)} result name(s) for {len(result_types)} result type(s)", start)
        try:
            op = build_op(kind, operands, attrs, regions, result_types, successors, loc=start.line)
        except IRTypeError as exc:
            raise IRTypeError(f"{start.line}:{start.col}: {exc}") from None
        for tok, value in zip(result_toks, op.results):
            self.define(tok, value)
        return op

    def parse_signature(self):
        """Return (operand types or None, result types)."""
        if self.at("("):
            save = self.pos
            ins = self.parse_type_list()
            if self.accept("->"):
                if self.at("("):
                    outs = self.parse_type_list()
                else:
                    outs = [self.parse_type()]
                return ins, outs
            self.pos = save
        outs = [self.parse_type()]
        while self.accept(","):
            outs.append(self.parse_type())
        return None, outs


def parse_ir(text: str) -> ModuleIR:
    """Parse IR text.  Raises IRSyntaxError on malformed text and IRTypeError on rule violations."""
    return _IRParser(text).parse_module()
