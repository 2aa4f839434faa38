"""Recursive-descent parser for OpenQASM 2.0.

Resolution happens during parsing: registers and gates must be declared
before use, indices are bounds-checked, and gate arities are enforced.
Whole-register operands are broadcast into element-wise statements.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .ast import (
    FUNCTIONS,
    Barrier,
    BinOp,
    CregDecl,
    Expr,
    Func,
    GateApply,
    GateDef,
    IfStmt,
    Measure,
    Neg,
    Num,
    OpaqueDecl,
    Param,
    Pi,
    QasmProgram,
    QregDecl,
    Ref,
    Reset,
)
from .errors import QasmSyntaxError, ResolutionError, UnsupportedError

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<real>(?:\d+\.\d*|\.\d+)(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<op>->|==|[;,()\[\]{}+\-*/^])
    """,
    re.VERBOSE,
)

# Statement heads that only exist in OpenQASM 3.
_QASM3_WORDS = frozenset(
    {"qubit", "bit", "def", "defcal", "for", "while", "input", "output", "let", "const", "int",
     "uint", "float", "angle", "bool", "duration", "stretch", "box", "gphase", "ctrl", "inv", "pow"}
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise QasmSyntaxError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


@dataclass(frozen=True)
class GateSig:
    name: str
    n_params: int
    n_qargs: int
    definition: Optional[GateDef]  # None for builtins and opaque gates
    opaque: bool = False


BUILTIN_GATES = {
    "U": GateSig("U", 3, 1, None),
    "CX": GateSig("CX", 0, 2, None),
}


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0
        self.qregs: dict[str, int] = {}
        self.cregs: dict[str, int] = {}
        self.gates: dict[str, GateSig] = dict(BUILTIN_GATES)

    # -- token helpers -------------------------------------------------
    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.text == text and tok.kind in ("op", "id")

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text or tok.kind not in ("op", "id"):
            found = tok.text or "end of input"
            raise QasmSyntaxError(f"expected {text!r}, found {found!r}", tok.line, tok.col)
        return tok

    def expect_kind(self, kind: str, what: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise QasmSyntaxError(f"expected {what}, found {found!r}", tok.line, tok.col)
        return tok

    def ident(self) -> Token:
        return self.expect_kind("id", "identifier")

    # -- program -------------------------------------------------------
    def program(self) -> QasmProgram:
        head = self.peek()
        if head.text != "OPENQASM":
            raise QasmSyntaxError("program must start with 'OPENQASM 2.0;'", head.line, head.col)
        self.next()
        ver = self.next()
        if ver.kind not in ("real", "int"):
            raise QasmSyntaxError("expected version number", ver.line, ver.col)
        if float(ver.text) != 2.0:
            raise UnsupportedError(f"OpenQASM version {ver.text} is not supported", ver.line, ver.col)
        self.expect(";")
        statements: list = []
        while self.peek().kind != "eof":
            statements.extend(self.statement())
        return QasmProgram("2.0", tuple(statements))

    def library(self) -> dict[str, GateDef]:
        defs = {}
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.text != "gate":
                raise QasmSyntaxError("only gate definitions allowed in a library", tok.line, tok.col)
            (gdef,) = self.statement()
            defs[gdef.name] = gdef
        return defs

    def statement(self) -> list:
        tok = self.peek()
        if tok.kind != "id":
            raise QasmSyntaxError(f"unexpected {tok.text or 'end of input'!r}", tok.line, tok.col)
        word = tok.text
        if word == "include":
            return self.include()
        if word in ("qreg", "creg"):
            return [self.reg_decl()]
        if word == "gate":
            return [self.gate_def()]
        if word == "opaque":
            return [self.opaque_decl()]
        if word == "measure":
            return self.measure()
        if word == "reset":
            return self.reset()
        if word == "barrier":
            return [self.barrier()]
        if word == "if":
            return self.if_stmt()
        if word in _QASM3_WORDS and word not in self.gates:
            raise UnsupportedError(f"OpenQASM 3 construct {word!r} is not supported", tok.line, tok.col)
        return self.gate_apply()

    def include(self) -> list:
        self.expect("include")
        path = self.expect_kind("string", "file name")
        self.expect(";")
        name = path.text[1:-1]
        if name != "qelib1.inc":
            raise UnsupportedError(f"only \"qelib1.inc\" can be included, not {name!r}", path.line, path.col)
        from .qelib1 import qelib1_gates

        for gdef in qelib1_gates().values():
            self.gates[gdef.name] = GateSig(gdef.name, len(gdef.params), len(gdef.qargs), gdef)
        return []

    def reg_decl(self):
        kw = self.next()
        name = self.ident()
        self.expect("[")
        size_tok = self.expect_kind("int", "register size")
        self.expect("]")
        self.expect(";")
        if name.text in self.qregs or name.text in self.cregs:
            raise ResolutionError(f"register {name.text!r} already declared", name.line, name.col)
        size = int(size_tok.text)
        if size < 1:
            raise ResolutionError("register size must be at least 1", size_tok.line, size_tok.col)
        if kw.text == "qreg":
            self.qregs[name.text] = size
            return QregDecl(name.text, size)
        self.cregs[name.text] = size
        return CregDecl(name.text, size)

    def _formals(self) -> tuple[list[str], list[str]]:
        params: list[str] = []
        if self.at("("):
            self.next()
            if not self.at(")"):
                params.append(self.ident().text)
                while self.at(","):
                    self.next()
                    params.append(self.ident().text)
            self.expect(")")
        qargs = [self.ident().text]
        while self.at(","):
            self.next()
            qargs.append(self.ident().text)
        return params, qargs

    def _check_new_gate(self, name: Token, params, qargs):
        if name.text in self.gates:
            raise ResolutionError(f"gate {name.text!r} already defined", name.line, name.col)
        for group in (params, qargs):
            if len(set(group)) != len(group):
                raise ResolutionError(f"duplicate formal in gate {name.text!r}", name.line, name.col)

    def gate_def(self) -> GateDef:
        self.expect("gate")
        name = self.ident()
        params, qargs = self._formals()
        self._check_new_gate(name, params, qargs)
        self.expect("{")
        body = []
        while not self.at("}"):
            tok = self.peek()
            if tok.text == "barrier":
                self.next()
                args = self._body_args(qargs)
                self.expect(";")
                body.append(Barrier(tuple(args)))
                continue
            gname = self.ident()
            sig = self._lookup_gate(gname)
            exprs = self._param_list(set(params)) if self.at("(") else []
            args = self._body_args(qargs)
            self.expect(";")
            self._check_arity(gname, sig, len(exprs), len(args))
            if len(set(args)) != len(args):
                raise ResolutionError("repeated qubit argument", gname.line, gname.col)
            body.append(GateApply(gname.text, tuple(exprs), tuple(args)))
        self.expect("}")
        gdef = GateDef(name.text, tuple(params), tuple(qargs), tuple(body))
        self.gates[name.text] = GateSig(name.text, len(params), len(qargs), gdef)
        return gdef

    def opaque_decl(self) -> OpaqueDecl:
        self.expect("opaque")
        name = self.ident()
        params, qargs = self._formals()
        self.expect(";")
        self._check_new_gate(name, params, qargs)
        self.gates[name.text] = GateSig(name.text, len(params), len(qargs), None, opaque=True)
        return OpaqueDecl(name.text, tuple(params), tuple(qargs))

    def _body_args(self, formals) -> list[str]:
        args = []
        while True:
            tok = self.ident()
            if tok.text not in formals:
                raise ResolutionError(f"unknown qubit argument {tok.text!r}", tok.line, tok.col)
            if self.at("["):
                raise QasmSyntaxError("indexing not allowed inside gate bodies", tok.line, tok.col)
            args.append(tok.text)
            if not self.at(","):
                return args
            self.next()

    def _lookup_gate(self, tok: Token) -> GateSig:
        sig = self.gates.get(tok.text)
        if sig is None:
            # the standard library is always visible, include or not
            from .qelib1 import qelib1_gates

            gdef = qelib1_gates().get(tok.text)
            if gdef is not None:
                sig = GateSig(gdef.name, len(gdef.params), len(gdef.qargs), gdef)
        if sig is None:
            raise ResolutionError(f"undefined gate {tok.text!r}", tok.line, tok.col)
        return sig

    def _check_arity(self, tok: Token, sig: GateSig, n_params: int, n_qargs: int):
        if n_params != sig.n_params:
            raise ResolutionError(
                f"gate {sig.name!r} takes {sig.n_params} parameter(s), got {n_params}", tok.line, tok.col
            )
        if n_qargs != sig.n_qargs:
            raise ResolutionError(
                f"gate {sig.name!r} takes {sig.n_qargs} qubit argument(s), got {n_qargs}", tok.line, tok.col
            )

    # -- expressions ---------------------------------------------------
    def _param_list(self, names: Optional[set]) -> list:
        self.expect("(")
        exprs = []
        if not self.at(")"):
            exprs.append(self._expr(names))
            while self.at(","):
                self.next()
                exprs.append(self._expr(names))
        self.expect(")")
        return exprs

    def _expr(self, names) -> Expr:
        lhs = self._term(names)
        while self.at("+") or self.at("-"):
            op = self.next().text
            lhs = BinOp(op, lhs, self._term(names))
        return lhs

    def _term(self, names) -> Expr:
        lhs = self._unary(names)
        while self.at("*") or self.at("/"):
            op = self.next().text
            lhs = BinOp(op, lhs, self._unary(names))
        return lhs

    def _unary(self, names) -> Expr:
        if self.at("-"):
            self.next()
            return Neg(self._unary(names))
        if self.at("+"):
            self.next()
            return self._unary(names)
        return self._power(names)

    def _power(self, names) -> Expr:
        base = self._atom(names)
        if self.at("^"):
            self.next()
            return BinOp("^", base, self._unary(names))
        return base

    def _atom(self, names) -> Expr:
        tok = self.next()
        if tok.kind in ("real", "int"):
            return Num(float(tok.text))
        if tok.kind == "id":
            if tok.text == "pi":
                return Pi()
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self._expr(names)
                self.expect(")")
                return Func(tok.text, arg)
            if names is not None and tok.text in names:
                return Param(tok.text)
            raise ResolutionError(f"unknown identifier {tok.text!r} in expression", tok.line, tok.col)
        if tok.text == "(":
            inner = self._expr(names)
            self.expect(")")
            return inner
        raise QasmSyntaxError(f"unexpected {tok.text or 'end of input'!r} in expression", tok.line, tok.col)

    # -- register operands ----------------------------------------------
    def _operand(self, regs: dict[str, int], what: str) -> tuple[str, Optional[int], Token]:
        tok = self.ident()
        if tok.text not in regs:
            raise ResolutionError(f"undeclared {what} register {tok.text!r}", tok.line, tok.col)
        index = None
        if self.at("["):
            self.next()
            idx_tok = self.expect_kind("int", "index")
            self.expect("]")
            index = int(idx_tok.text)
            if index >= regs[tok.text]:
                raise ResolutionError(
                    f"index {index} out of bounds for {tok.text}[{regs[tok.text]}]", idx_tok.line, idx_tok.col
                )
        return tok.text, index, tok

    def _broadcast(self, operands, regs_list) -> list[list[Ref]]:
        """Expand operands into per-element reference lists."""
        width = None
        for (name, index, tok), regs in zip(operands, regs_list):
            if index is None:
                size = regs[name]
                if width is not None and size != width:
                    raise ResolutionError("register sizes differ in broadcast", tok.line, tok.col)
                width = size
        rows = []
        for i in range(width or 1):
            rows.append([Ref(name, i if index is None else index) for name, index, _ in operands])
        return rows

    def gate_apply(self) -> list[GateApply]:
        name = self.ident()
        sig = self._lookup_gate(name)
        exprs = self._param_list(None) if self.at("(") else []
        operands = [self._operand(self.qregs, "quantum")]
        while self.at(","):
            self.next()
            operands.append(self._operand(self.qregs, "quantum"))
        self.expect(";")
        self._check_arity(name, sig, len(exprs), len(operands))
        params = tuple(float(e.evaluate({})) for e in exprs)
        out = []
        for refs in self._broadcast(operands, [self.qregs] * len(operands)):
            if len(set(refs)) != len(refs):
                raise ResolutionError("repeated qubit argument", name.line, name.col)
            out.append(GateApply(name.text, params, tuple(refs)))
        return out

    def measure(self) -> list[Measure]:
        self.expect("measure")
        q = self._operand(self.qregs, "quantum")
        self.expect("->")
        c = self._operand(self.cregs, "classical")
        self.expect(";")
        return [Measure(a, b) for a, b in self._broadcast([q, c], [self.qregs, self.cregs])]

    def reset(self) -> list[Reset]:
        self.expect("reset")
        q = self._operand(self.qregs, "quantum")
        self.expect(";")
        return [Reset(r) for (r,) in self._broadcast([q], [self.qregs])]

    def barrier(self) -> Barrier:
        self.expect("barrier")
        refs: list[Ref] = []
        while True:
            name, index, _ = self._operand(self.qregs, "quantum")
            if index is None:
                refs.extend(Ref(name, i) for i in range(self.qregs[name]))
            else:
                refs.append(Ref(name, index))
            if not self.at(","):
                break
            self.next()
        self.expect(";")
        return Barrier(tuple(dict.fromkeys(refs)))

    def if_stmt(self) -> list[IfStmt]:
        self.expect("if")
        self.expect("(")
        creg = self.ident()
        if creg.text not in self.cregs:
            raise ResolutionError(f"undeclared classical register {creg.text!r}", creg.line, creg.col)
        self.expect("==")
        value = self.expect_kind("int", "integer")
        self.expect(")")
        head = self.peek()
        if head.text == "measure":
            body = self.measure()
        elif head.text == "reset":
            body = self.reset()
        elif head.kind == "id" and head.text not in ("if", "gate", "opaque", "qreg", "creg", "barrier"):
            body = self.gate_apply()
        else:
            raise QasmSyntaxError("expected a quantum operation after if(...)", head.line, head.col)
        return [IfStmt(creg.text, int(value.text), b) for b in body]


def parse_qasm(source: str) -> QasmProgram:
    """Parse and resolve OpenQASM 2.0 source text."""
    return _Parser(source).program()


def parse_gate_library(source: str) -> dict[str, GateDef]:
    return _Parser(source).library()


def gate_signatures(program: QasmProgram) -> dict[str, GateSig]:
    """Gates visible at the end of `program`: builtins, qelib1, and its own definitions."""
    from .qelib1 import qelib1_gates

    sigs = dict(BUILTIN_GATES)
    for gdef in qelib1_gates().values():
        sigs[gdef.name] = GateSig(gdef.name, len(gdef.params), len(gdef.qargs), gdef)
    for stmt in program.statements:
        if isinstance(stmt, GateDef):
            sigs[stmt.name] = GateSig(stmt.name, len(stmt.params), len(stmt.qargs), stmt)
        elif isinstance(stmt, OpaqueDecl):
            sigs[stmt.name] = GateSig(stmt.name, len(stmt.params), len(stmt.qargs), None, opaque=True)
    return sigs
