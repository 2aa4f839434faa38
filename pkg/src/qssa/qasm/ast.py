"""OpenQASM 2.0 abstract syntax tree.

Top-level statements carry fully resolved data: register references are
always indexed (whole-register broadcasts are desugared by the parser) and
gate parameters are evaluated to float radians. Gate definition bodies keep
their parameters symbolic, as `Expr` trees over the gate's formal names.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union


class Expr:
    """Base class for symbolic angle expressions inside gate bodies."""

    def evaluate(self, env: Mapping[str, float]) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Num(Expr):
    value: float

    def evaluate(self, env):
        return self.value

    def __str__(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class Pi(Expr):
    def evaluate(self, env):
        return math.pi

    def __str__(self):
        return "pi"


@dataclass(frozen=True)
class Param(Expr):
    name: str

    def evaluate(self, env):
        return env[self.name]

    def __str__(self):
        return self.name


_BINOPS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
    "^": lambda a, b: a**b,
}

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
}


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    lhs: Expr
    rhs: Expr

    def evaluate(self, env):
        return _BINOPS[self.op](self.lhs.evaluate(env), self.rhs.evaluate(env))

    def __str__(self):
        return f"({self.lhs}{self.op}{self.rhs})"


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def evaluate(self, env):
        return -self.operand.evaluate(env)

    def __str__(self):
        return f"-{self.operand}"


@dataclass(frozen=True)
class Func(Expr):
    name: str
    arg: Expr

    def evaluate(self, env):
        return FUNCTIONS[self.name](self.arg.evaluate(env))

    def __str__(self):
        return f"{self.name}({self.arg})"


@dataclass(frozen=True)
class Ref:
    """An indexed element `reg[index]` of a quantum or classical register."""

    reg: str
    index: int

    def __str__(self):
        return f"{self.reg}[{self.index}]"


@dataclass(frozen=True)
class QregDecl:
    name: str
    size: int


@dataclass(frozen=True)
class CregDecl:
    name: str
    size: int


@dataclass(frozen=True)
class GateApply:
    """Gate application.

    At top level `params` are floats and `qargs` are `Ref`s; inside a gate
    body `params` are `Expr`s and `qargs` are the formal argument names.
    """

    name: str
    params: tuple = ()
    qargs: tuple = ()


@dataclass(frozen=True)
class Measure:
    qubit: Ref
    bit: Ref


@dataclass(frozen=True)
class Reset:
    qubit: Ref


@dataclass(frozen=True)
class Barrier:
    qargs: tuple


@dataclass(frozen=True)
class GateDef:
    name: str
    params: tuple[str, ...]
    qargs: tuple[str, ...]
    body: tuple  # GateApply | Barrier, symbolic


@dataclass(frozen=True)
class OpaqueDecl:
    name: str
    params: tuple[str, ...]
    qargs: tuple[str, ...]


@dataclass(frozen=True)
class IfStmt:
    creg: str
    value: int
    body: Union[GateApply, Measure, Reset]


Stmt = Union[QregDecl, CregDecl, GateDef, OpaqueDecl, GateApply, Measure, Reset, Barrier, IfStmt]


@dataclass(frozen=True)
class QasmProgram:
    version: str = "2.0"
    statements: tuple = ()

    def qregs(self) -> list[QregDecl]:
        return [s for s in self.statements if isinstance(s, QregDecl)]

    def cregs(self) -> list[CregDecl]:
        return [s for s in self.statements if isinstance(s, CregDecl)]

    def gate_defs(self) -> dict[str, GateDef]:
        return {s.name: s for s in self.statements if isinstance(s, GateDef)}

    def num_qubits(self) -> int:
        return sum(r.size for r in self.qregs())
