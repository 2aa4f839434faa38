"""Peephole identities as data.

A pattern is a matcher DAG rooted at the last operation of the sub-circuit
plus a replacement: one expression per root result.  Matcher nodes are
`P(kind, operands)`; operands are either nested `P` nodes (the operand must
be a result of the matched op), `Var` captures (any value, bound by name) or
`Res` back-references to a result of an already-bound node.  Replacement
expressions are `Var`s (forward a captured value) or `New` nodes (build a
fresh operation).  Patterns whose replacement is not expressible as data
(U merging) supply a native `rewrite` callable instead.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..gates import is_identity_up_to_phase, op_matrix, zyz_angles
from ..ir.core import K, OpKind, Operation, gate_angles
from ..ir.types import QUBIT


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Res:
    """Result `index` of the matched node bound to `node`."""

    node: str
    index: int


@dataclass(frozen=True)
class P:
    kinds: frozenset
    operands: tuple = ()
    bind: Optional[str] = None
    result: int = 0  # which result of this op is consumed by the parent
    where: Optional[Callable[[Operation], bool]] = None

    @staticmethod
    def of(kind, *operands, bind=None, result=0, where=None) -> "P":
        kinds = frozenset(kind) if isinstance(kind, (set, frozenset, tuple, list)) else frozenset({kind})
        return P(kinds, tuple(operands), bind, result, where)


@dataclass(frozen=True)
class New:
    kind: OpKind
    operands: tuple
    key: str
    attrs: tuple = ()


@dataclass(frozen=True)
class NewRes:
    new: New
    index: int


@dataclass
class RewritePattern:
    name: str
    root: P
    replacement: Optional[tuple] = None  # expression per root result
    rewrite: Optional[Callable[["Match"], Optional[tuple]]] = None
    benefit: int = 1
    family: str = ""
    note: Optional[str] = None


@dataclass
class Match:
    pattern: RewritePattern
    root: Operation
    ops: dict = field(default_factory=dict)  # bind name -> Operation
    vars: dict = field(default_factory=dict)  # Var name -> Value
    matched: list = field(default_factory=list)  # all matched ops, root first


def _match_node(node: P, op: Operation, m: Match) -> bool:
    if op.kind not in node.kinds:
        return False
    if node.where is not None and not node.where(op):
        return False
    if len(node.operands) != len(op.operands):
        return False
    m.matched.append(op)
    if node.bind is not None:
        m.ops[node.bind] = op
    for sub, value in zip(node.operands, op.operands):
        if isinstance(sub, Var):
            bound = m.vars.get(sub.name)
            if bound is not None and bound is not value:
                return False
            m.vars[sub.name] = value
        elif isinstance(sub, Res):
            other = m.ops.get(sub.node)
            if other is None or value is not other.results[sub.index]:
                return False
        else:
            d = value.defining_op
            if d is None or value.index != sub.result or d.parent is not m.root.parent:
                return False
            if any(x is d for x in m.matched) and sub.bind is None:
                return False
            if not _match_node(sub, d, m):
                return False
    return True


def match(pattern: RewritePattern, op: Operation) -> Optional[Match]:
    m = Match(pattern, op)
    if not _match_node(pattern.root, op, m):
        return None
    # interior ops are erased, so every one of their results must be consumed inside the match
    inner = {id(x) for x in m.matched}
    for x in m.matched[1:]:
        for r in x.results:
            if any(id(user) not in inner for user, _ in r.uses):
                return None
    return m


# ---------------------------------------------------------------------------
# predicates and native rewrites

MERGEABLE = frozenset({K.U, K.RX, K.RY, K.RZ, K.S, K.SDG, K.T, K.TDG})
DIAGONAL_FIXED = frozenset({K.Z, K.S, K.SDG, K.T, K.TDG, K.RZ})
ANGLE_TOL = 1e-12


def _constant_angles(op: Operation) -> bool:
    return gate_angles(op) is not None


def _is_phase_gate(op: Operation) -> bool:
    """Diagonal in the computational basis."""
    if op.kind in DIAGONAL_FIXED:
        return True
    if op.kind == K.U:
        angles = gate_angles(op)
        return angles is not None and abs(math.remainder(angles[0], 2 * math.pi)) <= ANGLE_TOL
    return False


def _single_qubit_measure(op: Operation) -> bool:
    return op.operands[0].type == QUBIT


def merge_u(m: Match) -> Optional[tuple]:
    first, second = m.ops["first"], m.root
    product = op_matrix(second) @ op_matrix(first)
    q = m.vars["q"]
    if is_identity_up_to_phase(product, ANGLE_TOL):
        return (q,)
    theta, phi, lam = zyz_angles(product)
    return (New(K.U, (q,), "merged", (("theta", theta), ("phi", phi), ("lambda", lam))),)


# ---------------------------------------------------------------------------
# the table

q = Var("q")


def _self_inverse(kind: OpKind, family: str) -> RewritePattern:
    name = kind.value.split(".")[1]
    return RewritePattern(
        f"{name}{name}",
        P.of(kind, P.of(kind, q)),
        replacement=(q,),
        benefit=2,
        family=family,
    )


def _pauli_triples() -> list[RewritePattern]:
    out = []
    for a, b, c in itertools.permutations((K.X, K.Y, K.Z)):
        name = "".join(k.value.split(".")[1] for k in (a, b, c))
        out.append(
            RewritePattern(
                name,
                P.of(c, P.of(b, P.of(a, q))),
                replacement=(q,),
                benefit=3,
                family="pauli",
                note=f"{name} product erased; it equals the identity up to a global phase of +-i",
            )
        )
    return out


PATTERNS: list[RewritePattern] = [
    RewritePattern(
        "drop-phase-before-measure",
        P.of(K.MEASURE, P.of(frozenset(DIAGONAL_FIXED | {K.U}), q, where=_is_phase_gate), where=_single_qubit_measure),
        replacement=(NewRes(New(K.MEASURE, (q,), "m"), 0), NewRes(New(K.MEASURE, (q,), "m"), 1)),
        benefit=4,
        family="phase-before-measure",
    ),
    RewritePattern(
        "CNOT-CNOT",
        P.of(K.CNOT, P.of(K.CNOT, Var("c"), Var("t"), bind="first", result=0), Res("first", 1)),
        replacement=(Var("c"), Var("t")),
        benefit=2,
        family="cnot-cnot",
    ),
    *_pauli_triples(),
    _self_inverse(K.X, "pauli"),
    _self_inverse(K.Y, "pauli"),
    _self_inverse(K.Z, "pauli"),
    _self_inverse(K.H, "hadamard"),
    RewritePattern(
        "U-merge",
        P.of(MERGEABLE, P.of(MERGEABLE, q, bind="first", where=_constant_angles), where=_constant_angles),
        rewrite=merge_u,
        benefit=1,
        family="u-merge",
    ),
]

FAMILIES = ("cnot-cnot", "u-merge", "pauli", "hadamard", "phase-before-measure")
