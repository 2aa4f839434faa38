"""Static verification: typing, structure, dominance, and single use of qubits.

Two single-use checkers are provided.  `verify_single_use_regions` handles the
structured form (one block per region, control flow via scf.if / scf.for) in
time linear in the program size.  `verify_single_use_cfg` handles flat
multi-block acyclic CFGs by a per-qubit dynamic program over the blocks in
reverse topological order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .ir.core import (
    K,
    TERMINATORS,
    Block,
    FunctionDef,
    ModuleIR,
    Operation,
    Region,
    Value,
    type_errors,
)
from .ir.types import QubitType


class DiagKind(str, Enum):
    DOUBLE_USE = "DoubleUse"
    ESCAPED_LOOP_QUBIT = "EscapedLoopQubit"
    UNUSED_QUBIT_LEAK = "UnusedQubitLeak"
    TYPE_ERROR = "TypeError"


class MalformedRegion(ValueError):
    """The function is outside the structured subset the region checker accepts."""


class CyclicCFG(ValueError):
    """The flat CFG has a cycle, outside the domain of the block-marking check."""


@dataclass
class Diagnostic:
    kind: DiagKind
    message: str
    value: Optional[Value] = None
    sites: list = field(default_factory=list)
    severity: str = "error"

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def line(self) -> Optional[int]:
        for op in self.sites:
            if getattr(op, "loc", None) is not None:
                return op.loc
        return None

    def format(self, filename: str = "<input>") -> str:
        line = self.line()
        where = f"{filename}:{line}" if line is not None else filename
        return f"{where}: {self.severity}: {self.message}"

    def __str__(self):
        return self.format()


def value_name(v: Value) -> str:
    return f"%{v.name_hint}" if v.name_hint else f"%v{v.id}"


def _site(op: Operation) -> str:
    if op.loc is not None:
        return f"line {op.loc}"
    return op.kind.value


def _is_qubit(v: Value) -> bool:
    return isinstance(v.type, QubitType)


def double_use(v: Value, first: Operation, second: Operation) -> Diagnostic:
    return Diagnostic(
        DiagKind.DOUBLE_USE,
        f"qubit {value_name(v)} used twice (first use at {_site(first)}, second use at {_site(second)})",
        v,
        [first, second],
    )


# ---------------------------------------------------------------------------
# types, structure and dominance


def _dominators(region: Region) -> dict[Block, set[Block]]:
    blocks = region.blocks
    entry = blocks[0]
    preds: dict = {b: [] for b in blocks}
    for b in blocks:
        for s in b.successors:
            if s in preds:
                preds[s].append(b)
    dom = {b: set(blocks) for b in blocks}
    dom[entry] = {entry}
    changed = True
    while changed:
        changed = False
        for b in blocks[1:]:
            ps = [dom[p] for p in preds[b]]
            new = set.intersection(*ps) | {b} if ps else {b}
            if new != dom[b]:
                dom[b] = new
                changed = True
    return dom


class _TypeChecker:
    def __init__(self, module: ModuleIR):
        self.module = module
        self.signatures = {f.name: (f.arg_types, f.result_types) for f in module.functions}
        self.diags: list[Diagnostic] = []

    def report(self, msg: str, op: Optional[Operation] = None):
        self.diags.append(Diagnostic(DiagKind.TYPE_ERROR, msg, None, [op] if op is not None else []))

    def run(self) -> list[Diagnostic]:
        names = [f.name for f in self.module.functions]
        for name in sorted({n for n in names if names.count(n) > 1}):
            self.report(f"duplicate function @{name}")
        for func in self.module.functions:
            self.func = func
            if [a.type for a in func.args] != list(func.arg_types):
                self.report(f"@{func.name}: entry block arguments do not match the signature")
            self.check_region(func.body, set(), top=True)
        return self.diags

    def check_region(self, region: Region, visible: set, top: bool):
        if not region.blocks:
            self.report("region has no blocks")
            return
        if len(region.blocks) > 1:
            dom = _dominators(region)
            defs = {b: set(b.args) | {r for op in b.ops for r in op.results} for b in region.blocks}
        for block in region.blocks:
            scope = set(visible)
            scope.update(block.args)
            if len(region.blocks) > 1:
                for d in dom[block] - {block}:
                    scope |= defs[d]
            self.check_block(block, region, scope, top)

    def check_block(self, block: Block, region: Region, scope: set, top: bool):
        if not block.ops or block.ops[-1].kind not in TERMINATORS:
            self.report("block does not end in a terminator", block.ops[-1] if block.ops else None)
        for i, op in enumerate(block.ops):
            if op.kind in TERMINATORS and i != len(block.ops) - 1:
                self.report(f"{op.kind.value} must be the last operation of its block", op)
            for msg in type_errors(op, self.signatures):
                self.report(msg, op)
            for v in op.operands:
                if v not in scope:
                    self.report(f"{op.kind.value}: operand {value_name(v)} does not dominate this use", op)
            self.check_terminator(op, region, top)
            for r in op.regions:
                self.check_region(r, scope, top=False)
            scope.update(op.results)

    def check_terminator(self, op: Operation, region: Region, top: bool):
        if op.kind == K.RETURN:
            if not top:
                self.report("return outside a function body", op)
            elif [v.type for v in op.operands] != list(self.func.result_types):
                self.report(f"return types do not match @{self.func.name} results", op)
        elif op.kind == K.YIELD:
            if top:
                self.report("scf.yield outside an scf region", op)
        elif op.kind in (K.BR, K.COND_BR):
            if not top:
                self.report(f"{op.kind.value} inside a structured region", op)
            for s in op.successors:
                if s.parent is not region:
                    self.report(f"{op.kind.value} targets a block of another region", op)
                elif s is region.entry:
                    self.report(f"{op.kind.value} cannot target the entry block", op)


def verify_types(module: ModuleIR) -> list[Diagnostic]:
    """Type-rule, terminator and dominance violations; empty when well formed."""
    return _TypeChecker(module).run()


# ---------------------------------------------------------------------------
# single use over structured regions


_NO_CAPTURES: dict = {}


def _captures(op: Operation, memo: dict) -> dict[Value, Operation]:
    """Qubits defined outside `op` but used inside its regions, mapped to the first inner use."""
    if not op.regions:
        return _NO_CAPTURES
    if op in memo:
        return memo[op]
    free: dict = {}
    for region in op.regions:
        local: set = set()
        for block in region.blocks:
            local.update(block.args)
            for inner in block.ops:
                for v in inner.operands:
                    if _is_qubit(v) and v not in local and v not in free:
                        free[v] = inner
                for v, site in _captures(inner, memo).items():
                    if v not in local and v not in free:
                        free[v] = site
                local.update(inner.results)
    memo[op] = free
    return free


class _RegionChecker:
    def __init__(self):
        self.diags: list[Diagnostic] = []
        self.memo: dict = {}

    def consume(self, v: Value, site: Operation, D: set, U: dict, B: list):
        if v in D:
            D.remove(v)
            U[v] = site
            B.append(("use", v))
        elif v in U:
            self.diags.append(double_use(v, U[v], site))
        else:
            self.diags.append(
                Diagnostic(
                    DiagKind.ESCAPED_LOOP_QUBIT,
                    f"qubit {value_name(v)} defined outside an scf.for is used inside its body "
                    f"without being passed as an iter_arg (use at {_site(site)})",
                    v,
                    [site],
                )
            )

    def region(self, region: Region, D: set, U: dict):
        if len(region.blocks) != 1:
            raise MalformedRegion("structured regions must consist of a single block")
        block = region.entry
        B: list = []
        for arg in block.args:
            if _is_qubit(arg) and arg not in D:
                D.add(arg)
                B.append(("def", arg))
        # 1. linear pass: each qubit operand must be live in D
        for op in block.ops:
            if op.kind in (K.BR, K.COND_BR):
                raise MalformedRegion(f"{op.kind.value} in a structured function")
            for v in op.operands:
                if _is_qubit(v):
                    self.consume(v, op, D, U, B)
            # qubits captured by nested regions count as consumed by the region op here
            for v, site in _captures(op, self.memo).items():
                self.consume(v, site, D, U, B)
            for r in op.results:
                if _is_qubit(r):
                    D.add(r)
                    B.append(("def", r))
        # 2. recurse into nested regions
        for op in block.ops:
            if op.kind == K.SCF_IF:
                captured = _captures(op, self.memo)
                for branch in op.regions:
                    saved = {v: U.pop(v) for v in captured if v in U}
                    added = [v for v in captured if v not in D]
                    D.update(added)
                    self.region(branch, D, U)
                    D.difference_update(added)
                    U.update(saved)
            elif op.kind == K.SCF_FOR:
                self.region(op.regions[0], set(), {})
            elif op.regions:
                raise MalformedRegion(f"unsupported region operation {op.kind.value}")
        # 3. roll back
        for action, v in reversed(B):
            if action == "use":
                U.pop(v, None)
                D.add(v)
            else:
                D.discard(v)
                U.pop(v, None)


def _leaks(func: FunctionDef) -> list[Diagnostic]:
    out = []
    values: list[tuple[Value, Optional[Operation]]] = []

    def collect(region: Region):
        for block in region.blocks:
            values.extend((a, None) for a in block.args)
            for op in block.ops:
                values.extend((r, op) for r in op.results)
                for r in op.regions:
                    collect(r)

    collect(func.body)
    for v, op in values:
        if _is_qubit(v) and not v.uses:
            out.append(
                Diagnostic(
                    DiagKind.UNUSED_QUBIT_LEAK,
                    f"qubit {value_name(v)} is defined but never used",
                    v,
                    [op] if op is not None else [],
                    severity="warning",
                )
            )
    return out


def verify_single_use_regions(func: FunctionDef, leaks: bool = True) -> list[Diagnostic]:
    """Region-based single-use check; raises MalformedRegion outside the structured subset."""
    checker = _RegionChecker()
    checker.region(func.body, set(), {})
    diags = checker.diags
    if leaks:
        diags.extend(_leaks(func))
    return diags


# ---------------------------------------------------------------------------
# single use over a flat acyclic CFG


def _topological_order(blocks: list[Block]) -> list[Block]:
    index = {b: i for i, b in enumerate(blocks)}
    indeg = {b: 0 for b in blocks}
    for b in blocks:
        for s in b.successors:
            indeg[s] += 1
    ready = [b for b in blocks if indeg[b] == 0]
    order = []
    while ready:
        ready.sort(key=index.get)
        b = ready.pop(0)
        order.append(b)
        for s in b.successors:
            indeg[s] -= 1
            if indeg[s] == 0:
                ready.append(s)
    if len(order) != len(blocks):
        raise CyclicCFG("control-flow graph has a cycle")
    return order


def verify_single_use_cfg(func: FunctionDef, leaks: bool = True) -> list[Diagnostic]:
    """Block-marking single-use check on a flat acyclic CFG."""
    blocks = func.body.blocks
    for block in blocks:
        for op in block.ops:
            if op.regions:
                raise MalformedRegion("flat CFG check does not accept region operations")
    order = _topological_order(blocks)
    # qubit -> block -> ordered uses in that block
    uses: dict[Value, dict[Block, list[Operation]]] = {}
    for block in blocks:
        for op in block.ops:
            for v in op.operands:
                if _is_qubit(v):
                    uses.setdefault(v, {}).setdefault(block, []).append(op)
    diags = []
    reverse = order[::-1]
    for v, per_block in uses.items():
        reported = False
        for ops in per_block.values():
            if len(ops) > 1:
                diags.append(double_use(v, ops[0], ops[1]))
                reported = True
                break
        if reported or len(per_block) < 2:
            continue
        marked: dict[Block, Optional[Operation]] = {}
        for block in reverse:
            below = next((marked[s] for s in block.successors if marked.get(s) is not None), None)
            own = per_block.get(block)
            if own is not None and below is not None:
                # marked once by its own use and again through a child
                diags.append(double_use(v, own[0], below))
                break
            marked[block] = own[0] if own is not None else below
    if leaks:
        diags.extend(_leaks(func))
    return diags


# ---------------------------------------------------------------------------
# whole module


def is_structured(func: FunctionDef) -> bool:
    return len(func.body.blocks) == 1 and not any(
        op.kind in (K.BR, K.COND_BR) for op in func.body.entry.ops
    )


def verify_module(module: ModuleIR, leaks: bool = True) -> list[Diagnostic]:
    """All diagnostics: typing first, then single use per function (structured or flat CFG)."""
    diags = verify_types(module)
    if any(d.is_error for d in diags):
        return diags
    for func in module.functions:
        if is_structured(func):
            diags.extend(verify_single_use_regions(func, leaks))
        else:
            diags.extend(verify_single_use_cfg(func, leaks))
    return diags


def errors(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.is_error]


def is_clean(module: ModuleIR) -> bool:
    return not errors(verify_module(module, leaks=False))
