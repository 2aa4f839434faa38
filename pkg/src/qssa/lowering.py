"""Lower `@main` back to OpenQASM 2.0.

Each gate's results are identified with its operands (the wire-collapsing
rule), so every single-qubit SSA value traces back to one physical qubit.
All allocations are coalesced into one register `q` in allocation order;
bit cells are grouped into classical registers by their `name` attribute.
A measurement is emitted where it occurs, targeting the cell(s) its result
is stored to.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .gates import zyz_angles
from .ir.core import (
    ARRAY_KINDS,
    CLASSICAL_KINDS,
    GATE_KINDS,
    K,
    ModuleIR,
    Operation,
    Region,
    Value,
    gate_angles,
    walk_region,
)
from .ir.types import BitTensorType, QubitType
from .qasm import ast as qast


class NotLowerable(ValueError):
    pass


_NAMES = {
    K.X: "x", K.Y: "y", K.Z: "z", K.H: "h", K.S: "s", K.SDG: "sdg", K.T: "t", K.TDG: "tdg",
    K.RX: "rx", K.RY: "ry", K.RZ: "rz", K.U: "u3", K.CNOT: "cx",
}


def _main(module: ModuleIR):
    main = module.main
    if main is None:
        raise NotLowerable("module has no @main")
    if len(main.body.blocks) != 1:
        raise NotLowerable("@main has an unstructured multi-block body")
    for op in main.walk():
        if op.kind == K.CALL:
            raise NotLowerable("calls remain; run the inline pass first")
        if op.kind == K.SCF_FOR:
            raise NotLowerable("loops remain; run the unroll pass first")
        for v in [*op.operands, *op.results]:
            if isinstance(v.type, QubitType) and not v.type.is_static:
                raise NotLowerable("dynamically sized qubit arrays cannot be lowered")
    return main


def _trace(main) -> tuple[dict[Value, tuple], int]:
    wires: dict[Value, tuple] = {}
    count = 0
    for arg in main.args:
        if isinstance(arg.type, QubitType):
            wires[arg] = tuple(range(count, count + arg.type.size))
            count += arg.type.size

    def region(r: Region, top: bool):
        nonlocal count
        for op in r.entry.ops:
            k = op.kind
            if k == K.ALLOC:
                if not top:
                    raise NotLowerable("allocation inside a conditional")
                if op.operands:
                    raise NotLowerable("dynamically sized allocation")
                wires[op.result] = tuple(range(count, count + op.attrs["size"]))
                count += op.attrs["size"]
            elif k in GATE_KINDS or k in (K.BARRIER, K.RESET):
                qs = [v for v in op.operands if isinstance(v.type, QubitType)]
                for v, res in zip(qs, op.results):
                    wires[res] = wires[v]
            elif k == K.MEASURE:
                wires[op.results[1]] = wires[op.operands[0]]
            elif k == K.SPLIT:
                src = wires[op.operands[0]]
                a = op.results[0].type.size
                wires[op.results[0]], wires[op.results[1]] = src[:a], src[a:]
            elif k == K.CONCAT:
                wires[op.result] = wires[op.operands[0]] + wires[op.operands[1]]
            elif k == K.CAST:
                wires[op.result] = wires[op.operands[0]]
            elif k == K.DIM:
                wires[op.results[1]] = wires[op.operands[0]]
            elif k == K.SCF_IF:
                for branch in op.regions:
                    region(branch, False)
                then_y = op.regions[0].entry.terminator
                else_y = op.regions[1].entry.terminator
                for i, res in enumerate(op.results):
                    if not isinstance(res.type, QubitType):
                        raise NotLowerable("scf.if yields a classical value")
                    a, b = wires[then_y.operands[i]], wires[else_y.operands[i]]
                    if a != b:
                        raise NotLowerable("branches of scf.if permute physical qubits")
                    wires[res] = a

    region(main.body, True)
    return wires, count


def wire_trace(module: ModuleIR) -> dict[Value, int]:
    """Physical qubit index of every single-qubit value of `@main`."""
    wires, _ = _trace(_main(module))
    return {v: w[0] for v, w in wires.items() if len(w) == 1}


@dataclass
class _Creg:
    name: str
    size: int


class _Lowerer:
    def __init__(self, module: ModuleIR):
        self.main = _main(module)
        self.wires, self.n_qubits = _trace(self.main)
        self.out: list = []
        self._assign_registers()

    # registers
    def _assign_registers(self):
        cells = [op for op in self.main.entry.ops if op.kind == K.MEM_ALLOC_BIT]
        for op in walk_region(self.main.body):
            if op.kind == K.MEM_ALLOC_BIT and op.parent is not self.main.entry:
                raise NotLowerable("bit cell allocated inside a conditional")
        groups: dict[str, list] = {}
        unnamed = []
        for op in cells:
            name = op.attrs.get("name")
            if isinstance(name, str):
                groups.setdefault(name, []).append(op)
            else:
                unnamed.append(op)
        taken = set(groups)
        self.qreg = "q"
        while self.qreg in taken:
            self.qreg += "_"
        taken.add(self.qreg)
        self.cell_ref: dict[Value, qast.Ref] = {}
        self.cregs: list[_Creg] = []
        self.group_cells: dict[str, list[Value]] = {}
        order = []
        for op in cells:
            name = op.attrs.get("name")
            key = name if isinstance(name, str) else None
            if key not in order:
                order.append(key)
        for key in order:
            if key is None:
                name = "c"
                while name in taken:
                    name += "_"
                taken.add(name)
                members = [(i, op) for i, op in enumerate(unnamed)]
                size = len(unnamed)
            else:
                name = key
                members = [(op.attrs.get("index", i), op) for i, op in enumerate(groups[key])]
                size = max([op.attrs.get("size", 0) for _, op in members] + [m[0] + 1 for m in members])
            indices = [i for i, _ in members]
            if len(set(indices)) != len(indices):
                raise NotLowerable(f"two bit cells claim the same position of creg {name!r}")
            self.cregs.append(_Creg(name, size))
            slots: list = [None] * size
            for i, op in members:
                self.cell_ref[op.result] = qast.Ref(name, i)
                slots[i] = op.result
            self.group_cells[name] = slots

    def qref(self, v: Value) -> qast.Ref:
        w = self.wires[v]
        if len(w) != 1:
            raise NotLowerable("multi-qubit array used where a single qubit is expected")
        return qast.Ref(self.qreg, w[0])

    # statements
    def gate_stmt(self, op: Operation) -> qast.GateApply:
        qs = [v for v in op.operands if isinstance(v.type, QubitType)]
        refs = [qast.Ref(self.qreg, i) for v in qs for i in self.wires[v]]
        if op.kind == K.GATE:
            if len(refs) != 1:
                raise NotLowerable("multi-qubit generic gates have no OpenQASM equivalent")
            return qast.GateApply("u3", tuple(float(a) for a in zyz_angles(op.attrs["matrix"])), tuple(refs))
        angles = gate_angles(op)
        if angles is None:
            raise NotLowerable(f"{op.kind.value} has a non-constant angle")
        return qast.GateApply(_NAMES[op.kind], tuple(float(a) for a in angles), tuple(refs))

    def measure_stmts(self, op: Operation, block_ops: list, pos: int) -> list:
        bits = op.results[0]
        targets = self.wires[op.operands[0]]
        stores: dict[int, list[Operation]] = {}
        for user, slot in bits.uses:
            if user.kind != K.MEM_STORE_BIT or slot != 0:
                raise NotLowerable("measurement result used other than by a bit store")
            if user.parent is not op.parent:
                raise NotLowerable("measurement stored in a different region")
            stores.setdefault(user.attrs.get("index", 0), []).append(user)
        out = []
        for k, q in enumerate(targets):
            if k not in stores:
                raise NotLowerable("measured bit is never stored")
            for store in sorted(stores[k], key=block_ops.index):
                cell = store.operands[1]
                self._check_no_cell_access(block_ops, pos, block_ops.index(store), cell)
                out.append(qast.Measure(qast.Ref(self.qreg, q), self.cell_ref[cell]))
        return out

    @staticmethod
    def _check_no_cell_access(block_ops: list, start: int, end: int, cell: Value):
        for other in block_ops[start + 1 : end]:
            if other.kind in (K.MEM_LOAD_BIT, K.MEM_STORE_BIT) and cell in other.operands:
                raise NotLowerable("bit cell accessed between a measurement and its store")
            if other.kind == K.SCF_IF and any(cell in x.operands for x in walk_region(other.regions[0])):
                raise NotLowerable("bit cell accessed between a measurement and its store")

    def condition(self, op: Operation, block_ops: list, pos: int) -> tuple[str, int]:
        cmp = op.operands[0].defining_op
        if cmp is None or cmp.kind != K.CMPI or cmp.attrs.get("pred") != "eq":
            raise NotLowerable("scf.if condition is not a register equality test")
        lhs, rhs = cmp.operands
        for value_side, const_side in ((lhs, rhs), (rhs, lhs)):
            c = const_side.defining_op
            if c is not None and c.kind == K.CONST_INT:
                terms = self._linear(value_side)
                if terms is None:
                    continue
                creg = self._match_register(terms)
                if creg is None:
                    continue
                self._check_loads_current(value_side, block_ops, pos, creg)
                return creg, c.attrs["value"]
        raise NotLowerable("scf.if condition does not compare a whole classical register")

    def _linear(self, v: Value) -> Optional[dict]:
        """Represent `v` as {cell: coefficient} over bit loads, or None."""
        d = v.defining_op
        if d is None:
            return None
        if d.kind == K.MEM_LOAD_BIT:
            return {d.operands[0]: 1}
        if d.kind == K.ADDI:
            a, b = self._linear(d.operands[0]), self._linear(d.operands[1])
            if a is None or b is None:
                return None
            out = dict(a)
            for cell, coef in b.items():
                out[cell] = out.get(cell, 0) + coef
            return out
        if d.kind == K.MULI:
            for x, y in (d.operands, d.operands[::-1]):
                c = y.defining_op
                if c is not None and c.kind == K.CONST_INT:
                    inner = self._linear(x)
                    if inner is not None:
                        return {cell: coef * c.attrs["value"] for cell, coef in inner.items()}
        return None

    def _match_register(self, terms: dict) -> Optional[str]:
        for name, slots in self.group_cells.items():
            if any(s is None for s in slots):
                continue
            expected = {cell: 1 << j for j, cell in enumerate(slots)}
            if {k: v for k, v in terms.items() if v} == expected:
                return name
        return None

    def _check_loads_current(self, v: Value, block_ops: list, pos: int, creg: str):
        loads = [u for u in self._loads(v)]
        cells = set(self.group_cells[creg])
        first = min(block_ops.index(ld) for ld in loads) if all(ld in block_ops for ld in loads) else None
        if first is None:
            raise NotLowerable("register loads are not in the same region as the conditional")
        for other in block_ops[first:pos]:
            if other.kind == K.MEM_STORE_BIT and other.operands[1] in cells:
                raise NotLowerable("register written between its loads and the conditional")

    def _loads(self, v: Value) -> list[Operation]:
        d = v.defining_op
        if d is None:
            return []
        if d.kind == K.MEM_LOAD_BIT:
            return [d]
        return [x for o in d.operands for x in self._loads(o)]

    def if_stmts(self, op: Operation, block_ops: list, pos: int) -> list:
        then_b, else_b = op.regions[0].entry, op.regions[1].entry
        if len(else_b.ops) != 1:
            raise NotLowerable("else-branch of scf.if is not empty")
        body = then_b.ops[:-1]
        if not any(x.kind in GATE_KINDS or x.kind in (K.MEASURE, K.RESET) for x in body):
            return []
        creg, value = self.condition(op, block_ops, pos)
        cells = set(self.group_cells[creg])
        inner = self.lower_block(then_b.ops, allow_control=False)
        # every statement repeats the test, so only the last may change the register
        physical = [x for x in body if x.kind in GATE_KINDS or x.kind in (K.MEASURE, K.RESET)]
        for x in physical[:-1]:
            if x.kind == K.MEASURE and any(u.operands[1] in cells for u, _ in x.results[0].uses):
                raise NotLowerable("conditional body overwrites the register it tests")
        return [qast.IfStmt(creg, value, s) for s in inner]

    def lower_block(self, ops: list, allow_control: bool = True) -> list:
        out = []
        for pos, op in enumerate(ops):
            k = op.kind
            if k in GATE_KINDS:
                out.append(self.gate_stmt(op))
            elif k == K.MEASURE:
                out.extend(self.measure_stmts(op, ops, pos))
            elif k == K.RESET:
                out.append(qast.Reset(self.qref(op.operands[0])))
            elif k == K.BARRIER:
                if not allow_control:
                    raise NotLowerable("barrier inside a conditional")
                refs = [qast.Ref(self.qreg, i) for v in op.operands for i in self.wires[v]]
                out.append(qast.Barrier(tuple(refs)))
            elif k == K.SCF_IF:
                if not allow_control:
                    raise NotLowerable("nested conditionals")
                out.extend(self.if_stmts(op, ops, pos))
            elif k == K.MEM_STORE_BIT:
                if not isinstance(op.operands[0].type, BitTensorType):
                    raise NotLowerable("store of a computed classical bit")
                src = op.operands[0].defining_op
                if src is None or src.kind != K.MEASURE:
                    raise NotLowerable("stored bits do not come from a measurement")
            elif k in ARRAY_KINDS or k in CLASSICAL_KINDS or k in (
                K.ALLOC, K.MEM_ALLOC_BIT, K.MEM_LOAD_BIT, K.RETURN, K.YIELD
            ):
                continue
            else:
                raise NotLowerable(f"{k.value} has no OpenQASM counterpart")
        return out

    def run(self) -> qast.QasmProgram:
        stmts: list = []
        if self.n_qubits:
            stmts.append(qast.QregDecl(self.qreg, self.n_qubits))
        stmts.extend(qast.CregDecl(c.name, c.size) for c in self.cregs)
        stmts.extend(self.lower_block(self.main.entry.ops))
        return qast.QasmProgram("2.0", tuple(stmts))


def lower(module: ModuleIR) -> qast.QasmProgram:
    """OpenQASM program equivalent to `@main`; raises NotLowerable outside the supported subset."""
    return _Lowerer(module).run()
