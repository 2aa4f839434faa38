import inspect
import math
import random
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_qasm
from qssa.gates import STANDARD_MATRICES, u3
from qssa.ir import QUBIT, print_ir
from qssa.ir.core import K, Block
from qssa.ir.builder import Builder
from qssa.qasm import UnsupportedError, parse_qasm
from qssa.qasm.qelib1 import qelib1_gates
from qssa.raising import UnknownGate, expand_stdlib_gate, raise_qasm
from qssa.sim import circuit_unitary, equiv_up_to_global_phase, run_distribution, simulate_qasm, total_variation
from qssa.verify import errors, verify_module

CORPUS = sorted((Path(__file__).parent.parent / "src" / "qssa" / "corpus").glob("*.qasm"))
HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def _kinds(module):
    return [op.kind for op in module.main.entry.ops]


def _fresh_qubits(n):
    b = Builder(Block())
    return [b.one(K.ALLOC, [], {"size": 1}) for _ in range(n)]


def test_two_qubit_entangle_and_measure():
    m = raise_qasm(HEADER + "qreg q[2]; creg c[2]; h q[0]; cx q[0],q[1]; measure q[0] -> c[0]; measure q[1] -> c[1];")
    kinds = [k for k in _kinds(m) if k not in (K.MEM_ALLOC_BIT, K.RETURN)]
    assert kinds == [K.ALLOC, K.ALLOC, K.H, K.CNOT, K.MEASURE, K.MEM_STORE_BIT, K.MEASURE, K.MEM_STORE_BIT]
    ops = m.main.entry.ops
    h = next(op for op in ops if op.kind == K.H)
    cnot = next(op for op in ops if op.kind == K.CNOT)
    assert cnot.operands[0] is h.result
    assert not errors(verify_module(m))


def test_declarations_only():
    m = raise_qasm(HEADER + "qreg q[3]; creg c[1];")
    assert _kinds(m) == [K.ALLOC] * 3 + [K.MEM_ALLOC_BIT, K.RETURN]
    assert m.main.result_types == [QUBIT] * 3


def test_repeated_gates_chain_through_ssa_values():
    m = raise_qasm(HEADER + "qreg q[1]; x q[0]; x q[0];")
    alloc, x1, x2, ret = m.main.entry.ops
    assert x1.operands[0] is alloc.result and x2.operands[0] is x1.result
    assert ret.operands[0] is x2.result


def test_main_returns_final_qubit_values():
    m = raise_qasm(HEADER + "qreg a[1]; qreg b[1]; h b[0];")
    ret = m.main.entry.ops[-1]
    assert [op.kind for op in (v.defining_op for v in ret.operands)] == [K.ALLOC, K.H]


def test_expand_u3_is_one_u_op():
    ops, out = expand_stdlib_gate("u3", (0.1, 0.2, 0.3), _fresh_qubits(1))
    assert [op.kind for op in ops] == [K.U]
    assert ops[0].attrs == {"theta": 0.1, "phi": 0.2, "lambda": 0.3}
    assert out == [ops[0].result]


def test_expand_u1_is_phase_only_u():
    ops, _ = expand_stdlib_gate("u1", (0.7,), _fresh_qubits(1))
    assert [op.kind for op in ops] == [K.U]
    assert ops[0].attrs == {"theta": 0.0, "phi": 0.0, "lambda": 0.7}


def test_expand_user_gate_respects_argument_order():
    prog = parse_qasm(HEADER + "gate g a,b { cx a,b; h a; }\nqreg q[2];")
    q0, q1 = _fresh_qubits(2)
    ops, out = expand_stdlib_gate("g", (), [q1, q0], prog)
    assert [op.kind for op in ops] == [K.CNOT, K.H]
    assert ops[0].operands == [q1, q0]
    assert ops[1].operands[0] is ops[0].results[0]
    assert out == [ops[1].result, ops[0].results[1]]


def test_user_gate_shadows_library_name():
    prog = parse_qasm("OPENQASM 2.0;\ngate h a { x a; }\nqreg q[1];")
    ops, _ = expand_stdlib_gate("h", (), _fresh_qubits(1), prog)
    assert [op.kind for op in ops] == [K.X]


def _library_case(name):
    fn = STANDARD_MATRICES[name]
    params = [0.3 + 0.41 * i for i in range(len(inspect.signature(fn).parameters))]
    m = fn(*params)
    n = m.shape[0].bit_length() - 1
    args = ",".join(f"q[{i}]" for i in range(n))
    plist = f"({','.join(repr(p) for p in params)})" if params else ""
    return HEADER + f"qreg q[{n}];\n{name}{plist} {args};\n", m


@pytest.mark.parametrize("name", sorted(set(qelib1_gates()) - {"rccx"}))
def test_library_gate_raises_to_its_matrix(name):
    source, expected = _library_case(name)
    assert equiv_up_to_global_phase(circuit_unitary(raise_qasm(source)), expected, 1e-9)


def test_rccx_is_toffoli_up_to_relative_phase():
    u = circuit_unitary(raise_qasm(HEADER + "qreg q[3]; rccx q[0],q[1],q[2];"))
    toffoli = STANDARD_MATRICES["ccx"]()
    assert np.allclose(np.abs(u), np.abs(toffoli), atol=1e-9)
    assert not equiv_up_to_global_phase(u, toffoli, 1e-6)


def test_conditional_becomes_loads_compare_and_if():
    m = raise_qasm(HEADER + "qreg q[1]; creg c[2]; if (c == 2) x q[0];")
    kinds = _kinds(m)
    assert kinds.count(K.MEM_LOAD_BIT) == 2 and K.CMPI in kinds and K.SCF_IF in kinds
    if_op = next(op for op in m.main.entry.ops if op.kind == K.SCF_IF)
    then_kinds = [op.kind for op in if_op.regions[0].blocks[0].ops]
    else_kinds = [op.kind for op in if_op.regions[1].blocks[0].ops]
    assert then_kinds == [K.X, K.YIELD] and else_kinds == [K.YIELD]


def test_raising_is_deterministic():
    src = random_qasm(random.Random(7), 4, 40)
    assert print_ir(raise_qasm(src)) == print_ir(raise_qasm(src))


def test_opaque_gate_is_unsupported():
    with pytest.raises(UnsupportedError):
        raise_qasm("OPENQASM 2.0;\nopaque o a;\nqreg q[1];\no q[0];")


def test_unknown_gate_in_expansion():
    with pytest.raises(UnknownGate):
        expand_stdlib_gate("nope", (), _fresh_qubits(1))


def test_if_register_too_wide():
    with pytest.raises(UnsupportedError):
        raise_qasm(HEADER + "qreg q[1]; creg c[63]; if (c == 1) x q[0];")


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_corpus_raises_clean_and_preserves_distribution(path):
    program = parse_qasm(path.read_text())
    module = raise_qasm(path.read_text())
    assert not errors(verify_module(module))
    assert total_variation(run_distribution(module), simulate_qasm(program)) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_random_programs_raise_faithfully(seed, n):
    src = random_qasm(random.Random(seed), n, 20)
    module = raise_qasm(src)
    assert not errors(verify_module(module))
    assert total_variation(run_distribution(module), simulate_qasm(parse_qasm(src))) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(st.tuples(*[st.floats(-2 * math.pi, 2 * math.pi) for _ in range(3)]))
def test_u3_raise_matches_matrix(angles):
    src = HEADER + "qreg q[1];\nu3(%r,%r,%r) q[0];\n" % angles
    assert equiv_up_to_global_phase(circuit_unitary(raise_qasm(src)), u3(*angles), 1e-9)
