import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import circuit_matrix, module_from_gates, phase_grid_distance, phase_grid_resolution, random_gate_list
from programs import ENTANGLE_MEASURE, SPLIT_CALL_MEASURE
from qssa.gates import CNOT, H, STANDARD_MATRICES, X, u3, zyz_angles
from qssa.ir import parse_ir
from qssa.ir.core import K
from qssa.raising import raise_qasm
from qssa.qasm import parse_qasm
from qssa.sim import (
    BadTarget,
    HasMeasurement,
    ShapeMismatch,
    Statevector,
    TooLarge,
    apply_gate,
    apply_matrix,
    circuit_unitary,
    equiv_up_to_global_phase,
    final_state,
    run_distribution,
    simulate_qasm,
    total_variation,
)

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'
angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


def test_x_flips_zero():
    s = apply_gate(Statevector.zero(1), K.X, (), [0])
    assert np.allclose(s.amps, [0, 1])


def test_h_makes_uniform_superposition():
    s = apply_gate(Statevector.zero(1), K.H, (), [0])
    assert np.allclose(s.probabilities(), [0.5, 0.5])


def test_qubit_zero_is_least_significant():
    s = apply_gate(Statevector.zero(3), K.X, (), [0])
    assert s.amps[1] == 1
    s = apply_gate(Statevector.zero(3), K.X, (), [2])
    assert s.amps[4] == 1


def test_cnot_control_is_first_target():
    s = apply_gate(Statevector.zero(2), K.X, (), [1])
    s = apply_gate(s, K.CNOT, (), [1, 0])
    assert s.amps[3] == 1


def test_cnot_squared_is_identity():
    m = module_from_gates([("CNOT", (), (0, 1)), ("CNOT", (), (0, 1))], 2)
    assert np.allclose(circuit_unitary(m), np.eye(4))


def test_bell_distribution():
    assert run_distribution(parse_ir(ENTANGLE_MEASURE)) == pytest.approx({"00": 0.5, "11": 0.5})


def test_split_call_program_distribution():
    assert run_distribution(parse_ir(SPLIT_CALL_MEASURE)) == pytest.approx({"000": 1.0})


def test_no_measurement_gives_empty_outcome():
    m = module_from_gates([("H", (), (0,))], 1)
    assert run_distribution(m) == {"": 1.0}


def test_measured_outcome_is_keyed_by_cells():
    src = HEADER + "qreg q[2]; creg c[2]; x q[1]; measure q[1] -> c[0];"
    assert run_distribution(raise_qasm(src)) == {"10": 1.0}
    assert simulate_qasm(parse_qasm(src)) == {"10": 1.0}


def test_conditional_correction():
    src = HEADER + "qreg q[2]; creg c[1]; h q[0]; measure q[0] -> c[0]; if(c==1) x q[0]; measure q[0] -> c[0];"
    assert run_distribution(raise_qasm(src)) == pytest.approx({"0": 1.0})


def test_reset_returns_qubit_to_zero():
    src = HEADER + "qreg q[1]; creg c[1]; h q[0]; reset q[0]; measure q[0] -> c[0];"
    assert run_distribution(raise_qasm(src)) == pytest.approx({"0": 1.0})


@pytest.mark.parametrize("program", ["identity", "phase"])
def test_global_phase_is_ignored(program):
    a = np.eye(2)
    b = 1j * np.eye(2) if program == "phase" else np.eye(2)
    assert equiv_up_to_global_phase(a, b)


def test_relative_phase_is_not_ignored():
    assert not equiv_up_to_global_phase(X, STANDARD_MATRICES["z"]())
    assert not equiv_up_to_global_phase(np.eye(2), np.diag([1, -1]))


def test_errors():
    with pytest.raises(ShapeMismatch):
        equiv_up_to_global_phase(np.eye(2), np.eye(4))
    with pytest.raises(BadTarget):
        apply_matrix(Statevector.zero(2).amps, 2, CNOT, [0, 0])
    with pytest.raises(BadTarget):
        apply_matrix(Statevector.zero(2).amps, 2, H, [2])
    with pytest.raises(TooLarge):
        Statevector.zero(40)
    measured = raise_qasm(HEADER + "qreg q[1]; creg c[1]; h q[0]; measure q[0] -> c[0];")
    with pytest.raises(HasMeasurement):
        final_state(measured)


def test_generic_gate_matches_named_gate():
    text = """module {
  func @main() -> (qubit<1>) {
    %q = qssa.alloc : qubit<1>
    %h = qssa.gate %q {matrix = [[(0.7071067811865476, 0.0), (0.7071067811865476, 0.0)], [(0.7071067811865476, 0.0), (-0.7071067811865476, 0.0)]]} : qubit<1>
    return %h : (qubit<1>) -> ()
  }
}"""
    assert np.allclose(circuit_unitary(parse_ir(text)), H)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_unitary_matches_kronecker_oracle(seed, n):
    gates = random_gate_list(random.Random(seed), n, 12)
    u = circuit_unitary(module_from_gates(gates, n))
    assert np.max(np.abs(u - circuit_matrix(gates, n))) <= 1e-9


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_norm_is_preserved(seed, n):
    gates = random_gate_list(random.Random(seed), n, 20)
    assert final_state(module_from_gates(gates, n)).norm() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_distribution_sums_to_one_and_agrees_with_qasm_reference(seed):
    from oracles import random_qasm

    src = random_qasm(random.Random(seed), 3, 20, measure_prob=0.3)
    dist = run_distribution(raise_qasm(src))
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
    assert total_variation(dist, simulate_qasm(parse_qasm(src))) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.tuples(angles, angles, angles), st.floats(0, 2 * math.pi), st.booleans())
def test_phase_check_agrees_with_grid_search(a, phase, perturb):
    u = u3(*a)
    v = np.exp(1j * phase) * u
    if perturb:
        v = v @ u3(0.05, 0.0, 0.0)
    grid = phase_grid_distance(v, u, samples=4096)
    slack = phase_grid_resolution(u, samples=4096)
    same = equiv_up_to_global_phase(v, u, 1e-9)
    assert same == (grid <= 1e-9 + slack)


@settings(max_examples=300, deadline=None)
@given(st.tuples(angles, angles, angles), st.floats(0, 2 * math.pi))
def test_euler_angles_reproduce_the_unitary(a, phase):
    m = np.exp(1j * phase) * u3(*a)
    assert equiv_up_to_global_phase(u3(*zyz_angles(m)), m, 1e-9)


@pytest.mark.parametrize("theta", [0.0, math.pi, 1e-14, math.pi - 1e-14])
def test_euler_angles_at_gimbal_points(theta):
    for phi, lam in [(0.3, -1.2), (2.9, 2.9), (-3.0, 0.0)]:
        m = u3(theta, phi, lam)
        assert equiv_up_to_global_phase(u3(*zyz_angles(m)), m, 1e-9)
