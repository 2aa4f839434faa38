import json
import random
from collections import Counter
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import module_from_gates, random_gate_list, random_qasm
from programs import HOIST_BRANCHES, SPLIT_CALL_MEASURE
from qssa.bench import bench, bench_file
from qssa.ir import parse_ir
from qssa.lowering import lower
from qssa.metrics import CircuitMetrics, Unbounded, compute_metrics, optimization_ratio
from qssa.opt import run_pipeline
from qssa.qasm import parse_qasm
from qssa.raising import raise_qasm

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'
CORPUS_DIR = Path(__file__).parent.parent / "src" / "qssa" / "corpus"
_QASM_NAME = {"CNOT": "cx", "U": "u3", "Sdg": "sdg", "Tdg": "tdg"}


def _layered(gates, n):
    """Gate count, ASAP depth and histogram of a flat gate list."""
    level = [0] * n
    for _, _, targets in gates:
        top = max(level[t] for t in targets) + 1
        for t in targets:
            level[t] = top
    hist = Counter(_QASM_NAME.get(k, k.lower()) for k, _, _ in gates)
    return len(gates), max(level, default=0), dict(hist)


def test_split_call_program():
    m = compute_metrics(parse_ir(SPLIT_CALL_MEASURE))
    assert (m.gate_count, m.depth) == (2, 2)
    assert m.histogram == {"cx": 1, "measure": 1}


def test_empty_module():
    m = compute_metrics(parse_ir("module {\n  func @main() -> () {\n    return : () -> ()\n  }\n}"))
    assert (m.gate_count, m.depth, m.histogram) == (0, 0, {})


@pytest.mark.parametrize("n", [1, 5, 64])
def test_x_chain(n):
    m = compute_metrics(module_from_gates([("X", (), (0,))] * n, 1))
    assert (m.gate_count, m.depth) == (n, n)


def test_conditional_counts_both_branches_and_deepest_path():
    m = compute_metrics(parse_ir(HOIST_BRANCHES))
    # H, measure, then {X, H} | {H}, then two measures; classical control adds no depth
    assert m.gate_count == 7
    assert m.depth == 2


def test_qasm_and_raised_ir_agree():
    src = HEADER + "qreg q[3]; creg c[3]; h q[0]; cx q[0],q[1]; barrier q; measure q -> c; reset q[2];"
    a, b = compute_metrics(parse_qasm(src)), compute_metrics(raise_qasm(src))
    assert a == b
    assert (a.gate_count, a.depth) == (6, 3)


def test_non_constant_loop_is_unbounded():
    text = """module {
  func @main(%n: i64) -> (qubit<1>) {
    %q = qssa.alloc : qubit<1>
    %lo = std.const_int {value = 0} : i64
    %st = std.const_int {value = 1} : i64
    %r = scf.for %lo, %n, %st, %q : (i64, i64, i64, qubit<1>) -> (qubit<1>) {
    ^bb0(%i: i64, %x: qubit<1>):
      %y = qssa.X %x : qubit<1>
      scf.yield %y : (qubit<1>) -> ()
    }
    return %r : (qubit<1>) -> ()
  }
}"""
    with pytest.raises(Unbounded):
        compute_metrics(parse_ir(text))


def test_ratio():
    assert optimization_ratio(10, 7) == 0.3
    assert optimization_ratio(0, 0) == 0.0
    assert optimization_ratio(4, 0) == 1.0
    assert optimization_ratio(CircuitMetrics(8, 3, {}), CircuitMetrics(6, 2, {})) == 0.25


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_metrics_match_layering_oracle(seed, n):
    gates = random_gate_list(random.Random(seed), n, 25)
    m = compute_metrics(module_from_gates(gates, n))
    assert (m.gate_count, m.depth, m.histogram) == _layered(gates, n)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_raised_metrics_match_lowered_program(seed):
    # library gates such as cz expand to several primitives, so compare against the lowered text
    m = raise_qasm(random_qasm(random.Random(seed), 4, 30, measure_prob=0.2))
    assert compute_metrics(m) == compute_metrics(lower(m))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_optimization_never_increases_gate_count(seed):
    m = raise_qasm(random_qasm(random.Random(seed), 4, 30))
    before = compute_metrics(m).gate_count
    m, _ = run_pipeline(m)
    assert compute_metrics(m).gate_count <= before


def _micro_dir(tmp_path):
    files = {
        "a_xx.qasm": "qreg q[1];\nx q[0];\nx q[0];\n",
        "b_hh.qasm": "qreg q[1];\nh q[0];\nh q[0];\n",
        "c_bell.qasm": "qreg q[2];\nh q[0];\ncx q[0],q[1];\n",
    }
    for name, body in files.items():
        (tmp_path / name).write_text(HEADER + body)
    return tmp_path


def test_bench_micro_ratios(tmp_path):
    report = bench(_micro_dir(tmp_path))
    assert [f.name for f in report.files] == ["a_xx.qasm", "b_hh.qasm", "c_bell.qasm"]
    assert [f.ratio for f in report.files] == [1.0, 1.0, 0.0]
    agg = report.aggregate()
    assert agg["files"] == 3 and agg["errors"] == 0
    assert agg["mean_ratio"] == pytest.approx(2 / 3)


def test_bench_json_is_byte_identical(tmp_path):
    d = _micro_dir(tmp_path)
    first = bench(d).to_json()
    assert bench(d).to_json() == first
    payload = json.loads(first)
    assert payload["schema"] == 1 and "seconds" not in payload["files"][0]


def test_bench_timing_adds_seconds(tmp_path):
    payload = json.loads(bench(_micro_dir(tmp_path)).to_json(timing=True))
    assert set(payload["files"][0]["seconds"]) == {"raise", "verify", "optimize"}


def test_bench_empty_directory(tmp_path):
    report = bench(tmp_path)
    assert report.files == [] and report.aggregate()["mean_ratio"] == 0.0


def test_bench_records_failures(tmp_path):
    (tmp_path / "bad.qasm").write_text("OPENQASM 2.0;\nqreg q[1];\nfoo q[0];\n")
    result = bench_file(tmp_path / "bad.qasm")
    assert result.error is not None and result.stage == "parse"
    assert bench(tmp_path).aggregate()["errors"] == 1


def test_corpus_bench_is_monotone():
    report = bench(CORPUS_DIR)
    assert report.files and not [f for f in report.files if f.error]
    for f in report.files:
        assert f.after.gate_count <= f.before.gate_count
    assert report.aggregate()["mean_ratio"] > 0
