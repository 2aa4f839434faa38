"""Corpus benchmark: raise, verify, optimize and measure every .qasm file.

The JSON report is deterministic (files sorted by name, keys sorted) unless
wall-clock timings are requested.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .metrics import CircuitMetrics, compute_metrics, optimization_ratio
from .opt import DEFAULT_PIPELINE, run_pipeline
from .qasm import parse_qasm
from .raising import raise_program
from .verify import errors, verify_module

SCHEMA = 1


@dataclass
class FileResult:
    name: str
    before: Optional[CircuitMetrics] = None
    after: Optional[CircuitMetrics] = None
    error: Optional[str] = None
    stage: Optional[str] = None
    timings: dict = field(default_factory=dict)

    @property
    def ratio(self) -> Optional[float]:
        if self.before is None or self.after is None:
            return None
        return optimization_ratio(self.before, self.after)

    def to_dict(self, timing: bool) -> dict:
        out: dict = {"file": self.name}
        if self.error is not None:
            out["error"] = {"stage": self.stage, "message": self.error}
        else:
            out["before"] = self.before.to_dict()
            out["after"] = self.after.to_dict()
            out["ratio"] = self.ratio
        if timing:
            out["seconds"] = {k: round(v, 6) for k, v in self.timings.items()}
        return out


@dataclass
class BenchReport:
    pipeline: tuple
    files: list = field(default_factory=list)

    @property
    def ok(self) -> list:
        return [f for f in self.files if f.error is None]

    def aggregate(self) -> dict:
        ok = self.ok
        n = len(ok)
        return {
            "files": len(self.files),
            "errors": len(self.files) - n,
            "mean_ratio": sum(f.ratio for f in ok) / n if n else 0.0,
            "mean_gate_count_before": sum(f.before.gate_count for f in ok) / n if n else 0.0,
            "mean_gate_count_after": sum(f.after.gate_count for f in ok) / n if n else 0.0,
        }

    def to_dict(self, timing: bool = False) -> dict:
        return {
            "schema": SCHEMA,
            "pipeline": list(self.pipeline),
            "files": [f.to_dict(timing) for f in self.files],
            "aggregate": self.aggregate(),
        }

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        rows = [f"{'file':<28} {'before':>7} {'after':>7} {'depth0':>7} {'depth1':>7} {'ratio':>7}"]
        for f in self.files:
            if f.error is not None:
                rows.append(f"{f.name:<28} error in {f.stage}: {f.error}")
            else:
                rows.append(
                    f"{f.name:<28} {f.before.gate_count:>7} {f.after.gate_count:>7} "
                    f"{f.before.depth:>7} {f.after.depth:>7} {f.ratio:>7.3f}"
                )
        agg = self.aggregate()
        rows.append(f"{len(self.files)} files, {agg['errors']} errors, mean ratio {agg['mean_ratio']:.3f}")
        return "\n".join(rows) + "\n"


def bench_file(path: Path, passes: Sequence[str] = DEFAULT_PIPELINE, aggressive_dce: bool = False) -> FileResult:
    result = FileResult(path.name)
    stage = "read"
    try:
        t0 = time.perf_counter()
        source = path.read_text()
        stage = "parse"
        program = parse_qasm(source)
        stage = "raise"
        module = raise_program(program)
        t1 = time.perf_counter()
        stage = "verify"
        errs = errors(verify_module(module))
        if errs:
            raise ValueError(errs[0].message)
        t2 = time.perf_counter()
        stage = "metrics"
        result.before = compute_metrics(module)
        stage = "optimize"
        module, _ = run_pipeline(module, passes, aggressive_dce=aggressive_dce)
        t3 = time.perf_counter()
        stage = "metrics"
        result.after = compute_metrics(module)
        result.timings = {"raise": t1 - t0, "verify": t2 - t1, "optimize": t3 - t2}
    except Exception as exc:  # a failing file is recorded, never fatal
        result.before = result.after = None
        result.stage = stage
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def bench(
    directory, passes: Sequence[str] = DEFAULT_PIPELINE, aggressive_dce: bool = False
) -> BenchReport:
    """Benchmark every `*.qasm` file in `directory`, in filename order."""
    report = BenchReport(tuple(passes))
    for path in sorted(Path(directory).glob("*.qasm"), key=lambda p: p.name):
        report.files.append(bench_file(path, passes, aggressive_dce))
    return report
