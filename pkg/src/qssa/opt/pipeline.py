"""Named passes and pipelines."""
from __future__ import annotations

from typing import Callable, Sequence

from ..ir.core import ModuleIR
from .dce import run_dce
from .gvn import run_cse_gvn
from .inline import run_inline
from .rewriter import PassReport, run_peepholes
from .unroll import run_unroll

DEFAULT_PIPELINE = ("inline", "unroll", "peephole", "gvn", "dce", "peephole", "dce")


class UnknownPass(ValueError):
    pass


PASSES: dict[str, Callable[..., tuple[ModuleIR, PassReport]]] = {
    "inline": run_inline,
    "unroll": run_unroll,
    "peephole": run_peepholes,
    "peepholes": run_peepholes,
    "gvn": run_cse_gvn,
    "cse": run_cse_gvn,
    "cse_gvn": run_cse_gvn,
    "dce": run_dce,
}


def parse_pipeline(text: str) -> list[str]:
    names = [p.strip() for p in text.split(",") if p.strip()]
    for name in names:
        if name not in PASSES:
            raise UnknownPass(f"unknown pass {name!r}; known: {', '.join(sorted(PASSES))}")
    return names


def run_pipeline(
    module: ModuleIR,
    passes: Sequence[str] = DEFAULT_PIPELINE,
    aggressive_dce: bool = False,
    verify_each: bool = False,
) -> tuple[ModuleIR, list[PassReport]]:
    """Run `passes` in order on `module` (mutated in place).

    With `verify_each`, the verifier runs after every pass and a
    RuntimeError names the first pass that broke the module.
    """
    for name in passes:
        if name not in PASSES:
            raise UnknownPass(f"unknown pass {name!r}")
    reports = []
    for name in passes:
        if name == "dce":
            module, report = run_dce(module, aggressive=aggressive_dce)
        else:
            module, report = PASSES[name](module)
        report.name = name
        reports.append(report)
        if verify_each:
            from ..verify import errors, verify_module

            errs = errors(verify_module(module, leaks=False))
            if errs:
                raise RuntimeError(f"pass {name!r} produced an invalid module: {errs[0].message}")
    return module, reports
