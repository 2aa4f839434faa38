"""Optimization passes."""
from .dce import run_dce
from .gvn import run_cse_gvn
from .inline import run_inline
from .patterns import PATTERNS, RewritePattern
from .pipeline import DEFAULT_PIPELINE, PASSES, UnknownPass, parse_pipeline, run_pipeline
from .rewriter import PassReport, PatternDriver, run_peepholes
from .unroll import run_unroll

__all__ = [
    "DEFAULT_PIPELINE",
    "PASSES",
    "PATTERNS",
    "PassReport",
    "PatternDriver",
    "RewritePattern",
    "UnknownPass",
    "parse_pipeline",
    "run_cse_gvn",
    "run_dce",
    "run_inline",
    "run_peepholes",
    "run_pipeline",
    "run_unroll",
]
