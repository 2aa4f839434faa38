"""Command-line driver.

Inputs ending in `.qasm` are OpenQASM 2.0 and are raised on load; anything
else is parsed as the textual IR.  `-` reads standard input as IR.

Exit codes: 0 success, 1 diagnostic failure (parse error, verifier error,
inequivalent programs, ...), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bench import SCHEMA, bench
from .ir.text import IRSyntaxError, parse_ir, print_ir
from .ir.types import IRTypeError
from .lowering import NotLowerable, lower
from .metrics import Unbounded, compute_metrics
from .opt import DEFAULT_PIPELINE, UnknownPass, parse_pipeline, run_pipeline
from .qasm import QasmError, parse_qasm, print_qasm
from .raising import raise_program
from .sim import SimulationError, circuit_unitary, equiv_up_to_global_phase, run_distribution, total_variation
from .verify import CyclicCFG, MalformedRegion, errors, verify_module


class UsageError(Exception):
    pass


class Failure(Exception):
    """A diagnostic failure: reported on stderr, exit status 1."""


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _is_qasm(path: str) -> bool:
    return path.endswith(".qasm")


def _load_program(path: str):
    try:
        return parse_qasm(_read(path))
    except QasmError as exc:
        raise Failure(f"{path}:{exc.line}:{exc.col}: error: {exc.message}") from None


def _load_module(path: str):
    if _is_qasm(path):
        try:
            return raise_program(_load_program(path))
        except QasmError as exc:
            raise Failure(f"{path}:{exc.line}:{exc.col}: error: {exc.message}") from None
    try:
        return parse_ir(_read(path))
    except IRSyntaxError as exc:
        raise Failure(f"{path}:{exc.line}:{exc.col}: error: {exc.message}") from None
    except IRTypeError as exc:
        raise Failure(f"{path}: error: {exc}") from None


def _check(module, path: str, leaks: bool = False):
    try:
        diags = verify_module(module, leaks=leaks)
    except (MalformedRegion, CyclicCFG) as exc:
        raise Failure(f"{path}: error: {exc}") from None
    errs = errors(diags)
    if errs:
        raise Failure("\n".join(d.format(path) for d in errs))
    return diags


def _emit(args, text: str):
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _passes(args) -> list[str]:
    if args.pipeline is None:
        return list(DEFAULT_PIPELINE)
    try:
        return parse_pipeline(args.pipeline)
    except UnknownPass as exc:
        raise UsageError(str(exc)) from None


def _optimized(args, path: str):
    module = _load_module(path)
    _check(module, path)
    module, reports = run_pipeline(module, _passes(args), aggressive_dce=args.aggressive_dce)
    _check(module, path)
    return module, reports


# ---------------------------------------------------------------------------
# subcommands


def cmd_parse(args):
    if _is_qasm(args.input):
        _emit(args, print_qasm(_load_program(args.input)))
    else:
        _emit(args, print_ir(_load_module(args.input)))


def cmd_raise(args):
    _emit(args, print_ir(_load_module(args.input)))


def cmd_verify(args):
    module = _load_module(args.input)
    diags = _check(module, args.input, leaks=True)
    if args.json:
        _emit(args, json.dumps({"schema": SCHEMA, "errors": 0, "warnings": [d.message for d in diags]}, indent=2) + "\n")
        return
    for d in diags:
        print(d.format(args.input), file=sys.stderr)
    _emit(args, f"{args.input}: ok\n")


def cmd_opt(args):
    module, reports = _optimized(args, args.input)
    _emit(args, print_ir(module))
    if args.report == "json":
        payload = {"schema": SCHEMA, "passes": [r.to_dict() for r in reports]}
        print(json.dumps(payload, indent=2, sort_keys=True), file=sys.stderr)
    elif args.report == "text":
        for r in reports:
            print(f"{r.name}: {r.rewrites} rewrites, {r.ops_before} -> {r.ops_after} ops", file=sys.stderr)
            for note in r.notes:
                print(f"  note: {note}", file=sys.stderr)


def cmd_lower(args):
    if args.pipeline is not None:
        module, _ = _optimized(args, args.input)
    else:
        module = _load_module(args.input)
        _check(module, args.input)
    try:
        _emit(args, print_qasm(lower(module)))
    except NotLowerable as exc:
        raise Failure(f"{args.input}: error: not lowerable: {exc}") from None


def _distribution(path: str) -> dict:
    module = _load_module(path)
    _check(module, path)
    try:
        return run_distribution(module)
    except SimulationError as exc:
        raise Failure(f"{path}: error: {exc}") from None


def cmd_sim(args):
    if args.unitary:
        module = _load_module(args.input)
        _check(module, args.input)
        try:
            u = circuit_unitary(module)
        except SimulationError as exc:
            raise Failure(f"{args.input}: error: {exc}") from None
        lines = [" ".join(f"{z.real:+.12f}{z.imag:+.12f}j" for z in row) for row in u]
        _emit(args, "\n".join(lines) + "\n")
        return
    dist = _distribution(args.input)
    if args.json:
        _emit(args, json.dumps({"schema": SCHEMA, "distribution": dict(sorted(dist.items()))}, indent=2) + "\n")
    else:
        _emit(args, "".join(f"{k or '-'} {v:.12g}\n" for k, v in sorted(dist.items())))


def cmd_equiv(args):
    a, b = _load_module(args.a), _load_module(args.b)
    _check(a, args.a)
    _check(b, args.b)
    try:
        try:
            ua, ub = circuit_unitary(a), circuit_unitary(b)
            same = ua.shape == ub.shape and equiv_up_to_global_phase(ua, ub, args.tol)
            how = "unitary"
        except SimulationError:
            da, db = run_distribution(a), run_distribution(b)
            same = total_variation(da, db) <= args.tol
            how = "distribution"
    except SimulationError as exc:
        raise Failure(f"error: {exc}") from None
    verdict = "equivalent" if same else "not equivalent"
    _emit(args, f"{verdict} ({how}, tol {args.tol:g})\n")
    if not same:
        raise SystemExit(1)


def cmd_stats(args):
    try:
        if _is_qasm(args.input) and args.pipeline is None:
            m = compute_metrics(_load_program(args.input))
        elif args.pipeline is not None:
            m = compute_metrics(_optimized(args, args.input)[0])
        else:
            m = compute_metrics(_load_module(args.input))
    except Unbounded as exc:
        raise Failure(f"{args.input}: error: {exc}") from None
    if args.json:
        _emit(args, json.dumps({"schema": SCHEMA, **m.to_dict()}, indent=2, sort_keys=True) + "\n")
    else:
        hist = ", ".join(f"{k}={v}" for k, v in sorted(m.histogram.items()))
        _emit(args, f"gates {m.gate_count}\ndepth {m.depth}\nhistogram {hist}\n")


def cmd_bench(args):
    if not Path(args.directory).is_dir():
        raise UsageError(f"{args.directory} is not a directory")
    report = bench(args.directory, _passes(args), aggressive_dce=args.aggressive_dce)
    _emit(args, report.to_json(args.timing) if args.json else report.table())


def cmd_roundtrip(args):
    if _is_qasm(args.input):
        first = _load_program(args.input)
        again = parse_qasm(print_qasm(first))
        ok = again == first
    else:
        first = _load_module(args.input)
        again = parse_ir(print_ir(first))
        ok = again == first and print_ir(again) == print_ir(first)
    if not ok:
        raise Failure(f"{args.input}: error: print/parse round trip is not exact")
    _emit(args, f"{args.input}: round trip exact\n")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the result here instead of stdout")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("-p", "--pipeline", help="comma-separated pass list (default: %s)" % ",".join(DEFAULT_PIPELINE))
    common.add_argument("--seed", type=int, default=0, help="reserved; all commands are deterministic")
    common.add_argument("--aggressive-dce", action="store_true", help="let DCE delete unused measurements")

    parser = argparse.ArgumentParser(prog="qssa", description="Quantum SSA compiler toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    add("parse", cmd_parse, "parse and pretty-print a .qasm or IR file").add_argument("input")
    add("raise", cmd_raise, "raise OpenQASM to the IR").add_argument("input")
    add("verify", cmd_verify, "type and single-use checks").add_argument("input")
    p = add("opt", cmd_opt, "run an optimization pipeline")
    p.add_argument("input")
    p.add_argument("--report", choices=("none", "text", "json"), default="none", help="pass report on stderr")
    add("lower", cmd_lower, "lower @main to OpenQASM 2.0").add_argument("input")
    p = add("sim", cmd_sim, "exact outcome distribution")
    p.add_argument("input")
    p.add_argument("--dist", action="store_true", help="print `bitstring probability` lines (the default)")
    p.add_argument("--unitary", action="store_true", help="print the circuit unitary instead")
    p = add("equiv", cmd_equiv, "compare two programs by unitary or distribution")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=float, default=1e-9)
    add("stats", cmd_stats, "gate count, depth and histogram").add_argument("input")
    p = add("bench", cmd_bench, "benchmark a directory of .qasm files")
    p.add_argument("directory")
    p.add_argument("--timing", action="store_true", help="include wall-clock timings (JSON becomes non-reproducible)")
    add("roundtrip", cmd_roundtrip, "check that print then parse reproduces the input").add_argument("input")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"qssa: {exc}", file=sys.stderr)
        return 2
    except Failure as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
