"""Command line: ``absdist analyze|compare|intersect|bench``.

Exit codes: 0 success, 2 bad input (syntax, missing entry, unreadable
file), 3 analysis failure, 4 incompatible analyses.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from absdist.analyzer import AnalysisError, analyze
from absdist.bench import BenchConfig, ConfigError, run_bench, write_csv, write_plot
from absdist.graph import AndOrGraph, GraphError
from absdist.parser import ParseError, parse_program
from absdist.treemetrics import IncompatibleAnalyses, compare, intersect, read_weights, translate_base

EXIT_INPUT = 2
EXIT_ANALYSIS = 3
EXIT_INCOMPATIBLE = 4


class _Exit(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _Exit(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from exc


def _load_graph(path: str) -> AndOrGraph:
    try:
        return AndOrGraph.loads(_read(path))
    except (GraphError, ValueError) as exc:
        raise _Exit(EXIT_INPUT, f"{path}: {exc}") from exc


def cmd_analyze(args) -> int:
    try:
        prog = parse_program(_read(args.file))
        prog.entry(args.entry)
    except ParseError as exc:
        raise _Exit(EXIT_INPUT, f"{args.file}: {exc}") from exc
    if args.domain == "gr" and args.widen_share is not None:
        raise _Exit(EXIT_INPUT, "--widen-share only applies to --domain share")
    try:
        g = analyze(prog, args.entry, args.domain, args.widen_share)
    except AnalysisError as exc:
        raise _Exit(EXIT_ANALYSIS, f"{args.file}: {exc}") from exc
    if args.table:
        rows = g.table()
        _emit("\n".join(f"({i}) {pp}  {lit}  {c}  {s}" for i, pp, lit, c, s in rows), args.output)
    else:
        _emit(g.dumps(), args.output)
    return 0


def cmd_compare(args) -> int:
    a, b = _load_graph(args.first), _load_graph(args.second)
    weights = read_weights(_read(args.weights)) if args.weights else None
    try:
        base = args.base or a.domain.name
        a, b = translate_base(a, base), translate_base(b, base)
        rep = compare(a, b, args.metric, mu=args.mu, weights=weights, solver=args.solver)
    except IncompatibleAnalyses as exc:
        raise _Exit(EXIT_INCOMPATIBLE, str(exc)) from exc
    except GraphError as exc:
        raise _Exit(EXIT_INCOMPATIBLE, f"analyses do not align: {exc}") from exc
    except ValueError as exc:
        raise _Exit(EXIT_INPUT, str(exc)) from exc
    _emit(rep.dumps(), args.output)
    return 0


def cmd_intersect(args) -> int:
    graphs = [_load_graph(p) for p in args.files]
    try:
        base = args.base or graphs[0].domain.name
        out = intersect([translate_base(g, base) for g in graphs])
    except (IncompatibleAnalyses, GraphError) as exc:
        raise _Exit(EXIT_INCOMPATIBLE, str(exc)) from exc
    _emit(out.dumps(), args.output)
    return 0


def cmd_bench(args) -> int:
    try:
        cfg = BenchConfig.load(args.config)
        rows = run_bench(cfg)
    except (ConfigError, json.JSONDecodeError, OSError) as exc:
        raise _Exit(EXIT_INPUT, f"{args.config}: {exc}") from exc
    target = args.output or (str(cfg.output) if cfg.output else None)
    if target and target != "-":
        with open(target, "w", newline="") as fh:
            write_csv(rows, fh)
        if cfg.plot:
            write_plot(cfg, Path(target))
    else:
        write_csv(rows, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="absdist", description="Analyze logic programs and measure analysis precision.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a program and write its AND-OR graph as JSON")
    p.add_argument("file")
    p.add_argument("--domain", choices=["gr", "share"], default="gr")
    p.add_argument("--widen-share", type=int, metavar="N", help="sharing widening threshold (number of groups)")
    p.add_argument("--entry", help="entry predicate name/arity (default: the first entry)")
    p.add_argument("--table", action="store_true", help="print the node table instead of JSON")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("compare", help="distance between two analyses")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--metric", choices=["top", "flat", "tree"], default="tree")
    p.add_argument("--mu", type=float, default=0.2)
    p.add_argument("--base", choices=["gr", "share"])
    p.add_argument("--weights", help="CSV file of pp,weight rows for the flat metric")
    p.add_argument("--solver", choices=["gauss_seidel", "jacobi", "direct"], default="gauss_seidel")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("intersect", help="position-wise meet of several analyses")
    p.add_argument("files", nargs="+")
    p.add_argument("--base", choices=["gr", "share"])
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_intersect)

    p = sub.add_parser("bench", help="run the precision/cost harness")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="CSV path (overrides the config)")
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _Exit as exc:
        print(f"absdist: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
