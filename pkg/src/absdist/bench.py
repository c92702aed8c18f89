"""Precision/cost harness: analyze a corpus under several domains and
measure each analysis against the intersection of all of them."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from absdist.analyzer import AnalysisError, AnalysisTimeout, analyze
from absdist.domains import get_domain
from absdist.parser import ParseError, parse_program
from absdist.treemetrics import DEFAULT_MU, analysis_size, compare, has_translator, intersect, translate_base

__all__ = ["BenchConfig", "BenchRow", "ConfigError", "run_bench", "write_csv", "check_trend", "COLUMNS"]

COLUMNS = ["program", "domain", "widening", "metric", "distance", "time_ms", "size", "status"]
METRICS = ("top", "flat", "tree")

GNUPLOT = """# distance to the intersection against analysis time, one series per domain
set datafile separator ','
set key autotitle columnhead
set xlabel 'analysis time (ms)'
set ylabel 'distance to intersection ({metric})'
plot for [d in "{domains}"] '{csv}' using ($4 eq '{metric}' && strcol(2).strcol(3) eq d ? $6 : 1/0):5 title d
"""


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DomainSpec:
    name: str
    widen: int | None = None

    @property
    def label(self) -> str:
        return self.name if self.widen is None else f"{self.name}+widen({self.widen})"


@dataclass
class BenchConfig:
    corpus: Path
    domains: list[DomainSpec]
    base: str = "gr"
    metrics: list[str] = field(default_factory=lambda: list(METRICS))
    mu: float = DEFAULT_MU
    output: Path | None = None
    time_limit: float | None = None
    plot: bool = False

    @staticmethod
    def from_json(obj: dict, root: Path | None = None) -> "BenchConfig":
        root = root or Path(".")
        try:
            doms = [DomainSpec(d["name"], d.get("widen")) for d in obj["domains"]]
            cfg = BenchConfig(
                corpus=root / obj["corpus"],
                domains=doms,
                base=obj.get("base", "gr"),
                metrics=list(obj.get("metrics", METRICS)),
                mu=float(obj.get("mu", DEFAULT_MU)),
                output=root / obj["output"] if obj.get("output") else None,
                time_limit=obj.get("time_limit"),
                plot=bool(obj.get("plot", False)),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad bench config: {exc}") from exc
        cfg.validate()
        return cfg

    @staticmethod
    def load(path: str | Path) -> "BenchConfig":
        path = Path(path)
        return BenchConfig.from_json(json.loads(path.read_text()), path.parent)

    def validate(self) -> None:
        if not self.domains:
            raise ConfigError("no domains configured")
        for m in self.metrics:
            if m not in METRICS:
                raise ConfigError(f"unknown metric {m!r}")
        for d in self.domains:
            try:
                get_domain(d.name, d.widen)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            if not has_translator(d.name, self.base):
                raise ConfigError(f"no translation from {d.name} to base {self.base}")
        if not 0 < self.mu <= 1:
            raise ConfigError("mu must lie in (0, 1]")


@dataclass
class BenchRow:
    program: str
    domain: str
    widening: int | None
    metric: str
    distance: float | None
    time_ms: float | None
    size: int | None
    status: str = "ok"

    def as_csv(self) -> list[str]:
        return [
            self.program,
            self.domain,
            "" if self.widening is None else str(self.widening),
            self.metric,
            "" if self.distance is None else f"{self.distance:.6f}",
            "" if self.time_ms is None else f"{self.time_ms:.3f}",
            "" if self.size is None else str(self.size),
            self.status,
        ]


def _bench_program(path: Path, cfg: BenchConfig) -> list[BenchRow]:
    name = path.stem
    try:
        prog = parse_program(path.read_text())
        prog.entry()
    except ParseError as exc:
        return [BenchRow(name, d.name, d.widen, m, None, None, None, f"parse-error: {exc}") for d in cfg.domains for m in cfg.metrics]
    runs = []
    for d in cfg.domains:
        t0 = time.perf_counter()
        try:
            g = analyze(prog, domain=d.name, widen=d.widen, time_limit=cfg.time_limit)
            status = "ok"
        except AnalysisTimeout:
            g, status = None, "timeout"
        except AnalysisError as exc:
            g, status = None, f"error: {exc}"
        ms = (time.perf_counter() - t0) * 1000.0
        runs.append((d, g, ms, status))
    based = [translate_base(g, cfg.base) for _, g, _, _ in runs if g is not None]
    ref = intersect(based) if based else None
    rows = []
    for d, g, ms, status in runs:
        for m in cfg.metrics:
            if g is None:
                rows.append(BenchRow(name, d.name, d.widen, m, None, ms, None, status))
                continue
            rep = compare(translate_base(g, cfg.base), ref, m, mu=cfg.mu)
            rows.append(BenchRow(name, d.name, d.widen, m, rep.value, ms, analysis_size(g)))
    return rows


def run_bench(cfg: BenchConfig) -> list[BenchRow]:
    """One row per (program, domain, metric), sorted."""
    if not cfg.corpus.is_dir():
        raise ConfigError(f"corpus directory {cfg.corpus} does not exist")
    rows: list[BenchRow] = []
    for path in sorted(cfg.corpus.glob("*.pl")):
        rows.extend(_bench_program(path, cfg))
    order = {m: i for i, m in enumerate(cfg.metrics)}
    rows.sort(key=lambda r: (r.program, r.domain, -1 if r.widening is None else r.widening, order[r.metric]))
    return rows


def write_csv(rows: list[BenchRow], out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.as_csv())


def write_plot(cfg: BenchConfig, csv_path: Path) -> list[Path]:
    labels = " ".join(d.name + ("" if d.widen is None else str(d.widen)) for d in cfg.domains)
    out = []
    for m in cfg.metrics:
        p = csv_path.with_name(f"{csv_path.stem}_{m}.gp")
        p.write_text(GNUPLOT.format(metric=m, domains=labels, csv=csv_path.name))
        out.append(p)
    return out


def check_trend(rows: list[BenchRow], plain: str = "share", metrics=("flat", "tree")) -> list[str]:
    """Programs where an unwidened analysis is farther from the intersection than a widened one."""
    problems = []
    by = {(r.program, r.domain, r.widening, r.metric): r for r in rows if r.status == "ok"}
    for (prog, dom, wid, metric), r in by.items():
        if dom != plain or wid is None or metric not in metrics:
            continue
        base = by.get((prog, dom, None, metric))
        if base is not None and base.distance > r.distance + 1e-12:
            problems.append(f"{prog}/{metric}: {dom} {base.distance:.6f} > widen({wid}) {r.distance:.6f}")
    return problems
