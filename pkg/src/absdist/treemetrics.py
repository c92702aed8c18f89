"""Distances between whole analyses, intersection, base translation and size."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from absdist import _kernels
from absdist.domains import get_domain
from absdist.graph import AndOrGraph, GraphError, OrNode
from absdist.sharing import ShareSub, sh_to_gr
from absdist.terms import term_size

__all__ = [
    "IncompatibleAnalyses",
    "DistanceReport",
    "top_distance",
    "flat_distance",
    "tree_distance",
    "aggregate",
    "read_weights",
    "pair_system",
    "solve_system",
    "intersect",
    "translate_base",
    "has_translator",
    "analysis_size",
    "compare",
]

DEFAULT_MU = 0.2
DEFAULT_TOL = 1e-9


class IncompatibleAnalyses(ValueError):
    pass


@dataclass
class DistanceReport:
    metric: str
    value: float
    mu: float | None = None
    per_point: dict[str, float] = field(default_factory=dict)
    pairs: dict[tuple[int, int], float] = field(default_factory=dict)
    pairs_solved: int = 0
    iterations: int = 0
    solver: str | None = None

    def to_json(self) -> dict:
        out = {"metric": self.metric, "value": self.value}
        if self.mu is not None:
            out["mu"] = self.mu
        out["per_point"] = dict(self.per_point)
        if self.metric == "tree":
            out["pairs"] = {f"{a},{b}": v for (a, b), v in sorted(self.pairs.items())}
            out["pairs_solved"] = self.pairs_solved
            out["iterations"] = self.iterations
            out["solver"] = self.solver
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _check(a: AndOrGraph, b: AndOrGraph) -> None:
    if a.domain.name != b.domain.name:
        raise IncompatibleAnalyses(f"domains differ: {a.domain.name} vs {b.domain.name} (translate to a base first)")
    if a.entry != b.entry:
        raise IncompatibleAnalyses(f"entries differ: {a.entry} vs {b.entry}")
    ra, rb = a.nodes[a.root], b.nodes[b.root]
    if ra.pp != rb.pp or ra.vars != rb.vars:
        raise IncompatibleAnalyses("root nodes do not correspond")


def _dist(g: AndOrGraph, d: Callable | None) -> Callable:
    return d if d is not None else g.domain.distance


def _local(d: Callable, x: OrNode, y: OrNode) -> float:
    return 0.5 * (d(x.call, y.call) + d(x.success, y.success))


def top_distance(a: AndOrGraph, b: AndOrGraph, d: Callable | None = None) -> float:
    """Distance between the root success substitutions only."""
    _check(a, b)
    return float(_dist(a, d)(a.nodes[a.root].success, b.nodes[b.root].success))


# ---------------------------------------------------------------------------
# flat


def _point_summary(g: AndOrGraph, nodes: list[OrNode] | None, scope: list[str]):
    dom = g.domain
    if not nodes:
        return dom.bottom(scope), dom.bottom(scope)
    call, succ = nodes[0].call, nodes[0].success
    for n in nodes[1:]:
        call = dom.join(call, n.call)
        succ = dom.join(succ, n.success)
    return call, succ


def aggregate(values: Mapping[str, float] | Sequence[float], weights: Mapping[str, float] | Sequence[float] | None = None) -> float:
    """Weighted mean of per-point distances; uniform weights by default."""
    if isinstance(values, Mapping):
        keys = list(values)
        vals = np.array([values[k] for k in keys], dtype=np.float64)
        if weights is not None and isinstance(weights, Mapping):
            unknown = set(weights) - set(keys)
            if unknown:
                raise ValueError(f"weights for unknown program points: {sorted(unknown)}")
            w = np.array([weights.get(k, 0.0) for k in keys], dtype=np.float64)
        else:
            w = None if weights is None else np.asarray(weights, dtype=np.float64)
    else:
        vals = np.asarray(values, dtype=np.float64)
        w = None if weights is None else np.asarray(weights, dtype=np.float64)
    if len(vals) == 0:
        return 0.0
    if w is None:
        return float(vals.mean())
    if w.shape != vals.shape or np.any(w < 0):
        raise ValueError("weights must be non-negative, one per value")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"weights sum to {w.sum()}, not 1")
    return float(np.dot(w, vals))


def read_weights(text: str) -> dict[str, float]:
    """Parse a ``pp,weight`` CSV (a header line is optional)."""
    out: dict[str, float] = {}
    for row in csv.reader(io.StringIO(text)):
        if not row or not row[0].strip() or row[0].strip().startswith("#"):
            continue
        pp, w = row[0].strip(), row[1].strip()
        if pp == "pp" and w == "weight":
            continue
        out[pp] = float(w)
    return out


def flat_distance(
    a: AndOrGraph, b: AndOrGraph, d: Callable | None = None, weights: Mapping[str, float] | None = None
) -> DistanceReport:
    """Per program point: joins of all calls and of all successes, compared pairwise."""
    _check(a, b)
    d = _dist(a, d)
    pa, pb = a.by_point(), b.by_point()
    order = a.point_order() + [p for p in b.point_order() if p not in pa]
    per_point = {}
    for pp in order:
        na, nb = pa.get(pp), pb.get(pp)
        scope = (na or nb)[0].vars
        ca, sa = _point_summary(a, na, scope)
        cb, sb = _point_summary(b, nb, scope)
        per_point[pp] = 0.5 * (d(ca, cb) + d(sa, sb))
    return DistanceReport("flat", aggregate(per_point, weights), per_point=per_point)


# ---------------------------------------------------------------------------
# tree


def _pairs(a: AndOrGraph, b: AndOrGraph):
    """Reachable aligned node pairs from the roots, with matched children."""
    root = (a.root, b.root)
    pairs = [root]
    index = {root: 0}
    kids: list[list[int]] = []
    for x, y in pairs:
        ca, cb = a.nodes[x].children, b.nodes[y].children
        if a.nodes[x].pp != b.nodes[y].pp:
            raise GraphError(f"misaligned nodes {x} and {y}")
        row = []
        for key in sorted(ca.keys() & cb.keys()):
            pair = (ca[key], cb[key])
            if pair not in index:
                index[pair] = len(pairs)
                pairs.append(pair)
            row.append(index[pair])
        kids.append(row)
    return pairs, kids


def pair_system(local: Sequence[float], kids: Sequence[Sequence[int]], mu: float):
    """CSR form of ``X = mu*l + (1-mu)/|C| * sum X_c`` (``X = l`` at leaves)."""
    if not 0 < mu <= 1:
        raise ValueError("mu must lie in (0, 1]")
    n = len(local)
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices: list[int] = []
    weights: list[float] = []
    b = np.empty(n, dtype=np.float64)
    for i, row in enumerate(kids):
        if row:
            b[i] = mu * local[i]
            w = (1 - mu) / len(row)
            # repeated children add up
            acc: dict[int, float] = {}
            for c in row:
                acc[c] = acc.get(c, 0.0) + w
            indices.extend(acc)
            weights.extend(acc.values())
        else:
            b[i] = local[i]
        indptr[i + 1] = len(indices)
    return indptr, np.array(indices, dtype=np.int64), np.array(weights, dtype=np.float64), b


def solve_system(indptr, indices, weights, b, solver: str = "gauss_seidel", tol: float = DEFAULT_TOL, backend=None):
    """Solve ``x = b + W x``; returns ``(x, iterations)``.

    ``solver`` is ``"gauss_seidel"``, ``"jacobi"`` or ``"direct"``.
    """
    if solver == "direct":
        n = len(b)
        W = np.zeros((n, n))
        for i in range(n):
            for k in range(indptr[i], indptr[i + 1]):
                W[i, indices[k]] += weights[k]
        return np.linalg.solve(np.eye(n) - W, np.asarray(b, dtype=np.float64)), 0
    if solver not in ("gauss_seidel", "jacobi"):
        raise ValueError(f"unknown solver {solver!r}")
    return _kernels.fixed_point(indptr, indices, weights, b, tol=tol, method=solver, backend=backend)


def tree_distance(
    a: AndOrGraph,
    b: AndOrGraph,
    d: Callable | None = None,
    mu: float = DEFAULT_MU,
    solver: str = "gauss_seidel",
    tol: float = DEFAULT_TOL,
) -> DistanceReport:
    _check(a, b)
    d = _dist(a, d)
    pairs, kids = _pairs(a, b)
    local = [_local(d, a.nodes[x], b.nodes[y]) for x, y in pairs]
    system = pair_system(local, kids, mu)
    x, iters = solve_system(*system, solver=solver, tol=tol)
    values = {p: float(v) for p, v in zip(pairs, x)}
    return DistanceReport(
        "tree",
        float(x[0]),
        mu=mu,
        pairs=values,
        pairs_solved=len(pairs),
        iterations=int(iters),
        solver=solver,
    )


# ---------------------------------------------------------------------------
# intersection and translation


def _meet_pair(a: AndOrGraph, b: AndOrGraph) -> AndOrGraph:
    _check(a, b)
    dom = a.domain
    pairs, _ = _pairs(a, b)
    index = {p: i for i, p in enumerate(pairs)}
    keyed: list[dict[tuple[int, int], int]] = []
    for x, y in pairs:
        ca, cb = a.nodes[x].children, b.nodes[y].children
        keyed.append({key: index[(ca[key], cb[key])] + 1 for key in sorted(ca.keys() & cb.keys())})
    nodes = {}
    for i, (x, y) in enumerate(pairs):
        nx, ny = a.nodes[x], b.nodes[y]
        nodes[i + 1] = OrNode(i + 1, nx.pp, nx.literal, dom.meet(nx.call, ny.call), dom.meet(nx.success, ny.success), keyed[i])
    return AndOrGraph(dom, a.entry, 1, nodes, [], list(a.points))


def intersect(graphs: Sequence[AndOrGraph]) -> AndOrGraph:
    """Position-wise greatest lower bound of several analyses."""
    if not graphs:
        raise ValueError("intersect needs at least one analysis")
    out = graphs[0]
    for g in graphs[1:]:
        out = _meet_pair(out, g)
    return out


def _share_to_gr(s: ShareSub, order: list[str]):
    return sh_to_gr(s, order)


_TRANSLATORS: dict[tuple[str, str], Callable] = {
    ("share", "gr"): _share_to_gr,
}


def has_translator(src: str, base: str) -> bool:
    return src == base or (src, base) in _TRANSLATORS


def translate_base(g: AndOrGraph, base: str) -> AndOrGraph:
    """Express every substitution of ``g`` in the ``base`` domain."""
    src = g.domain.name
    if src == base:
        return g
    fn = _TRANSLATORS.get((src, base))
    if fn is None:
        raise IncompatibleAnalyses(f"no translation from {src} to {base}")
    dom = get_domain(base)
    nodes = {
        i: OrNode(n.id, n.pp, n.literal, fn(n.call, n.vars), fn(n.success, n.vars), dict(n.children))
        for i, n in g.nodes.items()
    }
    return AndOrGraph(dom, g.entry, g.root, nodes, [], list(g.points))


def analysis_size(g: AndOrGraph) -> int:
    """Functor and constant symbols in the rendering of every call and success."""
    dom = g.domain
    total = 0
    for n in g.nodes.values():
        for s in (n.call, n.success):
            total += sum(term_size(t) for t in dom.as_terms(s, n.vars))
    return total


def compare(a: AndOrGraph, b: AndOrGraph, metric: str, **kw) -> DistanceReport:
    """Dispatch on ``metric`` (``top``, ``flat`` or ``tree``)."""
    if metric == "top":
        return DistanceReport("top", top_distance(a, b))
    if metric == "flat":
        return flat_distance(a, b, weights=kw.get("weights"))
    if metric == "tree":
        return tree_distance(a, b, mu=kw.get("mu", DEFAULT_MU), solver=kw.get("solver", "gauss_seidel"))
    raise ValueError(f"unknown metric {metric!r}")
