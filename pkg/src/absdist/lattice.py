"""Lattice and metric contracts, and the metric-construction combinators.

Distances here are plain callables wrapped in :class:`DistanceFn` so they
can carry what they claim to be (metric or pseudometric, order-preserving
or not). :func:`check_metric_properties` checks those claims by
enumeration over a finite sample.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np

from absdist import _kernels

__all__ = [
    "Lattice",
    "DistanceFn",
    "SizeFn",
    "GaloisPair",
    "ContractViolation",
    "size_metric",
    "hausdorff",
    "product_distance",
    "induced_distance",
    "check_metric_properties",
    "MetricReport",
    "TOL",
    "EXHAUSTIVE_CAP",
]

TOL = 1e-9
EXHAUSTIVE_CAP = 4096
DIAMOND_CAP = 64


class ContractViolation(ValueError):
    """A caller-supplied function broke a contract it claimed to satisfy."""


@dataclass(frozen=True)
class Lattice:
    """Bundle of the order operations of a lattice.

    ``elements`` is optional and only needed for enumeration-based checks.
    """

    leq: Callable[[Any, Any], bool]
    join: Callable[[Any, Any], Any]
    meet: Callable[[Any, Any], Any]
    top: Any = None
    bottom: Any = None
    elements: tuple | None = None


@dataclass(frozen=True)
class DistanceFn:
    fn: Callable[[Any, Any], float]
    claims_metric: str | None = None  # "metric", "pseudometric" or None
    claims_order_preserving: bool = False
    name: str = ""

    def __call__(self, a: Any, b: Any) -> float:
        return self.fn(a, b)


@dataclass(frozen=True)
class SizeFn:
    fn: Callable[[Any], float]
    monotone: bool = True

    def __call__(self, a: Any) -> float:
        return self.fn(a)


@dataclass(frozen=True)
class GaloisPair:
    """Abstraction/concretization pair between finite concrete sets and abstract elements."""

    alpha: Callable[[frozenset], Any]
    gamma: Callable[[Any], frozenset]
    insertion: bool = False


def size_metric(size: Callable[[Any], float], a: Any, b: Any, lattice: Lattice) -> float:
    """``size(a join b) - size(a meet b)``.

    Raises :class:`ContractViolation` when the result is negative, which
    can only happen if ``size`` is not monotone.
    """
    value = size(lattice.join(a, b)) - size(lattice.meet(a, b))
    if value < -TOL:
        raise ContractViolation(f"size is not monotone: size(join) - size(meet) = {value}")
    return max(value, 0.0)


def hausdorff(d: Callable[[Any, Any], float], A: Iterable[Any], B: Iterable[Any]) -> float:
    A = list(A)
    B = list(B)
    if not A or not B:
        raise ValueError("Hausdorff distance needs two non-empty sets")
    M = np.array([[d(a, b) for b in B] for a in A], dtype=np.float64)
    return float(max(M.min(axis=1).max(), M.min(axis=0).max()))


def product_distance(ds: Sequence[float], normalize: bool = False) -> float:
    """2-norm of per-component distances, optionally divided by sqrt(len)."""
    if len(ds) == 0:
        return 0.0
    v = np.asarray(ds, dtype=np.float64)
    if np.any(v < 0):
        raise ValueError("component distances must be non-negative")
    norm = float(np.sqrt(np.dot(v, v)))
    if normalize:
        norm /= math.sqrt(len(v))
    return norm


def induced_distance(g: GaloisPair, d: DistanceFn | Callable, direction: str) -> DistanceFn:
    """Transport a distance across a Galois pair.

    ``"abstract_to_concrete"``: ``d`` lives on abstract elements and the
    result compares concrete sets through ``alpha``. Always a pseudometric.

    ``"concrete_to_abstract"``: ``d`` lives on concrete sets and the result
    compares abstract elements through ``gamma``; a metric when the pair is
    an insertion, a pseudometric otherwise.
    """
    order = getattr(d, "claims_order_preserving", False)
    if direction == "abstract_to_concrete":
        return DistanceFn(lambda A, B: d(g.alpha(A), g.alpha(B)), "pseudometric", order, "induced-alpha")
    if direction == "concrete_to_abstract":
        claim = "metric" if g.insertion else "pseudometric"
        return DistanceFn(lambda a, b: d(g.gamma(a), g.gamma(b)), claim, order, "induced-gamma")
    raise ValueError(f"unknown direction {direction!r}")


@dataclass
class MetricReport:
    size: int
    sampled: bool = False
    non_negativity: list = field(default_factory=list)
    symmetry: list = field(default_factory=list)
    weak_identity: list = field(default_factory=list)
    identity: list = field(default_factory=list)
    triangle: list = field(default_factory=list)
    order_preserving: list = field(default_factory=list)
    diamond: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    diamond_checked: str = "none"

    @property
    def pseudometric_ok(self) -> bool:
        return not any(self.counts.get(k, 0) for k in ("non_negativity", "symmetry", "weak_identity", "triangle"))

    @property
    def metric_ok(self) -> bool:
        return self.pseudometric_ok and not self.counts.get("identity", 0)

    @property
    def order_ok(self) -> bool:
        return not self.counts.get("order_preserving", 0)

    def violations(self, *kinds: str) -> int:
        kinds = kinds or ("non_negativity", "symmetry", "weak_identity", "identity", "triangle", "order_preserving")
        return sum(self.counts.get(k, 0) for k in kinds)

    def summary(self) -> str:
        parts = [f"{k}={v}" for k, v in sorted(self.counts.items())]
        return f"n={self.size} " + " ".join(parts)


def _seed() -> int:
    return int(os.environ.get("ABSDIST_SEED", "0"))


def check_metric_properties(
    sample: Iterable[Hashable],
    d: Callable[[Any, Any], float],
    lattice: Lattice | None = None,
    tol: float = TOL,
    cap: int = EXHAUSTIVE_CAP,
    limit: int = 16,
    seed: int | None = None,
) -> MetricReport:
    """Enumerate metric axioms (and lattice properties) over ``sample``.

    Order preservation and the diamond inequality are only checked when a
    lattice is given; the diamond inequality is reported separately and
    never counts against ``metric_ok``.
    """
    elems = list(dict.fromkeys(sample))
    sampled = False
    rng = random.Random(_seed() if seed is None else seed)
    if len(elems) > cap:
        elems = rng.sample(elems, cap)
        sampled = True
    n = len(elems)
    report = MetricReport(size=n, sampled=sampled)
    D = np.empty((n, n), dtype=np.float64)
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            D[i, j] = d(x, y)

    negm = (D < -tol) | (D.T < -tol)
    neg = np.argwhere(np.triu(negm))
    report.non_negativity = [(elems[i], elems[j]) for i, j in neg[:limit]]
    report.counts["non_negativity"] = len(neg)

    asym = np.argwhere(np.abs(D - D.T) > tol)
    asym = asym[asym[:, 0] < asym[:, 1]]
    report.symmetry = [(elems[i], elems[j]) for i, j in asym[:limit]]
    report.counts["symmetry"] = len(asym)

    diag = np.nonzero(np.abs(np.diag(D)) > tol)[0]
    report.weak_identity = [elems[i] for i in diag[:limit]]
    report.counts["weak_identity"] = len(diag)

    zero = np.argwhere(np.abs(D) <= tol)
    zero = zero[zero[:, 0] < zero[:, 1]]
    report.identity = [(elems[i], elems[j]) for i, j in zero[:limit]]
    report.counts["identity"] = len(zero)

    count, found = _kernels.triangle_violations(D, tol, limit)
    report.triangle = [tuple(elems[k] for k in row) for row in found]
    report.counts["triangle"] = int(count)

    if lattice is not None:
        index = {x: i for i, x in enumerate(elems)}
        leq = np.zeros((n + 1, n + 1), dtype=np.bool_)
        for i, x in enumerate(elems):
            for j, y in enumerate(elems):
                leq[i, j] = bool(lattice.leq(x, y))
        count, found = _kernels.order_violations(D, leq[:n, :n], tol, limit)
        report.order_preserving = [tuple(elems[k] for k in row) for row in found]
        report.counts["order_preserving"] = int(count)

        sub = list(range(n))
        report.diamond_checked = "exhaustive"
        if n > DIAMOND_CAP:
            sub = sorted(rng.sample(sub, DIAMOND_CAP))
            report.diamond_checked = f"sampled {DIAMOND_CAP}"
        # out-of-sample joins/meets map to the padding index n (compares false)
        join = np.full((n, n), n, dtype=np.int64)
        meet = np.full((n, n), n, dtype=np.int64)
        for i in sub:
            for j in sub:
                join[i, j] = index.get(lattice.join(elems[i], elems[j]), n)
                meet[i, j] = index.get(lattice.meet(elems[i], elems[j]), n)
        sel = np.array(sub, dtype=np.int64)
        # (a, b, c, d) range over the sub-sample; join/meet index the full sample
        count, found = _kernels.diamond_violations(
            D[np.ix_(sel, sel)], leq, join[np.ix_(sel, sel)], meet[np.ix_(sel, sel)], tol, limit
        )
        report.diamond = [tuple(elems[sel[k]] for k in row) for row in found]
        report.counts["diamond"] = int(count)
    return report
