"""Numeric inner loops: metric-axiom sweeps and the tree-distance solver.

Every kernel exists twice, a numba ``@njit`` version and a numpy version
with the same signature. ``ABSDIST_NO_NUMBA=1`` (or a missing numba)
selects the numpy path; ``BACKEND`` reports which one is active.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("ABSDIST_NO_NUMBA", "") not in ("1", "true", "yes")
BACKEND = "numba" if USE_NUMBA else "numpy"


def _njit(fn):
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


# ---------------------------------------------------------------------------
# metric axioms over a dense distance matrix


def _triangle_violations_np(D: np.ndarray, tol: float, limit: int) -> tuple[int, np.ndarray]:
    n = D.shape[0]
    count = 0
    found = []
    for y in range(n):
        # D[x, z] > D[x, y] + D[y, z]
        bad = D > (D[:, y][:, None] + D[y, :][None, :] + tol)
        k = int(bad.sum())
        if k:
            count += k
            if len(found) < limit:
                xs, zs = np.nonzero(bad)
                for x, z in zip(xs[: limit - len(found)], zs[: limit - len(found)]):
                    found.append((x, y, z))
    out = np.array(found, dtype=np.int64).reshape(-1, 3)
    return count, out


@_njit
def _triangle_violations_nb(D, tol, limit):
    n = D.shape[0]
    count = 0
    out = np.empty((limit, 3), dtype=np.int64)
    k = 0
    # y outermost so witnesses come out in the same order as the numpy path
    for y in range(n):
        for x in range(n):
            dxy = D[x, y]
            for z in range(n):
                if D[x, z] > dxy + D[y, z] + tol:
                    if k < limit:
                        out[k, 0] = x
                        out[k, 1] = y
                        out[k, 2] = z
                        k += 1
                    count += 1
    return count, out[:k]


def _order_violations_np(D: np.ndarray, leq: np.ndarray, tol: float, limit: int) -> tuple[int, np.ndarray]:
    # a <= b <= c  implies  D[a,b] <= D[a,c] and D[b,c] <= D[a,c]
    n = D.shape[0]
    count = 0
    found = []
    for b in range(n):
        below = leq[:, b]
        above = leq[b, :]
        chain = below[:, None] & above[None, :]
        bad = chain & ((D[:, b][:, None] > D + tol) | (D[b, :][None, :] > D + tol))
        k = int(bad.sum())
        if k:
            count += k
            if len(found) < limit:
                xs, zs = np.nonzero(bad)
                for a, c in zip(xs[: limit - len(found)], zs[: limit - len(found)]):
                    found.append((a, b, c))
    return count, np.array(found, dtype=np.int64).reshape(-1, 3)


@_njit
def _order_violations_nb(D, leq, tol, limit):
    n = D.shape[0]
    count = 0
    out = np.empty((limit, 3), dtype=np.int64)
    k = 0
    for b in range(n):
        for a in range(n):
            if not leq[a, b]:
                continue
            for c in range(n):
                if not leq[b, c]:
                    continue
                if D[a, b] > D[a, c] + tol or D[b, c] > D[a, c] + tol:
                    if k < limit:
                        out[k, 0] = a
                        out[k, 1] = b
                        out[k, 2] = c
                        k += 1
                    count += 1
    return count, out[:k]


def _diamond_violations_np(D, leq, join, meet, tol, limit):
    n = D.shape[0]
    lt = leq & ~np.eye(leq.shape[0], dtype=np.bool_)
    count = 0
    found = []
    flat_meet = meet.ravel()
    flat_join = join.ravel()
    flat_D = D.ravel()
    for a in range(n):
        for b in range(n):
            m_ab = meet[a, b]
            j_ab = join[a, b]
            # (c, d) with meet(c,d) < meet(a,b) and join(a,b) < join(c,d)
            ok = lt[flat_meet, m_ab] & lt[j_ab, flat_join]
            bad = ok & (D[a, b] > flat_D + tol)
            k = int(bad.sum())
            if k:
                count += k
                if len(found) < limit:
                    for idx in np.nonzero(bad)[0][: limit - len(found)]:
                        found.append((a, b, idx // n, idx % n))
    return count, np.array(found, dtype=np.int64).reshape(-1, 4)


@_njit
def _diamond_violations_nb(D, leq, join, meet, tol, limit):
    n = D.shape[0]
    count = 0
    out = np.empty((limit, 4), dtype=np.int64)
    k = 0
    for a in range(n):
        for b in range(n):
            m_ab = meet[a, b]
            j_ab = join[a, b]
            dab = D[a, b]
            for c in range(n):
                for d in range(n):
                    m = meet[c, d]
                    j = join[c, d]
                    if m != m_ab and leq[m, m_ab] and j != j_ab and leq[j_ab, j]:
                        if dab > D[c, d] + tol:
                            if k < limit:
                                out[k, 0] = a
                                out[k, 1] = b
                                out[k, 2] = c
                                out[k, 3] = d
                                k += 1
                            count += 1
    return count, out[:k]


# ---------------------------------------------------------------------------
# fixed-point solver for X = b + W X, W given in CSR form


def _jacobi_np(indptr, indices, weights, b, tol, max_iter):
    n = b.shape[0]
    x = b.copy()
    rows = np.repeat(np.arange(n), np.diff(indptr))
    for it in range(1, max_iter + 1):
        acc = np.zeros(n)
        np.add.at(acc, rows, weights * x[indices])
        new = b + acc
        delta = np.max(np.abs(new - x)) if n else 0.0
        x = new
        if delta < tol:
            return x, it
    return x, max_iter


@_njit
def _jacobi_nb(indptr, indices, weights, b, tol, max_iter):
    n = b.shape[0]
    x = b.copy()
    new = np.empty(n)
    for it in range(1, max_iter + 1):
        delta = 0.0
        for i in range(n):
            s = b[i]
            for k in range(indptr[i], indptr[i + 1]):
                s += weights[k] * x[indices[k]]
            new[i] = s
            diff = abs(s - x[i])
            if diff > delta:
                delta = diff
        x[:] = new
        if delta < tol:
            return x, it
    return x, max_iter


def _gauss_seidel_np(indptr, indices, weights, b, tol, max_iter):
    n = b.shape[0]
    x = b.copy()
    for it in range(1, max_iter + 1):
        delta = 0.0
        for i in range(n):
            lo, hi = indptr[i], indptr[i + 1]
            s = b[i] + float(np.dot(weights[lo:hi], x[indices[lo:hi]]))
            delta = max(delta, abs(s - x[i]))
            x[i] = s
        if delta < tol:
            return x, it
    return x, max_iter


@_njit
def _gauss_seidel_nb(indptr, indices, weights, b, tol, max_iter):
    n = b.shape[0]
    x = b.copy()
    for it in range(1, max_iter + 1):
        delta = 0.0
        for i in range(n):
            s = b[i]
            for k in range(indptr[i], indptr[i + 1]):
                s += weights[k] * x[indices[k]]
            diff = abs(s - x[i])
            if diff > delta:
                delta = diff
            x[i] = s
        if delta < tol:
            return x, it
    return x, max_iter


_NUMPY = {
    "triangle": _triangle_violations_np,
    "order": _order_violations_np,
    "diamond": _diamond_violations_np,
    "jacobi": _jacobi_np,
    "gauss_seidel": _gauss_seidel_np,
}
_NUMBA = {
    "triangle": _triangle_violations_nb,
    "order": _order_violations_nb,
    "diamond": _diamond_violations_nb,
    "jacobi": _jacobi_nb,
    "gauss_seidel": _gauss_seidel_nb,
}


_LATE: dict[str, object] = {}


def kernel(name: str, backend: str | None = None):
    """Return the kernel ``name`` for ``backend`` (default: the active one)."""
    backend = backend or BACKEND
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        if not USE_NUMBA:
            # flag forced numpy at import time; compile on demand
            if name not in _LATE:
                _LATE[name] = numba.njit(cache=True)(_NUMBA[name])
            return _LATE[name]
        return _NUMBA[name]
    if backend == "numpy":
        return _NUMPY[name]
    raise ValueError(f"unknown backend {backend!r}")


def triangle_violations(D, tol=1e-9, limit=16, backend=None):
    return kernel("triangle", backend)(np.ascontiguousarray(D, dtype=np.float64), tol, limit)


def order_violations(D, leq, tol=1e-9, limit=16, backend=None):
    return kernel("order", backend)(
        np.ascontiguousarray(D, dtype=np.float64), np.ascontiguousarray(leq, dtype=np.bool_), tol, limit
    )


def diamond_violations(D, leq, join, meet, tol=1e-9, limit=16, backend=None):
    return kernel("diamond", backend)(
        np.ascontiguousarray(D, dtype=np.float64),
        np.ascontiguousarray(leq, dtype=np.bool_),
        np.ascontiguousarray(join, dtype=np.int64),
        np.ascontiguousarray(meet, dtype=np.int64),
        tol,
        limit,
    )


def fixed_point(indptr, indices, weights, b, tol=1e-9, max_iter=100_000, method="gauss_seidel", backend=None):
    """Iterate ``x <- b + W x`` until the max-norm update drops below ``tol``."""
    fn = kernel(method, backend)
    return fn(
        np.ascontiguousarray(indptr, dtype=np.int64),
        np.ascontiguousarray(indices, dtype=np.int64),
        np.ascontiguousarray(weights, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
        float(tol),
        int(max_iter),
    )
