"""Time the numba and numpy kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--n 200] [--repeat 5]

Both backends are called through ``absdist._kernels.kernel`` so the
comparison does not depend on ``ABSDIST_NO_NUMBA``. The first numba call
(compilation) is excluded from the timings.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from absdist import _kernels


def _best(fn, args, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _metric_matrix(n, rng):
    pts = rng.random((n, 3))
    return np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))


def _chain_system(n, rng, mu=0.2, fan=3):
    indptr = np.zeros(n + 1, dtype=np.int64)
    idx = []
    for i in range(n):
        kids = rng.choice(n, size=fan, replace=True)
        idx.extend(kids)
        indptr[i + 1] = len(idx)
    weights = np.full(len(idx), (1 - mu) / fan)
    b = mu * rng.random(n)
    return indptr, np.array(idx, dtype=np.int64), weights, b


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200, help="points for the axiom sweeps")
    ap.add_argument("--pairs", type=int, default=20000, help="unknowns in the tree-distance system")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    D = _metric_matrix(args.n, rng)
    leq = np.triu(np.ones((args.n, args.n), dtype=np.bool_))
    system = _chain_system(args.pairs, rng)
    cases = [
        ("triangle", (D, 1e-9, 16)),
        ("order", (D, leq, 1e-9, 16)),
        ("gauss_seidel", (*system, 1e-9, 100_000)),
        ("jacobi", (*system, 1e-9, 100_000)),
    ]
    print(f"{'kernel':<14}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}  agree")
    for name, kargs in cases:
        nb = _kernels.kernel(name, "numba")
        nb(*kargs)  # compile
        t_np, out_np = _best(_kernels.kernel(name, "numpy"), kargs, args.repeat)
        t_nb, out_nb = _best(nb, kargs, args.repeat)
        if name in ("triangle", "order"):
            agree = out_np[0] == out_nb[0]
        else:
            agree = bool(np.allclose(out_np[0], out_nb[0], atol=1e-8))
        print(f"{name:<14}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}  {agree}")


if __name__ == "__main__":
    main()
