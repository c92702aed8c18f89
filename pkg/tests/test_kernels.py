import numpy as np
import pytest

from absdist import _kernels
from absdist.treemetrics import pair_system, solve_system

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def _random_metric(n, seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    return np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))


def _random_system(n, seed, mu=0.2):
    rng = np.random.default_rng(seed)
    kids = [list(rng.choice(n, size=rng.integers(0, 4))) for _ in range(n)]
    return pair_system(list(rng.random(n)), kids, mu)


def test_backend_reflects_environment():
    assert _kernels.BACKEND in ("numba", "numpy")


@pytest.mark.parametrize("seed", [0, 1])
def test_triangle_backends_agree(seed):
    D = _random_metric(30, seed)
    D[0, 5] = D[5, 0] = 5.0  # break the triangle inequality on purpose
    c_np, f_np = _kernels.triangle_violations(D, backend="numpy")
    c_nb, f_nb = _kernels.triangle_violations(D, backend="numba")
    assert c_np == c_nb > 0
    assert np.array_equal(f_np, f_nb)


def test_order_backends_agree():
    D = _random_metric(25, 2)
    leq = np.triu(np.ones((25, 25), dtype=bool))
    assert _kernels.order_violations(D, leq, backend="numpy")[0] == _kernels.order_violations(D, leq, backend="numba")[0]


def test_diamond_backends_agree():
    n = 8
    D = _random_metric(n, 3)
    leq = np.zeros((n + 1, n + 1), dtype=bool)
    leq[:n, :n] = np.triu(np.ones((n, n), dtype=bool))
    idx = np.arange(n)
    join = np.maximum.outer(idx, idx)
    meet = np.minimum.outer(idx, idx)
    a = _kernels.diamond_violations(D, leq, join, meet, backend="numpy")
    b = _kernels.diamond_violations(D, leq, join, meet, backend="numba")
    assert a[0] == b[0]


@pytest.mark.parametrize("method", ["gauss_seidel", "jacobi"])
@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_fixed_point_matches_direct(method, backend):
    system = _random_system(60, 4)
    x_direct, _ = solve_system(*system, solver="direct")
    x, iters = _kernels.fixed_point(*system, tol=1e-12, method=method, backend=backend)
    assert iters > 0
    assert np.allclose(x, x_direct, atol=1e-9)


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.kernel("jacobi", "fortran")


def test_order_witnesses_agree():
    D = _random_metric(12, 5)
    leq = np.ones((12, 12), dtype=bool)
    a = _kernels.order_violations(D, leq, backend="numpy")
    b = _kernels.order_violations(D, leq, backend="numba")
    assert a[0] == b[0] > 0
    assert np.array_equal(a[1], b[1])
