import importlib.util

import numpy as np
import pytest

from randpoly import _aberth_py
from randpoly.roots import BACKEND, aberth_batch, initial_points, polyval_batch

HAVE_COMPILED = importlib.util.find_spec("randpoly._aberth") is not None


def _random_batch(rng, B, n, real=True):
    if real:
        c = rng.standard_normal((B, n + 1))
    else:
        c = rng.standard_normal((B, n + 1)) + 1j * rng.standard_normal((B, n + 1))
    return np.ascontiguousarray(c, dtype=np.complex128)


def test_known_roots_quadratic():
    roots, conv, _ = aberth_batch(np.array([[-1.0, 0.0, 1.0]], dtype=complex))
    assert conv[0]
    assert np.allclose(np.sort_complex(roots[0]), [-1.0, 1.0], atol=1e-12)


def test_known_roots_cubic():
    roots, conv, _ = aberth_batch(np.array([[-6.0, 11.0, -6.0, 1.0]], dtype=complex))
    assert conv[0]
    assert np.allclose(np.sort_complex(roots[0]), [1.0, 2.0, 3.0], atol=1e-10)


def test_batch_convergence_and_residuals():
    rng = np.random.default_rng(7)
    coeffs = _random_batch(rng, 50, 20, real=True)
    roots, conv, sweeps = aberth_batch(coeffs)
    assert conv.all()
    assert sweeps.max() <= 200
    resid = np.abs(polyval_batch(coeffs, roots))
    scale = np.abs(coeffs).sum(axis=1, keepdims=True) * np.maximum(
        1.0, np.abs(roots)
    ) ** (coeffs.shape[1] - 1)
    assert np.max(resid / scale) < 1e-10


def test_deterministic():
    rng = np.random.default_rng(11)
    coeffs = _random_batch(rng, 8, 12, real=False)
    a = aberth_batch(coeffs)[0]
    b = aberth_batch(coeffs)[0]
    assert np.array_equal(a, b)


def test_initial_points_radius_bound():
    coeffs = np.array([[2.0, 0.0, 0.0, 1.0]], dtype=complex)  # z^3 + 2
    z0 = initial_points(coeffs)
    assert z0.shape == (1, 3)
    assert np.allclose(np.abs(z0[0]), 1.0 + 2.0 ** (1.0 / 3.0))
    assert np.all(z0.imag != 0.0)


def test_degenerate_leading_coefficient_rejected():
    with pytest.raises(ValueError):
        initial_points(np.array([[1.0, 1.0, 0.0]], dtype=complex))


def _assert_same_root_sets(a, b, tol=1e-10):
    # sorting complex values is order-unstable for conjugate pairs whose real
    # parts agree to rounding, so match greedily instead
    for row_a, row_b in zip(a, b):
        remaining = list(row_b)
        for r in row_a:
            dists = [abs(r - s) for s in remaining]
            k = int(np.argmin(dists))
            assert dists[k] < tol
            remaining.pop(k)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled extension not built")
def test_backend_parity():
    from randpoly import _aberth

    rng = np.random.default_rng(13)
    for n in (5, 12, 20):
        for real in (True, False):
            coeffs = _random_batch(rng, 40, n, real=real)
            z0 = initial_points(coeffs)
            rc, cc, _ = _aberth.aberth_sweeps(coeffs, z0, 200, 1e-13)
            rp, cp, _ = _aberth_py.aberth_sweeps(coeffs, z0, 200, 1e-13)
            assert cc.all() and cp.all()
            _assert_same_root_sets(rc, rp)


def test_backend_selected():
    assert BACKEND in ("compiled", "python")
