"""Backend selection and shared plumbing for the polynomial root-finder.

The hot loop lives in the compiled extension randpoly._aberth; a pure-numpy
fallback with identical semantics is selected at import when the extension
is unavailable (or when RANDPOLY_PURE is set, e.g. for benchmarking).
"""
from __future__ import annotations

import math
import os

import numpy as np

# 200 sweeps suffice through degree ~40; the Jacobi iteration needs ~150 at
# degree 100, so the budget is set with headroom to keep flagged trials rare
MAX_SWEEPS = 400
STEP_TOL = 1e-13
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# constant phase offset keeps every start strictly off the real axis, where
# real-coefficient iterations would be trapped
_PHASE_OFFSET = 0.5


def _select_backend():
    if os.environ.get("RANDPOLY_PURE", "") not in ("", "0"):
        from . import _aberth_py

        return _aberth_py, "python"
    try:
        from . import _aberth

        return _aberth, "compiled"
    except ImportError:
        from . import _aberth_py

        return _aberth_py, "python"


_impl, BACKEND = _select_backend()


def initial_points(coeffs: np.ndarray) -> np.ndarray:
    """Deterministic starting points on a scaled circle with golden-angle phases.

    Radius 1 + max_k |c_k/c_n|^(1/(n-k)) per trial (Cauchy-style bound).
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    B, n1 = coeffs.shape
    n = n1 - 1
    lead = np.abs(coeffs[:, -1])
    if np.any(lead == 0):
        raise ValueError("leading coefficient must be nonzero")
    ratios = np.abs(coeffs[:, :-1]) / lead[:, None]
    exps = 1.0 / (n - np.arange(n))
    radius = 1.0 + np.max(ratios**exps[None, :], axis=1)
    theta = 2.0 * math.pi * ((np.arange(n) * _GOLDEN) % 1.0) + _PHASE_OFFSET
    return radius[:, None] * np.exp(1j * theta)[None, :]


def aberth_batch(
    coeffs: np.ndarray, max_sweeps: int = MAX_SWEEPS, tol: float = STEP_TOL
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Find all roots of a batch of polynomials (ascending coefficients).

    Returns (roots (B, n), converged (B,), sweeps (B,)).
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    if coeffs.ndim != 2 or coeffs.shape[1] < 2:
        raise ValueError("coeffs must be (B, n+1) with n >= 1")
    z0 = initial_points(coeffs)
    return _impl.aberth_sweeps(coeffs, z0, max_sweeps, tol)


def polyval_batch(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Horner evaluation of each row polynomial at the matching row of z."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    n = coeffs.shape[1] - 1
    p = np.broadcast_to(coeffs[:, n, None], z.shape).copy()
    for k in range(n - 1, -1, -1):
        p = p * z + coeffs[:, k, None]
    return p
