"""Pure-numpy fallback for the batched simultaneous root iteration.

Vectorized over the trial axis; algebra and update schedule (Jacobi: the
full sweep is computed before any point moves) match the compiled kernel so
both backends converge to the same roots.
"""
from __future__ import annotations

import numpy as np


def aberth_sweeps(
    coeffs: np.ndarray, z0: np.ndarray, max_sweeps: int, tol: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run Aberth-Ehrlich sweeps on a batch of polynomials.

    coeffs: (B, n+1) complex, ascending powers, nonzero leading column.
    z0: (B, n) initial points.  Returns (roots, converged, sweeps).
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    B, n1 = coeffs.shape
    n = n1 - 1
    z = np.array(z0, dtype=np.complex128, copy=True)
    converged = np.zeros(B, dtype=bool)
    sweeps = np.zeros(B, dtype=np.int64)
    active = np.arange(B)
    for it in range(max_sweeps):
        za = z[active]
        ca = coeffs[active]
        p = np.broadcast_to(ca[:, n, None], za.shape).copy()
        dp = np.zeros_like(za)
        for k in range(n - 1, -1, -1):
            dp = dp * za + p
            p = p * za + ca[:, k, None]
        diff = za[:, :, None] - za[:, None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(diff == 0, 0.0, 1.0 / diff)
        ssum = inv.sum(axis=2)
        den = dp - p * ssum
        den = np.where(den == 0, 1.0, den)
        delta = p / den
        za = za - delta
        ok = np.all(np.abs(delta) <= tol * (1.0 + np.abs(za)), axis=1)
        z[active] = za
        sweeps[active] = it + 1
        if ok.any():
            converged[active[ok]] = True
            active = active[~ok]
            if active.size == 0:
                break
    return z, converged, sweeps
