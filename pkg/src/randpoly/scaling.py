"""Scaling limits of the zero density near R^m.

After the z -> z/sqrt(N) rescaling, the log-error potential converges to a
function of y = Im z alone,

    g(rho) = log(1 + sqrt(1 - exp(-4 rho^2))),   rho = ||y||,

and the scaled density is assembled from the same 2^m wedge terms as the
finite-N density, with the log-norm Hessian degenerating to the identity.
All radial derivatives are analytic (the finite-difference route is kept
only as a test oracle: FD is ill-conditioned exactly where the near-zero
asymptotics need evaluation).
"""
from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations

import numpy as np

from .kernel import mixed_determinant

_SUPPORTED_M = (1, 2, 3, 4)


def _g_radial(rho: float) -> tuple[float, float, float]:
    """(g, g', g'') for g(rho) = log(1 + sqrt(1 - e^(-4 rho^2)))."""
    a = 4.0 * rho * rho
    if a > 745.0:
        return math.log(2.0), 0.0, 0.0
    E = math.exp(-a)
    u = -math.expm1(-a)  # 1 - E, accurate near rho = 0
    S = math.sqrt(u)
    g = math.log1p(S)
    d = S * (1.0 + S)
    gp = 4.0 * rho * E / d
    gpp = 4.0 * E * (1.0 - 8.0 * rho * rho) / d - 16.0 * rho * rho * E * E * (1.0 + 2.0 * S) / (
        S * d * d
    )
    return g, gp, gpp


def scaled_error_m1(y: float) -> float:
    """Scaled m=1 error term (1/4pi) d^2/dy^2 log(1 + sqrt(1 - e^(-4y^2)))."""
    y = float(y)
    if y == 0.0:
        raise ValueError("the scaled error term is defined for y != 0")
    _, _, gpp = _g_radial(abs(y))
    return gpp / (4.0 * math.pi)


def prosen_density(y: float, *, limit_at_zero: bool = False) -> float:
    """Closed-form m=1 scaled density (1/pi)(1-(4y^2+1)e^(-4y^2))/(1-e^(-4y^2))^(3/2).

    Positive for y != 0.  y = 0 is excluded unless limit_at_zero is set, in
    which case the limiting value 0 is reported exactly.
    """
    y = float(y)
    if y == 0.0:
        if limit_at_zero:
            return 0.0
        raise ValueError("y = 0 is excluded; pass limit_at_zero=True for the limit value 0")
    a = 4.0 * y * y
    if a > 745.0:
        return 1.0 / math.pi
    E = math.exp(-a)
    num = 1.0 - (a + 1.0) * E
    den = (-math.expm1(-a)) ** 1.5
    return num / den / math.pi


def scaled_log_error_hessian(y) -> np.ndarray:
    """(1/4) d^2/dy_j dy_k of the scaled log-error potential, analytic radial form.

    With g as above and rho = ||y||:
        (1/4) [ g'(rho) (delta_jk/rho - y_j y_k/rho^3) + g''(rho) y_j y_k/rho^2 ].
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    rho = float(np.linalg.norm(y))
    if rho == 0.0:
        raise ValueError("||y|| = 0 is excluded")
    _, gp, gpp = _g_radial(rho)
    m = len(y)
    yy = np.outer(y, y)
    return 0.25 * (gp * (np.eye(m) / rho - yy / rho**3) + gpp * yy / rho**2)


@lru_cache(maxsize=None)
def _scaled_prefactor(m: int) -> float:
    # calibrated so the all-log-norm subset gives the large-||y|| limit m/pi^m
    return m / (math.factorial(m) * math.pi**m)


def scaled_density(y, m: int | None = None) -> float:
    """Scaled density K_inf(y) = lim (1/N^m) E_real(z/sqrt(N)), z = x + iy.

    Depends on y only.  Assembled from 2^m wedge terms: log-norm factors
    become identity matrices, log-error factors become the analytic radial
    Hessian, with the prefactor calibrated so K_inf -> m/pi^m as ||y|| -> inf.
    For m = 1 this reduces to prosen_density.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if m is None:
        m = len(y)
    if m not in _SUPPORTED_M:
        raise ValueError(f"m must be one of {_SUPPORTED_M}, got {m}")
    if len(y) != m:
        raise ValueError(f"y must have {m} components, got {len(y)}")
    if np.linalg.norm(y) == 0.0:
        raise ValueError("||y|| = 0 is excluded")
    ident = np.eye(m)
    S = scaled_log_error_hessian(y)
    total = 0j
    for k in range(m + 1):
        for subset in combinations(range(m), k):
            forms = [ident if l in subset else S for l in range(m)]
            total += mixed_determinant(forms)
    return _scaled_prefactor(m) * total.real
