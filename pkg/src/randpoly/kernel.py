"""Closed-form zero densities for the two Gaussian ensembles.

The complex-coefficient density is elementary.  The real-coefficient density
is assembled from 2^m wedge terms built out of two scalar potentials:

  log-norm potential   A(z) = (N/2) log(1 + ||z||^2)
  log-error potential  B(z) = (1/2) log(1 + sqrt(1 - |Q|^2)),
                       Q(z) = ((1 + z.z) / (1 + ||z||^2))^N

Each term is a double-permutation (mixed-determinant) contraction of mixed
second Wirtinger derivatives of those potentials.  |Q| is kept in log scale
throughout: at interesting N it underflows long before the densities do.

Conventions carry a factor-of-2 ambiguity (log|f| vs log|f|^2); it is fixed
here by calibration: the all-log-norm wedge term must reproduce density_cx
exactly, and the m=1 assembly must reduce to density_cx + the exact m=1
error term.  Both calibrations are enforced by tests.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import permutations
from typing import Callable, Sequence

import numpy as np

from .core import ComplexPoint, EnsembleSpec

# Real-axis exclusion zone: the strong results hold on C^m \ R^m only, and
# the derivatives of r, s, t blow up as Im z -> 0.
Y_MIN = 1e-3

_INF = float("inf")


class ExcludedDomainError(ValueError):
    """Point is in the excluded zone around R^m where the formula is singular."""


class ConsistencyError(ArithmeticError):
    """An internal numerical invariant was violated."""


class Potential(Enum):
    LOG_NORM = "log_norm"
    LOG_ERROR = "log_error"


@dataclass(frozen=True)
class KernelState:
    """Post-rotation geometry of the unit basis vector at a point z.

    Q is stored as log-magnitude plus phase; r, s, t satisfy
    r^2 + s^2 + t^2 = 1 with r, t >= 0, and lam is the decay rate
    -log|(1+z.z)/(1+||z||^2)| (+inf when 1 + z.z = 0).
    """

    log_abs_q: float
    phase_q: float
    r: float
    s: float
    t: float
    lam: float

    @property
    def q(self) -> complex:
        if self.log_abs_q == -_INF:
            return 0j
        return cmath.rect(math.exp(self.log_abs_q), self.phase_q)


def _log_abs_ratio(z: ComplexPoint) -> float:
    """log |(1+z.z)/(1+||z||^2)|; -inf when 1 + z.z = 0."""
    a = 1 + z.z_dot_z
    if a == 0:
        return -_INF
    return math.log(abs(a)) - math.log1p(z.norm_sq)


def kernel_state(z, spec: EnsembleSpec) -> KernelState:
    """Compute (Q, r, s, t, lambda) at z for degree N = spec.N."""
    z = ComplexPoint.of(z, spec.m)
    if z.is_real():
        return KernelState(log_abs_q=0.0, phase_q=0.0, r=1.0, s=0.0, t=0.0, lam=0.0)
    log_ratio = _log_abs_ratio(z)
    lam = -log_ratio
    if log_ratio == -_INF:
        half = math.sqrt(0.5)
        return KernelState(log_abs_q=-_INF, phase_q=0.0, r=half, s=0.0, t=half, lam=_INF)
    log_abs_q = spec.N * log_ratio
    theta = math.remainder(spec.N * cmath.phase(1 + z.z_dot_z), math.tau)
    mag = math.exp(log_abs_q) if log_abs_q > -745.0 else 0.0
    re_q = mag * math.cos(theta)
    im_q = mag * math.sin(theta)
    r = math.sqrt(0.5 + 0.5 * re_q)
    s = 0.5 * im_q / r
    t_sq = 1.0 - r * r - s * s
    if t_sq < -1e-10:
        raise ConsistencyError(f"t^2 = {t_sq} < 0 at z = {z.components}")
    t = math.sqrt(max(t_sq, 0.0))
    return KernelState(log_abs_q=log_abs_q, phase_q=theta, r=r, s=s, t=t, lam=lam)


def density_cx(z, spec: EnsembleSpec) -> float:
    """Zero density of the complex-coefficient system: mN^m/pi^m (1+||z||^2)^-(m+1)."""
    z = ComplexPoint.of(z, spec.m)
    m, N = spec.m, spec.N
    return m * N**m / math.pi**m / (1.0 + z.norm_sq) ** (m + 1)


def gaussian_log_integral(r: float, s: float, t: float) -> float:
    """(1/2pi) integral of log|a0(r+is) + a1(it)| against a standard 2D Gaussian.

    Closed form (1/2) log(1 + 2rt), valid on the unit sphere r^2+s^2+t^2 = 1
    with r, t >= 0.
    """
    if r < 0 or t < 0:
        raise ValueError("r and t must be non-negative")
    if abs(r * r + s * s + t * t - 1.0) > 1e-8:
        raise ValueError(f"(r, s, t) must lie on the unit sphere, got norm^2 = {r*r+s*s+t*t}")
    return 0.5 * math.log1p(2.0 * r * t)


# ---------------------------------------------------------------------------
# scalar potentials


def _log_norm_potential(z: ComplexPoint, N: int) -> float:
    return 0.5 * N * math.log1p(z.norm_sq)


def _log_error_potential(z: ComplexPoint, N: int) -> float:
    """B(z) = (1/2) log(1 + sqrt(1 - |Q|^2)) with |Q|^2 in log scale."""
    w = 2.0 * N * _log_abs_ratio(z)  # log |Q|^2, always <= 0
    if w < -745.0:
        u = 1.0
    else:
        u = -math.expm1(w)
    return 0.5 * math.log1p(math.sqrt(u))


def error_term_exact_m1(z, spec: EnsembleSpec) -> float:
    """Exact m=1 error term (1/pi) d^2/dz dzbar log(1 + sqrt(1 - |Q|^2)).

    Evaluated by the analytic chain rule; falls back to finite differences
    of the potential if an intermediate fails to stay finite.  Only defined
    off the real axis (|Im z| >= Y_MIN).
    """
    if spec.m != 1:
        raise ValueError("the exact error-term formula is the m=1 special case")
    z = ComplexPoint.of(z, 1)
    if abs(z.components[0].imag) < Y_MIN:
        raise ExcludedDomainError(
            f"|Im z| = {abs(z.components[0].imag)} < {Y_MIN}: too close to the real axis"
        )
    val = _error_term_chain_rule(z.components[0], spec.N)
    if math.isfinite(val):
        return val
    h = min(1e-4, abs(z.components[0].imag) / 10.0)
    return (2.0 / math.pi) * _wirtinger_hessian_fd(
        lambda p: _log_error_potential(p, spec.N), z, h
    )[0, 0].real


def _error_term_chain_rule(zc: complex, N: int) -> float:
    s = abs(zc) ** 2
    a = 1 + zc * zc
    if a == 0:
        return 0.0
    w = 2.0 * N * (math.log(abs(a)) - math.log1p(s))
    if w < -700.0:
        # |Q|^2 underflows; every term carries the factor e^w
        return 0.0
    E = math.exp(w)
    w_z = N * (2.0 * zc / a - 2.0 * zc.conjugate() / (1.0 + s))
    w_zzbar = -2.0 * N / (1.0 + s) ** 2
    u = -math.expm1(w)
    su = math.sqrt(u)
    g_p = 1.0 / (2.0 * (u + su))
    g_pp = -(2.0 * su + 1.0) / (4.0 * su * (u + su) ** 2)
    abs_uz_sq = (E * abs(w_z)) ** 2
    u_zzbar = -E * (w_zzbar + abs(w_z) ** 2)
    return (g_pp * abs_uz_sq + g_p * u_zzbar) / math.pi


# ---------------------------------------------------------------------------
# Wirtinger Hessians


@dataclass(frozen=True)
class HermitianForm:
    """m x m matrix of mixed second Wirtinger derivatives of a real potential."""

    entries: np.ndarray
    potential: Potential

    def __post_init__(self):
        H = np.asarray(self.entries, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError("entries must be a square matrix")
        scale = max(1.0, float(np.max(np.abs(H))))
        if np.max(np.abs(H - H.conj().T)) > 1e-8 * scale:
            raise ConsistencyError("form is not conjugate-symmetric")
        H.setflags(write=False)
        object.__setattr__(self, "entries", H)

    @property
    def m(self) -> int:
        return self.entries.shape[0]


def hessian_A(z, spec: EnsembleSpec) -> HermitianForm:
    """Analytic Wirtinger Hessian of the log-norm potential (N/2) log(1+||z||^2).

    H_jk = (N/2) [delta_jk/(1+||z||^2) - conj(z_j) z_k/(1+||z||^2)^2];
    positive definite at every finite z.
    """
    z = ComplexPoint.of(z, spec.m)
    za = z.asarray()
    denom = 1.0 + z.norm_sq
    H = (spec.N / 2.0) * (np.eye(spec.m) / denom - np.outer(za.conj(), za) / denom**2)
    return HermitianForm(entries=H, potential=Potential.LOG_NORM)


def _real_hessian_fd(f: Callable[[np.ndarray], float], u0: np.ndarray, h: float) -> np.ndarray:
    n = len(u0)
    H = np.empty((n, n))
    f0 = f(u0)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        H[i, i] = (f(u0 + ei) - 2.0 * f0 + f(u0 - ei)) / h**2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h
            val = (f(u0 + ei + ej) - f(u0 + ei - ej) - f(u0 - ei + ej) + f(u0 - ei - ej)) / (
                4.0 * h**2
            )
            H[i, j] = H[j, i] = val
    return H


def _wirtinger_hessian_fd(
    potential: Callable[[ComplexPoint], float], z: ComplexPoint, h: float
) -> np.ndarray:
    """Mixed d^2/dz_j dzbar_k of a real scalar potential by central differences.

    Works on the 2m real coordinates (x_1..x_m, y_1..y_m) with one Richardson
    extrapolation level on the O(h^2) stencils.
    """
    m = z.m
    u0 = np.concatenate([z.x, z.y])

    def f(u: np.ndarray) -> float:
        comps = tuple(complex(u[q], u[m + q]) for q in range(m))
        return potential(ComplexPoint(comps))

    coarse = _real_hessian_fd(f, u0, h)
    fine = _real_hessian_fd(f, u0, h / 2.0)
    R = (4.0 * fine - coarse) / 3.0
    H = np.empty((m, m), dtype=complex)
    for j in range(m):
        for k in range(m):
            H[j, k] = 0.25 * (R[j, k] + R[m + j, m + k] + 1j * (R[j, m + k] - R[m + j, k]))
    return H


def hessian_B(z, spec: EnsembleSpec) -> HermitianForm:
    """Wirtinger Hessian of the log-error potential by finite differences.

    Step h = min(1e-3, ||Im z||/10) with one Richardson level: the potential
    varies on the scale of the distance to R^m, hence the scaling, and a
    smaller base step would push the rounding noise eps*|B|/h^2 above the
    1e-6 relative agreement the cross-checks demand.  Requires
    ||Im z|| >= Y_MIN.
    """
    z = ComplexPoint.of(z, spec.m)
    rho = z.imag_norm
    if rho < Y_MIN:
        raise ExcludedDomainError(f"||Im z|| = {rho} < {Y_MIN}: too close to R^m")
    h = min(1e-3, rho / 10.0)
    H = _wirtinger_hessian_fd(lambda p: _log_error_potential(p, spec.N), z, h)
    scale = max(1.0, float(np.max(np.abs(H))))
    if np.max(np.abs(H - H.conj().T)) > 1e-7 * scale:
        raise ConsistencyError("finite-difference Hessian lost conjugate symmetry")
    H = 0.5 * (H + H.conj().T)
    return HermitianForm(entries=H, potential=Potential.LOG_ERROR)


# ---------------------------------------------------------------------------
# wedge assembly


@lru_cache(maxsize=None)
def _signed_permutations(m: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    out = []
    for perm in permutations(range(m)):
        inversions = sum(
            1 for i in range(m) for j in range(i + 1, m) if perm[i] > perm[j]
        )
        out.append((perm, -1 if inversions % 2 else 1))
    return tuple(out)


@dataclass(frozen=True)
class WedgeTerm:
    """One signed term of the 2^m wedge expansion.

    `subset` lists the equations (0-based) taking the log-norm potential;
    the rest take the log-error potential.  sigma and tau index the mixed
    derivative applied to each slot, and sign = sign(sigma) sign(tau).
    """

    subset: frozenset
    sigma: tuple[int, ...]
    tau: tuple[int, ...]
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")


def wedge_terms(m: int):
    """Enumerate all 2^m (m!)^2 wedge terms, each subset exactly once."""
    for mask in range(2**m):
        subset = frozenset(l for l in range(m) if (mask >> l) & 1)
        for sigma, sgn_s in _signed_permutations(m):
            for tau, sgn_t in _signed_permutations(m):
                yield WedgeTerm(subset=subset, sigma=sigma, tau=tau, sign=sgn_s * sgn_t)


def mixed_determinant(forms: Sequence[HermitianForm | np.ndarray]) -> complex:
    """Double-permutation contraction of m matrices.

    sum over permutation pairs (sigma, tau) of sign(sigma) sign(tau)
    prod_l M^(l)[sigma(l), tau(l)], by brute-force enumeration of the (m!)^2
    pairs.  For m identical matrices this is m! det(M).
    """
    mats = [np.asarray(getattr(f, "entries", f), dtype=complex) for f in forms]
    m = len(mats)
    if m == 0:
        raise ValueError("need at least one form")
    for M in mats:
        if M.shape != (m, m):
            raise ValueError(f"expected {m}x{m} matrices for a list of length {m}")
    total = 0j
    for sigma, sgn_s in _signed_permutations(m):
        for tau, sgn_t in _signed_permutations(m):
            prod = complex(sgn_s * sgn_t)
            for l in range(m):
                prod *= mats[l][sigma[l], tau[l]]
            total += prod
    return total


def _wedge_prefactor(m: int) -> float:
    # calibrated so the all-log-norm subset reproduces density_cx exactly:
    # c * m! * det(H_A) = m N^m / pi^m (1+||z||^2)^-(m+1)
    return m * (2.0 / math.pi) ** m / math.factorial(m)


def density_real(z, spec: EnsembleSpec) -> float:
    """Zero density of the real-coefficient system, off R^m.

    Assembles all 2^m subset terms: equations in the subset take the
    log-norm Hessian, the rest take the log-error Hessian, each term
    contracted with mixed_determinant and scaled by the calibrated
    volume-form prefactor.  Equals density_cx plus an error term that
    vanishes as exp(-2 lambda_z N).
    """
    z = ComplexPoint.of(z, spec.m)
    m = spec.m
    A = hessian_A(z, spec)
    B = hessian_B(z, spec)
    total = 0j
    for mask in range(2**m):
        forms = [A if (mask >> l) & 1 else B for l in range(m)]
        total += mixed_determinant(forms)
    scale = max(1.0, abs(total.real))
    if abs(total.imag) > 1e-8 * scale:
        raise ConsistencyError(f"imaginary residue {total.imag} in density assembly")
    value = _wedge_prefactor(m) * total.real
    if value < 0.0:
        if value < -1e-8 * max(1.0, density_cx(z, spec)):
            raise ConsistencyError(f"density came out negative: {value}")
        value = 0.0
    return value
