"""Sampling of Gaussian coefficient vectors and evaluation of the weighted basis.

The square-root multinomial weights live in the deterministic basis vector
F_N(z), never in the sampled coefficients, so the same unit-variance sampler
serves both ensembles.  Streams are derived per (seed, equation, trial) with
a counter-based generator, which makes sampling order-independent and safe
to parallelize over trials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import ComplexPoint, EnsembleSpec, Field, enumerate_indices, log_multinomial

# beyond this, (1+||z||^2)^N overflows double precision comfortably early
LOG_NORM_SQ_SWITCH = 600.0


@lru_cache(maxsize=None)
def _basis_layout(m: int, N: int):
    """Multi-index exponent matrix and sqrt-multinomial weights, cached per (m, N)."""
    indices = enumerate_indices(m, N)
    exponents = np.array(indices, dtype=np.int64)
    log_weights = np.array([log_multinomial(N, J) for J in indices])
    weights = np.exp(0.5 * log_weights)
    weights.setflags(write=False)
    exponents.setflags(write=False)
    return exponents, weights, log_weights


def basis_weights(spec: EnsembleSpec) -> np.ndarray:
    """sqrt(N choose J) in canonical layout; read-only view."""
    return _basis_layout(spec.m, spec.N)[1]


@dataclass(frozen=True)
class CoefficientVector:
    """One sampled coefficient vector a^q (complex storage, Im = 0 when real)."""

    values: np.ndarray
    spec: EnsembleSpec
    q: int
    trial: int

    def __post_init__(self):
        if len(self.values) != self.spec.dimension:
            raise ValueError("coefficient vector length must equal D_N")


@dataclass(frozen=True)
class BasisEvaluation:
    """F_N(z) split into a unit direction u and a log-scale norm.

    norm_sq and F overflow to inf once log_norm_sq exceeds the double range;
    u and log_norm_sq stay finite for any finite z.
    """

    u: np.ndarray
    log_norm_sq: float

    @property
    def norm_sq(self) -> float:
        with np.errstate(over="ignore"):
            return float(np.exp(self.log_norm_sq))

    @property
    def F(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.u * np.exp(0.5 * self.log_norm_sq)


def _stream(spec: EnsembleSpec, q: int, trial: int) -> np.random.Generator:
    key = np.array([spec.seed, q], dtype=np.uint64)
    counter = np.array([0, 0, trial, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


def sample_coefficients(spec: EnsembleSpec, q: int, trial: int) -> CoefficientVector:
    """Draw the coefficient vector of equation q for one trial.

    Real field: i.i.d. standard real Gaussians.  Complex field: i.i.d.
    standard complex Gaussians (Re and Im each with variance 1/2).  The draw
    is a pure function of (seed, q, trial).
    """
    if not 1 <= q <= spec.m:
        raise ValueError(f"equation index q must be in 1..{spec.m}, got {q}")
    if trial < 0:
        raise ValueError("trial index must be non-negative")
    rng = _stream(spec, q, trial)
    D = spec.dimension
    if spec.field is Field.REAL:
        values = rng.standard_normal(D).astype(complex)
    else:
        raw = rng.standard_normal(2 * D)
        values = (raw[:D] + 1j * raw[D:]) * math.sqrt(0.5)
    return CoefficientVector(values=values, spec=spec, q=q, trial=trial)


def basis_vector(z, spec: EnsembleSpec) -> BasisEvaluation:
    """Evaluate F_N(z) = (sqrt(N choose J) z^J)_J as a unit vector plus scale.

    ||F_N(z)||^2 = (1 + ||z||^2)^N exactly (multinomial theorem), so the
    norm is always taken from the closed form; the direct monomial route is
    used for the direction and switches to log-scale arithmetic when
    N*log(1+||z||^2) > 600 to avoid overflow.
    """
    z = ComplexPoint.of(z, spec.m)
    exponents, weights, log_weights = _basis_layout(spec.m, spec.N)
    log_norm_sq = spec.N * math.log1p(z.norm_sq)
    za = z.asarray()
    if log_norm_sq <= LOG_NORM_SQ_SWITCH:
        monomials = np.prod(za[None, :] ** exponents, axis=1)
        F = weights * monomials
        u = F * np.exp(-0.5 * log_norm_sq)
    else:
        mags = np.abs(za)
        args = np.angle(za)
        log_mag = np.where(exponents == 0, 0.0, exponents * np.log(np.where(mags > 0, mags, 1.0)))
        dead = (exponents > 0) & (mags == 0.0)[None, :]
        log_mag = np.where(dead, -np.inf, log_mag).sum(axis=1)
        phase = (exponents * args[None, :]).sum(axis=1)
        u = np.exp(0.5 * log_weights + log_mag - 0.5 * log_norm_sq + 1j * phase)
        u[np.isneginf(log_mag)] = 0.0
    return BasisEvaluation(u=u, log_norm_sq=log_norm_sq)


def evaluate_poly(coeffs: CoefficientVector, z) -> complex:
    """Evaluate f(z) = a . F_N(z), dot product without conjugation.

    For m = 1 this is a fused Horner evaluation on the weighted coefficients.
    """
    spec = coeffs.spec
    z = ComplexPoint.of(z, spec.m)
    if spec.m == 1:
        w = coeffs.values * basis_weights(spec)
        acc = 0j
        zc = z.components[0]
        for c in w[::-1]:
            acc = acc * zc + c
        return complex(acc)
    basis = basis_vector(z, spec)
    return complex(np.dot(coeffs.values, basis.F))
