"""Monte Carlo verification engine for the one-variable ensembles.

Samples coefficient vectors, finds all complex roots with the simultaneous
iteration, bins them into planar histograms and compares the empirical
density against the analytic predictions under per-bin Poisson statistics.
Also hosts the weak-limit pairing of the error term against smooth bump
test functions, which is the only construction valid on compacts touching R.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, stats

from .core import ComplexPoint, EnsembleSpec, Field
from .ensembles import basis_weights, sample_coefficients, CoefficientVector
from .kernel import _log_abs_ratio
from .roots import MAX_SWEEPS, STEP_TOL, aberth_batch, polyval_batch

# roots this close to R carry the singular real-zero measure and are kept
# out of the complex-density bins
REAL_ROOT_IMAG_TOL = 1e-9
RESIDUAL_TOL = 1e-8
_CHUNK = 2048
# two-sided tail mass at 3 sigma; the exact-Poisson acceptance threshold
_P_3SIGMA = 2.0 * stats.norm.sf(3.0)


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle in C."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise ValueError("rectangle must have positive extent")

    @property
    def area(self) -> float:
        return (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)


@dataclass(frozen=True)
class RootSet:
    """All roots of one sampled polynomial, with residual certification."""

    roots: np.ndarray
    residuals: np.ndarray
    trial: int
    converged: bool
    sweeps: int

    @property
    def certified(self) -> bool:
        return bool(self.converged and np.all(self.residuals <= RESIDUAL_TOL))


@dataclass(frozen=True)
class Histogram:
    """Binned complex-zero counts aggregated over trials."""

    spec: EnsembleSpec
    region: Rect
    counts: np.ndarray  # (nx, ny) int64
    trials: int
    flagged_trials: int
    real_roots: int

    @property
    def nx(self) -> int:
        return self.counts.shape[0]

    @property
    def ny(self) -> int:
        return self.counts.shape[1]

    @property
    def bin_area(self) -> float:
        return self.region.area / (self.nx * self.ny)

    def x_edges(self) -> np.ndarray:
        return np.linspace(self.region.x_lo, self.region.x_hi, self.nx + 1)

    def y_edges(self) -> np.ndarray:
        return np.linspace(self.region.y_lo, self.region.y_hi, self.ny + 1)

    def density(self) -> np.ndarray:
        """Empirical density per bin: count / (trials * bin area)."""
        if self.trials == 0:
            raise ValueError("histogram has no trials")
        return self.counts / (self.trials * self.bin_area)


@dataclass(frozen=True)
class ComparisonReport:
    """Per-bin Poisson z-scores of a histogram against an analytic density."""

    predicted_counts: np.ndarray
    zscores: np.ndarray
    within_3sigma: np.ndarray
    frac_within_3sigma: float
    max_abs_z: float
    chi_square: float
    nbins: int
    flagged_rate: float


def _weighted_coeff_rows(spec: EnsembleSpec, trials: Sequence[int]) -> np.ndarray:
    weights = basis_weights(spec)
    rows = np.empty((len(trials), spec.N + 1), dtype=np.complex128)
    for i, trial in enumerate(trials):
        rows[i] = sample_coefficients(spec, 1, trial).values
    return rows * weights[None, :]


def find_roots(coeffs: CoefficientVector) -> RootSet:
    """All N roots (with multiplicity) of one sampled m=1 polynomial.

    Deterministic for a fixed coefficient vector; roots are returned sorted
    by (Re, Im).  Residuals are backward errors |p(root)| relative to
    sum_k |w_k| |root|^k.
    """
    spec = coeffs.spec
    if spec.m != 1:
        raise ValueError("root finding is implemented for m = 1 only")
    w = (coeffs.values * basis_weights(spec))[None, :]
    if w[0, -1] == 0:
        raise ValueError("degenerate draw: leading weighted coefficient is zero")
    roots, conv, sweeps = aberth_batch(w, MAX_SWEEPS, STEP_TOL)
    roots = np.sort_complex(roots[0])
    pvals = np.abs(polyval_batch(w, roots[None, :])[0])
    scale = np.abs(w[0])[None, :] * np.abs(roots)[:, None] ** np.arange(spec.N + 1)[None, :]
    residuals = pvals / scale.sum(axis=1)
    return RootSet(
        roots=roots,
        residuals=residuals,
        trial=coeffs.trial,
        converged=bool(conv[0]),
        sweeps=int(sweeps[0]),
    )


def _bin_chunk(spec: EnsembleSpec, trials: Sequence[int], region: Rect, edges):
    W = _weighted_coeff_rows(spec, trials)
    good = np.abs(W[:, -1]) > 0
    flagged = int((~good).sum())
    roots, conv, _ = aberth_batch(W[good], MAX_SWEEPS, STEP_TOL)
    flagged += int((~conv).sum())
    roots = roots[conv].ravel()
    real_mask = np.abs(roots.imag) < REAL_ROOT_IMAG_TOL
    real_roots = int(real_mask.sum())
    roots = roots[~real_mask]
    counts, _, _ = np.histogram2d(roots.real, roots.imag, bins=edges)
    return counts.astype(np.int64), flagged, real_roots


def default_threads() -> int:
    cap = os.environ.get("RANDPOLY_THREADS", "")
    limit = int(cap) if cap.strip() else (os.cpu_count() or 1)
    return max(1, min(limit, os.cpu_count() or 1))


def empirical_density(
    spec: EnsembleSpec,
    region: Rect,
    bins: tuple[int, int],
    trials: int,
    threads: int | None = None,
) -> Histogram:
    """Aggregate root counts over trials into a planar histogram.

    Reproducible for a fixed seed regardless of the execution schedule:
    trials are chunked in a fixed order and the reduction is integer
    addition.  Non-converged or degenerate trials are flagged and excluded.
    """
    if spec.m != 1:
        raise ValueError("the Monte Carlo engine is implemented for m = 1 only")
    if trials < 1:
        raise ValueError("need at least one trial")
    nx, ny = bins
    if nx < 1 or ny < 1:
        raise ValueError("bin counts must be positive")
    edges = [np.linspace(region.x_lo, region.x_hi, nx + 1),
             np.linspace(region.y_lo, region.y_hi, ny + 1)]
    chunks = [range(lo, min(lo + _CHUNK, trials)) for lo in range(0, trials, _CHUNK)]
    threads = threads or default_threads()
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _bin_chunk(spec, c, region, edges), chunks))
    else:
        results = [_bin_chunk(spec, c, region, edges) for c in chunks]
    counts = np.zeros((nx, ny), dtype=np.int64)
    flagged = 0
    real_roots = 0
    for c, f, r in results:
        counts += c
        flagged += f
        real_roots += r
    return Histogram(
        spec=spec,
        region=region,
        counts=counts,
        trials=trials,
        flagged_trials=flagged,
        real_roots=real_roots,
    )


def predicted_counts(
    hist: Histogram, analytic: Callable[[complex], float], subgrid: int = 3
) -> np.ndarray:
    """Expected count per bin: trials * bin-average of the analytic density."""
    xs = hist.x_edges()
    ys = hist.y_edges()
    mu = np.empty((hist.nx, hist.ny))
    offs = (np.arange(subgrid) + 0.5) / subgrid
    for i in range(hist.nx):
        xg = xs[i] + offs * (xs[i + 1] - xs[i])
        for j in range(hist.ny):
            yg = ys[j] + offs * (ys[j + 1] - ys[j])
            vals = [analytic(complex(xv, yv)) for xv in xg for yv in yg]
            mu[i, j] = np.mean(vals) * hist.bin_area * hist.trials
    return mu


def compare(hist: Histogram, analytic: Callable[[complex], float]) -> ComparisonReport:
    """Score a histogram against an analytic density under Poisson statistics.

    The 3-sigma acceptance per bin uses the exact Poisson two-sided tail
    (never the normal approximation), so empty and low-count bins are
    handled correctly.
    """
    if hist.trials == 0:
        raise ValueError("cannot compare an empty histogram")
    mu = predicted_counts(hist, analytic)
    counts = hist.counts
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(mu > 0, (counts - mu) / np.sqrt(mu), np.where(counts == 0, 0.0, np.inf))
    lower = stats.poisson.cdf(counts, mu)
    upper = stats.poisson.sf(counts - 1, mu)
    pvals = np.minimum(1.0, 2.0 * np.minimum(lower, upper))
    within = pvals >= _P_3SIGMA
    chi = float(np.sum((counts[mu > 0] - mu[mu > 0]) ** 2 / mu[mu > 0]))
    return ComparisonReport(
        predicted_counts=mu,
        zscores=z,
        within_3sigma=within,
        frac_within_3sigma=float(within.mean()),
        max_abs_z=float(np.max(np.abs(z[np.isfinite(z)]), initial=0.0)),
        chi_square=chi,
        nbins=int(counts.size),
        flagged_rate=hist.flagged_trials / hist.trials,
    )


# ---------------------------------------------------------------------------
# weak-limit pairing


def _bump(u: float) -> float:
    if abs(u) >= 1.0:
        return 0.0
    return math.exp(-1.0 / (1.0 - u * u))


def _bump_dd(u: float) -> float:
    if abs(u) >= 1.0:
        return 0.0
    b = math.exp(-1.0 / (1.0 - u * u))
    g = 2.0 * u / (1.0 - u * u) ** 2
    gp = (2.0 + 6.0 * u * u) / (1.0 - u * u) ** 3
    return b * (g * g - gp)


@dataclass(frozen=True)
class TestFunction:
    """Separable smooth bump phi(x, y) supported on a rectangle K.

    phi and all derivatives vanish on the boundary of K; the Laplacian is
    available in closed form.
    """

    amplitude: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)
    radii: tuple[float, float] = (1.0, 0.5)

    def __post_init__(self):
        if self.radii[0] <= 0 or self.radii[1] <= 0:
            raise ValueError("radii must be positive")

    @property
    def support(self) -> Rect:
        cx, cy = self.center
        rx, ry = self.radii
        return Rect(cx - rx, cx + rx, cy - ry, cy + ry)

    def value(self, x: float, y: float) -> float:
        cx, cy = self.center
        rx, ry = self.radii
        return self.amplitude * _bump((x - cx) / rx) * _bump((y - cy) / ry)

    def laplacian(self, x: float, y: float) -> float:
        cx, cy = self.center
        rx, ry = self.radii
        u, v = (x - cx) / rx, (y - cy) / ry
        return self.amplitude * (
            _bump_dd(u) * _bump(v) / rx**2 + _bump(u) * _bump_dd(v) / ry**2
        )

    def laplacian_l1(self) -> float:
        """||Delta phi||_L1 over the support, by adaptive quadrature."""
        K = self.support
        opts = {"epsabs": 1e-10, "limit": 200}
        val, _ = integrate.nquad(
            lambda y, x: abs(self.laplacian(x, y)),
            [(K.y_lo, K.y_hi), (K.x_lo, K.x_hi)],
            opts=[opts, opts],
        )
        return val


def _two_rt(x: float, y: float, N: int) -> float:
    """2 r_N t_N = sqrt(1 - |Q|^2); bounded by 1 and 0 exactly on R."""
    w = 2.0 * N * _log_abs_ratio(ComplexPoint((complex(x, y),)))
    if w < -745.0:
        return 1.0
    return math.sqrt(-math.expm1(w))


def weak_limit_pairing(spec: EnsembleSpec, phi: TestFunction, epsabs: float = 1e-9) -> float:
    """(1/N) pairing of the error term with phi via the moved-derivative identity.

    Computes (1/N) * (1/2pi) * int_K log(1 + 2 r_N t_N) Laplacian(phi) dx dy.
    The integrand is bounded on all of K including R (1 <= 1+2rt <= 3) but is
    not smooth across the real axis, so K is split along it.
    """
    if spec.m != 1:
        raise ValueError("the weak-limit pairing is an m = 1 construction")
    K = phi.support
    N = spec.N

    def integrand(y: float, x: float) -> float:
        return math.log1p(_two_rt(x, y, N)) * phi.laplacian(x, y)

    pieces = []
    if K.y_lo < 0.0 < K.y_hi:
        pieces = [(K.y_lo, 0.0), (0.0, K.y_hi)]
    else:
        pieces = [(K.y_lo, K.y_hi)]
    total = 0.0
    err = 0.0
    opts = {"epsabs": epsabs, "limit": 200}
    for y_lo, y_hi in pieces:
        val, e = integrate.nquad(
            integrand, [(y_lo, y_hi), (K.x_lo, K.x_hi)], opts=[opts, opts]
        )
        total += val
        err += e
    if err > max(100.0 * epsabs, 1e-12 * abs(total)):
        raise QuadratureError(f"quadrature error estimate {err} above tolerance {epsabs}")
    return total / (2.0 * math.pi * N)


def weak_limit_bound(spec: EnsembleSpec, phi: TestFunction) -> float:
    """Explicit bound log(3)/(2 pi N) * ||Delta phi||_1 from 1 + 2rt <= 3."""
    return math.log(3.0) / (2.0 * math.pi * spec.N) * phi.laplacian_l1()


# ---------------------------------------------------------------------------
# CSV export

CSV_COLUMNS = "x_lo,x_hi,y_lo,y_hi,count,trials,density,predicted,zscore"


def _fmt(v: float) -> str:
    return format(float(v), ".16e")


def export_histogram_csv(
    hist: Histogram,
    path,
    analytic: Callable[[complex], float],
    metadata: dict | None = None,
) -> ComparisonReport:
    """Write the histogram with predictions and z-scores; returns the report.

    Output is byte-stable for identical inputs: metadata is emitted in the
    given order and numbers in full-precision scientific notation.
    """
    report = compare(hist, analytic)
    xs = hist.x_edges()
    ys = hist.y_edges()
    dens = hist.density()
    pred_density = report.predicted_counts / (hist.trials * hist.bin_area)
    lines = []
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}={value}")
    lines.append(CSV_COLUMNS)
    for i in range(hist.nx):
        for j in range(hist.ny):
            lines.append(
                ",".join(
                    [
                        _fmt(xs[i]),
                        _fmt(xs[i + 1]),
                        _fmt(ys[j]),
                        _fmt(ys[j + 1]),
                        str(int(hist.counts[i, j])),
                        str(hist.trials),
                        _fmt(dens[i, j]),
                        _fmt(pred_density[i, j]),
                        _fmt(report.zscores[i, j]),
                    ]
                )
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return report
