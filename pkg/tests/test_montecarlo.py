import math

import numpy as np
import pytest
from scipy import stats

from oracles import fd_second_derivative
from randpoly.core import EnsembleSpec, Field
from randpoly.ensembles import CoefficientVector, basis_weights, sample_coefficients
from randpoly.kernel import density_cx, density_real
from randpoly.montecarlo import TestFunction as BumpFunction
from randpoly.montecarlo import (
    Histogram,
    Rect,
    compare,
    empirical_density,
    export_histogram_csv,
    find_roots,
    predicted_counts,
    weak_limit_bound,
    weak_limit_pairing,
)

CX = Field.COMPLEX
RE = Field.REAL


def _from_weighted(weighted, field=RE, seed=0, trial=0):
    """CoefficientVector whose weighted polynomial has the given coefficients."""
    weighted = np.asarray(weighted, dtype=complex)
    spec = EnsembleSpec(m=1, N=len(weighted) - 1, field=field, seed=seed)
    values = weighted / basis_weights(spec)
    return CoefficientVector(values=values, spec=spec, q=1, trial=trial)


class TestFindRoots:
    def test_quadratic(self):
        rs = find_roots(_from_weighted([-1.0, 0.0, 1.0]))
        assert np.allclose(rs.roots, [-1.0, 1.0], atol=1e-12)
        assert rs.converged

    def test_cubic_with_known_factorization(self):
        rs = find_roots(_from_weighted([-6.0, 11.0, -6.0, 1.0]))
        assert np.allclose(rs.roots, [1.0, 2.0, 3.0], atol=1e-10)

    def test_random_degree_twenty(self):
        spec = EnsembleSpec(m=1, N=20, field=RE, seed=99)
        rs = find_roots(sample_coefficients(spec, 1, 0))
        assert len(rs.roots) == 20
        assert rs.converged
        assert rs.certified
        assert rs.residuals.max() < 1e-8

    def test_deterministic(self):
        spec = EnsembleSpec(m=1, N=12, field=CX, seed=5)
        a = find_roots(sample_coefficients(spec, 1, 3))
        b = find_roots(sample_coefficients(spec, 1, 3))
        assert np.array_equal(a.roots, b.roots)

    def test_real_coefficients_give_conjugate_pairs(self):
        spec = EnsembleSpec(m=1, N=15, field=RE, seed=21)
        for trial in range(5):
            roots = find_roots(sample_coefficients(spec, 1, trial)).roots
            complex_roots = list(roots[np.abs(roots.imag) > 1e-9])
            while complex_roots:
                r = complex_roots.pop()
                dists = [abs(r.conjugate() - s) for s in complex_roots]
                k = int(np.argmin(dists))
                assert dists[k] < 1e-9
                complex_roots.pop(k)

    def test_m2_rejected(self):
        spec = EnsembleSpec(m=2, N=4, field=RE, seed=0)
        with pytest.raises(ValueError):
            find_roots(sample_coefficients(spec, 1, 0))


class TestEmpiricalDensity:
    def test_root_count_conservation(self):
        # a region large enough to hold every root: counts + real-axis roots
        # must account for N per converged trial
        spec = EnsembleSpec(m=1, N=12, field=RE, seed=2)
        trials = 300
        hist = empirical_density(spec, Rect(-60, 60, -60, 60), (8, 8), trials)
        total = int(hist.counts.sum()) + hist.real_roots
        assert total == spec.N * (trials - hist.flagged_trials)
        assert hist.flagged_trials == 0

    def test_seed_determinism_bytes(self, tmp_path):
        spec = EnsembleSpec(m=1, N=10, field=RE, seed=77)
        region = Rect(-1.5, 1.5, 0.2, 1.0)
        paths = []
        for k in range(2):
            hist = empirical_density(spec, region, (10, 4), 500)
            p = tmp_path / f"h{k}.csv"
            export_histogram_csv(hist, p, lambda z: density_real(z, spec))
            paths.append(p.read_bytes())
        assert paths[0] == paths[1]

    def test_threaded_equals_serial(self):
        spec = EnsembleSpec(m=1, N=8, field=CX, seed=3)
        region = Rect(-1.0, 1.0, -1.0, 1.0)
        a = empirical_density(spec, region, (6, 6), 5000, threads=1)
        b = empirical_density(spec, region, (6, 6), 5000, threads=2)
        assert np.array_equal(a.counts, b.counts)
        assert (a.flagged_trials, a.real_roots) == (b.flagged_trials, b.real_roots)

    def test_conjugate_symmetry_of_real_histogram(self):
        spec = EnsembleSpec(m=1, N=10, field=RE, seed=11)
        hist = empirical_density(spec, Rect(-1.2, 1.2, -1.0, 1.0), (6, 8), 4000)
        up = hist.counts[:, 4:]
        down = hist.counts[:, :4][:, ::-1]
        z = (up - down) / np.sqrt(up + down + 1.0)
        assert np.max(np.abs(z)) < 4.0

    def test_complex_field_matches_density_cx(self):
        spec = EnsembleSpec(m=1, N=20, field=CX, seed=13)
        hist = empirical_density(spec, Rect(-1.0, 1.0, 0.3, 1.0), (8, 4), 20000)
        report = compare(hist, lambda z: density_cx(z, spec))
        assert report.frac_within_3sigma >= 0.90

    def test_real_field_depressed_near_axis(self):
        # bins straddling R show far fewer zeros than the complex-coefficient
        # prediction: the real-coefficient density dips to 0 at the axis
        spec = EnsembleSpec(m=1, N=8, field=RE, seed=17)
        hist = empirical_density(spec, Rect(-0.5, 0.5, -0.15, 0.15), (3, 3), 30000)
        mu = predicted_counts(hist, lambda z: density_cx(z, spec))
        middle = hist.counts[:, 1]
        assert np.all(middle < 0.7 * mu[:, 1])

    def test_validation(self):
        spec = EnsembleSpec(m=1, N=5, field=RE, seed=0)
        with pytest.raises(ValueError):
            empirical_density(spec, Rect(-1, 1, 0.2, 1.0), (4, 4), 0)
        with pytest.raises(ValueError):
            empirical_density(
                EnsembleSpec(m=2, N=5, field=RE, seed=0),
                Rect(-1, 1, 0.2, 1.0),
                (4, 4),
                10,
            )

    def test_expected_real_zero_count_sqrt_n(self):
        # Edelman-Kostlan diagnostic: E[# real zeros] = sqrt(N) for this
        # ensemble; 10% tolerance at N=100 over 10^4 trials
        spec = EnsembleSpec(m=1, N=100, field=RE, seed=23)
        trials = 10_000
        hist = empirical_density(spec, Rect(-0.1, 0.1, -0.1, 0.1), (2, 2), trials)
        assert hist.flagged_trials < 0.001 * trials
        mean_real = hist.real_roots / (trials - hist.flagged_trials)
        assert abs(mean_real - 10.0) / 10.0 < 0.10


def _poisson_histogram(spec, region, bins, trials, analytic, rng):
    """Synthetic histogram: per-bin Poisson draws from an analytic density."""
    base = Histogram(
        spec=spec,
        region=region,
        counts=np.zeros(bins, dtype=np.int64),
        trials=trials,
        flagged_trials=0,
        real_roots=0,
    )
    mu = predicted_counts(base, analytic)
    counts = rng.poisson(mu).astype(np.int64)
    return Histogram(
        spec=spec,
        region=region,
        counts=counts,
        trials=trials,
        flagged_trials=0,
        real_roots=0,
    )


class TestCompare:
    def test_self_consistency_via_thinning(self):
        spec = EnsembleSpec(m=1, N=20, field=CX, seed=0)
        rng = np.random.default_rng(101)
        hist = _poisson_histogram(
            spec,
            Rect(-1.5, 1.5, 0.2, 1.0),
            (30, 8),
            100_000,
            lambda z: density_cx(z, spec),
            rng,
        )
        report = compare(hist, lambda z: density_cx(z, spec))
        assert report.frac_within_3sigma >= 0.95

    def test_negative_control_mismatched_degree(self):
        spec = EnsembleSpec(m=1, N=20, field=CX, seed=0)
        wrong = EnsembleSpec(m=1, N=24, field=CX, seed=0)
        rng = np.random.default_rng(103)
        hist = _poisson_histogram(
            spec,
            Rect(-1.5, 1.5, 0.2, 1.0),
            (30, 8),
            100_000,
            lambda z: density_cx(z, spec),
            rng,
        )
        report = compare(hist, lambda z: density_cx(z, wrong))
        assert report.frac_within_3sigma < 0.80

    def test_zero_trials_rejected(self):
        spec = EnsembleSpec(m=1, N=5, field=CX, seed=0)
        hist = Histogram(
            spec=spec,
            region=Rect(-1, 1, 0.2, 1),
            counts=np.zeros((2, 2), dtype=np.int64),
            trials=0,
            flagged_trials=0,
            real_roots=0,
        )
        with pytest.raises(ValueError):
            compare(hist, lambda z: density_cx(z, spec))

    def test_empty_bins_use_exact_poisson_tail(self):
        # mu ~ 7: a zero count is a ~3.8 sigma event under the exact tail,
        # the normal approximation would call it only -2.6 sigma
        spec = EnsembleSpec(m=1, N=5, field=CX, seed=0)
        region = Rect(-1, 1, 0.2, 1)
        counts = np.zeros((2, 2), dtype=np.int64)
        hist = Histogram(
            spec=spec,
            region=region,
            counts=counts,
            trials=60,
            flagged_trials=0,
            real_roots=0,
        )
        mu = predicted_counts(hist, lambda z: density_cx(z, spec))
        report = compare(hist, lambda z: density_cx(z, spec))
        expect_within = stats.poisson.cdf(0, mu) * 2.0 >= 2.0 * stats.norm.sf(3.0)
        assert np.array_equal(report.within_3sigma, expect_within)


class TestWeakLimit:
    def test_zero_amplitude_pairs_to_zero(self):
        spec = EnsembleSpec(m=1, N=20, field=RE, seed=0)
        phi = BumpFunction(amplitude=0.0)
        assert weak_limit_pairing(spec, phi) == 0.0

    def test_bound_and_decay(self):
        phi = BumpFunction(amplitude=1.0, center=(0.0, 0.0), radii=(1.0, 0.5))
        values = {}
        for N in (20, 40, 80):
            spec = EnsembleSpec(m=1, N=N, field=RE, seed=0)
            p = weak_limit_pairing(spec, phi)
            values[N] = p
            assert abs(p) <= weak_limit_bound(spec, phi)
        assert abs(values[40]) <= 0.7 * abs(values[20])
        assert abs(values[80]) <= 0.7 * abs(values[40])

    def test_m2_rejected(self):
        with pytest.raises(ValueError):
            weak_limit_pairing(
                EnsembleSpec(m=2, N=10, field=RE, seed=0), BumpFunction()
            )


class TestBump:
    def test_vanishes_at_boundary(self):
        phi = BumpFunction(amplitude=2.0, center=(0.1, -0.2), radii=(0.8, 0.4))
        K = phi.support
        for x, y in [(K.x_lo, -0.2), (K.x_hi, -0.2), (0.1, K.y_lo), (0.1, K.y_hi)]:
            assert phi.value(x, y) == 0.0
            assert phi.laplacian(x, y) == 0.0

    def test_laplacian_matches_fd_oracle(self):
        phi = BumpFunction(amplitude=1.3, center=(0.0, 0.0), radii=(1.0, 0.5))
        for x, y in [(0.2, 0.1), (-0.5, -0.2), (0.7, 0.3)]:
            dxx = fd_second_derivative(lambda u: phi.value(u, y), x, h=1e-4)
            dyy = fd_second_derivative(lambda u: phi.value(x, u), y, h=1e-4)
            assert phi.laplacian(x, y) == pytest.approx(dxx + dyy, rel=1e-5)

    def test_laplacian_l1_positive(self):
        assert BumpFunction().laplacian_l1() > 0.0
