#!/usr/bin/env python3
"""Benchmark the compiled root-finder kernel against the numpy fallback.

Times batched Aberth-Ehrlich sweeps on Kostlan-weighted random real
polynomials and checks that both backends find the same roots.

Usage:
    python benchmarks/bench_roots.py [--degrees 10,20,40] [--trials 2000]
"""
import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from randpoly import _aberth_py  # noqa: E402
from randpoly.core import EnsembleSpec, Field  # noqa: E402
from randpoly.ensembles import basis_weights, sample_coefficients  # noqa: E402
from randpoly.roots import MAX_SWEEPS, STEP_TOL, initial_points  # noqa: E402

try:
    from randpoly import _aberth
except ImportError:
    _aberth = None


def _batch(N: int, trials: int, seed: int) -> np.ndarray:
    spec = EnsembleSpec(m=1, N=N, field=Field.REAL, seed=seed)
    w = basis_weights(spec)
    rows = np.array(
        [sample_coefficients(spec, 1, t).values for t in range(trials)]
    )
    return np.ascontiguousarray(rows * w[None, :])


def _time(impl, coeffs, z0):
    start = time.perf_counter()
    roots, conv, _ = impl.aberth_sweeps(coeffs, z0, MAX_SWEEPS, STEP_TOL)
    return time.perf_counter() - start, roots, conv


def _max_root_distance(a, b):
    worst = 0.0
    for row_a, row_b in zip(a, b):
        remaining = list(row_b)
        for r in row_a:
            dists = [abs(r - s) for s in remaining]
            k = int(np.argmin(dists))
            worst = max(worst, dists[k])
            remaining.pop(k)
    return worst


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--degrees", default="10,20,40")
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if _aberth is None:
        print("compiled extension not built; run `python setup.py build_ext --inplace`")
        return 1

    degrees = [int(d) for d in args.degrees.split(",")]
    print(f"{'degree':>7} {'trials':>7} {'compiled':>10} {'python':>10} {'speedup':>8} {'max |dz|':>10}")
    for N in degrees:
        coeffs = _batch(N, args.trials, args.seed)
        z0 = initial_points(coeffs)
        t_c, roots_c, conv_c = _time(_aberth, coeffs, z0)
        t_p, roots_p, conv_p = _time(_aberth_py, coeffs, z0)
        assert conv_c.all() and conv_p.all()
        sample = slice(0, min(200, args.trials))
        dist = _max_root_distance(roots_c[sample], roots_p[sample])
        print(
            f"{N:>7} {args.trials:>7} {t_c:>9.3f}s {t_p:>9.3f}s {t_p / t_c:>7.1f}x {dist:>10.2e}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
