"""Command-line surface: density sweeps, scaled-density sweeps, Monte Carlo
runs and weak-limit reports, all emitting self-describing CSV.

Every output file starts with `# key=value` metadata lines recording the
full configuration, so re-running with the same configuration reproduces
the file byte for byte.  Exit codes: 0 success, 1 acceptance failure,
2 usage error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .core import EnsembleSpec, Field
from .kernel import Y_MIN, density_cx, density_real
from .montecarlo import (
    Rect,
    TestFunction,
    default_threads,
    empirical_density,
    export_histogram_csv,
    weak_limit_bound,
    weak_limit_pairing,
)
from .scaling import scaled_density

EXIT_OK = 0
EXIT_ACCEPT_FAIL = 1
EXIT_USAGE = 2


def _fmt(v: float) -> str:
    return format(float(v), ".16e")


def _meta_lines(command: str, pairs: dict) -> list[str]:
    lines = [f"# version={__version__}", f"# command={command}"]
    lines.extend(f"# {k}={v}" for k, v in pairs.items())
    return lines


def _parse_int_list(text: str) -> list[int]:
    try:
        values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _axis_point(m: int, y: float) -> list[complex]:
    z = [0j] * m
    z[0] = complex(0.0, y)
    return z


def _run_density(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    ys = np.linspace(args.start, args.stop, args.points)
    kept = [y for y in ys if abs(y) >= args.y_min]
    skipped = len(ys) - len(kept)
    if skipped:
        print(
            f"density: omitted {skipped} grid points with |y| < {args.y_min}",
            file=sys.stderr,
        )
    for N in args.N:
        spec = EnsembleSpec(m=args.m, N=N, field=Field.REAL, seed=0)
        path = os.path.join(args.out_dir, f"density_m{args.m}_N{N}.csv")
        lines = _meta_lines(
            "density",
            {
                "m": args.m,
                "N": N,
                "from": _fmt(args.start),
                "to": _fmt(args.stop),
                "points": args.points,
                "y_min": _fmt(args.y_min),
            },
        )
        lines.append("y,E_cx,E_real,ratio")
        for y in kept:
            z = _axis_point(args.m, y)
            e_cx = density_cx(z, spec)
            e_real = density_real(z, spec)
            lines.append(
                ",".join([_fmt(y), _fmt(e_cx), _fmt(e_real), _fmt(e_real / e_cx)])
            )
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print(path)
    return EXIT_OK


def _run_scaled(args) -> int:
    ys = np.geomspace(args.start, args.stop, args.points)
    rows = []
    for y in ys:
        yvec = np.zeros(args.m)
        yvec[0] = y
        rows.append((y, scaled_density(yvec, args.m)))
    window = [(y, k) for y, k in rows if 1e-3 <= y <= 1e-2 and k > 0]
    if len(window) >= 2:
        ly = np.log([y for y, _ in window])
        lk = np.log([k for _, k in window])
        exponent = float(np.polyfit(ly, lk, 1)[0])
    else:
        exponent = float("nan")
    lines = _meta_lines(
        "scaled",
        {
            "m": args.m,
            "from": _fmt(args.start),
            "to": _fmt(args.stop),
            "points": args.points,
        },
    )
    lines.append("y,K_inf")
    lines.extend(",".join([_fmt(y), _fmt(k)]) for y, k in rows)
    lines.append(f"# fitted_near_zero_exponent={_fmt(exponent)}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(args.out)
    return EXIT_OK


def _run_mc(args) -> int:
    field = Field.parse(args.field)
    spec = EnsembleSpec(m=1, N=args.N, field=field, seed=args.seed)
    region = Rect(-args.x_max, args.x_max, args.y_lo, args.y_hi)
    if field is Field.REAL and region.y_lo < Y_MIN:
        print(
            f"mc: field=real comparison needs y_lo >= {Y_MIN} (analytic density "
            "is excluded near the real axis)",
            file=sys.stderr,
        )
        return EXIT_USAGE
    hist = empirical_density(
        spec, region, (args.nx, args.ny), args.trials, threads=args.threads
    )
    analytic = (
        (lambda z: density_real(z, spec))
        if field is Field.REAL
        else (lambda z: density_cx(z, spec))
    )
    meta = {
        "m": 1,
        "N": args.N,
        "field": field.value,
        "seed": args.seed,
        "trials": args.trials,
        "region": f"{_fmt(region.x_lo)}:{_fmt(region.x_hi)}:{_fmt(region.y_lo)}:{_fmt(region.y_hi)}",
        "bins": f"{args.nx}x{args.ny}",
    }
    hist_path = f"{args.out_prefix}_hist.csv"
    report = export_histogram_csv(hist, hist_path, analytic, metadata=meta)
    report_path = f"{args.out_prefix}_report.txt"
    flagged_rate = hist.flagged_trials / hist.trials
    body = [
        f"version={__version__}",
        f"N={args.N} field={field.value} seed={args.seed} trials={args.trials}",
        f"bins={args.nx}x{args.ny} region=[{region.x_lo},{region.x_hi}]x[{region.y_lo},{region.y_hi}]",
        f"binned_roots={int(hist.counts.sum())}",
        f"real_axis_roots={hist.real_roots}",
        f"flagged_trials={hist.flagged_trials} ({_fmt(flagged_rate)})",
        f"coverage_3sigma={_fmt(report.frac_within_3sigma)}",
        f"max_abs_zscore={_fmt(report.max_abs_z)}",
        f"chi_square={_fmt(report.chi_square)} nbins={report.nbins}",
    ]
    with open(report_path, "w") as fh:
        fh.write("\n".join(body) + "\n")
    print(hist_path)
    print(report_path)
    if report.frac_within_3sigma < args.min_coverage:
        print(
            f"mc: coverage {report.frac_within_3sigma:.4f} below threshold "
            f"{args.min_coverage}",
            file=sys.stderr,
        )
        return EXIT_ACCEPT_FAIL
    return EXIT_OK


def _run_weaklimit(args) -> int:
    phi = TestFunction(
        amplitude=args.amplitude,
        center=(args.center[0], args.center[1]),
        radii=(args.radii[0], args.radii[1]),
    )
    lines = _meta_lines(
        "weaklimit",
        {
            "N": ",".join(str(n) for n in args.N),
            "amplitude": _fmt(args.amplitude),
            "center": f"{_fmt(args.center[0])},{_fmt(args.center[1])}",
            "radii": f"{_fmt(args.radii[0])},{_fmt(args.radii[1])}",
        },
    )
    lines.append("N,pairing,bound")
    for N in args.N:
        spec = EnsembleSpec(m=1, N=N, field=Field.REAL, seed=0)
        pairing = weak_limit_pairing(spec, phi)
        bound = weak_limit_bound(spec, phi)
        lines.append(",".join([str(N), _fmt(pairing), _fmt(bound)]))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _float_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    return float(parts[0]), float(parts[1])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randpoly",
        description="Expected complex-zero densities of random polynomial systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="E_cx/E_real sweep along z=(iy,0,...,0)")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--N", type=_parse_int_list, required=True, help="comma list of degrees")
    p.add_argument("--from", dest="start", type=float, default=0.05)
    p.add_argument("--to", dest="stop", type=float, default=1.0)
    p.add_argument("--points", type=int, default=96)
    p.add_argument("--y-min", type=float, default=Y_MIN)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_run_density)

    p = sub.add_parser("scaled", help="scaled density K_inf over a log-spaced grid")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--from", dest="start", type=float, default=1e-3)
    p.add_argument("--to", dest="stop", type=float, default=5.0)
    p.add_argument("--points", type=int, default=96)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_run_scaled)

    p = sub.add_parser("mc", help="Monte Carlo histogram vs analytic density (m=1)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--field", choices=("real", "complex"), default="real")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--x-max", type=float, default=1.5)
    p.add_argument("--y-lo", type=float, default=0.2)
    p.add_argument("--y-hi", type=float, default=1.0)
    p.add_argument("--nx", type=int, default=30)
    p.add_argument("--ny", type=int, default=8)
    p.add_argument("--min-coverage", type=float, default=0.95)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out-prefix", default="mc")
    p.set_defaults(func=_run_mc)

    p = sub.add_parser("weaklimit", help="weak-limit pairing table over degrees")
    p.add_argument("--N", type=_parse_int_list, default=[20, 40, 80, 160])
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--center", type=_float_pair, default=(0.0, 0.0))
    p.add_argument("--radii", type=_float_pair, default=(1.0, 0.5))
    p.add_argument("--out", default=None)
    p.set_defaults(func=_run_weaklimit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "density" and not 1 <= args.m <= 4:
        parser.error("--m must be in 1..4")
    if args.command == "scaled" and not 1 <= args.m <= 4:
        parser.error("--m must be in 1..4")
    if args.command == "mc":
        if args.trials < 1:
            parser.error("--trials must be >= 1")
        if args.threads is None:
            args.threads = default_threads()
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"randpoly: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
