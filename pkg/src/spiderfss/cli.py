"""Command line front end: ``spiderfss {moments,certify,curve,simulate}``.

Exit codes: 0 success, 1 certificate refused, 2 input error, 3 scan cap
exceeded, 4 I/O error. The default worker count is read from
``$SPIDERFSS_THREADS`` and can be overridden with ``--threads``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from typing import Sequence

from . import __version__
from .bounds import (
    DEFAULT_SCAN_CAP,
    BoundError,
    BoundInputs,
    CertificationFailed,
    ScanCapExceeded,
    bound_curve,
    certify,
)
from .distributions import (
    DiscreteSpiderDistribution,
    DistributionError,
    example_xt,
    load_distribution,
    population_folded_summary,
    population_frechet_mean,
)
from .montecarlo import DEFAULT_GRID_POINTS, DEFAULT_REPLICATIONS, SimulationConfig, linear_grid, log_grid, modulation_curve
from .report import RunManifest, csv_block, fmt, render, svg_chart, write_atomic
from .spider import InvalidPointError

EXIT_OK, EXIT_REFUSED, EXIT_INPUT, EXIT_CAP, EXIT_IO = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def parse_xt(text: str) -> tuple[int, float]:
    """Parse ``K=<int>,t=<float>``."""
    try:
        fields = dict(part.split("=", 1) for part in text.split(","))
        K, t = int(fields.pop("K")), float(fields.pop("t"))
    except (KeyError, ValueError) as exc:
        raise InputError(f"--xt expects K=<int>,t=<float>, got {text!r}") from exc
    if fields:
        raise InputError(f"unexpected --xt fields: {sorted(fields)}")
    return K, t


def _distribution(args) -> tuple[DiscreteSpiderDistribution, dict]:
    if (args.xt is None) == (args.dist is None):
        raise InputError("give exactly one of a distribution file or --xt K=..,t=..")
    try:
        if args.xt is not None:
            K, t = parse_xt(args.xt)
            return example_xt(K, t), {"xt": {"K": K, "t": t}}
        return load_distribution(args.dist), {"dist": args.dist}
    except (DistributionError, InvalidPointError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from exc
    except OSError as exc:
        raise InputError(f"cannot read {args.dist}: {exc}") from exc


def _grid(args) -> list[int]:
    try:
        if args.grid:
            return sorted({int(v) for v in args.grid.split(",")})
        if args.stride:
            return linear_grid(args.nmin, args.nmax, args.stride)
        return log_grid(args.nmin, args.nmax, args.points)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _emit(args, manifest: RunManifest, body: str, started: float) -> None:
    manifest.duration_s = time.perf_counter() - started
    text = render(manifest, body)
    if getattr(args, "out", None):
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _warn_degenerate(dist: DiscreteSpiderDistribution) -> None:
    if not dist.nondegenerate:
        print("warning: distribution is degenerate (mass on fewer than three legs)", file=sys.stderr)


def cmd_moments(args) -> int:
    started = time.perf_counter()
    dist, source = _distribution(args)
    _warn_degenerate(dist)
    s = population_folded_summary(dist)
    mu = population_frechet_mean(dist)
    rows = [(k + 1, s.leg_mass[k], s.m[k], s.sigma2[k], s.abs_central_third[k]) for k in range(dist.K)]
    body = csv_block(["k", "leg_mass", "m", "sigma2", "abs_central_third"], rows)
    body += "\n" + csv_block(["quantity", "value"], [
        ("third_at_origin", fmt(s.third_at_origin)),
        ("mean_leg", "origin" if mu.is_origin else str(mu.leg)),
        ("mean_x", fmt(mu.x)),
        ("nondegenerate", str(dist.nondegenerate).lower()),
    ])
    _emit(args, RunManifest("moments", source), body, started)
    return EXIT_OK


def _inputs(dist) -> BoundInputs:
    try:
        return BoundInputs.from_distribution(dist)
    except BoundError as exc:
        raise InputError(str(exc)) from exc


def cmd_certify(args) -> int:
    started = time.perf_counter()
    dist, source = _distribution(args)
    inp = _inputs(dist)
    params = {**source, "base": args.base, "scale": args.scale, "cap": args.cap}
    try:
        cert = certify(args.base, args.scale, inp, cap=args.cap, workers=args.threads)
    except CertificationFailed as fail:
        v = fail.values
        body = csv_block(["quantity", "value"], [
            ("status", "refused"),
            ("failing_n", v.n),
            ("condition", fail.condition),
            ("p_n", fmt(v.p_n)),
            ("p_nk", fmt(v.p_nk)),
            ("bound", fmt(v.bound)),
        ])
        _emit(args, RunManifest("certify", params), body, started)
        print(f"no certificate: {fail}", file=sys.stderr)
        return EXIT_REFUSED
    body = csv_block(["quantity", "value"], [
        ("status", "certified"),
        ("level", fmt(cert.level)),
        ("scale", cert.scale),
        ("base", cert.base),
        ("mean_leg", inp.mean_leg),
        ("argmin_n", cert.argmin_n),
        ("max_bound", fmt(cert.max_bound)),
        ("min_bound", fmt(cert.min_bound)),
    ])
    _emit(args, RunManifest("certify", params), body, started)
    return EXIT_OK


def cmd_curve(args) -> int:
    started = time.perf_counter()
    dist, source = _distribution(args)
    inp = _inputs(dist)
    grid = _grid(args)
    rows = bound_curve(grid, inp)
    params = {**source, "grid": grid if args.grid else None, "nmin": args.nmin, "nmax": args.nmax,
              "points": args.points, "stride": args.stride}
    extra = {"mode": "preview (stride grid, not a certificate)"} if args.stride else {}
    _emit(args, RunManifest("curve", params, extra=extra),
          csv_block(["n", "p_n", "p_nk", "bound"], rows), started)
    if args.svg:
        hline = None if args.rho is None else 1.0 - args.rho
        write_atomic(args.svg, svg_chart(bound=[(r.n, r.bound) for r in rows], hline=hline,
                                         title="modulation bound"))
    return EXIT_OK


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    dist, source = _distribution(args)
    _warn_degenerate(dist)
    grid = _grid(args)
    try:
        cfg = SimulationConfig(dist, tuple(grid), args.reps, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # already reported on stderr
        estimates = modulation_curve(cfg, workers=args.threads)
    K = dist.K
    header = ["n", "m_hat", "std_err", "mean_sq_dist", "freq_origin"] + [f"freq_A{k}" for k in range(1, K + 1)]
    rows = [[e.n, e.m_hat, e.std_err, e.mean_sq_dist, e.freq_origin, *e.event_freq[:K]] for e in estimates]
    params = {**source, "grid": grid if args.grid else None, "nmin": args.nmin, "nmax": args.nmax,
              "points": args.points, "stride": args.stride, "reps": args.reps}
    _emit(args, RunManifest("simulate", params, master_seed=args.seed), csv_block(header, rows), started)
    if args.svg:
        try:
            bound = [(r.n, r.bound) for r in bound_curve(grid, BoundInputs.from_distribution(dist))]
        except BoundError:
            bound = []
        write_atomic(args.svg, svg_chart(bound=bound, estimates=[(e.n, e.m_hat, e.std_err) for e in estimates],
                                         hline=None if args.rho is None else 1.0 - args.rho,
                                         title="estimated modulation vs bound"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spiderfss", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"spiderfss {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        p.add_argument("dist", nargs="?", help="distribution JSON file")
        p.add_argument("--xt", metavar="K=<int>,t=<float>", help="use the built-in X_t family")
        p.add_argument("--out", help="write CSV here instead of stdout")

    def threads(p):
        p.add_argument("--threads", type=int, default=None, help="workers (default: $SPIDERFSS_THREADS or CPU count)")

    def grid(p):
        p.add_argument("--nmin", type=int, default=100)
        p.add_argument("--nmax", type=int, default=10_000)
        p.add_argument("--points", type=int, default=DEFAULT_GRID_POINTS, help="log-spaced grid size")
        p.add_argument("--stride", type=int, default=None, help="linear grid with this step instead")
        p.add_argument("--grid", default=None, help="explicit comma-separated sample sizes")
        p.add_argument("--svg", help="also write a minimal SVG chart")
        p.add_argument("--rho", type=float, default=None, help="draw a reference line at 1 - rho")

    p = sub.add_parser("moments", help="folded moments and population mean")
    source(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("certify", help="scan {N..N^l} for a stickiness certificate")
    source(p)
    threads(p)
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--scale", type=int, default=2)
    p.add_argument("--cap", type=int, default=DEFAULT_SCAN_CAP)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("curve", help="tabulate p_n, p_nk and the bound")
    source(p)
    grid(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("simulate", help="Monte Carlo modulation estimates")
    source(p)
    grid(p)
    threads(p)
    p.add_argument("--reps", type=int, default=DEFAULT_REPLICATIONS)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ScanCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except BoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
