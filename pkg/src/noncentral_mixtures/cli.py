"""Command-line frontend.

Every subcommand writes CSV with a header row to stdout (or ``--output``);
floats carry 17 significant digits so output round-trips exactly.  Exit codes:
0 success, 1 a verification check failed, 2 usage error.

The default seed is 42 unless ``NCMIX_SEED`` is set.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import mixtures as M
from . import verify as V
from .distributions import make_rng
from .errors import DomainError, SpecError, TruncationError
from .series import builtin_spec

PROG = "noncentral-mix"
FAMILIES = ("normal", "logistic", "hypsec")
CONSTRUCTIONS = ("direct", "mixture", "sum", "max", "phi", "compound")
SUITE_NAMES = (*V.SUITES, "all")
SEED_ENV = "NCMIX_SEED"


class UsageError(Exception):
    """Invalid combination of flags; reported as exit status 2."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def parse_grid(text: str) -> np.ndarray:
    """``min:max:points`` to an evenly spaced grid on ``(0, inf)``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} is not of the form min:max:points")
    try:
        lo, hi, pts = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid {text!r} has a non-numeric field") from None
    if not lo > 0:
        raise UsageError("grid min must be > 0")
    if not hi > lo:
        raise UsageError("grid max must exceed grid min")
    if pts < 2:
        raise UsageError("grid needs at least 2 points")
    return np.linspace(lo, hi, pts)


def build_representation(args) -> M.MixtureRepresentation:
    if args.delta is None:
        raise UsageError("--delta is required")
    if args.delta == 0 or not math.isfinite(args.delta):
        raise UsageError("--delta must be finite and nonzero")
    if args.spec is not None and args.family != "normal":
        raise UsageError("--spec applies to the normal family only")
    if args.family == "logistic":
        construction = args.construction if getattr(args, "construction", None) in ("sum", "max") else None
        return M.logistic_representation(args.delta, args.transform, construction, tol=args.tol)
    if args.family == "hypsec":
        return M.hypsec_representation(args.delta, args.transform, tol=args.tol)
    try:
        spec = builtin_spec(args.spec or "classical")
    except (SpecError, ValueError) as exc:
        raise UsageError(f"bad --spec: {exc}") from None
    return M.altnormal_representation(spec, args.delta, tol=args.tol, transform=args.transform)


def _writer(stream):
    return csv.writer(stream, lineterminator="\n")


def cmd_density(args, out) -> int:
    grid = parse_grid(args.grid)
    rep = build_representation(args)
    direct = np.asarray(rep.target_pdf(grid), dtype=float)
    mixed = np.asarray(rep.pdf(grid), dtype=float)
    w = _writer(out)
    w.writerow(("x", "direct_pdf", "mixture_pdf", "abs_diff"))
    for row in zip(grid, direct, mixed, np.abs(mixed - direct)):
        w.writerow([_fmt(v) for v in row])
    return 0


def cmd_weights(args, out) -> int:
    rep = build_representation(args)
    weights = rep.weights()
    start = rep.mixing.support_start
    w = _writer(out)
    w.writerow(("n", "weight", "cumulative"))
    total = 0.0
    for n in range(start, len(weights)):
        total += float(weights[n])
        w.writerow((n, _fmt(weights[n]), _fmt(total)))
        if total >= 1.0 - args.tol:
            break
    return 0


def make_sampler(args):
    """Sampler ``(rng, size) -> draws`` for the chosen construction."""
    c = args.construction
    if c in ("sum", "max") and args.family != "logistic":
        raise UsageError(f"construction {c!r} needs --family logistic")
    if c == "phi" and args.family != "hypsec":
        raise UsageError("construction 'phi' needs --family hypsec")
    if c == "compound" and (args.family != "normal" or (args.spec or "classical") != "classical"):
        raise UsageError("construction 'compound' needs --family normal with the classical spec")
    rep = build_representation(args)
    if c == "direct":
        return lambda rng, n: rep.target.sample(rng, n)
    if c == "phi":
        return M.hypsec_phi_sampler(args.delta, args.transform)
    if c == "compound":
        draw = M.classical_compound_sampler(args.delta)
        if args.transform == "abs":
            return lambda rng, n: np.sqrt(draw(rng, n))
        return draw
    return lambda rng, n: rep.sample(rng, n)


def cmd_sample(args, out) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    sampler = make_sampler(args)
    seed = _default_seed() if args.seed is None else args.seed
    draws = sampler(make_rng(seed, 0), args.n)
    w = _writer(out)
    w.writerow(("value",))
    for v in draws:
        w.writerow((_fmt(v),))
    return 0


def cmd_verify(args, out) -> int:
    if args.suite not in SUITE_NAMES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITE_NAMES)}")
    options = {}
    if args.eta is not None:
        if not args.eta > 0:
            raise UsageError("--eta must be positive")
        options["etas"] = (args.eta,)
    if args.paths is not None:
        if args.paths < 1000:
            raise UsageError("--paths must be >= 1000")
        options["paths"] = args.paths
    seed = _default_seed() if args.seed is None else args.seed
    reports = V.run_suite(args.suite, seed, **options)
    V.write_csv(reports, out, timings=args.timings)
    return 0 if all(r.passed for r in reports) else 1


def cmd_power(args, out) -> int:
    if args.d < 1 or args.a2 < 0 or not 0 < args.alpha < 1:
        raise UsageError("need --d >= 1, --a2 >= 0 and --alpha in (0, 1)")
    w = _writer(out)
    w.writerow(("d", "a_norm_sq", "alpha", "power"))
    w.writerow((args.d, _fmt(args.a2), _fmt(args.alpha), _fmt(M.chisq_test_power(args.d, args.a2, args.alpha))))
    return 0


def _add_family_flags(p: argparse.ArgumentParser, transform_default: str = "square") -> None:
    p.add_argument("--family", choices=FAMILIES, default="normal", help="base law of X (default normal)")
    p.add_argument("--spec", help="series spec for the normal family: classical, geometric(a), geometric_v1, logseries")
    p.add_argument("--delta", type=float, help="noncentrality shift, nonzero (required)")
    p.add_argument("--transform", choices=("abs", "square"), default=transform_default, help="|X+delta| or (X+delta)^2")
    p.add_argument("--tol", type=float, default=M.DEFAULT_TOL, help="weight tail tolerance (default 1e-12)")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", help="write CSV here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Mixture representations of noncentral distributions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="direct and mixture densities on a grid")
    _add_family_flags(p)
    p.add_argument("--grid", default="0.01:10:200", help="min:max:points with min > 0 (default 0.01:10:200)")
    _add_output(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("weights", help="mixing weights until the cumulative mass reaches 1 - tol")
    _add_family_flags(p)
    _add_output(p)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("sample", help="draws from a direct or mixture-based construction")
    _add_family_flags(p)
    p.add_argument("--construction", choices=CONSTRUCTIONS, default="mixture", help="sampling route (default mixture)")
    p.add_argument("--n", type=int, default=1000, help="number of draws (default 1000)")
    p.add_argument("--seed", type=int, help=f"RNG seed (default ${SEED_ENV} or 42)")
    _add_output(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="run a verification suite; exit 1 if any check fails")
    p.add_argument("suite", help=f"one of: {', '.join(SUITE_NAMES)}")
    p.add_argument("--seed", type=int, help=f"RNG seed (default ${SEED_ENV} or 42)")
    p.add_argument("--eta", type=float, help="single local-time level for the ray-knight suite")
    p.add_argument("--paths", type=int, help="paths per ray-knight check")
    p.add_argument("--timings", action="store_true", help="fill the seconds column (output is then not reproducible)")
    _add_output(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("power", help="power of the chi-squared test")
    p.add_argument("--d", type=int, default=1, help="degrees of freedom")
    p.add_argument("--a2", type=float, required=True, help="squared norm of the shift")
    p.add_argument("--alpha", type=float, default=0.05, help="test level")
    _add_output(p)
    p.set_defaults(func=cmd_power)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with contextlib.ExitStack() as stack:
            if args.output:
                out = stack.enter_context(open(args.output, "w", newline=""))
            else:
                out = sys.stdout
            return args.func(args, out)
    except (UsageError, DomainError, SpecError, TruncationError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
