"""Numerical and Monte Carlo checks of the mixture identities.

Each check returns a :class:`CheckReport`.  Random checks draw from
generators keyed by ``(seed, stream)`` so a report is a pure function of its
configuration and seed.
"""

from __future__ import annotations

import csv
import math
import time
import warnings
import zlib
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy import integrate, stats

from . import distributions as D
from . import mixtures as M
from .series import BuiltinSpec, b_sequence, b_sequence_bsum, component_table, conv_power, TruncatedSeries
from .special import binom, double_factorial_odd, harmonic, lah

Sampler = Callable[[np.random.Generator, int], np.ndarray]

CSV_FIELDS = ("name", "metric", "threshold", "pass", "seconds", "seed")

DENSITY_GRID = np.linspace(1e-3, 10.0, 200)


def ks_threshold(n: int, m: int | None = None) -> float:
    """Asymptotic 1% KS critical value with 50% slack."""
    if m is None:
        return 1.63 / math.sqrt(n) * 1.5
    return 1.63 * math.sqrt((n + m) / (n * m)) * 1.5


@dataclass
class CheckReport:
    name: str
    metric: float
    threshold: float
    seconds: float = 0.0
    seed: int | None = None
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.metric <= self.threshold)

    def row(self, timings: bool = False) -> dict:
        return {
            "name": self.name,
            "metric": format(self.metric, ".17g"),
            "threshold": format(self.threshold, ".17g"),
            "pass": "true" if self.passed else "false",
            "seconds": format(self.seconds, ".3f") if timings else "",
            "seed": "" if self.seed is None else str(self.seed),
        }


def write_csv(reports: Iterable[CheckReport], stream, timings: bool = False) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.row(timings))


def _stream_id(name: str) -> int:
    return zlib.crc32(name.encode())


def _timed(name: str, threshold: float, seed=None, **config):
    def wrap(fn):
        t0 = time.perf_counter()
        metric = float(fn())
        return CheckReport(name, metric, threshold, time.perf_counter() - t0, seed, config)

    return wrap


def integrate_density(pdf, a: float = 0.0, b: float = math.inf, tol: float = 1e-10) -> float:
    """Adaptive Gauss-Kronrod integral of ``pdf`` over ``(a, b)``.

    Infinite ``b`` is cut at the first power of two past which the density
    falls below ``tol * 1e-3`` and keeps decaying.
    """
    if math.isinf(b):
        b = 8.0
        while pdf(b) > tol * 1e-3 or pdf(2 * b) > tol * 1e-3:
            b *= 2.0
            if b > 1e6:
                break
    f = lambda t: float(np.asarray(pdf(t)).reshape(-1)[0])  # noqa: E731
    val, _ = integrate.quad(f, a, b, epsabs=tol * 1e-2, epsrel=1e-13, limit=500)
    return val


# --------------------------------------------------------------------------
# generic checks


def check_density_identity(rep: M.MixtureRepresentation, grid=DENSITY_GRID, tol: float = 1e-9, name: str | None = None) -> CheckReport:
    """Max ``|mixture pdf - direct pdf|`` over ``grid``."""
    grid = np.asarray(grid, dtype=float)
    name = name or f"density:{rep.name}:delta={_param_delta(rep)}"
    return _timed(name, tol, horizon=rep.horizon)(lambda: np.max(np.abs(rep.pdf(grid) - rep.target_pdf(grid))))


def check_cdf_identity(rep: M.MixtureRepresentation, grid=DENSITY_GRID, tol: float = 1e-10, name: str | None = None) -> CheckReport:
    grid = np.asarray(grid, dtype=float)
    name = name or f"cdf:{rep.name}:delta={_param_delta(rep)}"
    return _timed(name, tol, horizon=rep.horizon)(lambda: np.max(np.abs(rep.cdf(grid) - rep.target_cdf(grid))))


def _param_delta(rep) -> str:
    d = getattr(rep.param, "delta", rep.param)
    return format(d, "g") if isinstance(d, float) else str(d)


def check_two_sample(sampler_a: Sampler, sampler_b: Sampler, n: int, seed: int, name: str = "two-sample") -> CheckReport:
    """Two-sample KS statistic between ``n`` draws of each sampler.

    The samplers get independent streams derived from ``seed``.
    """
    if n < 1000:
        raise ValueError("two-sample checks need n >= 1000")
    base = _stream_id(name)

    def run():
        a = sampler_a(D.make_rng(seed, base), n)
        b = sampler_b(D.make_rng(seed, base + 1), n)
        return stats.ks_2samp(a, b).statistic

    return _timed(name, ks_threshold(n, n), seed, n=n)(run)


def check_sampler_cdf(sampler: Sampler, cdf, n: int, seed: int, name: str) -> CheckReport:
    """One-sample KS statistic of ``n`` draws against ``cdf``."""

    def run():
        x = np.sort(sampler(D.make_rng(seed, _stream_id(name)), n))
        return stats.kstest(x, lambda t: np.asarray(cdf(t)).reshape(-1)).statistic

    return _timed(name, ks_threshold(n), seed, n=n)(run)


def _rep_sampler(rep: M.MixtureRepresentation) -> Sampler:
    return lambda rng, n: rep.sample(rng, n)


def _target_sampler(rep: M.MixtureRepresentation) -> Sampler:
    return lambda rng, n: rep.target.sample(rng, n)


# --------------------------------------------------------------------------
# Poisson mixture, Renyi-Sukhatme, Ray-Knight


def check_poisson_mixture(spec, eta: float, k_max: int = 12, n_max: int | None = None, tol: float = 1e-9) -> CheckReport:
    """Max residual of ``sum_n m(n) c_n(k) = Poisson(eta)(k)`` over ``k <= k_max``."""
    name = f"poisson-mix:{spec!r}:eta={eta:g}"

    def run():
        theta = spec.u_inv(math.sqrt(2.0 * eta))
        if n_max is not None and M.altnormal_tail_bound(spec, theta, n_max) > tol / 10:
            warnings.warn(f"n_max={n_max} leaves a weight tail above tol/10", RuntimeWarning, stacklevel=3)
        return M.poisson_mixture_from_altnormal(spec, eta, k_max, n_max, tol=tol, strict=False).max_residual

    return _timed(name, tol, eta=eta, k_max=k_max)(run)


def check_renyi_sukhatme(n: int, draws: int, seed: int) -> CheckReport:
    """KS between ``max(E_1..E_n)`` and ``sum_{j<=n} E_j / j``."""
    if n < 1:
        raise ValueError("n must be >= 1")

    def maxes(rng, size):
        return (-np.log1p(-rng.random((size, n)))).max(axis=1)

    def sums(rng, size):
        return (-np.log1p(-rng.random((size, n))) / np.arange(1, n + 1)).sum(axis=1)

    return check_two_sample(maxes, sums, draws, seed, name=f"renyi-sukhatme:n={n}")


def check_renyi_sukhatme_cdf(n: int, draws: int, seed: int) -> CheckReport:
    """KS of the weighted exponential sum against the CDF ``(1 - e^{-x})^n``."""

    def sums(rng, size):
        return (-np.log1p(-rng.random((size, n))) / np.arange(1, n + 1)).sum(axis=1)

    return check_sampler_cdf(sums, lambda x: (-np.expm1(-x)) ** n, draws, seed, f"renyi-sukhatme-cdf:n={n}")


@dataclass(frozen=True)
class RayKnightConfig:
    """Two-state chain on ``{0, 1}`` started at 0; ``eta`` is the local-time level at 0."""

    eta: float = 1.0
    jump_rate: float = 1.0
    n_paths: int = 100_000
    seed: int = 42

    def __post_init__(self) -> None:
        if not self.eta > 0 or not self.jump_rate > 0 or self.n_paths < 1:
            raise ValueError("need eta > 0, jump_rate > 0, n_paths >= 1")


def ray_knight_local_time(cfg: RayKnightConfig, rng: np.random.Generator) -> np.ndarray:
    """Time spent in state 1 before the time at 0 reaches ``eta``.

    Gluing the sojourns at 0 gives a rate-``jump_rate`` Poisson process, so the
    number of visits to 1 is Poisson with mean ``jump_rate * eta`` and each
    visit lasts an independent exponential time.
    """
    lam = cfg.jump_rate
    n = D.Poisson(lam * cfg.eta).sample(rng, cfg.n_paths)
    e = -np.log1p(-rng.random(int(n.sum()))) / lam
    return M._ragged_reduce(e, n, np.add)


def ray_knight_pathwise(cfg: RayKnightConfig, rng: np.random.Generator) -> np.ndarray:
    """Same quantity from alternating exponential holding times, path by path."""
    lam = cfg.jump_rate
    local0 = np.zeros(cfg.n_paths)
    local1 = np.zeros(cfg.n_paths)
    active = np.ones(cfg.n_paths, dtype=bool)
    while active.any():
        idx = np.flatnonzero(active)
        hold0 = -np.log1p(-rng.random(idx.size)) / lam
        local0[idx] += hold0
        done = local0[idx] >= cfg.eta
        active[idx[done]] = False
        jump = idx[~done]
        local1[jump] += -np.log1p(-rng.random(jump.size)) / lam
    return local1


def ray_knight_two_state(cfg: RayKnightConfig) -> CheckReport:
    """KS between ``Y^2/2 + L`` and ``(Y + sqrt(2 eta))^2 / 2`` with ``Y ~ N(0, 1/jump_rate)``."""
    name = f"ray-knight:eta={cfg.eta:g}"
    base = _stream_id(name)
    sd = 1.0 / math.sqrt(cfg.jump_rate)

    def run():
        rng_l = D.make_rng(cfg.seed, base)
        left = 0.5 * (sd * D.make_rng(cfg.seed, base + 1).standard_normal(cfg.n_paths)) ** 2
        left += ray_knight_local_time(cfg, rng_l)
        y = sd * D.make_rng(cfg.seed, base + 2).standard_normal(cfg.n_paths)
        right = 0.5 * (y + math.sqrt(2.0 * cfg.eta)) ** 2
        return stats.ks_2samp(left, right).statistic

    return _timed(name, ks_threshold(cfg.n_paths, cfg.n_paths), cfg.seed, eta=cfg.eta, n=cfg.n_paths)(run)


def ray_knight_consistency(cfg: RayKnightConfig) -> CheckReport:
    """KS between the Poisson-count shortcut and direct path simulation of ``L``."""
    name = f"ray-knight-pathwise:eta={cfg.eta:g}"
    base = _stream_id(name)

    def run():
        a = ray_knight_local_time(cfg, D.make_rng(cfg.seed, base))
        b = ray_knight_pathwise(cfg, D.make_rng(cfg.seed, base + 1))
        return stats.ks_2samp(a, b).statistic

    return _timed(name, ks_threshold(cfg.n_paths, cfg.n_paths), cfg.seed, eta=cfg.eta, n=cfg.n_paths)(run)


# --------------------------------------------------------------------------
# suites

N_MC = 100_000
N_INDEX = 1_000_000


def _index_tv(spec, delta: float, n: int, seed: int) -> CheckReport:
    name = f"index-tv:{spec!r}:delta={delta:g}"

    def run():
        rep = M.altnormal_representation(spec, delta)
        draws = M.altnormal_index_sampler(spec, rep.theta, D.make_rng(seed, _stream_id(name)), n)
        w = rep.weights()
        emp = np.bincount(np.minimum(draws, w.size), minlength=w.size + 1) / n
        return 0.5 * (np.abs(emp[:-1] - w).sum() + emp[-1] + rep.tail_bound)

    return _timed(name, 0.005, seed, n=n)(run)


def _pgf_check(spec, theta: float, ts=(0.2, 0.5, 0.9)) -> CheckReport:
    name = f"index-pgf:{spec!r}:theta={theta:g}"

    def run():
        delta = spec.u(theta)
        rep = M.altnormal_representation(spec, delta)
        w = rep.weights()
        n = np.arange(w.size)
        return max(abs(M.altnormal_index_pgf(spec, theta, t) - math.fsum(w * t**n)) for t in ts)

    return _timed(name, 1e-10)(run)


def suite_classical(seed: int) -> list[CheckReport]:
    out = [check_density_identity(M.classical_chisq(d), tol=1e-9) for d in (0.3, 1.0, 2.5)]
    rep = M.classical_chisq(1.0)
    out.append(check_two_sample(_target_sampler(rep), M.classical_compound_sampler(1.0), N_MC, seed, "classical:compound-vs-direct"))
    out.append(check_two_sample(_target_sampler(rep), _rep_sampler(rep), N_MC, seed, "classical:mixture-vs-direct"))
    out.append(check_density_identity(M.noncentral_chisq_k(3, 2.0), tol=1e-9, name="density:chisq3:nc=2"))

    def power_z():
        n = 1_000_000
        q = D.ChiSquare(1).quantile(0.95)
        y = D.make_rng(seed, _stream_id("power")).standard_normal(n) + 2.0
        hits = float(np.mean(y * y > q))
        exact = M.chisq_test_power(1, 4.0, 0.05)
        return abs(hits - exact) / math.sqrt(exact * (1 - exact) / n)

    out.append(_timed("power:d=1:a2=4:zscore", 3.0, seed)(power_z))
    return out


def suite_logistic(seed: int) -> list[CheckReport]:
    out = []
    for d in (0.3, 1.0, 2.5, -0.3, -1.0, -2.5):
        out.append(check_cdf_identity(M.logistic_representation(d, "abs"), tol=1e-10))
        out.append(check_density_identity(M.logistic_representation(d, "abs"), tol=1e-9))
        out.append(check_density_identity(M.logistic_representation(d, "square"), tol=1e-9))
    rep = M.logistic_representation(1.0, "abs", "sum")
    out.append(check_two_sample(_rep_sampler(rep), _target_sampler(rep), N_MC, seed, "logistic:sum-vs-direct"))
    rep = M.logistic_representation(1.0, "square", "max")
    out.append(check_two_sample(_rep_sampler(rep), _target_sampler(rep), N_MC, seed, "logistic:max-vs-direct"))
    a = M.logistic_representation(0.7, "abs", "sum")
    b = M.logistic_representation(0.7, "abs", "max")
    out.append(check_two_sample(_rep_sampler(a), _rep_sampler(b), N_MC, seed, "logistic:sum-vs-max"))
    return out


def suite_hypsec(seed: int) -> list[CheckReport]:
    out = []
    for d in (0.3, 1.0, 2.5):
        out.append(check_density_identity(M.hypsec_representation(d, "abs"), tol=1e-9))
        out.append(check_density_identity(M.hypsec_representation(d, "square"), tol=1e-9))
    for k in (0, 1, 2, 5, 10):
        out.append(
            _timed(f"hypsec:integral-g{k}", 1e-8)(lambda k=k: abs(integrate_density(lambda x: M.hypsec_component_pdf(k, x)) - 1.0))
        )
    rep = M.hypsec_representation(1.5, "square")
    out.append(check_two_sample(M.hypsec_phi_sampler(1.5), _target_sampler(rep), N_MC, seed, "hypsec:phi-vs-direct"))

    def g2_sampler(rng, n):
        return M.HypSecComponents().sample(np.full(n, 2), rng)

    g2_cdf = quadrature_cdf(lambda x: M.hypsec_component_pdf(2, x))
    out.append(check_sampler_cdf(g2_sampler, g2_cdf, N_MC, seed, "hypsec:beta-transform-g2"))
    return out


def quadrature_cdf(pdf, upper: float = 40.0, points: int = 2000):
    """CDF of a density on ``(0, upper)`` by piecewise quadrature, interpolated linearly."""
    grid = np.concatenate([[0.0], np.geomspace(1e-6, 1.0, points // 4), np.linspace(1.0, upper, points)[1:]])
    f = lambda t: float(np.asarray(pdf(max(t, 1e-300))).reshape(-1)[0])  # noqa: E731
    pieces = [integrate.quad(f, a, b, epsabs=1e-13)[0] for a, b in zip(grid[:-1], grid[1:])]
    table = np.concatenate([[0.0], np.cumsum(pieces)])

    def cdf(x):
        return np.interp(x, grid, table, left=0.0, right=1.0)

    return cdf


ALT_SPECS = {
    "altnormal-a": [BuiltinSpec("classical")],
    "altnormal-b": [BuiltinSpec("geometric", a) for a in (-0.5, 0.0, 0.5, 1.0, 2.0)],
    "altnormal-c": [BuiltinSpec("geometric_v1")],
    "altnormal-d": [BuiltinSpec("logseries")],
}


def _alt_common(spec, seed: int, index_tv: bool) -> list[CheckReport]:
    out = []
    for d in (0.5, 1.0, 2.0):
        out.append(check_density_identity(M.altnormal_representation(spec, d), tol=1e-8, name=f"density:{spec!r}:delta={d:g}"))
    rep = M.altnormal_representation(spec, 1.0)
    out.append(check_sampler_cdf(_rep_sampler(rep), lambda x: rep.cdf(x), N_MC, seed, f"sampler:{spec!r}"))
    out.append(_pgf_check(spec, 0.4))
    if index_tv:
        out.append(_index_tv(spec, 1.0, N_INDEX, seed))
    return out


def suite_altnormal_a(seed: int) -> list[CheckReport]:
    spec = BuiltinSpec("classical")
    out = _alt_common(spec, seed, index_tv=False)
    for d in (0.3, 1.0, 2.5):

        def reduce(d=d):
            alt = M.altnormal_representation(spec, d).weights()
            cls = M.classical_chisq(d)
            w = cls.mixing.weights(alt.size // 2)
            return max(np.max(np.abs(alt[0::2][: w.size] - w[: alt[0::2].size])), np.max(np.abs(alt[1::2])))

        out.append(_timed(f"altnormal-a:reduces-to-classical:delta={d:g}", 1e-14)(reduce))
    return out


def suite_altnormal_b(seed: int) -> list[CheckReport]:
    out = []
    for spec in ALT_SPECS["altnormal-b"]:
        out.extend(_alt_common(spec, seed, index_tv=spec.alpha == 0.0))
    for alpha in (-0.5, 0.0, 1.0, 2.0):
        out.append(_timed(f"example-b:coeff-identity:alpha={alpha:g}", 1e-9)(lambda a=alpha: example_b_residual(a)))
    return out


def suite_altnormal_c(seed: int) -> list[CheckReport]:
    out = _alt_common(BuiltinSpec("geometric_v1"), seed, index_tv=False)
    out.append(_timed("example-c:b-forms", 1e-10)(example_c_residual))
    return out


def suite_altnormal_d(seed: int) -> list[CheckReport]:
    out = _alt_common(BuiltinSpec("logseries"), seed, index_tv=True)
    out.append(_timed("example-d:u2-coeffs", 1e-12)(example_d_residual))
    return out


def example_b_residual(alpha: float, n_max: int = 20) -> float:
    """Max relative gap between ``sum_l p_l^{*2k} q_{n-l}`` and ``C(n + alpha, n - 2k)``."""
    spec = BuiltinSpec("geometric", alpha)
    table = component_table(spec, n_max)
    worst = 0.0
    for n in range(n_max + 1):
        for k in range(n // 2 + 1):
            got = table[n, k] * math.factorial(k) * 2.0**k
            want = binom(n + alpha, n - 2 * k)
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    return worst


def example_c_residual(n_max: int = 20) -> float:
    """Max gap among the three forms of ``b_n`` for the ``geometric_v1`` spec."""
    b, _ = b_sequence(BuiltinSpec("geometric_v1"), n_max)
    bsum = b_sequence_bsum(n_max)
    worst = 0.0
    for n in range(2, n_max + 1):
        lah_form = math.fsum(lah(n, 2 * k) * double_factorial_odd(k) / math.factorial(n) for k in range(1, n // 2 + 1))
        worst = max(worst, abs(b[n] - bsum[n]), abs(b[n] - lah_form))
    return max(worst, abs(b[0] - 1.0), abs(b[1]))


def example_d_residual(n_max: int = 30) -> float:
    """Max gap between coefficients of ``u^2`` (log-series ``u``) and ``2 H_{n-1} / n``."""
    p = TruncatedSeries(BuiltinSpec("logseries").p_coeffs(n_max))
    u2 = conv_power(p, 2, n_max).coeffs
    return max(abs(u2[n] - 2.0 * harmonic(n - 1) / n) for n in range(2, n_max + 1))


def suite_poisson_mix(seed: int) -> list[CheckReport]:
    specs = [BuiltinSpec("classical"), *ALT_SPECS["altnormal-b"], BuiltinSpec("geometric_v1"), BuiltinSpec("logseries")]
    return [check_poisson_mixture(s, eta, 12, tol=1e-9) for s in specs for eta in (0.32, 0.5, 1.0)]


def suite_ray_knight(seed: int, etas=(0.5, 1.0), paths: int = N_MC) -> list[CheckReport]:
    out = []
    for eta in etas:
        cfg = RayKnightConfig(eta=eta, n_paths=paths, seed=seed)
        out.append(ray_knight_two_state(cfg))
        out.append(ray_knight_consistency(cfg))
    return out


def suite_renyi_sukhatme(seed: int) -> list[CheckReport]:
    return [
        check_renyi_sukhatme(1, N_MC, seed),
        check_renyi_sukhatme(5, N_MC, seed),
        check_renyi_sukhatme_cdf(5, N_MC, seed),
    ]


SUITES: dict[str, Callable[[int], list[CheckReport]]] = {
    "logistic": suite_logistic,
    "hypsec": suite_hypsec,
    "classical": suite_classical,
    "altnormal-a": suite_altnormal_a,
    "altnormal-b": suite_altnormal_b,
    "altnormal-c": suite_altnormal_c,
    "altnormal-d": suite_altnormal_d,
    "poisson-mix": suite_poisson_mix,
    "ray-knight": suite_ray_knight,
    "renyi-sukhatme": suite_renyi_sukhatme,
}


def run_suite(name: str, seed: int = 42, **options) -> list[CheckReport]:
    """Run one named suite, or ``all`` of them in a fixed order.

    ``options`` (``etas``, ``paths``) are forwarded to the Ray-Knight suite only.
    """
    if name == "all":
        reports: list[CheckReport] = []
        for key in SUITES:
            reports.extend(run_suite(key, seed, **options))
        return reports
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    if name == "ray-knight":
        return suite_ray_knight(seed, **options)
    return SUITES[name](seed)
