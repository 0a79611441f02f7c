"""Base symmetric laws, auxiliary laws and the direct noncentral laws they induce.

Continuous laws expose ``pdf``, ``cdf``, ``quantile`` and ``sample``; discrete
laws on the nonnegative integers additionally expose ``weights(T)`` and a
certified ``tail_bound(T)`` so they can serve as mixing laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import special as sc

from .errors import DomainError, TruncationError

__all__ = [
    "Beta",
    "ChiSquare",
    "DiscreteLaw",
    "Exponential",
    "Gamma",
    "Geometric",
    "HypSec",
    "Law",
    "LogSeries",
    "Logistic",
    "NegativeBinomial",
    "NoncentralLaw",
    "NoncentralParam",
    "Normal",
    "PointMass",
    "Poisson",
    "SquaredExponential",
    "TabulatedLaw",
    "chisq_pdf",
    "hypsec_pdf",
    "logistic_cdf",
    "make_rng",
    "noncentral_direct_cdf",
    "noncentral_direct_pdf",
]

FAMILIES = ("normal", "logistic", "hypsec")
TRANSFORMS = ("abs", "square")

# discrete samplers stop walking the pmf once this much mass is covered
_TABLE_MASS = 1.0 - 1e-15
_QUANTILE_ATOL = 1e-12


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for the pair ``(seed, stream)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


# --------------------------------------------------------------------------
# scalar/vector density helpers


def logistic_cdf(x):
    """``1 / (1 + exp(-x))``."""
    return sc.expit(x)


def logistic_pdf(x):
    s = sc.expit(x)
    return s * (1.0 - s)


def hypsec_pdf(x):
    """``2 / (pi (e^x + e^{-x}))``."""
    x = np.abs(np.asarray(x, dtype=float))
    # 1/cosh(x) = 2 e^{-x} / (1 + e^{-2x}), stable for large x
    e = np.exp(-x)
    return 2.0 * e / (math.pi * (1.0 + e * e))


def hypsec_cdf(x):
    x = np.asarray(x, dtype=float)
    return (2.0 / math.pi) * np.arctan(np.exp(x))


def normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def _check_positive(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("argument must be > 0")
    return x


def chisq_logpdf(k, x):
    """Log density of the chi-squared law with ``k`` degrees of freedom."""
    x = _check_positive(x)
    k = np.asarray(k, dtype=float)
    h = 0.5 * k
    return (h - 1.0) * np.log(x) - 0.5 * x - h * math.log(2.0) - sc.gammaln(h)


def chisq_pdf(k, x):
    """Chi-squared density, i.e. the Gamma(k/2, 1/2) density."""
    return np.exp(chisq_logpdf(k, x))


def chisq_cdf(k, x):
    x = np.asarray(x, dtype=float)
    return sc.gammainc(0.5 * np.asarray(k, dtype=float), 0.5 * np.maximum(x, 0.0))


# --------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class NoncentralParam:
    """Base family plus shift ``delta``; ``delta = 0`` is rejected.

    ``theta`` is the family-specific rescaling of ``delta``: ``F(delta)`` for
    the logistic family, ``2 / (e^{-delta} + e^{delta})^2`` for the hyperbolic
    secant and ``|delta|`` (the classical inverse) for the normal family.
    """

    family: str
    delta: float

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")
        if not math.isfinite(self.delta) or self.delta == 0:
            raise DomainError("delta must be finite and nonzero")
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def theta(self) -> float:
        d = self.delta
        if self.family == "logistic":
            return float(sc.expit(d))
        if self.family == "hypsec":
            return 0.5 / math.cosh(d) ** 2
        return abs(d)

    @property
    def eta(self) -> float:
        return 0.5 * self.delta**2


# --------------------------------------------------------------------------
# continuous laws


class Law:
    """Continuous law on the real line or the positive half-line."""

    support_lo = -math.inf

    def pdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def _quantile_scalar(self, u: float) -> float:
        if not 0.0 < u < 1.0:
            if u == 0.0:
                return self.support_lo
            if u == 1.0:
                return math.inf
            raise DomainError("quantile requires u in [0, 1]")
        lo = self.support_lo
        hi = 1.0
        while self.cdf(hi) < u:
            lo = hi
            hi *= 2.0
        if lo == -math.inf:
            lo = -1.0
            while self.cdf(lo) >= u:
                hi = lo
                lo *= 2.0
        while hi - lo > _QUANTILE_ATOL:
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if self.cdf(mid) < u:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def quantile(self, u):
        """Generalized inverse of ``cdf`` by bracketed bisection."""
        if np.ndim(u) == 0:
            return self._quantile_scalar(float(u))
        return np.array([self._quantile_scalar(float(v)) for v in np.ravel(u)]).reshape(np.shape(u))


class Normal(Law):
    def pdf(self, x):
        return normal_pdf(x)

    def cdf(self, x):
        return sc.ndtr(x)

    def sample(self, rng, size=None):
        return rng.standard_normal(size)


class Logistic(Law):
    def pdf(self, x):
        return logistic_pdf(x)

    def cdf(self, x):
        return logistic_cdf(x)

    def sample(self, rng, size=None):
        return sc.logit(rng.random(size))


class HypSec(Law):
    def pdf(self, x):
        return hypsec_pdf(x)

    def cdf(self, x):
        return hypsec_cdf(x)

    def sample(self, rng, size=None):
        return np.log(np.tan(0.5 * math.pi * rng.random(size)))


@dataclass(frozen=True)
class Gamma(Law):
    """Gamma law with shape ``a`` and rate ``rate``."""

    a: float
    rate: float = 1.0
    support_lo = 0.0

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            lx = np.log(np.maximum(x, 0.0))
        logp = self.a * math.log(self.rate) + (self.a - 1.0) * lx - self.rate * x - math.lgamma(self.a)
        return np.where(x > 0, np.exp(logp), 0.0)

    def cdf(self, x):
        return sc.gammainc(self.a, self.rate * np.maximum(np.asarray(x, dtype=float), 0.0))

    def sample(self, rng, size=None):
        return rng.standard_gamma(self.a, size) / self.rate


def ChiSquare(k: float) -> Gamma:
    """Chi-squared law with ``k`` degrees of freedom as Gamma(k/2, 1/2)."""
    return Gamma(0.5 * k, 0.5)


class Exponential(Law):
    """Exponential law with mean 1, sampled by inversion."""

    support_lo = 0.0

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, np.exp(-np.maximum(x, 0.0)), 0.0)

    def cdf(self, x):
        return -np.expm1(-np.maximum(np.asarray(x, dtype=float), 0.0))

    def sample(self, rng, size=None):
        return -np.log1p(-rng.random(size))


class SquaredExponential(Law):
    """Law of ``E^2`` for ``E`` exponential: a Weibull law with CDF ``1 - exp(-sqrt(x))``."""

    support_lo = 0.0

    def pdf(self, x):
        x = _check_positive(x)
        r = np.sqrt(x)
        return np.exp(-r) / (2.0 * r)

    def cdf(self, x):
        r = np.sqrt(np.maximum(np.asarray(x, dtype=float), 0.0))
        return -np.expm1(-r)

    def sample(self, rng, size=None):
        return Exponential().sample(rng, size) ** 2


@dataclass(frozen=True)
class Beta(Law):
    a: float
    b: float
    support_lo = 0.0

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > 0) & (x < 1)
        xc = np.clip(x, 1e-300, 1 - 1e-16)
        logp = (self.a - 1) * np.log(xc) + (self.b - 1) * np.log1p(-xc) - sc.betaln(self.a, self.b)
        return np.where(inside, np.exp(logp), 0.0)

    def cdf(self, x):
        return sc.betainc(self.a, self.b, np.clip(np.asarray(x, dtype=float), 0.0, 1.0))

    def sample(self, rng, size=None):
        # ratio of independent gammas
        g1 = rng.standard_gamma(self.a, size)
        g2 = rng.standard_gamma(self.b, size)
        return g1 / (g1 + g2)


_BASE_LAWS = {"normal": Normal(), "logistic": Logistic(), "hypsec": HypSec()}


def noncentral_direct_pdf(param: NoncentralParam, transform: str, x):
    """Density of ``|X + delta|`` (``abs``) or ``(X + delta)^2`` (``square``)."""
    x = _check_positive(x)
    if transform == "square":
        r = np.sqrt(x)
        return noncentral_direct_pdf(param, "abs", r) / (2.0 * r)
    if transform != "abs":
        raise DomainError(f"unknown transform {transform!r}")
    d = param.delta
    if param.family == "normal":
        # sum of two Gaussian bumps, written to avoid cancellation
        return normal_pdf(x - d) + normal_pdf(x + d)
    base = _BASE_LAWS[param.family]
    return base.pdf(x - d) + base.pdf(x + d)


def noncentral_direct_cdf(param: NoncentralParam, transform: str, x):
    """CDF ``F(x - delta) - F(-x - delta)`` of ``|X + delta|``, or of its square."""
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    if transform == "square":
        x = np.sqrt(x)
    elif transform != "abs":
        raise DomainError(f"unknown transform {transform!r}")
    d = param.delta
    if param.family == "logistic":
        # F(x-d) - F(-x-d) = F(x-d) - 1 + F(x+d), kept in a cancellation-free form
        return sc.expit(x - d) - sc.expit(-x - d)
    if param.family == "normal":
        return sc.ndtr(x - d) - sc.ndtr(-x - d)
    return hypsec_cdf(x - d) - hypsec_cdf(-x - d)


@dataclass(frozen=True)
class NoncentralLaw(Law):
    """The law of ``|X + delta|`` or ``(X + delta)^2`` sampled directly from ``X``."""

    param: NoncentralParam
    transform: str = "square"
    support_lo = 0.0

    def __post_init__(self) -> None:
        if self.transform not in TRANSFORMS:
            raise DomainError(f"unknown transform {self.transform!r}")

    def pdf(self, x):
        return noncentral_direct_pdf(self.param, self.transform, x)

    def cdf(self, x):
        return noncentral_direct_cdf(self.param, self.transform, x)

    def sample(self, rng, size=None):
        y = np.abs(_BASE_LAWS[self.param.family].sample(rng, size) + self.param.delta)
        return y * y if self.transform == "square" else y


# --------------------------------------------------------------------------
# discrete laws


class DiscreteLaw:
    """Law on the nonnegative integers with a certified tail bound.

    Subclasses implement ``log_pmf`` (vectorized over integer arrays) and
    ``tail_bound(T)``, an upper bound on ``P(N > T)``.
    """

    support_start = 0

    def log_pmf(self, n: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def tail_bound(self, T: int) -> float:
        raise NotImplementedError

    def pmf(self, n):
        arr = np.asarray(n)
        ok = arr >= self.support_start
        safe = np.where(ok, arr, self.support_start)
        with np.errstate(under="ignore"):
            out = np.where(ok, np.exp(self.log_pmf(safe)), 0.0)
        return out if arr.ndim else float(out)

    def weights(self, T: int) -> np.ndarray:
        return np.asarray(self.pmf(np.arange(T + 1)), dtype=float)

    def cdf(self, n):
        n = np.floor(np.asarray(n, dtype=float))
        top = int(max(np.max(n), 0)) if n.size else 0
        c = np.cumsum(self.weights(top))
        idx = np.clip(n, -1, top).astype(int)
        out = np.where(idx >= 0, c[np.maximum(idx, 0)], 0.0)
        return out if out.ndim else float(out)

    def horizon(self, tol: float, cap: int = 4096) -> int:
        """Smallest power-of-two horizon ``T`` (from 16) with ``tail_bound(T) < tol``."""
        T = 16
        while T <= cap:
            if self.tail_bound(T) < tol:
                return T
            T *= 2
        raise TruncationError(f"tail bound {tol} not reached by T={cap}")

    @cached_property
    def _table(self) -> np.ndarray:
        T = 64
        while True:
            c = np.cumsum(self.weights(T))
            if c[-1] >= _TABLE_MASS or T >= 1 << 20:
                return c
            T *= 2

    def quantile(self, u):
        c = self._table
        idx = np.searchsorted(c, np.asarray(u, dtype=float), side="left")
        return np.minimum(idx, c.size - 1)

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        """Inverse-CDF table walk; clamps at the end of the table."""
        c = self._table
        idx = np.searchsorted(c, rng.random(size), side="right")
        return np.minimum(idx, c.size - 1)


@dataclass(frozen=True, eq=True)
class PointMass(DiscreteLaw):
    at: int = 0

    def log_pmf(self, n):
        return np.where(np.asarray(n) == self.at, 0.0, -np.inf)

    def tail_bound(self, T):
        return 0.0 if T >= self.at else 1.0

    def sample(self, rng, size=None):
        return np.full(size, self.at, dtype=np.int64) if size is not None else self.at


@dataclass(frozen=True, eq=False)
class Poisson(DiscreteLaw):
    mean: float

    def __post_init__(self) -> None:
        if not self.mean >= 0:
            raise DomainError("Poisson mean must be >= 0")

    def log_pmf(self, n):
        n = np.asarray(n, dtype=float)
        if self.mean == 0:
            return np.where(n == 0, 0.0, -np.inf)
        return n * math.log(self.mean) - self.mean - sc.gammaln(n + 1.0)

    def tail_bound(self, T):
        # successive ratios mean/(n+1) decrease, so the tail is dominated geometrically
        r = self.mean / (T + 2)
        if r >= 1:
            return 1.0
        return float(self.pmf(T + 1)) / (1.0 - r)


@dataclass(frozen=True, eq=False)
class Geometric(DiscreteLaw):
    """``P(N = n) = p (1 - p)^{n - start}`` for ``n >= start`` (default start 1)."""

    p: float
    start: int = 1

    def __post_init__(self) -> None:
        if not 0 < self.p <= 1:
            raise DomainError("geometric success probability must lie in (0, 1]")

    @property
    def support_start(self) -> int:
        return self.start

    def log_pmf(self, n):
        n = np.asarray(n, dtype=float)
        if self.p == 1:
            return np.where(n == self.start, 0.0, -np.inf)
        return math.log(self.p) + (n - self.start) * math.log1p(-self.p)

    def tail_bound(self, T):
        if T < self.start:
            return 1.0
        return (1.0 - self.p) ** (T - self.start + 1)


@dataclass(frozen=True, eq=False)
class NegativeBinomial(DiscreteLaw):
    """``P(N = n) = Gamma(n + r) / (Gamma(r) n!) p^r (1 - p)^n``, ``n >= 0``."""

    r: float
    p: float

    def __post_init__(self) -> None:
        if not self.r > 0 or not 0 < self.p <= 1:
            raise DomainError("negative binomial needs r > 0 and p in (0, 1]")

    def log_pmf(self, n):
        n = np.asarray(n, dtype=float)
        if self.p == 1:
            return np.where(n == 0, 0.0, -np.inf)
        return (
            sc.gammaln(n + self.r)
            - sc.gammaln(self.r)
            - sc.gammaln(n + 1.0)
            + self.r * math.log(self.p)
            + n * math.log1p(-self.p)
        )

    def tail_bound(self, T):
        q = 1.0 - self.p
        # ratio (n + r)/(n + 1) * q is monotone in n with limit q
        ratio = q * max(1.0, (T + 1 + self.r) / (T + 2))
        if ratio >= 1:
            return 1.0
        return float(self.pmf(T + 1)) / (1.0 - ratio)


@dataclass(frozen=True, eq=False)
class LogSeries(DiscreteLaw):
    """``P(N = n) = theta^n / (n (-log(1 - theta)))``, ``n >= 1``."""

    theta: float
    support_start = 1

    def __post_init__(self) -> None:
        if not 0 < self.theta < 1:
            raise DomainError("log-series parameter must lie in (0, 1)")

    def log_pmf(self, n):
        n = np.asarray(n, dtype=float)
        return n * math.log(self.theta) - np.log(n) - math.log(-math.log1p(-self.theta))

    def tail_bound(self, T):
        if T < 1:
            return 1.0
        return float(self.pmf(T + 1)) / (1.0 - self.theta)


class TabulatedLaw(DiscreteLaw):
    """Finite table of weights plus an externally certified tail bound function."""

    def __init__(self, probs, tail_fn, tag: str = "tabulated") -> None:
        probs = np.asarray(probs, dtype=float)
        probs.setflags(write=False)
        self.probs = probs
        self._tail_fn = tail_fn
        self.tag = tag

    def log_pmf(self, n):
        n = np.asarray(n)
        inside = n < self.probs.size
        with np.errstate(divide="ignore"):
            return np.where(inside, np.log(self.probs[np.clip(n, 0, self.probs.size - 1)]), -np.inf)

    def tail_bound(self, T):
        if T + 1 < self.probs.size:
            return float(math.fsum(self.probs[T + 1 :])) + self._tail_fn(self.probs.size - 1)
        return self._tail_fn(T)

    def weights(self, T):
        out = np.zeros(T + 1)
        m = min(T + 1, self.probs.size)
        out[:m] = self.probs[:m]
        return out

    @cached_property
    def _table(self) -> np.ndarray:
        return np.cumsum(self.probs)
