"""Mixture representations of noncentral laws.

Every representation pairs a mixing law on the nonnegative integers with a
family of component densities on ``(0, inf)`` and carries the direct law it
claims to reproduce.  Mixture densities and CDFs are truncated at a horizon
``T`` whose mixing-tail bound is below a tolerance (default ``1e-12``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sc

from . import distributions as D
from .errors import CoverageError, DomainError, SpecError, TruncationError
from .series import BuiltinSpec, SeriesSpec, component_table

__all__ = [
    "AltNormalComponents",
    "ComponentFamily",
    "HypSecComponents",
    "LogisticComponents",
    "MixtureRepresentation",
    "OddChiSquareComponents",
    "PoissonMixture",
    "altnormal_index_pgf",
    "altnormal_index_sampler",
    "altnormal_representation",
    "altnormal_tail_bound",
    "chisq_test_power",
    "classical_chisq",
    "classical_compound_sampler",
    "hypsec_component_pdf",
    "hypsec_mixing",
    "hypsec_phi_sampler",
    "hypsec_representation",
    "logistic_index_law",
    "logistic_representation",
    "noncentral_chisq_k",
    "poisson_mixture_from_altnormal",
]

DEFAULT_TOL = 1e-12
MAX_HORIZON = 4096


def _ragged_reduce(values: np.ndarray, counts: np.ndarray, ufunc, empty: float = 0.0) -> np.ndarray:
    """Reduce consecutive runs of ``values`` of lengths ``counts`` with ``ufunc``."""
    counts = np.asarray(counts, dtype=np.int64)
    out = np.full(counts.shape, empty, dtype=float)
    nonzero = counts > 0
    if values.size:
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])[nonzero]
        out[nonzero] = ufunc.reduceat(values, starts)
    return out


def _within_group_index(counts: np.ndarray) -> np.ndarray:
    """1-based position of each element inside its run."""
    total = int(counts.sum())
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    return np.arange(total) - starts + 1


# --------------------------------------------------------------------------
# component families


class ComponentFamily:
    """Indexed densities on ``(0, inf)``; subclasses fill the matrix methods."""

    name = "components"
    index_start = 0

    def pdf_matrix(self, T: int, x) -> np.ndarray:
        """Rows ``n = 0..T`` of component densities at ``x`` (zero rows outside the index set)."""
        raise NotImplementedError

    def cdf_matrix(self, T: int, x) -> np.ndarray:
        raise NotImplementedError

    def sample(self, n: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """One draw from component ``n[i]`` for every ``i``."""
        raise NotImplementedError

    def pdf(self, n: int, x):
        return self.pdf_matrix(n, np.atleast_1d(x))[n].reshape(np.shape(x))

    def cdf(self, n: int, x):
        return self.cdf_matrix(n, np.atleast_1d(x))[n].reshape(np.shape(x))


class OddChiSquareComponents(ComponentFamily):
    """Component ``n`` is chi-squared with ``2n + dof`` degrees of freedom."""

    def __init__(self, dof: int = 1) -> None:
        if dof < 1:
            raise DomainError("dof must be >= 1")
        self.dof = dof
        self.name = f"chisq(2n+{dof})"

    def pdf_matrix(self, T, x):
        x = D._check_positive(x)
        k = 2.0 * np.arange(T + 1)[:, None] + self.dof
        return D.chisq_pdf(k, x[None, :])

    def cdf_matrix(self, T, x):
        k = 2.0 * np.arange(T + 1)[:, None] + self.dof
        return D.chisq_cdf(k, np.asarray(x, dtype=float)[None, :])

    def sample(self, n, rng):
        return 2.0 * rng.standard_gamma(0.5 * (2 * np.asarray(n) + self.dof))


class LogisticComponents(ComponentFamily):
    """Component ``n >= 1`` has CDF ``(1 - e^{-x})^n``.

    ``construction`` selects the sampler: ``sum`` draws ``sum_{j<=n} E_j / j``,
    ``max`` draws ``max(E_1, ..., E_n)``.  Both target the same law.
    """

    index_start = 1

    def __init__(self, construction: str = "sum") -> None:
        if construction not in ("sum", "max"):
            raise DomainError(f"unknown construction {construction!r}")
        self.construction = construction
        self.name = f"logistic-{construction}"

    def pdf_matrix(self, T, x):
        x = D._check_positive(x)
        n = np.arange(T + 1)[:, None].astype(float)
        log1m = np.log(-np.expm1(-x))[None, :]
        with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
            logp = np.log(n) + (n - 1.0) * log1m - x[None, :]
            out = np.exp(logp)
        out[0] = 0.0
        return out

    def cdf_matrix(self, T, x):
        x = np.asarray(x, dtype=float)
        n = np.arange(T + 1)[:, None]
        with np.errstate(under="ignore"):
            out = np.power(-np.expm1(-np.maximum(x, 0.0))[None, :], n)
        out[0] = 0.0
        return out

    def sample(self, n, rng):
        n = np.asarray(n, dtype=np.int64)
        e = -np.log1p(-rng.random(int(n.sum())))
        if self.construction == "max":
            return _ragged_reduce(e, n, np.maximum)
        return _ragged_reduce(e / _within_group_index(n), n, np.add)


def hypsec_component_pdf(k, x):
    """Component density ``g_k`` of the hyperbolic secant representation."""
    x = D._check_positive(x)
    k = np.asarray(k, dtype=float)
    log_c2k = sc.gammaln(2 * k + 1) - 2 * sc.gammaln(k + 1)
    log_front = (2 * k + 1.5) * math.log(2.0) - math.log(math.pi) - log_c2k
    # cosh(x)/cosh(2x) = e^{-x} (1 + e^{-2x}) / (1 + e^{-4x})
    # 1 - sech(2x) = (1 - e^{-2x})^2 / (1 + e^{-4x})
    e2 = np.exp(-2.0 * x)
    log_den = np.log1p(e2 * e2)
    log_shape = -x + np.log1p(e2) - log_den
    log_r = 2.0 * np.log(-np.expm1(-2.0 * x)) - log_den
    logp = log_front + log_shape + k * log_r
    return np.exp(logp)


class HypSecComponents(ComponentFamily):
    """Densities ``g_k``; ``g_k`` is the law of ``arcsech(Z) / 2`` with ``Z ~ Beta(1/2, k + 1/2)``."""

    name = "hypsec-g"

    def pdf_matrix(self, T, x):
        x = D._check_positive(x)
        return hypsec_component_pdf(np.arange(T + 1)[:, None], x[None, :])

    def cdf_matrix(self, T, x):
        # Y <= y iff Z >= sech(2y), i.e. I_s(k + 1/2, 1/2) with s = 1 - sech(2y).
        # Downward recurrence I_s(a+1, b) = I_s(a, b) - s^a (1-s)^b / (a B(a, b)).
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        e2 = np.exp(-2.0 * x)
        z = 2.0 * e2 / (1.0 + e2 * e2)
        with np.errstate(divide="ignore"):
            log_s = 2.0 * np.log(-np.expm1(-2.0 * x)) - np.log1p(e2 * e2)
            log_z = np.log(z)
        k = np.arange(T)[:, None].astype(float)
        with np.errstate(under="ignore", invalid="ignore"):
            log_step = (
                (k + 0.5) * log_s[None, :]
                + 0.5 * log_z[None, :]
                + sc.gammaln(k + 1.0)
                - sc.gammaln(k + 1.5)
                - 0.5 * math.log(math.pi)
            )
            steps = np.where(np.isfinite(log_step), np.exp(log_step), 0.0)
        # I_s(1/2, 1/2) = (2/pi) arcsin(sqrt(s)), from whichever of s, z is small
        s = np.exp(log_s)
        first = np.where(
            s < 0.5,
            (2.0 / math.pi) * np.arcsin(np.sqrt(s)),
            1.0 - (2.0 / math.pi) * np.arcsin(np.sqrt(z)),
        )
        out = np.empty((T + 1, x.size))
        out[0] = first
        out[1:] = first[None, :] - np.cumsum(steps, axis=0)
        return np.clip(out, 0.0, 1.0)

    def sample(self, n, rng):
        n = np.asarray(n)
        # Beta(1/2, n + 1/2) as a gamma ratio
        g1 = rng.standard_gamma(0.5, n.shape)
        g2 = rng.standard_gamma(np.asarray(n, dtype=float) + 0.5)
        z = g1 / (g1 + g2)
        return psi(z)


def psi(z):
    """``arcsech(z) / 2`` on ``(0, 1]``, the inverse of ``x -> sech(2x)``."""
    z = np.asarray(z, dtype=float)
    return 0.5 * np.arccosh(1.0 / z)


class SquaredComponents(ComponentFamily):
    """Components of ``Y^2`` given components of ``Y`` on the half-line."""

    def __init__(self, base: ComponentFamily) -> None:
        self.base = base
        self.name = f"{base.name}^2"
        self.index_start = base.index_start

    def pdf_matrix(self, T, x):
        r = np.sqrt(D._check_positive(x))
        return self.base.pdf_matrix(T, r) / (2.0 * r)[None, :]

    def cdf_matrix(self, T, x):
        return self.base.cdf_matrix(T, np.sqrt(np.maximum(np.asarray(x, dtype=float), 0.0)))

    def sample(self, n, rng):
        return self.base.sample(n, rng) ** 2


class RootComponents(ComponentFamily):
    """Components of ``sqrt(Y)`` given components of ``Y``."""

    def __init__(self, base: ComponentFamily) -> None:
        self.base = base
        self.name = f"sqrt({base.name})"
        self.index_start = base.index_start

    def pdf_matrix(self, T, x):
        y = D._check_positive(x)
        return self.base.pdf_matrix(T, y * y) * (2.0 * y)[None, :]

    def cdf_matrix(self, T, x):
        y = np.asarray(x, dtype=float)
        return self.base.cdf_matrix(T, y * y)

    def sample(self, n, rng):
        return np.sqrt(self.base.sample(n, rng))


class AltNormalComponents(ComponentFamily):
    """Densities ``h_n`` stored as coefficient rows over the ``g_{2k+1}`` basis.

    ``coef[n, k]`` is ``c_n(k)``; rows outside the support ``B`` are a point
    mass at ``k = 0`` and carry zero mixing weight.
    """

    name = "altnormal-h"

    def __init__(self, coef: np.ndarray, support: np.ndarray) -> None:
        coef = np.asarray(coef, dtype=float)
        coef.setflags(write=False)
        self.coef = coef
        self.support = np.asarray(support, dtype=bool)
        self._basis = OddChiSquareComponents(1)

    @property
    def horizon(self) -> int:
        return self.coef.shape[0] - 1

    def _rows(self, T):
        if T > self.horizon:
            raise TruncationError(f"components stored only up to n={self.horizon}")
        return self.coef[: T + 1]

    def pdf_matrix(self, T, x):
        rows = self._rows(T)
        return rows @ self._basis.pdf_matrix(rows.shape[1] - 1, x)

    def cdf_matrix(self, T, x):
        rows = self._rows(T)
        return rows @ self._basis.cdf_matrix(rows.shape[1] - 1, x)

    def sample(self, n, rng):
        n = np.asarray(n, dtype=np.int64)
        u = rng.random(n.shape)
        k = np.zeros(n.shape, dtype=np.int64)
        cum = np.cumsum(self.coef, axis=1)
        for value in np.unique(n):
            sel = n == value
            row = cum[value]
            k[sel] = np.minimum(np.searchsorted(row, u[sel] * row[-1], side="right"), row.size - 1)
        return self._basis.sample(k, rng)


# --------------------------------------------------------------------------
# representation object


@dataclass(frozen=True, eq=False)
class MixtureRepresentation:
    """A mixing law paired with components, plus the direct law it reproduces.

    ``horizon`` is the certified truncation: ``mixing.tail_bound(horizon) < tol``.
    """

    name: str
    mixing: D.DiscreteLaw
    components: ComponentFamily
    target: D.Law
    param: object
    tol: float = DEFAULT_TOL
    horizon: int = field(default=-1)
    spec: SeriesSpec | None = None
    theta: float | None = None

    def __post_init__(self) -> None:
        if self.horizon < 0:
            object.__setattr__(self, "horizon", self.mixing.horizon(self.tol, MAX_HORIZON))

    @property
    def tail_bound(self) -> float:
        return self.mixing.tail_bound(self.horizon)

    def weights(self) -> np.ndarray:
        return self.mixing.weights(self.horizon)

    def pdf(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.weights() @ self.components.pdf_matrix(self.horizon, x)

    def cdf(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.weights() @ self.components.cdf_matrix(self.horizon, x)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        n = np.asarray(self.mixing.sample(rng, size))
        return self.components.sample(n, rng)

    def target_pdf(self, x):
        return self.target.pdf(x)

    def target_cdf(self, x):
        return self.target.cdf(x)


# --------------------------------------------------------------------------
# classical noncentral chi-squared


def classical_chisq(delta: float, tol: float = DEFAULT_TOL) -> MixtureRepresentation:
    """Poisson(delta^2/2) mixture of chi-squared laws with odd degrees of freedom."""
    param = D.NoncentralParam("normal", delta)
    return MixtureRepresentation(
        name="classical",
        mixing=D.Poisson(param.eta),
        components=OddChiSquareComponents(1),
        target=D.NoncentralLaw(param, "square"),
        param=param,
        tol=tol,
    )


def classical_compound_sampler(delta: float):
    """Sampler for ``X^2 + 2 sum_{j<=N} E_j`` with ``N ~ Poisson(delta^2/2)``."""
    eta = 0.5 * delta * delta
    poisson = D.Poisson(eta)

    def draw(rng, size):
        x = rng.standard_normal(size)
        n = poisson.sample(rng, size)
        e = -np.log1p(-rng.random(int(n.sum())))
        return x * x + 2.0 * _ragged_reduce(e, n, np.add)

    return draw


class NoncentralChiSquare(D.Law):
    """Noncentral chi-squared law with ``k`` degrees of freedom, evaluated in closed form."""

    support_lo = 0.0

    def __init__(self, k: int, nc: float) -> None:
        self.k = int(k)
        self.nc = float(nc)

    def pdf(self, x):
        x = D._check_positive(x)
        lam, nu = self.nc, 0.5 * self.k - 1.0
        # 1/2 e^{-(x+lam)/2} (x/lam)^{nu/2} I_nu(sqrt(lam x)), with scaled Bessel
        z = np.sqrt(lam * x)
        return 0.5 * np.exp(-0.5 * (x + lam) + z + 0.5 * nu * np.log(x / lam)) * sc.ive(nu, z)

    def cdf(self, x):
        return sc.chndtr(np.maximum(np.asarray(x, dtype=float), 0.0), self.k, self.nc)

    def sample(self, rng, size=None):
        shape = () if size is None else (size,) if np.ndim(size) == 0 else tuple(size)
        z = rng.standard_normal(shape + (self.k,))
        z[..., 0] += math.sqrt(self.nc)
        return np.sum(z * z, axis=-1)


def noncentral_chisq_k(k: int, nc: float, tol: float = DEFAULT_TOL) -> MixtureRepresentation:
    """Poisson(nc/2) mixture of chi-squared laws with ``2n + k`` degrees of freedom."""
    if k < 1 or not nc > 0:
        raise DomainError("need k >= 1 and noncentrality > 0")
    return MixtureRepresentation(
        name=f"chisq{k}",
        mixing=D.Poisson(0.5 * nc),
        components=OddChiSquareComponents(k),
        target=NoncentralChiSquare(k, nc),
        param=(k, nc),
        tol=tol,
    )


def chisq_test_power(d: int, a_norm_sq: float, alpha: float) -> float:
    """Power ``1 - G_{d, |a|^2}(q)`` of the level-``alpha`` test rejecting ``|X|^2 > q``."""
    if d < 1 or a_norm_sq < 0 or not 0 < alpha < 1:
        raise DomainError("need d >= 1, |a|^2 >= 0 and alpha in (0, 1)")
    q = D.ChiSquare(d).quantile(1.0 - alpha)
    if a_norm_sq == 0:
        return float(1.0 - D.ChiSquare(d).cdf(q))
    return float(1.0 - noncentral_chisq_k(d, a_norm_sq).cdf(q)[0])


# --------------------------------------------------------------------------
# logistic base


class LogisticIndexLaw(D.DiscreteLaw):
    """``P(N = n) = theta (1 - theta)^n + (1 - theta) theta^n`` for ``n >= 1``."""

    support_start = 1

    def __init__(self, theta: float) -> None:
        if not 0 < theta < 1:
            raise DomainError("theta must lie in (0, 1)")
        self.theta = float(theta)

    def log_pmf(self, n):
        n = np.asarray(n, dtype=float)
        t = self.theta
        a = math.log(t) + n * math.log1p(-t)
        b = math.log1p(-t) + n * math.log(t)
        return np.logaddexp(a, b)

    def tail_bound(self, T):
        if T < 1:
            return 1.0
        t = self.theta
        return (1.0 - t) ** (T + 1) + t ** (T + 1)

    def as_geometric_mixture(self):
        """``[(weight, Geometric)]``: weight ``theta`` on success ``1 - theta`` and vice versa."""
        t = self.theta
        return [(t, D.Geometric(1.0 - t)), (1.0 - t, D.Geometric(t))]


def logistic_index_law(theta: float) -> LogisticIndexLaw:
    return LogisticIndexLaw(theta)


def logistic_representation(
    delta: float, transform: str = "abs", construction: str | None = None, tol: float = DEFAULT_TOL
) -> MixtureRepresentation:
    """Logistic base: ``|X + delta|`` as ``sum E_j / j`` or ``(X + delta)^2`` as a max of ``E_j^2``.

    ``construction`` defaults to ``sum`` for ``abs`` and ``max`` for ``square``.
    """
    param = D.NoncentralParam("logistic", delta)
    construction = construction or ("sum" if transform == "abs" else "max")
    base = LogisticComponents(construction)
    if transform == "abs":
        comps: ComponentFamily = base
    elif transform == "square":
        comps = SquaredComponents(base)
    else:
        raise DomainError(f"unknown transform {transform!r}")
    return MixtureRepresentation(
        name=f"logistic-{transform}",
        mixing=LogisticIndexLaw(param.theta),
        components=comps,
        target=D.NoncentralLaw(param, transform),
        param=param,
        tol=tol,
    )


# --------------------------------------------------------------------------
# hyperbolic secant base


def hypsec_mixing(theta: float) -> D.NegativeBinomial:
    """``w(k) = C(2k, k) 4^{-k} (1 - theta)^k sqrt(theta)``: negative binomial (1/2, theta)."""
    if not 0 < theta <= 1:
        raise DomainError("theta must lie in (0, 1]")
    return D.NegativeBinomial(0.5, theta)


def hypsec_representation(delta: float, transform: str = "abs", tol: float = DEFAULT_TOL) -> MixtureRepresentation:
    param = D.NoncentralParam("hypsec", delta)
    if transform == "abs":
        comps: ComponentFamily = HypSecComponents()
    elif transform == "square":
        comps = SquaredComponents(HypSecComponents())
    else:
        raise DomainError(f"unknown transform {transform!r}")
    return MixtureRepresentation(
        name=f"hypsec-{transform}",
        mixing=hypsec_mixing(param.theta),
        components=comps,
        target=D.NoncentralLaw(param, transform),
        param=param,
        tol=tol,
    )


def hypsec_phi_sampler(delta: float, transform: str = "square"):
    """Sampler for ``phi^{-1}(X0^2 / (X0^2 + X1^2 + 2 sum_{j<=N} E_j))`` (squared for ``square``).

    ``phi(x) = 2 / (e^{2x} + e^{-2x})`` and ``N`` is negative binomial
    ``(1/2, theta(delta))``.
    """
    law = hypsec_mixing(D.NoncentralParam("hypsec", delta).theta)

    def draw(rng, size):
        x0 = rng.standard_normal(size)
        x1 = rng.standard_normal(size)
        n = law.sample(rng, size)
        e = -np.log1p(-rng.random(int(n.sum())))
        s = x0 * x0
        y = psi(s / (s + x1 * x1 + 2.0 * _ragged_reduce(e, n, np.add)))
        return y * y if transform == "square" else y

    return draw


# --------------------------------------------------------------------------
# alternative normal representations


def _support_pattern(spec: SeriesSpec, T: int) -> np.ndarray:
    """Boolean ``b_n > 0`` from the positivity pattern of ``p`` and ``q`` alone."""
    p = (spec.p_coeffs(T) > 0).astype(float)
    q = (spec.q_coeffs(T) > 0).astype(float)
    p2 = np.minimum(np.convolve(p, p)[: T + 1], 1.0)
    col = q.copy()
    hit = col > 0
    for _ in range(1, T // 2 + 1):
        col = np.minimum(np.convolve(col, p2)[: T + 1], 1.0)
        if not col.any():
            break
        hit |= col > 0
    return hit


def altnormal_tail_bound(spec: SeriesSpec, theta: float, T: int) -> float:
    """Upper bound on ``sum_{n > T} w_theta(n)``.

    Since every ``b_n >= 0`` and ``sum b_n s^n = v(s) exp(u(s)^2/2)``,
    ``b_n theta^n <= v(s) exp(u(s)^2/2) (theta/s)^n`` for any ``theta < s < t0``;
    the bound is minimized over a grid of ``s``.
    """
    lg_theta = spec.log_generating(theta)
    if math.isfinite(spec.t0):
        z = np.unique(np.concatenate([np.geomspace(1e-9, 1.0, 300), 1.0 - np.geomspace(1e-13, 1.0, 300)]))
        z = z[(z > 0) & (z < 1)]
        s = theta + (spec.t0 - theta) * z
        s = s[s < spec.t0]
    else:
        s = theta * np.exp(np.geomspace(1e-6, 12.0, 600))
    best = math.inf
    for sv in s:
        ratio = theta / sv
        if not ratio < 1:
            continue
        try:
            lg = spec.log_generating(float(sv))
        except (ValueError, OverflowError, ZeroDivisionError):
            continue
        val = lg - lg_theta + (T + 1) * math.log(ratio) - math.log1p(-ratio)
        best = min(best, val)
    return math.exp(best) if best < 700 else math.inf


def _altnormal_horizon(spec: SeriesSpec, theta: float, tol: float) -> int:
    T = 16
    while T <= MAX_HORIZON:
        if altnormal_tail_bound(spec, theta, T) < tol:
            return T
        T *= 2
    raise TruncationError(f"no horizon up to {MAX_HORIZON} gives tail bound below {tol}")


def _altnormal_tables(spec: SeriesSpec, theta: float, T: int):
    """Weights ``w_theta(0..T)``, coefficient rows ``c_n`` and support mask."""
    table = component_table(spec, T, theta)
    row = table.sum(axis=1)
    u = spec.u(theta)
    w = np.exp(-0.5 * u * u) / spec.v(theta) * row
    support = _support_pattern(spec, T)
    coef = np.zeros_like(table)
    live = row > 0
    coef[live] = table[live] / row[live, None]
    coef[~live, 0] = 1.0
    return w, coef, support


def _theta_for(spec: SeriesSpec, delta: float) -> float:
    if delta == 0 or not math.isfinite(delta):
        raise DomainError("delta must be finite and nonzero")
    return spec.u_inv(abs(delta))


def altnormal_representation(
    spec: SeriesSpec, delta: float, T: int | None = None, tol: float = DEFAULT_TOL, transform: str = "square"
) -> MixtureRepresentation:
    """Mixture ``sum_n w_theta(n) h_n`` for ``(X + delta)^2`` with ``X`` standard normal.

    ``theta = u^{-1}(|delta|)``.  With ``T`` omitted the smallest power-of-two
    horizon with certified weight tail below ``tol`` is used; an explicit ``T``
    that misses ``tol`` raises :class:`TruncationError`.  ``transform="abs"``
    gives the same mixture for ``|X + delta|`` with components ``h_n(x^2) 2x``.
    """
    if not isinstance(spec, SeriesSpec):
        raise SpecError("spec must be a SeriesSpec")
    if transform not in ("abs", "square"):
        raise DomainError(f"unknown transform {transform!r}")
    theta = _theta_for(spec, delta)
    if T is None:
        T = _altnormal_horizon(spec, theta, tol)
    elif altnormal_tail_bound(spec, theta, T) >= tol:
        raise TruncationError(f"T={T} does not reach tail bound {tol}")
    w, coef, support = _altnormal_tables(spec, theta, T)
    mixing = D.TabulatedLaw(w, lambda t: altnormal_tail_bound(spec, theta, t), tag="altnormal")
    param = D.NoncentralParam("normal", delta)
    comps: ComponentFamily = AltNormalComponents(coef, support)
    if transform == "abs":
        comps = RootComponents(comps)
    return MixtureRepresentation(
        name=f"altnormal-{spec.tag}" + ("-abs" if transform == "abs" else ""),
        mixing=mixing,
        components=comps,
        target=D.NoncentralLaw(param, transform),
        param=param,
        tol=tol,
        horizon=T,
        spec=spec,
        theta=theta,
    )


def altnormal_index_pgf(spec: SeriesSpec, theta: float, t):
    """Generating function ``v(theta t)/v(theta) exp((u(theta t)^2 - u(theta)^2) / 2)`` of ``N``."""
    ut = spec.u(theta)
    t = np.asarray(t, dtype=float)
    vals = [
        spec.v(theta * tt) / spec.v(theta) * math.exp(0.5 * (spec.u(theta * tt) ** 2 - ut * ut))
        for tt in np.ravel(t)
    ]
    out = np.array(vals).reshape(t.shape)
    return float(out) if out.ndim == 0 else out


def altnormal_index_sampler(spec: SeriesSpec, theta: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``N = K + sum_{j=1}^{2M} L_j``.

    ``K`` has generating function ``v(theta t)/v(theta)``, ``M`` is Poisson with
    mean ``u(theta)^2 / 2`` and the ``L_j`` have generating function
    ``u(theta t)/u(theta)``.  The count of ``L`` summands is ``2M``, which is
    what the generating function of ``N`` forces.
    """
    u = spec.u(theta)
    k = np.asarray(spec.k_law(theta).sample(rng, size), dtype=np.int64)
    m = D.Poisson(0.5 * u * u).sample(rng, size)
    counts = 2 * m
    ls = np.asarray(spec.l_law(theta).sample(rng, int(counts.sum())), dtype=float)
    return k + _ragged_reduce(ls, counts, np.add).astype(np.int64)


@dataclass(frozen=True)
class PoissonMixture:
    """Families ``m_eta`` (weights over ``n``) and ``c_n`` (rows over ``k``) with the identity residual."""

    eta: float
    theta: float
    m: np.ndarray
    c: np.ndarray
    support: np.ndarray
    residual: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residual)))

    def mixed(self, k_max: int) -> np.ndarray:
        """``sum_n m(n) c_n(k)`` for ``k <= k_max``."""
        return self.m @ self.c[:, : k_max + 1]


def poisson_mixture_from_altnormal(
    spec: SeriesSpec, eta: float, k_max: int, n_max: int | None = None, tol: float = 1e-9, strict: bool = True
) -> PoissonMixture:
    """Non-canonical Poisson mixture induced by ``spec``.

    ``c_n(k) = (sum_l p_l^{*2k} q_{n-l}) / (b_n k! 2^k)`` for ``n in B``
    (a point mass at 0 otherwise) and ``m_eta(n) = w_theta(n)`` with
    ``u(theta)^2 / 2 = eta``.  Raises :class:`CoverageError` when
    ``max_k |sum_n m(n) c_n(k) - e^{-eta} eta^k / k!|`` exceeds ``tol`` and
    ``strict`` is set.  Without ``n_max`` the horizon is chosen so the weight
    tail is below ``tol / 1000``.
    """
    if not eta > 0:
        raise DomainError("eta must be positive")
    theta = spec.u_inv(math.sqrt(2.0 * eta))
    if n_max is None:
        n_max = max(_altnormal_horizon(spec, theta, tol * 1e-3), 2 * k_max)
    w, coef, support = _altnormal_tables(spec, theta, n_max)
    width = max(k_max + 1, coef.shape[1])
    c = np.zeros((n_max + 1, width))
    c[:, : coef.shape[1]] = coef
    ks = np.arange(k_max + 1)
    poisson = np.exp(ks * math.log(eta) - eta - sc.gammaln(ks + 1.0))
    residual = w @ c[:, : k_max + 1] - poisson
    result = PoissonMixture(eta, theta, w, c, support, residual)
    if strict and result.max_residual > tol:
        raise CoverageError(f"Poisson mixture residual {result.max_residual:.3g} exceeds {tol}")
    return result
