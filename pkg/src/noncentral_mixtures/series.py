"""Truncated power series with nonnegative coefficients.

A pair of series ``u(t) = sum p_n t^n`` (with ``p_0 = 0``) and
``v(t) = sum q_n t^n`` indexes a family of mixture representations of the
noncentral chi-squared law.  This module holds the coefficient algebra:
convolution powers, the ``b_n`` sequence, exponential tilting and series
evaluation with a tail estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateNormalizerError, RadiusError, SpecError
from .special import binom

__all__ = [
    "BuiltinSpec",
    "SeriesSpec",
    "SeriesValue",
    "TruncatedSeries",
    "b_sequence",
    "builtin_spec",
    "component_table",
    "conv_power",
    "convolve",
    "eval_series",
    "tilted_pmf",
]


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients ``coeffs[n]`` of ``t^n`` for ``n <= T``.

    ``radius`` is the radius of convergence of the full series (``inf`` for
    entire functions and polynomials).
    """

    coeffs: np.ndarray
    radius: float = math.inf

    def __post_init__(self) -> None:
        arr = np.array(self.coeffs, dtype=float).reshape(-1)
        if arr.size == 0:
            raise SpecError("a truncated series needs at least one coefficient")
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise SpecError("series coefficients must be finite and nonnegative")
        if not self.radius > 0:
            raise SpecError("radius must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __len__(self) -> int:
        return self.coeffs.size

    def padded(self, T: int) -> np.ndarray:
        """Coefficients ``0..T``, zero-filled or cut as needed."""
        out = np.zeros(T + 1)
        m = min(T + 1, self.coeffs.size)
        out[:m] = self.coeffs[:m]
        return out

    @classmethod
    def unit(cls, T: int = 0) -> TruncatedSeries:
        c = np.zeros(T + 1)
        c[0] = 1.0
        return cls(c)


def convolve(a: TruncatedSeries, b: TruncatedSeries, T: int) -> TruncatedSeries:
    """Cauchy product of ``a`` and ``b`` truncated at degree ``T``."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    prod = np.convolve(a.padded(T), b.padded(T))[: T + 1]
    return TruncatedSeries(prod, min(a.radius, b.radius))


def conv_power(p: TruncatedSeries, k: int, T: int) -> TruncatedSeries:
    """Coefficients of ``u(t)^k`` up to degree ``T`` (``p^{*0}`` is the unit)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if p.coeffs[0] != 0:
        raise SpecError("conv_power requires p_0 = 0")
    result = TruncatedSeries.unit(T)
    base = TruncatedSeries(p.padded(T), p.radius)
    # binary powering; each step truncates at T
    while k:
        if k & 1:
            result = convolve(result, base, T)
        k >>= 1
        if k:
            base = convolve(base, base, T)
    return TruncatedSeries(result.coeffs, p.radius)


class SeriesValue(NamedTuple):
    value: float
    tail: float
    reliable: bool


def _ratio_tail(terms: np.ndarray) -> tuple[float, bool]:
    """Geometric-ratio majorant for the mass beyond the last stored term."""
    nz = np.flatnonzero(terms > 0)
    if nz.size == 0:
        return 0.0, True
    if nz.size == 1:
        return math.inf, False
    last, prev = terms[nz[-1]], terms[nz[-2]]
    gap = nz[-1] - nz[-2]
    r = (last / prev) ** (1.0 / gap)
    if r >= 1.0:
        return math.inf, False
    return float(last * r / (1.0 - r)), True


def eval_series(s: TruncatedSeries, t: float) -> SeriesValue:
    """Sum the stored terms at ``t`` and estimate the discarded tail.

    The tail estimate extrapolates the ratio of the last two nonzero terms;
    it is flagged unreliable (and infinite) when that ratio is >= 1.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t >= s.radius:
        raise RadiusError(f"t={t} is outside the radius {s.radius}")
    n = np.arange(s.coeffs.size)
    with np.errstate(under="ignore"):
        terms = s.coeffs * np.power(t, n) if t > 0 else np.where(n == 0, s.coeffs, 0.0)
    value = math.fsum(terms)
    if t == 0:
        return SeriesValue(value, 0.0, True)
    tail, ok = _ratio_tail(terms)
    return SeriesValue(value, tail, ok)


@dataclass(frozen=True)
class TiltedLaw:
    """Probability mass ``s_n theta^n / s(theta)`` on ``0..T``.

    ``tail`` estimates the relative mass the truncation leaves out.
    """

    probs: np.ndarray
    tail: float

    def pmf(self, n):
        n = np.asarray(n)
        inside = (n >= 0) & (n < self.probs.size)
        return np.where(inside, self.probs[np.clip(n, 0, self.probs.size - 1)], 0.0)

    def tail_bound(self, T: int) -> float:
        if T + 1 >= self.probs.size:
            return self.tail
        return float(math.fsum(self.probs[T + 1 :])) + self.tail

    def weights(self, T: int) -> np.ndarray:
        out = np.zeros(T + 1)
        m = min(T + 1, self.probs.size)
        out[:m] = self.probs[:m]
        return out

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        cdf = np.cumsum(self.probs)
        idx = np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")
        return np.minimum(idx, self.probs.size - 1)


def tilted_pmf(s: TruncatedSeries, theta: float, T: int) -> TiltedLaw:
    """Exponentially tilt the coefficients of ``s`` by ``theta``."""
    coeffs = s.padded(T)
    n = np.arange(T + 1)
    with np.errstate(under="ignore"):
        terms = coeffs * np.power(theta, n)
    total = math.fsum(terms)
    if total <= 0:
        raise DegenerateNormalizerError("tilted series sums to zero")
    tail, _ = _ratio_tail(terms)
    if s.radius <= theta:
        tail = math.inf
    return TiltedLaw(terms / total, tail / total)


class SeriesSpec:
    """User-supplied pair ``(p, q)`` defining ``u`` and ``v``.

    The stored coefficients are taken as the complete series, so ``u`` and
    ``v`` are polynomials unless ``t0`` says otherwise.  That ``u(t)`` grows
    without bound as ``t`` approaches ``t0`` cannot be checked from finitely
    many coefficients and is the caller's obligation.
    """

    tag = "custom"

    def __init__(self, p, q, t0: float = math.inf) -> None:
        p = p if isinstance(p, TruncatedSeries) else TruncatedSeries(p, t0)
        q = q if isinstance(q, TruncatedSeries) else TruncatedSeries(q, t0)
        if p.coeffs[0] != 0:
            raise SpecError("p_0 must be 0")
        if not np.any(p.coeffs > 0):
            raise SpecError("p must not vanish identically")
        if not np.any(q.coeffs > 0):
            raise SpecError("q must not vanish identically")
        if not t0 > 0:
            raise SpecError("t0 must be positive")
        self.p = p
        self.q = q
        self.t0 = float(t0)

    def __repr__(self) -> str:
        return f"SeriesSpec(p={self.p.coeffs.tolist()}, q={self.q.coeffs.tolist()}, t0={self.t0})"

    def p_coeffs(self, T: int) -> np.ndarray:
        return self.p.padded(T)

    def q_coeffs(self, T: int) -> np.ndarray:
        return self.q.padded(T)

    def u(self, t: float) -> float:
        return float(np.polynomial.polynomial.polyval(t, self.p.coeffs))

    def v(self, t: float) -> float:
        return float(np.polynomial.polynomial.polyval(t, self.q.coeffs))

    def u_inv(self, x: float) -> float:
        """Solve ``u(theta) = x`` by bracketing on ``[0, t0)``."""
        if x < 0:
            raise ValueError("u_inv requires x >= 0")
        if x == 0:
            return 0.0
        hi = self.t0 if math.isfinite(self.t0) else 1.0
        if math.isfinite(self.t0):
            hi = self.t0 * (1 - 1e-15)
            if self.u(hi) < x:
                raise SpecError(f"u does not reach {x} on [0, t0)")
        else:
            while self.u(hi) < x:
                hi *= 2.0
        return brentq(lambda t: self.u(t) - x, 0.0, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)

    def log_generating(self, t: float) -> float:
        """``log(v(t)) + u(t)^2 / 2``, the log of ``sum b_n t^n``."""
        return math.log(self.v(t)) + 0.5 * self.u(t) ** 2

    def k_law(self, theta: float, T: int = 256):
        """Law with generating function ``v(theta t) / v(theta)``."""
        return tilted_pmf(TruncatedSeries(self.q_coeffs(T)), theta, T)

    def l_law(self, theta: float, T: int = 256):
        """Law with generating function ``u(theta t) / u(theta)``."""
        return tilted_pmf(TruncatedSeries(self.p_coeffs(T)), theta, T)


class BuiltinSpec(SeriesSpec):
    """One of the four named specs, with closed forms for ``u``, ``v`` and ``u^{-1}``.

    ``tag`` is one of ``classical``, ``geometric`` (needs ``alpha > -1``),
    ``geometric_v1`` and ``logseries``.
    """

    TAGS = ("classical", "geometric", "geometric_v1", "logseries")

    def __init__(self, tag: str, alpha: float | None = None) -> None:
        if tag not in self.TAGS:
            raise SpecError(f"unknown builtin spec {tag!r}")
        if tag == "geometric":
            if alpha is None or not alpha > -1:
                raise SpecError("geometric spec requires alpha > -1")
            alpha = float(alpha)
        else:
            alpha = None
        self.tag = tag
        self.alpha = alpha
        self.t0 = math.inf if tag == "classical" else 1.0
        self.p = TruncatedSeries(self.p_coeffs(64), self.t0)
        self.q = TruncatedSeries(self.q_coeffs(64), self.t0)

    def __repr__(self) -> str:
        if self.tag == "geometric":
            return f"BuiltinSpec('geometric', alpha={self.alpha})"
        return f"BuiltinSpec({self.tag!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, BuiltinSpec) and (self.tag, self.alpha) == (other.tag, other.alpha)

    def __hash__(self) -> int:
        return hash((self.tag, self.alpha))

    def p_coeffs(self, T: int) -> np.ndarray:
        out = np.zeros(T + 1)
        if T == 0:
            return out
        if self.tag == "classical":
            out[1] = 1.0
        elif self.tag in ("geometric", "geometric_v1"):
            out[1:] = 1.0
        else:
            out[1:] = 1.0 / np.arange(1, T + 1)
        return out

    def q_coeffs(self, T: int) -> np.ndarray:
        out = np.zeros(T + 1)
        if self.tag == "geometric":
            # coefficients of (1 - t)^{-(1 + alpha)}
            out[0] = 1.0
            for n in range(1, T + 1):
                out[n] = out[n - 1] * (n + self.alpha) / n
        else:
            out[0] = 1.0
        return out

    def u(self, t: float) -> float:
        if self.tag == "classical":
            return t
        if self.tag == "logseries":
            return -math.log1p(-t)
        return t / (1.0 - t)

    def v(self, t: float) -> float:
        if self.tag == "geometric":
            return (1.0 - t) ** (-(1.0 + self.alpha))
        return 1.0

    def u_inv(self, x: float) -> float:
        if x < 0:
            raise ValueError("u_inv requires x >= 0")
        if self.tag == "classical":
            return x
        if self.tag == "logseries":
            return -math.expm1(-x)
        return x / (1.0 + x)

    def log_generating(self, t: float) -> float:
        if self.tag == "geometric":
            return -(1.0 + self.alpha) * math.log1p(-t) + 0.5 * self.u(t) ** 2
        return 0.5 * self.u(t) ** 2

    def k_law(self, theta: float, T: int = 256):
        from .distributions import NegativeBinomial, PointMass

        if self.tag == "geometric":
            return NegativeBinomial(1.0 + self.alpha, 1.0 - theta)
        return PointMass(0)

    def l_law(self, theta: float, T: int = 256):
        from .distributions import Geometric, LogSeries, PointMass

        if self.tag == "classical":
            return PointMass(1)
        if self.tag == "logseries":
            return LogSeries(theta)
        return Geometric(1.0 - theta)


def builtin_spec(tag: str, alpha: float | None = None) -> BuiltinSpec:
    """Shorthand for :class:`BuiltinSpec`; ``geometric(a)`` strings are accepted."""
    if tag.startswith("geometric(") and tag.endswith(")"):
        return BuiltinSpec("geometric", float(tag[len("geometric(") : -1]))
    return BuiltinSpec(tag, alpha)


def component_table(spec: SeriesSpec, T: int, theta: float = 1.0) -> np.ndarray:
    """Matrix ``D[n, k] = theta^n (sum_l p_l^{*2k} q_{n-l}) / (k! 2^k)``.

    Rows run over ``n <= T`` and columns over ``k <= T // 2``.  Tilting by
    ``theta`` keeps every entry bounded by ``v(theta) (u(theta)^2/2)^k / k!``
    so large horizons do not overflow.  Built by the recursion
    ``S_k = S_{k-1} * (p * p) / (2k)`` starting from ``S_0 = q``.
    """
    n = np.arange(T + 1)
    with np.errstate(under="ignore"):
        scale = np.power(theta, n)
        p = spec.p_coeffs(T) * scale
        q = spec.q_coeffs(T) * scale
    p2 = np.convolve(p, p)[: T + 1]
    K = T // 2
    table = np.zeros((T + 1, K + 1))
    col = q.copy()
    table[:, 0] = col
    for k in range(1, K + 1):
        # entries below degree 2k vanish exactly
        col = np.convolve(col, p2)[: T + 1] / (2.0 * k)
        col[: 2 * k] = 0.0
        table[:, k] = col
    return table


def b_sequence(spec: SeriesSpec, T: int) -> tuple[np.ndarray, set[int]]:
    """The sequence ``b_n`` for ``n <= T`` and its support ``B``."""
    b = component_table(spec, T).sum(axis=1)
    return b, {int(i) for i in np.flatnonzero(b > 0)}


def b_sequence_bsum(T: int) -> np.ndarray:
    """``b_n`` for the ``geometric_v1`` spec from its closed binomial sum."""
    b = np.zeros(T + 1)
    b[0] = 1.0
    for n in range(2, T + 1):
        b[n] = math.fsum(
            binom(n - 1, 2 * k - 1) / (2.0**k * math.factorial(k)) for k in range(1, n // 2 + 1)
        )
    return b
