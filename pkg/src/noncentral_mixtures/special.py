"""Special functions and combinatorial numbers.

Factorial-scale quantities are formed in log space and exponentiated at the
end, so tables stay finite well past ``n = 128``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "CombinatorialCache",
    "binom",
    "double_factorial_odd",
    "harmonic",
    "laguerre",
    "lah",
    "log_gamma",
]


_EXACT_FACTORIAL_MAX = 171


def log_gamma(x: float) -> float:
    """Return ``log(Gamma(x))`` for ``x > 0``.

    Integer arguments take the log of the exact factorial, which is the
    float whose exponential lands closest to ``(x - 1)!``.
    """
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    if x <= _EXACT_FACTORIAL_MAX and float(x).is_integer():
        return math.log(math.factorial(int(x) - 1))
    return math.lgamma(x)


def binom(n: float, k: int) -> float:
    """Generalized binomial coefficient ``prod_{j=1..k} (n - j + 1) / j``.

    ``n`` may be any real number; ``k`` must be a nonnegative integer.
    """
    if k < 0:
        raise DomainError(f"binom requires k >= 0, got {k!r}")
    if float(n).is_integer() and n >= 0:
        return float(math.comb(int(n), k))
    out = 1.0
    for j in range(1, k + 1):
        out *= (n - j + 1) / j
    return out


def double_factorial_odd(k: int) -> float:
    """``(2k - 1)!!`` with the convention ``(-1)!! = 1``."""
    if k < 0:
        raise DomainError(f"double_factorial_odd requires k >= 0, got {k!r}")
    out = 1.0
    for j in range(1, 2 * k, 2):
        out *= j
    return out


def _log_lah(n: int, ell: int) -> float:
    # log of (n!/ell!) * C(n-1, ell-1), valid for 1 <= ell <= n
    return (
        math.lgamma(n + 1)
        - math.lgamma(ell + 1)
        + math.lgamma(n)
        - math.lgamma(ell)
        - math.lgamma(n - ell + 1)
    )


def lah(n: int, ell: int) -> float:
    """Unsigned Lah number ``L(n, ell)``.

    Uses ``L(0, 0) = 0``, ``L(n, 0) = 0`` for ``n > 0`` and ``L(n, ell) = 0``
    for ``ell > n``.
    """
    if n < 0 or ell < 0:
        raise DomainError("lah requires nonnegative arguments")
    if ell == 0 or ell > n:
        return 0.0
    if n <= 20:
        return float(math.factorial(n) // math.factorial(ell) * math.comb(n - 1, ell - 1))
    return math.exp(_log_lah(n, ell))


def harmonic(m: int) -> float:
    """The ``m``-th harmonic number ``sum_{j=1..m} 1/j``."""
    if m < 1:
        raise DomainError(f"harmonic requires m >= 1, got {m!r}")
    return math.fsum(1.0 / j for j in range(1, m + 1))


def laguerre(n: int, alpha: float, x: float) -> float:
    """Generalized Laguerre polynomial ``L_n^alpha(x)`` from its defining sum."""
    if not alpha > -1:
        raise DomainError(f"laguerre requires alpha > -1, got {alpha!r}")
    total = 0.0
    term_x = 1.0  # (-x)^k / k!
    for k in range(n + 1):
        total += binom(n + alpha, n - k) * term_x
        term_x *= -x / (k + 1)
    return total


@dataclass(frozen=True)
class CombinatorialCache:
    """Precomputed tables up to ``max_n``; immutable after construction.

    ``log_factorial[n] = log(n!)``, ``lah_table[n, ell] = L(n, ell)`` and
    ``harmonic_table[m] = H_m`` (with ``H_0 = 0``).
    """

    max_n: int = 128
    log_factorial: np.ndarray = field(init=False, repr=False)
    lah_table: np.ndarray = field(init=False, repr=False)
    harmonic_table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.max_n < 0:
            raise DomainError("max_n must be nonnegative")
        size = self.max_n + 1
        logf = np.array([log_gamma(n + 1.0) for n in range(size)])
        table = np.zeros((size, size))
        for n in range(1, size):
            for ell in range(1, n + 1):
                table[n, ell] = lah(n, ell)
        harm = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, size))])
        for arr in (logf, table, harm):
            arr.setflags(write=False)
        object.__setattr__(self, "log_factorial", logf)
        object.__setattr__(self, "lah_table", table)
        object.__setattr__(self, "harmonic_table", harm)

    def log_gamma_int(self, n: int) -> float:
        """``log Gamma(n)`` for integer ``1 <= n <= max_n + 1``."""
        return float(self.log_factorial[n - 1])

    def lah(self, n: int, ell: int) -> float:
        if ell > n:
            return 0.0
        return float(self.lah_table[n, ell])

    def harmonic(self, m: int) -> float:
        if m < 1:
            raise DomainError(f"harmonic requires m >= 1, got {m!r}")
        return float(self.harmonic_table[m])
