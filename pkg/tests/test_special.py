import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sc

from noncentral_mixtures.errors import DomainError
from noncentral_mixtures.special import (
    CombinatorialCache,
    binom,
    double_factorial_odd,
    harmonic,
    laguerre,
    lah,
    log_gamma,
)


class TestLogGamma:
    def test_one(self):
        assert log_gamma(1.0) == 0.0

    def test_half(self):
        assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), abs=1e-15)
        assert log_gamma(0.5) == pytest.approx(0.5723649429, abs=1e-10)

    def test_duplication_n3(self):
        lhs = math.factorial(3) * 2**6 * math.exp(log_gamma(3.5))
        rhs = math.sqrt(math.pi) * math.factorial(6)
        assert lhs == pytest.approx(rhs, rel=1e-13)

    @pytest.mark.parametrize("n", range(16))
    def test_duplication(self, n):
        lhs = math.factorial(n) * 4.0**n * math.exp(log_gamma(n + 0.5))
        rhs = math.sqrt(math.pi) * math.factorial(2 * n)
        assert abs(lhs - rhs) / rhs < 1e-12

    @staticmethod
    def _best_ulps(n, centre, width=200):
        # smallest |exp(y) - n!| in ulps over floats y near centre
        f = math.factorial(n)
        lo = hi = centre
        best = abs(math.exp(centre) - f)
        for _ in range(width):
            lo, hi = math.nextafter(lo, -math.inf), math.nextafter(hi, math.inf)
            best = min(best, abs(math.exp(lo) - f), abs(math.exp(hi) - f))
        return best / math.ulp(f)

    @pytest.mark.parametrize("n", range(21))
    def test_factorials_round_trip_optimally(self, n):
        f = math.factorial(n)
        err = abs(math.exp(log_gamma(n + 1.0)) - f) / math.ulp(f)
        assert err <= self._best_ulps(n, math.log(f))

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 6, 20])
    def test_factorials_within_one_ulp(self, n):
        f = math.factorial(n)
        assert abs(math.exp(log_gamma(n + 1.0)) - f) <= math.ulp(f)

    def test_one_ulp_round_trip_not_representable_for_n12(self):
        # no double y has exp(y) within 1 ulp of 12!, so that bound cannot hold for all n <= 20
        assert self._best_ulps(12, math.log(math.factorial(12))) > 1

    @given(st.floats(min_value=1e-3, max_value=100.0))
    def test_relative_error(self, x):
        with mpmath.workdps(40):
            exact = mpmath.gamma(mpmath.mpf(x))
            err = abs(mpmath.e ** mpmath.mpf(log_gamma(x)) / exact - 1)
        assert err <= 1e-13

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            log_gamma(x)


class TestBinom:
    def test_simple(self):
        assert binom(4, 2) == 6

    def test_zero_k(self):
        assert binom(7.3, 0) == 1.0

    def test_half_negative(self):
        assert binom(-0.5, 2) == pytest.approx(3 / 8, abs=1e-15)

    @pytest.mark.parametrize("k", range(10))
    def test_minus_half_identity(self, k):
        assert binom(-0.5, k) == pytest.approx((-1) ** k * 4.0**-k * math.comb(2 * k, k), rel=1e-14)

    def test_real_upper(self):
        assert binom(2.5, 2) == pytest.approx(1.875, abs=1e-15)

    @pytest.mark.parametrize("n", range(31))
    def test_integer_values(self, n):
        for k in range(n + 1):
            b = binom(n, k)
            assert b >= 0
            assert abs(b - round(b)) < 1e-9
            assert round(b) == math.comb(n, k)

    def test_exact_up_to_60(self):
        for k in range(61):
            assert binom(60, k) == pytest.approx(math.comb(60, k), rel=1e-14)

    def test_negative_k(self):
        with pytest.raises(DomainError):
            binom(3, -1)


class TestDoubleFactorial:
    @pytest.mark.parametrize("k, expected", [(0, 1), (1, 1), (2, 3), (3, 15), (5, 945)])
    def test_values(self, k, expected):
        assert double_factorial_odd(k) == expected

    @pytest.mark.parametrize("k", range(15))
    def test_factorial_form(self, k):
        assert double_factorial_odd(k) == pytest.approx(math.factorial(2 * k) / (2**k * math.factorial(k)), rel=1e-14)


class TestLah:
    def test_zero_zero(self):
        assert lah(0, 0) == 0

    def test_value(self):
        assert lah(4, 2) == 36

    def test_above_diagonal(self):
        assert lah(3, 5) == 0

    @pytest.mark.parametrize("n", range(1, 6))
    def test_first_column_is_zero(self, n):
        assert lah(n, 0) == 0

    def test_diagonal_and_first(self):
        for n in range(1, 15):
            assert lah(n, n) == 1
            assert lah(n, 1) == math.factorial(n)

    def test_recurrence(self):
        for n in range(1, 16):
            for ell in range(1, 17):
                assert lah(n + 1, ell) == pytest.approx(lah(n, ell - 1) + (n + ell) * lah(n, ell), rel=1e-12)

    def test_log_space_branch_continuous(self):
        # n > 20 goes through log space; compare with exact integers
        for ell in (1, 5, 12, 25):
            exact = math.factorial(25) // math.factorial(ell) * math.comb(24, ell - 1)
            assert lah(25, ell) == pytest.approx(exact, rel=1e-12)

    def test_row_sums_count_ordered_partitions(self):
        # sum_l L(n, l) = number of sets of lists, OEIS A000262
        a000262 = [1, 3, 13, 73, 501, 4051, 37633]
        for n, expected in enumerate(a000262, start=1):
            assert sum(lah(n, ell) for ell in range(n + 1)) == expected


class TestHarmonic:
    def test_one(self):
        assert harmonic(1) == 1

    def test_three(self):
        assert harmonic(3) == pytest.approx(11 / 6, abs=1e-15)

    def test_strictly_increasing(self):
        h = [harmonic(m) for m in range(1, 200)]
        assert all(b > a for a, b in zip(h, h[1:]))

    def test_log_square_coefficient(self):
        # 1/2 log^2(1 - x) = sum_{n>=2} H_{n-1}/n x^n; check x^4 by Taylor products
        T = 8
        log_series = np.zeros(T + 1)
        log_series[1:] = 1.0 / np.arange(1, T + 1)
        sq = 0.5 * np.convolve(log_series, log_series)[: T + 1]
        assert sq[4] == pytest.approx(harmonic(3) / 4, abs=1e-15)
        assert sq[4] == pytest.approx(11 / 24, abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            harmonic(0)


class TestLaguerre:
    @given(st.floats(-5, 5), st.floats(-0.9, 4.0))
    def test_degree_zero(self, x, alpha):
        assert laguerre(0, alpha, x) == 1.0

    def test_degree_one(self):
        assert laguerre(1, 0.5, 2.0) == pytest.approx(-0.5, abs=1e-15)

    @pytest.mark.parametrize("n", [2, 5, 9])
    @pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.5])
    def test_matches_scipy(self, n, alpha):
        for x in (0.3, 1.0, 2.7):
            assert laguerre(n, alpha, x) == pytest.approx(sc.eval_genlaguerre(n, alpha, x), rel=1e-11, abs=1e-12)

    def test_generating_function_example(self):
        theta, alpha, x = 0.3, 0.5, 1.0
        series = sum(laguerre(n, alpha, -x) * theta**n for n in range(61))
        closed = (1 - theta) ** (-1.5) * math.exp(0.3 / 0.7)
        assert series == pytest.approx(closed, rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.01, 0.5), st.floats(0.0, 3.0), st.floats(-0.9, 3.0))
    def test_generating_function(self, theta, x, alpha):
        series = math.fsum(laguerre(n, alpha, -x) * theta**n for n in range(81))
        closed = (1 - theta) ** (-1 - alpha) * math.exp(x * theta / (1 - theta))
        assert abs(series - closed) < 1e-10 * max(1.0, closed)

    def test_alpha_domain(self):
        with pytest.raises(DomainError):
            laguerre(2, -1.0, 0.5)


class TestCombinatorialCache:
    cache = CombinatorialCache()

    def test_default_size(self):
        assert self.cache.max_n == 128
        assert self.cache.lah_table.shape == (129, 129)

    def test_tables_agree_with_functions(self):
        for n in (1, 4, 10, 30):
            for ell in range(n + 2):
                assert self.cache.lah(n, ell) == lah(n, ell)
        for m in (1, 3, 50, 128):
            assert self.cache.harmonic(m) == pytest.approx(harmonic(m), rel=1e-14)
        assert self.cache.log_gamma_int(7) == pytest.approx(math.log(720), rel=1e-15)

    def test_paper_conventions(self):
        assert self.cache.lah(0, 0) == 0
        assert self.cache.lah(3, 5) == 0

    def test_read_only(self):
        with pytest.raises(ValueError):
            self.cache.lah_table[2, 1] = 5.0
        with pytest.raises(AttributeError):
            self.cache.max_n = 3
