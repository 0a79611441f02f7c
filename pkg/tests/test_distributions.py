import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from noncentral_mixtures import distributions as D
from noncentral_mixtures.errors import DomainError, TruncationError

N = 100_000
KS_ONE = 0.01


class TestParam:
    def test_logistic_theta(self):
        assert D.NoncentralParam("logistic", 1.0).theta == pytest.approx(math.e / (1 + math.e), rel=1e-15)
        assert D.NoncentralParam("logistic", -1.0).theta == pytest.approx(1 / (1 + math.e), rel=1e-15)

    @given(st.floats(0.01, 20.0))
    def test_hypsec_theta(self, d):
        t = D.NoncentralParam("hypsec", d).theta
        assert 0 < t < 0.5
        assert t == D.NoncentralParam("hypsec", -d).theta
        assert t == pytest.approx(2 / (math.exp(-d) + math.exp(d)) ** 2, rel=1e-13)

    def test_normal_eta(self):
        assert D.NoncentralParam("normal", math.sqrt(2)).eta == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("delta", [0.0, math.inf, math.nan])
    def test_rejects_bad_delta(self, delta):
        with pytest.raises(DomainError):
            D.NoncentralParam("normal", delta)

    def test_rejects_family(self):
        with pytest.raises(DomainError):
            D.NoncentralParam("cauchy", 1.0)


class TestBaseDensities:
    def test_logistic_cdf(self):
        assert D.logistic_cdf(0.0) == 0.5
        assert D.logistic_cdf(1.0) == pytest.approx(0.7310585786, abs=1e-10)

    @pytest.mark.parametrize("x", [0.1, 1.0, 5.0])
    def test_logistic_symmetry(self, x):
        assert D.logistic_cdf(x) + D.logistic_cdf(-x) == pytest.approx(1.0, abs=1e-15)

    def test_hypsec_pdf(self):
        assert D.hypsec_pdf(0.0) == pytest.approx(1 / math.pi, rel=1e-15)
        assert integrate.quad(D.hypsec_pdf, -30, 30, epsabs=1e-13)[0] == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("x", [0.5, 2.0])
    def test_hypsec_symmetry(self, x):
        assert D.hypsec_pdf(x) == D.hypsec_pdf(-x)

    def test_hypsec_cdf_is_integral(self):
        for x in (-3.0, 0.0, 1.2):
            assert D.hypsec_cdf(x) == pytest.approx(integrate.quad(D.hypsec_pdf, -60, x, epsabs=1e-14)[0], abs=1e-12)

    def test_chisq_values(self):
        assert D.chisq_pdf(2, 1.0) == pytest.approx(0.5 * math.exp(-0.5), rel=1e-14)
        assert D.chisq_pdf(1, 1.0) == pytest.approx(math.exp(-0.5) / math.sqrt(2 * math.pi), rel=1e-14)
        assert D.chisq_pdf(2, 1.0) == pytest.approx(0.3032653, abs=1e-7)
        assert D.chisq_pdf(1, 1.0) == pytest.approx(0.2419707, abs=1e-7)

    def test_chisq_normalized(self):
        assert integrate.quad(lambda x: D.chisq_pdf(5, x), 0, np.inf, epsabs=1e-12)[0] == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("k", [1, 3, 8])
    def test_chisq_matches_scipy(self, k):
        x = np.linspace(0.05, 30, 50)
        np.testing.assert_allclose(D.chisq_pdf(k, x), stats.chi2.pdf(x, k), rtol=1e-12)
        np.testing.assert_allclose(D.chisq_cdf(k, x), stats.chi2.cdf(x, k), rtol=1e-12)

    def test_chisq_domain(self):
        with pytest.raises(DomainError):
            D.chisq_pdf(3, 0.0)


class TestDirectNoncentral:
    def test_normal_square_value(self):
        # closed form e^{-(x + delta^2)/2} cosh(delta sqrt x) / sqrt(2 pi x) at delta^2 = 2, x = 1
        p = D.NoncentralParam("normal", math.sqrt(2))
        expected = math.exp(-1.5) * math.cosh(math.sqrt(2)) / math.sqrt(2 * math.pi)
        assert D.noncentral_direct_pdf(p, "square", 1.0) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(0.193893307092091, rel=1e-13)
        assert D.noncentral_direct_pdf(p, "square", 1.0) == pytest.approx(stats.ncx2.pdf(1.0, 1, 2.0), rel=1e-12)

    @pytest.mark.parametrize("x", [0.5, 1.0, 3.0])
    def test_logistic_finite_difference(self, x):
        p = D.NoncentralParam("logistic", 1.0)
        h = 1e-5
        fd = (D.noncentral_direct_cdf(p, "abs", x + h) - D.noncentral_direct_cdf(p, "abs", x - h)) / (2 * h)
        assert D.noncentral_direct_pdf(p, "abs", x) == pytest.approx(fd, abs=1e-6)

    @pytest.mark.parametrize("delta", [0.3, -1.0, 2.0])
    def test_hypsec_limit_at_zero(self, delta):
        p = D.NoncentralParam("hypsec", delta)
        assert D.noncentral_direct_pdf(p, "abs", 1e-12) == pytest.approx(2 * D.hypsec_pdf(delta), rel=1e-10)

    @pytest.mark.parametrize("family", D.FAMILIES)
    @pytest.mark.parametrize("delta", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("transform", D.TRANSFORMS)
    def test_normalized(self, family, delta, transform):
        p = D.NoncentralParam(family, delta)
        f = lambda x: float(D.noncentral_direct_pdf(p, transform, x))  # noqa: E731
        # split at 1 so the integrable singularity of the square variant is isolated
        total = sum(integrate.quad(f, a, b, epsabs=1e-12, epsrel=1e-12, limit=200)[0] for a, b in [(0, 1), (1, np.inf)])
        assert total == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("family", D.FAMILIES)
    @pytest.mark.parametrize("transform", D.TRANSFORMS)
    def test_cdf_is_integral_of_pdf(self, family, transform):
        p = D.NoncentralParam(family, 0.8)
        f = lambda x: float(D.noncentral_direct_pdf(p, transform, x))  # noqa: E731
        for x in (0.4, 2.0):
            val = integrate.quad(f, 0, x, epsabs=1e-13, limit=200)[0]
            assert D.noncentral_direct_cdf(p, transform, x) == pytest.approx(val, abs=1e-10)

    def test_domain(self):
        p = D.NoncentralParam("normal", 1.0)
        with pytest.raises(DomainError):
            D.noncentral_direct_pdf(p, "abs", -1.0)
        with pytest.raises(DomainError):
            D.noncentral_direct_pdf(p, "cube", 1.0)

    @pytest.mark.parametrize("family", D.FAMILIES)
    def test_direct_sampler(self, family):
        law = D.NoncentralLaw(D.NoncentralParam(family, 1.3), "square")
        x = law.sample(D.make_rng(3), N)
        assert stats.kstest(x, law.cdf).statistic < KS_ONE


LAWS = [
    D.Normal(),
    D.Logistic(),
    D.HypSec(),
    D.Gamma(2.5, 1.5),
    D.ChiSquare(3),
    D.Exponential(),
    D.SquaredExponential(),
    D.Beta(0.5, 2.5),
    D.NoncentralLaw(D.NoncentralParam("logistic", -0.7), "abs"),
    D.NoncentralLaw(D.NoncentralParam("hypsec", 1.5), "square"),
]


class TestContinuousLaws:
    @pytest.mark.parametrize("law", LAWS, ids=lambda law: type(law).__name__)
    def test_quantile_inverts_cdf(self, law):
        u = np.linspace(0.01, 0.99, 99)
        np.testing.assert_allclose(law.cdf(law.quantile(u)), u, atol=1e-9)

    @pytest.mark.parametrize("law", LAWS, ids=lambda law: type(law).__name__)
    def test_sampler_matches_cdf(self, law):
        x = np.asarray(law.sample(D.make_rng(11), 20_000))
        assert stats.kstest(x, law.cdf).statistic < 1.63 / math.sqrt(20_000) * 1.5

    @pytest.mark.parametrize(
        "law, ref",
        [
            (D.Gamma(2.5, 1.5), stats.gamma(2.5, scale=1 / 1.5)),
            (D.Beta(0.5, 2.5), stats.beta(0.5, 2.5)),
            (D.Logistic(), stats.logistic()),
            (D.HypSec(), stats.hypsecant()),
        ],
    )
    def test_against_scipy(self, law, ref):
        x = np.linspace(0.05, 0.95, 19) if isinstance(law, D.Beta) else np.linspace(-3, 6, 19)
        if isinstance(law, D.Gamma):
            x = x[x > 0]
        np.testing.assert_allclose(law.pdf(x), ref.pdf(x), rtol=1e-12)
        np.testing.assert_allclose(law.cdf(x), ref.cdf(x), rtol=1e-12, atol=1e-15)

    def test_exponential_mean(self):
        x = D.Exponential().sample(D.make_rng(5), N)
        assert abs(x.mean() - 1.0) < 0.02

    def test_gamma_convolution(self):
        rng = D.make_rng(7)
        s = D.Gamma(0.7, 2.0).sample(rng, N) + D.Gamma(1.8, 2.0).sample(rng, N)
        assert stats.kstest(s, D.Gamma(2.5, 2.0).cdf).statistic < KS_ONE

    def test_squared_exponential_weibull(self):
        x = D.Exponential().sample(D.make_rng(8), N) ** 2
        assert stats.kstest(x, lambda t: 1 - np.exp(-np.sqrt(t))).statistic < KS_ONE

    def test_deterministic_replay(self):
        a = D.Normal().sample(D.make_rng(9, 4), 100)
        b = D.Normal().sample(D.make_rng(9, 4), 100)
        c = D.Normal().sample(D.make_rng(9, 5), 100)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_quantile_edges(self):
        assert D.Exponential().quantile(0.0) == 0.0
        assert D.Exponential().quantile(1.0) == math.inf
        with pytest.raises(DomainError):
            D.Exponential().quantile(1.5)


DISCRETE = [
    (D.Poisson(1.7), stats.poisson(1.7)),
    (D.Geometric(0.3), stats.geom(0.3)),
    (D.NegativeBinomial(0.5, 0.2), stats.nbinom(0.5, 0.2)),
    (D.NegativeBinomial(2.0, 0.6), stats.nbinom(2.0, 0.6)),
    (D.LogSeries(0.8), stats.logser(0.8)),
]


class TestDiscreteLaws:
    @pytest.mark.parametrize("law, ref", DISCRETE, ids=lambda v: type(v).__name__)
    def test_pmf(self, law, ref):
        n = np.arange(60)
        np.testing.assert_allclose(law.pmf(n), ref.pmf(n), rtol=1e-12, atol=1e-300)

    @pytest.mark.parametrize("law, ref", DISCRETE, ids=lambda v: type(v).__name__)
    def test_tail_bound_valid(self, law, ref):
        for T in (0, 1, 3, 10, 40, 100):
            head = law.weights(T).sum()
            assert head <= 1.0 + 1e-14
            assert head + law.tail_bound(T) >= 1.0 - 1e-14
            assert law.tail_bound(T) >= ref.sf(T) * (1 - 1e-9)

    @pytest.mark.parametrize("law, ref", DISCRETE, ids=lambda v: type(v).__name__)
    def test_sampler(self, law, ref):
        x = law.sample(D.make_rng(13), 200_000)
        top = int(ref.ppf(0.999))
        counts = np.bincount(np.minimum(x, top + 1), minlength=top + 2) / x.size
        expected = np.append(ref.pmf(np.arange(top + 1)), ref.sf(top))
        assert 0.5 * np.abs(counts - expected).sum() < 0.005

    def test_geometric_family_for_logistic_index(self):
        # (1 - theta) theta^{n-1}, n >= 1, used in the two-geometric mixture
        theta = 0.35
        g = D.Geometric(1 - theta)
        n = np.arange(1, 12)
        np.testing.assert_allclose(g.pmf(n), (1 - theta) * theta ** (n - 1), rtol=1e-14)
        assert g.pmf(0) == 0.0

    def test_horizon(self):
        law = D.Poisson(3.0)
        T = law.horizon(1e-12)
        assert law.tail_bound(T) < 1e-12
        assert T == 16 or law.tail_bound(T // 2) >= 1e-12
        with pytest.raises(TruncationError):
            D.Geometric(1e-6).horizon(1e-12, cap=64)

    def test_point_mass(self):
        pm = D.PointMass(2)
        assert pm.pmf(2) == 1.0 and pm.pmf(1) == 0.0
        np.testing.assert_array_equal(pm.sample(D.make_rng(0), 4), [2, 2, 2, 2])

    def test_tabulated(self):
        law = D.TabulatedLaw([0.5, 0.25, 0.25], lambda T: 0.0)
        assert law.pmf(1) == 0.25
        assert law.tail_bound(0) == pytest.approx(0.5)
        np.testing.assert_array_equal(law.weights(4), [0.5, 0.25, 0.25, 0, 0])

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.05, 8.0), st.floats(0.0, 1.0))
    def test_quantile_is_generalized_inverse(self, mean, u):
        law = D.Poisson(mean)
        q = int(law.quantile(u))
        assert law.cdf(q) >= u - 1e-15
        if q > 0:
            assert law.cdf(q - 1) < u + 1e-15
