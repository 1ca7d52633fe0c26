import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import kstest

from altfrail import (
    BurrXII,
    FrailtyField,
    GammaFrailty,
    ParameterError,
    Weibull,
    rng_for,
    sample_field_time,
)


class TestWeibull:
    def test_exponential_special_case(self):
        w = Weibull(1.0, 1.0)
        assert w.cdf(1.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-14)

    def test_constant_hazard_at_beta_one(self):
        w = Weibull(2.0, 1.0)
        for t in (0.0, 0.3, 5.0, 400.0):
            assert w.hazard(t) == pytest.approx(0.5, rel=1e-13)

    def test_cdf_high_precision_value(self):
        # reference from a 50-digit evaluation of 1 - exp(-(687/529.4)^1.55)
        assert Weibull(529.4, 1.55).cdf(687.0) == pytest.approx(
            0.77635065903550266049285783746858, rel=1e-12
        )

    def test_quantile_domain(self):
        w = Weibull(1.0, 2.0)
        assert w.quantile(0.0) == 0.0
        with pytest.raises(ValueError):
            w.quantile(1.0)
        with pytest.raises(ValueError):
            w.quantile(-0.1)

    def test_parameter_domain(self):
        for bad in [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (math.nan, 1.0)]:
            with pytest.raises(ParameterError):
                Weibull(*bad)


class TestBurrXII:
    def test_loglogistic_median_at_scale(self):
        assert BurrXII(3.7, 2.2, 1.0).cdf(3.7) == pytest.approx(0.5, rel=1e-14)

    def test_quantile_zero(self):
        assert BurrXII(2.0, 1.5, 0.3).quantile(0.0) == 0.0

    def test_cdf_high_precision_value(self):
        # 50-digit evaluation of 1 - [(150/298.6)^2.66 + 1]^(-0.0223)
        assert BurrXII(298.6, 2.66, 0.0223).cdf(150.0) == pytest.approx(
            0.0033081362744686202538, rel=1e-12
        )

    def test_degenerates_to_weibull(self):
        alpha, beta, mu = 2.0, 1.7, 1.0e4
        w = Weibull(alpha, beta)
        b = BurrXII(alpha * mu ** (1 / beta), beta, mu)  # k = mu keeps k/mu = 1
        grid = w.quantile(np.linspace(0.001, 0.999, 300))
        assert np.max(np.abs(b.cdf(grid) - w.cdf(grid))) < 1e-3

    def test_tiny_k_quantile_stable(self):
        b = BurrXII(298.6, 2.66, 0.0223)
        q = b.quantile(0.5)
        assert np.isfinite(q) and q > 0
        assert b.cdf(q) == pytest.approx(0.5, abs=1e-12)


class TestFrailtyField:
    def test_cdf_pdf_high_precision_values(self):
        # 50-digit evaluations at (alpha, beta, mu, k, gamma, t) below
        ff = FrailtyField(1.2, 1.7, 0.8, 0.6, 0.35)
        assert ff.cdf(0.9) == pytest.approx(0.42651431398526675579, rel=1e-12)
        assert ff.pdf(0.9) == pytest.approx(0.51450833699723146206, rel=1e-12)

    def test_hazard_at_zero_beta_one(self):
        ff = FrailtyField(1.0, 1.0, 0.5, 2.0, 0.3)
        assert ff.hazard(0.0) == pytest.approx(0.3 + 2.0 / 0.5, rel=1e-14)
        # general scale divides the limit by alpha
        ff2 = FrailtyField(4.0, 1.0, 0.5, 2.0, 0.3)
        assert ff2.hazard(0.0) == pytest.approx((0.3 + 2.0 / 0.5) / 4.0, rel=1e-14)

    def test_zero_gamma_matches_burr12(self):
        ff = FrailtyField(529.4, 1.55, 19.0, 1.0, 0.0)
        b = ff.as_burr12()
        assert b.scale == pytest.approx(529.4 * 19.0 ** (1 / 1.55), rel=1e-14)
        grid = b.quantile(np.linspace(0.01, 0.99, 60))
        np.testing.assert_allclose(ff.cdf(grid), b.cdf(grid), rtol=1e-12)
        np.testing.assert_allclose(ff.pdf(grid), b.pdf(grid), rtol=1e-12)
        np.testing.assert_allclose(ff.hazard(grid), b.hazard(grid), rtol=1e-12)

    def test_cdf_zero_at_origin(self):
        assert FrailtyField(2.0, 0.7, 0.4, 1.3, 0.6).cdf(0.0) == 0.0

    def test_infinite_density_convention_small_beta(self):
        ff = FrailtyField(1.0, 0.5, 1.0, 1.0, 0.2)
        assert ff.pdf(0.0) == math.inf
        assert ff.hazard(0.0) == math.inf

    def test_parameter_domain(self):
        with pytest.raises(ParameterError):
            FrailtyField(1.0, 1.0, -0.5, 1.0, 0.0)
        with pytest.raises(ParameterError):
            FrailtyField(1.0, 1.0, 1.0, 1.0, -0.1)


_POINTS = [
    Weibull(1.0, 1.0),
    Weibull(529.4, 1.55),
    Weibull(0.7, 3.2),
    BurrXII(1.0, 1.0, 1.0),
    BurrXII(298.6, 2.66, 0.0223),
    BurrXII(3.0, 0.8, 2.5),
    FrailtyField(1.2, 1.7, 0.8, 0.6, 0.35),
    FrailtyField(534.0, 1.5, 19.0, 1.0, 0.0),
    FrailtyField(2.0, 2.4, 0.3, 0.9, 1.1),
]


def _quantile_any(dist, p):
    if isinstance(dist, FrailtyField):
        return dist._quantile(p)
    return dist.quantile(p)


class TestSharedInvariants:
    @pytest.mark.parametrize("dist", _POINTS, ids=lambda d: repr(d))
    def test_cdf_monotone_with_unit_limits(self, dist):
        hi = _quantile_any(dist, 1 - 1e-9)
        grid = np.linspace(0.0, hi, 500)
        c = dist.cdf(grid)
        assert c[0] == 0.0
        assert np.all(np.diff(c) >= -1e-15)
        assert dist.cdf(hi * 50) > 1 - 1e-6

    @pytest.mark.parametrize("dist", _POINTS, ids=lambda d: repr(d))
    def test_pdf_integrates_to_one(self, dist):
        # integrate in log time, piecewise between quantile knots, so tails
        # spanning dozens of decades cannot defeat quad
        knots = [_quantile_any(dist, p) for p in (1e-12, 0.1, 0.5, 0.9, 0.99, 1 - 1e-9)]
        total = quad(dist.pdf, 0.0, knots[0], limit=400)[0]
        err = 0.0
        for lo, hi in zip(knots[:-1], knots[1:]):
            piece, perr = quad(
                lambda u: dist.pdf(math.exp(u)) * math.exp(u),
                math.log(lo),
                math.log(hi),
                limit=400,
            )
            total += piece
            err += perr
        assert total == pytest.approx(1.0, abs=1e-6 + 5 * err)

    @pytest.mark.parametrize("dist", _POINTS, ids=lambda d: repr(d))
    def test_hazard_is_pdf_over_sf(self, dist):
        grid = np.array([_quantile_any(dist, p) for p in (0.01, 0.1, 0.5, 0.9, 0.999)])
        grid = grid[grid > 0]
        np.testing.assert_allclose(
            dist.hazard(grid), dist.pdf(grid) / (1.0 - dist.cdf(grid)), rtol=1e-10
        )

    @pytest.mark.parametrize("dist", _POINTS[:6], ids=lambda d: repr(d))
    def test_quantile_cdf_roundtrip(self, dist):
        lo = dist.quantile(1e-6)
        hi = dist.quantile(1 - 1e-6)
        grid = np.geomspace(max(lo, 1e-12), hi, 200)
        np.testing.assert_allclose(dist.quantile(dist.cdf(grid)), grid, rtol=1e-8)


class TestSampling:
    def test_weibull_ks_against_exponential(self):
        draws = Weibull(1.0, 1.0).sample(100_000, seed=101)
        assert kstest(draws, "expon").pvalue > 0.01

    def test_burr12_ks_against_cdf(self):
        dist = BurrXII(2.0, 1.6, 0.8)
        draws = dist.sample(50_000, seed=102)
        assert kstest(draws, dist.cdf).pvalue > 0.01

    def test_determinism(self):
        dist = BurrXII(2.0, 1.6, 0.8)
        np.testing.assert_array_equal(dist.sample(1000, seed=7), dist.sample(1000, seed=7))
        w = Weibull(3.0, 2.0)
        np.testing.assert_array_equal(w.sample(1000, seed=7), w.sample(1000, seed=7))

    def test_gamma_moment(self):
        fr = GammaFrailty(1.0, 19.0)
        draws = fr.sample(1_000_000, seed=103)
        se = (1.0 / 19.0) / math.sqrt(1_000_000)  # sd = mean for an exponential
        assert abs(draws.mean() - 1.0 / 19.0) < 3 * se

    def test_gamma_ks(self):
        from scipy.stats import gamma as gamma_dist

        fr = GammaFrailty(2.5, 0.7, gamma=1.2)
        draws = fr.sample(50_000, seed=104)
        assert kstest(draws - 1.2, gamma_dist(a=2.5, scale=1.0 / 0.7).cdf).pvalue > 0.01

    def test_sample_requires_positive_count(self):
        with pytest.raises(ValueError):
            Weibull(1.0, 1.0).sample(0, seed=1)


class TestFieldTimeSampling:
    def test_marginal_matches_analytic_cdf(self):
        ff = FrailtyField(534.0, 1.5, 19.0, 1.0, 0.0)
        draws = ff.sample(1_000_000, seed=105)
        grid = np.array([ff._quantile(p) for p in np.linspace(0.02, 0.98, 25)])
        ecdf = np.searchsorted(np.sort(draws), grid, side="right") / draws.size
        assert np.max(np.abs(ecdf - ff.cdf(grid))) < 0.005

    def test_degenerate_frailty_recovers_weibull(self):
        w = Weibull(2.0, 1.7)
        draws = sample_field_time(w, GammaFrailty(1.0e4, 1.0e4), 200_000, seed=106)
        grid = w.quantile(np.linspace(0.05, 0.95, 15))
        ecdf = np.searchsorted(np.sort(draws), grid, side="right") / draws.size
        assert np.max(np.abs(ecdf - w.cdf(grid))) < 0.01

    def test_large_threshold_shrinks_lifetimes(self):
        w = Weibull(10.0, 2.0)
        frail = GammaFrailty(0.01, 1.0, gamma=1000.0)
        field = sample_field_time(w, frail, 20_000, seed=107)
        baseline = w.sample(20_000, seed=108)
        assert np.median(field) / np.median(baseline) < 0.1

    def test_marginalization_monte_carlo(self):
        # averaging conditional survival over frailty draws reproduces the marginal
        ff = FrailtyField(1.2, 1.7, 0.8, 0.6, 0.35)
        z = ff.frailty().sample(1_000_000, seed=109)
        grid = np.array([ff._quantile(p) for p in np.linspace(0.05, 0.95, 13)])
        for t in grid:
            cond = np.exp(-z * (t / ff.alpha) ** ff.beta)
            s_hat = cond.mean()
            s_true = ff.sf(t)
            se = math.sqrt(max(s_true * (1 - s_true), 1e-12) / z.size)
            assert abs(s_hat - s_true) < 3 * se


class TestSEV:
    def test_cdf_quantile_roundtrip(self):
        from altfrail.distributions import sev_cdf, sev_pdf, sev_quantile

        p = np.linspace(0.01, 0.99, 50)
        np.testing.assert_allclose(sev_cdf(sev_quantile(p)), p, rtol=1e-12)
        total, _ = quad(sev_pdf, -np.inf, 10, limit=200)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_weibull_log_transform(self):
        # ln T for Weibull(alpha, beta) is SEV with location ln alpha, scale 1/beta
        from altfrail.distributions import sev_cdf

        w = Weibull(5.0, 2.0)
        t = np.array([1.0, 4.0, 9.0])
        z = (np.log(t) - math.log(5.0)) * 2.0
        np.testing.assert_allclose(w.cdf(t), sev_cdf(z), rtol=1e-13)
