import math

import numpy as np
import pytest

from levy_pricer.charexp import KoBoLParams, kobol_exponent
from levy_pricer.errors import DomainError
from levy_pricer.sampling import SampleGrid, best_approx_bound, best_approx_series, wks_interpolate

import oracles


def cardinal(values, sigma, N, x):
    """Direct evaluation of sum_k values[k] sinc(sigma x - pi k) with numpy's sinc."""
    k = np.arange(-N, N + 1)
    return np.sum(values * np.sinc((sigma * x - math.pi * k) / math.pi))


class TestGrid:
    def test_spacing(self):
        g = SampleGrid(5.0, np.zeros(61), 30)
        assert g.h * g.sigma == math.pi
        np.testing.assert_allclose(np.diff(g.nodes), g.h)

    def test_wrong_length(self):
        with pytest.raises(DomainError):
            SampleGrid(1.0, np.zeros(4), 2)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            SampleGrid(1.0, np.array([0, np.nan, 0]), 1)

    def test_read_only(self):
        g = SampleGrid(1.0, np.zeros(3), 1)
        with pytest.raises(ValueError):
            g.values[0] = 1.0


class TestInterpolate:
    def test_cardinal_function(self):
        sigma = 2.0
        g = SampleGrid.from_function(lambda x: np.sinc(sigma * x / math.pi), sigma, 40)
        assert wks_interpolate(g, math.pi / sigma * 3) == g.at(3)
        assert wks_interpolate(g, 0.0) == 1.0

    def test_exact_at_every_node(self):
        rng = np.random.default_rng(3)
        vals = rng.normal(size=41) + 1j * rng.normal(size=41)
        g = SampleGrid(5.0, vals, 20)
        out = wks_interpolate(g, g.nodes)
        assert np.array_equal(out, g.values)

    def test_random_series_off_node(self):
        rng = np.random.default_rng(11)
        vals = rng.normal(size=61)
        g = SampleGrid(5.0, vals, 30)
        assert abs(wks_interpolate(g, 0.337) - cardinal(vals, 5.0, 30, 0.337)) < 1e-12

    def test_oversampled(self):
        # sinc^2 of half the band limit lives in W_sigma; sampled at rate sigma it is recovered
        sigma = 4.0
        f = lambda x: np.sinc(sigma / 2 * x / (2 * math.pi)) ** 2
        g = SampleGrid.from_function(f, sigma, 4000)
        xs = np.linspace(-3.1, 3.3, 37)
        np.testing.assert_allclose(wks_interpolate(g, xs).real, f(xs), atol=1e-8)

    def test_paper_samples(self):
        """Samples of exp(-T psi(v + 3i)) on [-50, 50] at sigma = 9.316010503 reproduce it in between."""
        psi = kobol_exponent(KoBoLParams(**oracles.PAPER_MODEL))
        sigma = oracles.PAPER_SIGMA_E7
        N = math.ceil(50 * sigma / math.pi)
        f = lambda v: np.exp(-0.5 * psi(np.asarray(v) + 3j))
        g = SampleGrid.from_function(f, sigma, N)
        x = 1.234
        # WKS error is the best-approximation error plus the discarded samples beyond A
        allowance = 1e-7 + oracles.PAPER_EPS_TOTAL
        assert abs(wks_interpolate(g, x) - f(x)) < allowance


class TestBound:
    def test_paper_rows(self):
        # published value: sigma = 9.316010503 gives 1e-7, sigma = 4.710840317 gives 1e-3
        assert math.isclose(best_approx_bound(oracles.PAPER_M, 2.0, 9.316010503), 1e-7, rel_tol=1e-8)
        assert math.isclose(best_approx_bound(oracles.PAPER_M, 2.0, 4.710840317), 1e-3, rel_tol=1e-8)

    def test_inverse_of_sigma_formula_exact(self):
        M, delta = oracles.PAPER_M, 2.0
        sigma = math.log(4 * M / (math.pi * 1e-7)) / delta
        assert math.isclose(best_approx_bound(M, delta, sigma), 1e-7, rel_tol=1e-15)

    def test_sigma_zero(self):
        assert best_approx_bound(3.0, 1.0, 0.0) == 4 * 3.0 / math.pi

    def test_monotone_and_linear(self):
        b = [best_approx_bound(2.0, 1.5, s) for s in np.linspace(0, 10, 21)]
        assert all(y < x for x, y in zip(b, b[1:]))
        assert best_approx_bound(6.0, 1.5, 2.0) == pytest.approx(3 * best_approx_bound(2.0, 1.5, 2.0))

    @pytest.mark.xfail(strict=True, reason="leading term 1/cosh(x) ~ 2 exp(-x): the series is "
                                            "about twice the closed form, not below it")
    @pytest.mark.parametrize("sd", [1.0, 2.0, 5.0])
    def test_series_below_closed_bound(self, sd):
        assert best_approx_series(1.0, 1.0, sd) <= best_approx_bound(1.0, 1.0, sd)

    @pytest.mark.parametrize("sd", [1.0, 2.0, 5.0])
    def test_series_below_twice_closed_bound(self, sd):
        series = best_approx_series(1.0, 1.0, sd)
        assert 0 < series <= 2 * best_approx_bound(1.0, 1.0, sd)

    def test_series_ratio_tends_to_two(self):
        assert abs(best_approx_series(1.0, 1.0, 10.0) / best_approx_bound(1.0, 1.0, 10.0) - 2) < 1e-6

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            best_approx_bound(0.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            best_approx_bound(1.0, 1.0, -1.0)
