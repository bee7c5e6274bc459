import math

import pytest

from levy_pricer.budget import (ErrorBudget, NonDecayWarning, SamplingPlan, compute_M,
                                default_alpha_plus, make_plan, sigma_for_eps, tail_eps, tail_table)
from levy_pricer.charexp import KoBoLParams, kobol_exponent
from levy_pricer.errors import DomainError, PlanError, StripError
from levy_pricer.sampling import best_approx_bound

import oracles


@pytest.fixture(scope="module")
def psi():
    return kobol_exponent(KoBoLParams(**oracles.PAPER_MODEL))


class TestStripBound:
    def test_paper_value(self, psi):
        assert abs(compute_M(psi, 3.0, 2.0, 0.5) - oracles.PAPER_M) < 1e-6

    def test_tiny_time(self, psi):
        # exp(-T psi) is flat at 1, so the window never sees decay and says so
        with pytest.warns(NonDecayWarning):
            M = compute_M(psi, 3.0, 2.0, 1e-12)
        assert abs(M - 1.0) < 1e-9

    def test_against_grid_search(self, psi):
        assert abs(compute_M(psi, 3.0, 1.0, 0.5) - oracles.M_grid_search(psi, 3.0, 1.0, 0.5)) < 1e-6

    def test_strip_violation(self, psi):
        with pytest.raises(StripError):
            compute_M(psi, 3.0, 2.5, 0.5)

    def test_exact_calibrated_drift_misses_paper_digits(self, psi):
        # the table value needs the drift rounded to 0.019721
        exact = kobol_exponent(KoBoLParams(0.5, 1, 1, 5, -5, 0.019721267897230443))
        assert abs(compute_M(exact, 3.0, 2.0, 0.5) - oracles.PAPER_M) > 1e-6


class TestSigma:
    @pytest.mark.parametrize("row", oracles.SIGMA_TABLE, ids=lambda r: f"{r['epsilon']:g}")
    def test_table_row(self, row):
        sigma, h = sigma_for_eps(oracles.PAPER_M, 2.0, row["epsilon"])
        assert abs(sigma - row["sigma"]) < 1e-6
        assert abs(h - row["h"]) < 1e-6

    def test_round_trip(self):
        for row in oracles.SIGMA_TABLE:
            sigma, _ = sigma_for_eps(oracles.PAPER_M, 2.0, row["epsilon"])
            assert math.isclose(best_approx_bound(oracles.PAPER_M, 2.0, sigma), row["epsilon"], rel_tol=1e-12)

    def test_inverse(self):
        M = oracles.PAPER_M
        sigma, _ = sigma_for_eps(M, 2.0, 4 * M / math.pi * math.exp(-4.0))
        assert abs(sigma - 2.0) < 1e-14

    def test_eps_too_large(self):
        with pytest.raises(DomainError):
            sigma_for_eps(1.0, 1.0, 4 / math.pi)


class TestTail:
    @pytest.mark.parametrize("row", oracles.TAIL_TABLE, ids=lambda r: f"A{r['A']:g}")
    def test_table_row(self, psi, row):
        rel = 1e-2 if row["A"] >= 120 else 1e-3
        got = tail_eps(psi, 0.5, row["A"], 3.0)
        assert abs(got / row["eps_tail"] - 1) < rel

    def test_against_quadpack(self, psi):
        for A in (10.0, 50.0, 100.0):
            assert math.isclose(tail_eps(psi, 0.5, A, 3.0), oracles.tail_ref(A), rel_tol=1e-8)

    def test_decreasing_with_bounded_ratios(self, psi):
        vals = [v for _, v in tail_table(psi, 0.5, 3.0)]
        ratios = [b / a for a, b in zip(vals, vals[1:])]
        assert all(0.05 < q < 0.5 for q in ratios)

    def test_needs_positive_A(self, psi):
        with pytest.raises(DomainError):
            tail_eps(psi, 0.5, 0.0, 3.0)


class TestPlan:
    def test_paper_plan(self, psi):
        plan, budget = make_plan(psi, 0.5, 1e-7, 50.0)
        assert plan.N == oracles.PAPER_N
        assert abs(plan.sigma - oracles.PAPER_SIGMA_E7) < 1e-6
        assert abs(budget.eps_total / oracles.PAPER_EPS_TOTAL - 1) < 1e-3
        assert plan.alpha_plus + plan.delta == psi.upper

    def test_heuristic_default(self, psi):
        assert default_alpha_plus(5.0) == 3.0
        plan, _ = make_plan(psi, 0.5, 1e-7, 50.0)
        assert plan.alpha_plus == 3.0

    def test_composition(self, psi):
        _, budget = make_plan(psi, 0.5, 1e-4, 40.0, 3.0)
        assert math.isclose(budget.eps_total, 40 * 1e-4 / math.pi + 1.138385230e-4, rel_tol=1e-3)

    def test_zero_limit(self):
        b = ErrorBudget.compose(1e6, 0.0, 0.0, 1.0)
        assert b.eps_total == 0.0

    def test_term_count_rounding(self):
        plan = SamplingPlan.from_sigma(9.316010503, 50.0, 3.0)
        assert plan.N == 149
        assert math.ceil(50 * 9.316010503 / math.pi) == 149

    def test_inconsistent_plan(self):
        with pytest.raises(PlanError):
            SamplingPlan(9.316010503, math.pi / 9.316010503, 50.0, 148, 3.0)

    def test_refined(self):
        plan = SamplingPlan.from_sigma(9.316010503, 50.0, 3.0)
        fine = plan.refined()
        assert fine.sigma == 2 * plan.sigma and fine.N == math.ceil(50 * fine.sigma / math.pi)

    def test_serialises(self, psi):
        plan, budget = make_plan(psi, 0.5, 1e-7, 50.0)
        assert plan.to_dict()["N"] == 149
        assert set(budget.to_dict()) == {"eps_interp", "eps_tail", "eps_total", "M"}
