"""Scoring arithmetic against independent oracles.

The banding oracle below is written straight from the documented rating
scale, separately from the production table, so the exhaustive sweep is an
actual cross-check and not a tautology.
"""

from __future__ import annotations

import math
from datetime import date

import pytest
from dateutil.relativedelta import relativedelta
from hypothesis import given
from hypothesis import strategies as st

from isms_engine import risk
from isms_engine.errors import OutOfRange


def oracle_band(score: int) -> tuple[str, str, int]:
    if 1 <= score <= 19:
        return ("Negligible", "RiskAppetite", 12)
    if 20 <= score <= 39:
        return ("Minor", "RiskTolerance", 6)
    if 40 <= score <= 59:
        return ("Moderate", "MgmtNotify", 3)
    if 60 <= score <= 79:
        return ("Significant", "MgmtTrigger", 1)
    if 80 <= score <= 100:
        return ("Severe", "ImmediateAction", 1)
    raise AssertionError(score)


def oracle_health(percent: float) -> str:
    if percent >= 30:
        return "Unsatisfactory"
    if percent >= 25:
        return "Marginal"
    if percent >= 16:
        return "Fair"
    if percent >= 8:
        return "Satisfactory"
    return "Strong"


class TestImpact:
    def test_ceiling_mean(self):
        # oracle: math.ceil over the plain mean
        for crit in range(1, 6):
            for loss in range(1, 6):
                assert risk.compute_impact(crit, loss) == math.ceil((crit + loss) / 2)

    def test_known_values(self):
        assert risk.compute_impact(4, 3) == 4
        assert risk.compute_impact(5, 5) == 5
        assert risk.compute_impact(1, 1) == 1
        assert risk.compute_impact(1, 2) == 2

    @pytest.mark.parametrize("crit,loss", [(0, 3), (6, 3), (3, 0), (3, 6)])
    def test_range_checked(self, crit, loss):
        with pytest.raises(OutOfRange):
            risk.compute_impact(crit, loss)


class TestLikelihood:
    def test_offset_and_clamp(self):
        for freq in range(1, 6):
            for eff in range(0, 5):
                expected = min(5, max(1, freq - eff))
                assert risk.compute_likelihood(freq, eff) == expected

    def test_known_values(self):
        assert risk.compute_likelihood(4, 2) == 2
        assert risk.compute_likelihood(1, 4) == 1
        assert risk.compute_likelihood(5, 0) == 5

    def test_effectiveness_range(self):
        with pytest.raises(OutOfRange):
            risk.compute_likelihood(3, 5)
        with pytest.raises(OutOfRange):
            risk.compute_likelihood(3, -1)


class TestScore:
    def test_all_pairs_in_range_with_max_at_corner(self):
        scores = {
            (i, l): risk.compute_risk_score(i, l)
            for i in range(1, 6)
            for l in range(1, 6)
        }
        assert all(1 <= s <= 100 for s in scores.values())
        assert max(scores.values()) == 100
        assert scores[(5, 5)] == 100
        assert scores[(1, 1)] == 4
        assert scores[(3, 4)] == 48

    def test_residual_same_formula(self):
        assert risk.compute_residual_risk(2, 2) == 16
        for i in range(1, 6):
            for l in range(1, 6):
                assert risk.compute_residual_risk(i, l) == risk.compute_risk_score(i, l)

    @given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.integers(1, 5))
    def test_monotone_in_each_argument(self, i1, i2, l1, l2):
        if i1 <= i2 and l1 <= l2:
            assert risk.compute_risk_score(i1, l1) <= risk.compute_risk_score(i2, l2)


class TestRatingScale:
    def test_exhaustive_against_oracle(self):
        for score in range(1, 101):
            rating = risk.rating_for_score(score)
            assert (
                rating.band.value,
                rating.decision_basis.value,
                rating.timeline_months,
            ) == oracle_band(score)

    def test_rejects_out_of_scale(self):
        for score in (0, 101, -5):
            with pytest.raises(OutOfRange):
                risk.rating_for_score(score)

    def test_deadline_uses_calendar_months(self):
        # oracle: dateutil's relativedelta
        rating = risk.rating_for_score(50)  # Moderate, 3 months
        assert rating.timeline_months == 3
        start = date(2024, 11, 30)
        assert risk.treatment_deadline(rating, start) == start + relativedelta(months=3)
        assert risk.treatment_deadline(rating, start) == date(2025, 2, 28)

    def test_severe_and_significant_are_one_month(self):
        assert risk.treatment_deadline(risk.rating_for_score(100), date(2024, 3, 1)) == date(2024, 4, 1)
        assert risk.treatment_deadline(risk.rating_for_score(60), date(2024, 1, 31)) == date(2024, 2, 29)


class TestPortfolioHealth:
    @pytest.mark.parametrize(
        "percent,label",
        [
            (0, "Strong"),
            (7.99, "Strong"),
            (8, "Satisfactory"),
            (15.99, "Satisfactory"),
            (16, "Fair"),
            (24.99, "Fair"),
            (25, "Marginal"),
            (29.99, "Marginal"),
            (30, "Unsatisfactory"),
            (100, "Unsatisfactory"),
        ],
    )
    def test_band_boundaries(self, percent, label):
        assert risk.health_label_for_percent(percent).value == label
        assert oracle_health(percent) == label

    def test_empty_portfolio(self):
        health = risk.compute_portfolio_health([])
        assert health.percent == 0.0
        assert health.band.value == "Strong"

    def test_mean_over_maximum(self):
        health = risk.compute_portfolio_health([4, 4, 4, 4])
        assert health.percent == 4.0
        assert health.band.value == "Strong"
        health = risk.compute_portfolio_health([100, 0])  # 0 impossible in practice; arithmetic check only
        assert health.percent == 50.0

    @given(st.lists(st.integers(4, 100), min_size=1, max_size=40))
    def test_label_always_matches_oracle(self, scores):
        health = risk.compute_portfolio_health(scores)
        assert health.band.value == oracle_health(health.percent)


class TestAcceptGate:
    def test_negligible_only_by_default(self):
        assert risk.accept_allowed(risk.RiskBand.NEGLIGIBLE)
        for band in (risk.RiskBand.MINOR, risk.RiskBand.MODERATE,
                     risk.RiskBand.SIGNIFICANT, risk.RiskBand.SEVERE):
            assert not risk.accept_allowed(band)

    def test_minor_opt_in(self):
        assert risk.accept_allowed(risk.RiskBand.MINOR, allow_minor=True)
        assert not risk.accept_allowed(risk.RiskBand.MODERATE, allow_minor=True)
