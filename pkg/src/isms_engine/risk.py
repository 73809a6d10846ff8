"""Risk scoring: impact, likelihood, composite score, rating bands, deadlines.

Everything here is a pure function over small ordinals. The composite score
is impact x likelihood x 4, the minimal product scaling that puts the
(5, 5) worst case exactly at the 100-point ceiling; if a different f(I, L)
is ever mandated, compute_risk_score is the single place to change.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum
from typing import Sequence

from .dates import add_months
from .errors import OutOfRange
from .model import check_range


class RiskBand(str, Enum):
    NEGLIGIBLE = "Negligible"
    MINOR = "Minor"
    MODERATE = "Moderate"
    SIGNIFICANT = "Significant"
    SEVERE = "Severe"


class DecisionBasis(str, Enum):
    RISK_APPETITE = "RiskAppetite"
    RISK_TOLERANCE = "RiskTolerance"
    MGMT_NOTIFY = "MgmtNotify"
    MGMT_TRIGGER = "MgmtTrigger"
    IMMEDIATE_ACTION = "ImmediateAction"


class HealthLabel(str, Enum):
    STRONG = "Strong"
    SATISFACTORY = "Satisfactory"
    FAIR = "Fair"
    MARGINAL = "Marginal"
    UNSATISFACTORY = "Unsatisfactory"


@dataclass(frozen=True)
class RiskRating:
    """One row of the rating scale: band, decision basis, treatment timeline."""

    band: RiskBand
    decision_basis: DecisionBasis
    timeline_months: int

    def to_doc(self) -> dict:
        return {
            "band": self.band.value,
            "decisionBasis": self.decision_basis.value,
            "timelineMonths": self.timeline_months,
        }


#: The rating scale: inclusive score ranges to management response rows.
RATING_SCALE: tuple[tuple[int, int, RiskRating], ...] = (
    (1, 19, RiskRating(RiskBand.NEGLIGIBLE, DecisionBasis.RISK_APPETITE, 12)),
    (20, 39, RiskRating(RiskBand.MINOR, DecisionBasis.RISK_TOLERANCE, 6)),
    (40, 59, RiskRating(RiskBand.MODERATE, DecisionBasis.MGMT_NOTIFY, 3)),
    (60, 79, RiskRating(RiskBand.SIGNIFICANT, DecisionBasis.MGMT_TRIGGER, 1)),
    (80, 100, RiskRating(RiskBand.SEVERE, DecisionBasis.IMMEDIATE_ACTION, 1)),
)


@dataclass(frozen=True)
class HealthBand:
    band: HealthLabel
    percent: float

    def to_doc(self) -> dict:
        return {"band": self.band.value, "percent": self.percent}


def compute_impact(asset_criticality: int, business_loss: int) -> int:
    """Impact = ceiling mean of asset criticality and estimated business loss."""
    check_range("assetCriticality", asset_criticality, 1, 5)
    check_range("businessLoss", business_loss, 1, 5)
    return -((asset_criticality + business_loss) // -2)


def compute_likelihood(threat_frequency: int, best_control_effectiveness: int) -> int:
    """Likelihood = threat frequency offset down by the best existing control, clamped to 1..5."""
    check_range("threatFrequency", threat_frequency, 1, 5)
    check_range("bestControlEffectiveness", best_control_effectiveness, 0, 4)
    return max(1, min(5, threat_frequency - best_control_effectiveness))


def compute_risk_score(impact: int, likelihood: int) -> int:
    """Composite score on the 1..100 scale; strictly monotone in each argument."""
    check_range("impact", impact, 1, 5)
    check_range("likelihood", likelihood, 1, 5)
    return impact * likelihood * 4


def compute_residual_risk(post_control_impact: int, post_control_likelihood: int) -> int:
    """Score the post-treatment ratings; stored alongside the base score, never over it."""
    return compute_risk_score(post_control_impact, post_control_likelihood)


def rating_for_score(score: int) -> RiskRating:
    """Map a 1..100 score to its rating row; the five bands partition the scale."""
    check_range("score", score, 1, 100)
    for low, high, rating in RATING_SCALE:
        if low <= score <= high:
            return rating
    raise OutOfRange(f"score {score} not covered by the rating scale")  # pragma: no cover


def treatment_deadline(rating: RiskRating, assessment_date: date) -> date:
    """Assessment date advanced by the rating's timeline in calendar months."""
    return add_months(assessment_date, rating.timeline_months)


#: Half-open percent intervals, lower bound inclusive.
HEALTH_BANDS: tuple[tuple[float, HealthLabel], ...] = (
    (30.0, HealthLabel.UNSATISFACTORY),
    (25.0, HealthLabel.MARGINAL),
    (16.0, HealthLabel.FAIR),
    (8.0, HealthLabel.SATISFACTORY),
    (0.0, HealthLabel.STRONG),
)


def health_label_for_percent(percent: float) -> HealthLabel:
    for lower, label in HEALTH_BANDS:
        if percent >= lower:
            return label
    return HealthLabel.STRONG


def compute_portfolio_health(scores: Sequence[int]) -> HealthBand:
    """Portfolio risk percentage: mean score over the 100-point maximum.

    An empty portfolio is vacuously Strong at 0%.
    """
    if not scores:
        return HealthBand(HealthLabel.STRONG, 0.0)
    percent = 100.0 * sum(scores) / (100.0 * len(scores))
    return HealthBand(health_label_for_percent(percent), percent)


def accept_allowed(band: RiskBand, allow_minor: bool = False) -> bool:
    """Gate for the Accept strategy: Negligible only, optionally also Minor."""
    if band is RiskBand.NEGLIGIBLE:
        return True
    return allow_minor and band is RiskBand.MINOR
