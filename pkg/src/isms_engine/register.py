"""Risk register: assessment cycles, risk entries, treatment plans, approvals,
monitoring notes and the management review report.

Transitions are pure functions over immutable records; the engine resolves
references against the store, applies these, and persists the results. Risk
scores are always derived from stored impact and likelihood, never trusted
from input.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from datetime import date, datetime
from enum import Enum
from typing import Iterable, Optional, Sequence

from . import risk
from .dates import format_date, format_timestamp, parse_date, parse_timestamp
from .errors import (
    AcceptNotAllowed,
    CycleClosed,
    CycleStepTooEarly,
    Forbidden,
    GateNotMet,
    InvalidScope,
    InvalidTeam,
    PlanExists,
    TreatmentIncomplete,
    ValidationError,
)
from .model import (
    Actor,
    Asset,
    Control,
    ControlStatus,
    Role,
    Threat,
    check_range,
    check_text,
    coerce_enum,
    validate_assessment_team,
)

FIRST_STEP = 1
RISK_ENTRY_STEP = 8
FINAL_STEP = 12

TREATMENT_PLANNER_ROLES = (Role.INFOSEC_OFFICIAL, Role.HEAD_OF_IT, Role.CISO)


class CycleTrigger(str, Enum):
    ANNUAL = "Annual"
    ON_DEMAND = "OnDemand"


class CycleStatus(str, Enum):
    OPEN = "Open"
    CLOSED = "Closed"


class TreatmentStrategy(str, Enum):
    ACCEPT = "Accept"
    REDUCE = "Reduce"
    TRANSFER = "Transfer"
    AVOID = "Avoid"


class TreatmentStatus(str, Enum):
    PLANNED = "Planned"
    IN_PROGRESS = "InProgress"
    DONE = "Done"


class ApprovalMedium(str, Enum):
    ELECTRONIC = "Electronic"
    HARD_COPY = "HardCopy"


class NoteKind(str, Enum):
    PROFILE_REVIEW = "ProfileReview"
    MITIGATION_QUALITY = "MitigationQuality"
    LOSS_EXPOSURE = "LossExposure"


@dataclass(frozen=True)
class AssessmentCycle:
    id: str
    scope_statement: str
    team: tuple[Actor, ...]
    started_at: datetime
    trigger: CycleTrigger
    current_step: int = FIRST_STEP
    status: CycleStatus = CycleStatus.OPEN
    boundary_approved_by: Optional[Actor] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "team", tuple(self.team))
        object.__setattr__(
            self, "trigger", coerce_enum(CycleTrigger, self.trigger, "trigger")
        )
        object.__setattr__(
            self, "status", coerce_enum(CycleStatus, self.status, "status")
        )

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "scopeStatement": self.scope_statement,
            "team": [m.to_doc() for m in self.team],
            "startedAt": format_timestamp(self.started_at),
            "trigger": self.trigger.value,
            "currentStep": self.current_step,
            "status": self.status.value,
        }
        if self.boundary_approved_by is not None:
            doc["boundaryApprovedBy"] = self.boundary_approved_by.to_doc()
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "AssessmentCycle":
        return cls(
            id=doc["id"],
            scope_statement=doc["scopeStatement"],
            team=tuple(Actor.from_doc(m) for m in doc["team"]),
            started_at=parse_timestamp(doc["startedAt"]),
            trigger=doc["trigger"],
            current_step=doc["currentStep"],
            status=doc["status"],
            boundary_approved_by=(
                Actor.from_doc(doc["boundaryApprovedBy"])
                if "boundaryApprovedBy" in doc
                else None
            ),
        )


@dataclass(frozen=True)
class TreatmentPlan:
    strategy: TreatmentStrategy
    rationale: str
    controls: tuple[str, ...]
    due_date: date
    status: TreatmentStatus = TreatmentStatus.PLANNED

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "strategy", coerce_enum(TreatmentStrategy, self.strategy, "strategy")
        )
        object.__setattr__(
            self, "status", coerce_enum(TreatmentStatus, self.status, "status")
        )
        object.__setattr__(self, "controls", tuple(self.controls))

    def to_doc(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "rationale": self.rationale,
            "controls": list(self.controls),
            "dueDate": format_date(self.due_date),
            "status": self.status.value,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "TreatmentPlan":
        return cls(
            strategy=doc["strategy"],
            rationale=doc["rationale"],
            controls=tuple(doc["controls"]),
            due_date=parse_date(doc["dueDate"]),
            status=doc["status"],
        )


@dataclass(frozen=True)
class OwnerApproval:
    actor: Actor
    at: datetime
    medium: ApprovalMedium

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "medium", coerce_enum(ApprovalMedium, self.medium, "medium")
        )
        if self.actor.role is not Role.RISK_OWNER:
            raise Forbidden(self.actor.role.value, Role.RISK_OWNER.value)

    def to_doc(self) -> dict:
        return {
            "actor": self.actor.to_doc(),
            "at": format_timestamp(self.at),
            "medium": self.medium.value,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "OwnerApproval":
        return cls(
            actor=Actor.from_doc(doc["actor"]),
            at=parse_timestamp(doc["at"]),
            medium=doc["medium"],
        )


@dataclass(frozen=True)
class RiskEntry:
    id: str
    cycle_id: str
    asset_id: str
    threat_id: str
    vulnerability_id: str
    business_loss: int
    impact: int
    likelihood: int
    base_score: int
    created_at: datetime
    treatment: Optional[TreatmentPlan] = None
    residual_score: Optional[int] = None
    owner_approval: Optional[OwnerApproval] = None

    def __post_init__(self) -> None:
        check_range("businessLoss", self.business_loss, 1, 5)
        check_range("impact", self.impact, 1, 5)
        check_range("likelihood", self.likelihood, 1, 5)
        if self.base_score != risk.compute_risk_score(self.impact, self.likelihood):
            raise ValidationError(
                "baseScore is not the score of the stored impact and likelihood"
            )
        if self.residual_score is not None:
            check_range("residualScore", self.residual_score, 1, 100)
            if self.treatment is None:
                raise ValidationError("residual risk requires a treatment plan")

    @property
    def base_rating(self) -> risk.RiskRating:
        return risk.rating_for_score(self.base_score)

    @property
    def effective_score(self) -> int:
        """Residual score once recorded, base score until then."""
        return self.residual_score if self.residual_score is not None else self.base_score

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "cycleId": self.cycle_id,
            "assetId": self.asset_id,
            "threatId": self.threat_id,
            "vulnerabilityId": self.vulnerability_id,
            "businessLoss": self.business_loss,
            "impact": self.impact,
            "likelihood": self.likelihood,
            "baseScore": self.base_score,
            "baseRating": self.base_rating.to_doc(),
            "createdAt": format_timestamp(self.created_at),
        }
        if self.treatment is not None:
            doc["treatment"] = self.treatment.to_doc()
        if self.residual_score is not None:
            doc["residualScore"] = self.residual_score
        if self.owner_approval is not None:
            doc["ownerApproval"] = self.owner_approval.to_doc()
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "RiskEntry":
        return cls(
            id=doc["id"],
            cycle_id=doc["cycleId"],
            asset_id=doc["assetId"],
            threat_id=doc["threatId"],
            vulnerability_id=doc["vulnerabilityId"],
            business_loss=doc["businessLoss"],
            impact=doc["impact"],
            likelihood=doc["likelihood"],
            base_score=doc["baseScore"],
            created_at=parse_timestamp(doc["createdAt"]),
            treatment=(
                TreatmentPlan.from_doc(doc["treatment"]) if "treatment" in doc else None
            ),
            residual_score=doc.get("residualScore"),
            owner_approval=(
                OwnerApproval.from_doc(doc["ownerApproval"])
                if "ownerApproval" in doc
                else None
            ),
        )


@dataclass(frozen=True)
class MonitoringNote:
    id: str
    risk_entry_id: str
    at: datetime
    author: Actor
    kind: NoteKind
    text: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", coerce_enum(NoteKind, self.kind, "kind"))
        check_text("text", self.text)

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "riskEntryId": self.risk_entry_id,
            "at": format_timestamp(self.at),
            "author": self.author.to_doc(),
            "kind": self.kind.value,
            "text": self.text,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "MonitoringNote":
        return cls(
            id=doc["id"],
            risk_entry_id=doc["riskEntryId"],
            at=parse_timestamp(doc["at"]),
            author=Actor.from_doc(doc["author"]),
            kind=doc["kind"],
            text=doc["text"],
        )


def open_cycle(
    *,
    id: str,
    scope: str,
    team: Sequence[Actor],
    trigger: CycleTrigger | str,
    started_at: datetime,
) -> AssessmentCycle:
    """Open an assessment cycle at step 1 with a fully staffed team."""
    if not isinstance(scope, str) or not scope.strip():
        raise InvalidScope("cycle scope statement must not be empty")
    validation = validate_assessment_team(team)
    if not validation.valid:
        raise InvalidTeam(validation.missing)
    return AssessmentCycle(
        id=id,
        scope_statement=scope,
        team=tuple(team),
        started_at=started_at,
        trigger=coerce_enum(CycleTrigger, trigger, "trigger"),
    )


def approve_boundary(cycle: AssessmentCycle, approver: Actor) -> AssessmentCycle:
    """Record senior management's sign-off on the assessment boundary."""
    if cycle.status is CycleStatus.CLOSED:
        raise CycleClosed(f"cycle {cycle.id} is closed")
    if approver.role is not Role.TOP_MANAGEMENT:
        raise Forbidden(approver.role.value, Role.TOP_MANAGEMENT.value)
    if cycle.boundary_approved_by is not None:
        raise ValidationError(f"cycle {cycle.id} boundary is already approved")
    return replace(cycle, boundary_approved_by=approver)


def advance_step(
    cycle: AssessmentCycle,
    actor: Actor,
    evidence: str,
    entries: Sequence[RiskEntry] = (),
) -> AssessmentCycle:
    """Move the cycle forward one step, enforcing the hard gates.

    Step 3 is unreachable without boundary approval and step 12 without
    owner approval on every entry; reaching step 12 closes the cycle.
    """
    if cycle.status is CycleStatus.CLOSED:
        raise CycleClosed(f"cycle {cycle.id} is closed")
    check_text("evidence", evidence)
    next_step = cycle.current_step + 1
    if next_step > FINAL_STEP:  # pragma: no cover - closed implies step 12
        raise CycleClosed(f"cycle {cycle.id} has completed all steps")
    if next_step == 2 and not validate_assessment_team(cycle.team).valid:
        raise GateNotMet(2, "assessment team is not validly staffed")
    if next_step == 3 and cycle.boundary_approved_by is None:
        raise GateNotMet(3, "boundary approval missing")
    if next_step == FINAL_STEP:
        for entry in sorted(entries, key=lambda e: e.id):
            if entry.owner_approval is None:
                raise GateNotMet(FINAL_STEP, f"entry {entry.id} lacks owner approval")
    return replace(
        cycle,
        current_step=next_step,
        status=CycleStatus.CLOSED if next_step == FINAL_STEP else cycle.status,
    )


def best_existing_effectiveness(asset: Asset, controls: Iterable[Control]) -> int:
    """Strongest Existing control on the asset; Planned controls do not count."""
    best = 0
    for control in controls:
        if control.status is ControlStatus.EXISTING and asset.id in control.applies_to:
            best = max(best, control.effectiveness)
    return best


def build_risk_entry(
    *,
    id: str,
    cycle: AssessmentCycle,
    asset: Asset,
    threat: Threat,
    vulnerability_id: str,
    business_loss: int,
    controls: Iterable[Control],
    created_at: datetime,
) -> RiskEntry:
    """Assess one asset/threat/vulnerability combination into a register entry."""
    if cycle.status is CycleStatus.CLOSED:
        raise CycleClosed(f"cycle {cycle.id} is closed")
    if cycle.current_step < RISK_ENTRY_STEP:
        raise CycleStepTooEarly(
            f"risk entries require step {RISK_ENTRY_STEP}; cycle is at step {cycle.current_step}"
        )
    impact = risk.compute_impact(asset.criticality, business_loss)
    likelihood = risk.compute_likelihood(
        threat.frequency, best_existing_effectiveness(asset, controls)
    )
    return RiskEntry(
        id=id,
        cycle_id=cycle.id,
        asset_id=asset.id,
        threat_id=threat.id,
        vulnerability_id=vulnerability_id,
        business_loss=business_loss,
        impact=impact,
        likelihood=likelihood,
        base_score=risk.compute_risk_score(impact, likelihood),
        created_at=created_at,
    )


def plan_treatment(
    entry: RiskEntry,
    strategy: TreatmentStrategy | str,
    rationale: str,
    control_ids: Sequence[str],
    actor: Actor,
    planned_on: date,
    allow_accept_minor: bool = False,
) -> RiskEntry:
    """Attach a treatment plan; the due date follows the rating's timeline."""
    strategy = coerce_enum(TreatmentStrategy, strategy, "strategy")
    if actor.role not in TREATMENT_PLANNER_ROLES:
        raise Forbidden(
            actor.role.value, " or ".join(r.value for r in TREATMENT_PLANNER_ROLES)
        )
    if entry.treatment is not None:
        raise PlanExists(f"entry {entry.id} already has a treatment plan")
    rating = entry.base_rating
    if strategy is TreatmentStrategy.ACCEPT and not risk.accept_allowed(
        rating.band, allow_accept_minor
    ):
        raise AcceptNotAllowed(rating.band)
    plan = TreatmentPlan(
        strategy=strategy,
        rationale=rationale,
        controls=tuple(control_ids),
        due_date=risk.treatment_deadline(rating, planned_on),
    )
    return replace(entry, treatment=plan)


def set_treatment_status(
    entry: RiskEntry, status: TreatmentStatus | str, actor: Actor
) -> RiskEntry:
    """Update plan progress; same roles as planning."""
    status = coerce_enum(TreatmentStatus, status, "status")
    if actor.role not in TREATMENT_PLANNER_ROLES:
        raise Forbidden(
            actor.role.value, " or ".join(r.value for r in TREATMENT_PLANNER_ROLES)
        )
    if entry.treatment is None:
        raise TreatmentIncomplete(f"entry {entry.id} has no treatment plan")
    return replace(entry, treatment=replace(entry.treatment, status=status))


def record_residual_and_approve(
    entry: RiskEntry,
    post_impact: int,
    post_likelihood: int,
    approver: Actor,
    medium: ApprovalMedium | str,
    at: datetime,
) -> RiskEntry:
    """Score the post-treatment risk and record the Risk Owner's sign-off.

    The base score stays untouched; residual is stored alongside it.
    """
    if approver.role is not Role.RISK_OWNER:
        raise Forbidden(approver.role.value, Role.RISK_OWNER.value)
    if entry.treatment is None or entry.treatment.status is not TreatmentStatus.DONE:
        raise TreatmentIncomplete(
            f"entry {entry.id} treatment must be Done before residual approval"
        )
    residual = risk.compute_residual_risk(post_impact, post_likelihood)
    approval = OwnerApproval(actor=approver, at=at, medium=medium)
    return replace(entry, residual_score=residual, owner_approval=approval)


def generate_management_review_report(
    cycles: Sequence[AssessmentCycle],
    entries: Sequence[RiskEntry],
    notes: Sequence[MonitoringNote],
    as_of: datetime,
) -> dict:
    """Assemble the management review document from register state.

    Pure with respect to its inputs: identical state and as-of produce an
    identical report, so serialized reports are byte-stable.
    """
    ordered = sorted(entries, key=lambda e: e.id)
    health = risk.compute_portfolio_health([e.effective_score for e in ordered])

    by_band: dict[str, list[str]] = {band.value: [] for band in risk.RiskBand}
    for entry in ordered:
        by_band[entry.base_rating.band.value].append(entry.id)

    as_of_date = as_of.date()
    overdue = [
        {
            "entryId": e.id,
            "dueDate": format_date(e.treatment.due_date),
            "strategy": e.treatment.strategy.value,
            "band": e.base_rating.band.value,
        }
        for e in ordered
        if e.treatment is not None
        and e.treatment.status is not TreatmentStatus.DONE
        and e.treatment.due_date < as_of_date
    ]

    note_counts: dict[str, int] = {e.id: 0 for e in ordered}
    for note in notes:
        if note.risk_entry_id in note_counts:
            note_counts[note.risk_entry_id] += 1

    residual_increases = [
        {"entryId": e.id, "baseScore": e.base_score, "residualScore": e.residual_score}
        for e in ordered
        if e.residual_score is not None and e.residual_score > e.base_score
    ]

    open_cycles = [
        {
            "id": c.id,
            "currentStep": c.current_step,
            "scopeStatement": c.scope_statement,
            "trigger": c.trigger.value,
        }
        for c in sorted(cycles, key=lambda c: c.id)
        if c.status is CycleStatus.OPEN
    ]

    return {
        "asOf": format_timestamp(as_of),
        "portfolioHealth": health.to_doc(),
        "entriesByBand": by_band,
        "imminentCrystallisation": overdue,
        "monitoringNoteCounts": note_counts,
        "residualIncreases": residual_increases,
        "openCycles": open_cycles,
        "entryCount": len(ordered),
    }


# CSV register exchange

CSV_COLUMNS = (
    "id",
    "asset",
    "threat",
    "vulnerability",
    "impact",
    "likelihood",
    "score",
    "rating",
    "strategy",
    "dueDate",
    "residual",
    "approvedBy",
    "approvedAt",
)


def risks_to_csv(entries: Sequence[RiskEntry]) -> str:
    """Render register entries as the canonical CSV exchange format."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for e in sorted(entries, key=lambda e: e.id):
        treatment = e.treatment
        approval = e.owner_approval
        writer.writerow(
            [
                e.id,
                e.asset_id,
                e.threat_id,
                e.vulnerability_id,
                e.impact,
                e.likelihood,
                e.base_score,
                e.base_rating.band.value,
                treatment.strategy.value if treatment else "",
                format_date(treatment.due_date) if treatment else "",
                e.residual_score if e.residual_score is not None else "",
                approval.actor.id if approval else "",
                format_timestamp(approval.at) if approval else "",
            ]
        )
    return out.getvalue()


def entry_from_row(
    row: dict, cycle_id: str, created_at: datetime
) -> RiskEntry:
    """Build a register entry from one CSV/JSON exchange row.

    The score column must agree with the recomputed impact x likelihood
    score; rows that disagree are invalid. Imported treatment plans keep
    their recorded due date since the original planning date is not carried
    by the format.
    """
    for column in ("id", "asset", "threat", "vulnerability"):
        if not str(row.get(column, "")).strip():
            raise ValidationError(f"missing required column {column!r}")
    impact = _int_field(row, "impact")
    likelihood = _int_field(row, "likelihood")
    score = _int_field(row, "score")
    if score != risk.compute_risk_score(impact, likelihood):
        raise ValidationError(
            f"score {score} does not match impact {impact} x likelihood {likelihood}"
        )
    rating = risk.rating_for_score(score)
    stated_band = str(row.get("rating", "")).strip()
    if stated_band and stated_band != rating.band.value:
        raise ValidationError(
            f"rating {stated_band!r} does not match computed {rating.band.value!r}"
        )

    treatment = None
    strategy = str(row.get("strategy", "")).strip()
    if strategy:
        due = str(row.get("dueDate", "")).strip()
        if not due:
            raise ValidationError("strategy present but dueDate missing")
        treatment = TreatmentPlan(
            strategy=strategy,
            rationale="imported",
            controls=(),
            due_date=parse_date(due),
        )

    residual = str(row.get("residual", "")).strip()
    residual_score = int(residual) if residual else None

    approval = None
    approved_by = str(row.get("approvedBy", "")).strip()
    if approved_by:
        approved_at = str(row.get("approvedAt", "")).strip()
        if not approved_at:
            raise ValidationError("approvedBy present but approvedAt missing")
        approval = OwnerApproval(
            actor=Actor(approved_by, approved_by, Role.RISK_OWNER),
            at=parse_timestamp(approved_at),
            medium=ApprovalMedium.ELECTRONIC,
        )

    return RiskEntry(
        id=str(row["id"]).strip(),
        cycle_id=cycle_id,
        asset_id=str(row["asset"]).strip(),
        threat_id=str(row["threat"]).strip(),
        vulnerability_id=str(row["vulnerability"]).strip(),
        business_loss=impact,  # loss is not carried by the format; impact is the bound
        impact=impact,
        likelihood=likelihood,
        base_score=score,
        created_at=created_at,
        treatment=treatment,
        residual_score=residual_score,
        owner_approval=approval,
    )


def _int_field(row: dict, column: str) -> int:
    raw = row.get(column, "")
    try:
        return int(str(raw).strip())
    except (TypeError, ValueError):
        raise ValidationError(f"column {column!r} must be an integer, got {raw!r}")


def parse_risk_csv(text: str) -> tuple[list[tuple[int, dict]], list[tuple[int, str]]]:
    """Split CSV text into row dicts and per-line header problems.

    Returns (rows, errors); a missing or wrong header is a single fatal
    error on line 1.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return [], [(1, "missing header row")]
    if tuple(h.strip() for h in header) != CSV_COLUMNS:
        return [], [(1, f"header must be exactly: {','.join(CSV_COLUMNS)}")]
    rows = []
    for line_no, values in enumerate(reader, start=2):
        if not values or all(not v.strip() for v in values):
            continue
        rows.append((line_no, dict(zip(CSV_COLUMNS, values))))
    return rows, []
