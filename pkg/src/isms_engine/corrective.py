"""Nonconformity and corrective-action state machine.

A record moves through seven steps, one at a time, under a 90-day clock that
only ever extends. Step 5 must reference a risk review, step 7 is reserved
for the CISO, and a Top-Management dispensation freezes a record for good.
All transitions are pure: they return a new record and never mutate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date, datetime, timedelta
from enum import Enum
from typing import Iterable, Optional, Sequence

from .dates import format_date, format_timestamp, parse_date, parse_timestamp
from .errors import (
    AlreadyClosed,
    EmptyDescription,
    Forbidden,
    InvalidExtension,
    RiskReviewMissing,
    StepSkipped,
    ValidationError,
)
from .model import Actor, Role, check_text, coerce_enum

CA_DEADLINE_DAYS = 90
FINAL_STEP = 7
RISK_REVIEW_STEP = 5


class NcSource(str, Enum):
    COMPLAINT_INTERNAL = "ComplaintInternal"
    COMPLAINT_EXTERNAL = "ComplaintExternal"
    PROCESS_FAILURE = "ProcessFailure"
    INTERNAL_AUDIT = "InternalAudit"
    MANAGEMENT_REVIEW = "ManagementReview"
    OTHER = "Other"


class NcStatus(str, Enum):
    OPEN = "Open"
    CLOSED = "Closed"
    DISPENSED = "Dispensed"


class DeadlineState(str, Enum):
    ON_TRACK = "OnTrack"
    OVERDUE = "Overdue"


@dataclass(frozen=True)
class StepRecord:
    step: int
    actor: Actor
    at: datetime
    evidence: str
    risk_review_ref: Optional[str] = None

    def __post_init__(self) -> None:
        if not 1 <= self.step <= FINAL_STEP:
            raise ValidationError(f"step must be 1..{FINAL_STEP}, got {self.step}")
        check_text("evidence", self.evidence)
        if self.step == RISK_REVIEW_STEP and not self.risk_review_ref:
            raise RiskReviewMissing(
                f"step {RISK_REVIEW_STEP} requires a risk review reference"
            )

    def to_doc(self) -> dict:
        doc = {
            "step": self.step,
            "actor": self.actor.to_doc(),
            "at": format_timestamp(self.at),
            "evidence": self.evidence,
        }
        if self.risk_review_ref is not None:
            doc["riskReviewRef"] = self.risk_review_ref
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "StepRecord":
        return cls(
            step=doc["step"],
            actor=Actor.from_doc(doc["actor"]),
            at=parse_timestamp(doc["at"]),
            evidence=doc["evidence"],
            risk_review_ref=doc.get("riskReviewRef"),
        )


@dataclass(frozen=True)
class ExtensionRecord:
    requested_at: datetime
    justification: str
    new_deadline: date
    notified_ciso: bool = True

    def __post_init__(self) -> None:
        check_text("justification", self.justification)
        if not self.notified_ciso:
            raise ValidationError("extensions must notify the CISO")

    def to_doc(self) -> dict:
        return {
            "requestedAt": format_timestamp(self.requested_at),
            "justification": self.justification,
            "newDeadline": format_date(self.new_deadline),
            "notifiedCISO": self.notified_ciso,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ExtensionRecord":
        return cls(
            requested_at=parse_timestamp(doc["requestedAt"]),
            justification=doc["justification"],
            new_deadline=parse_date(doc["newDeadline"]),
            notified_ciso=doc["notifiedCISO"],
        )


@dataclass(frozen=True)
class DispensationRecord:
    approver: Actor
    at: datetime
    reason: str

    def __post_init__(self) -> None:
        check_text("reason", self.reason)
        if self.approver.role is not Role.TOP_MANAGEMENT:
            raise Forbidden(self.approver.role.value, Role.TOP_MANAGEMENT.value)

    def to_doc(self) -> dict:
        return {
            "approver": self.approver.to_doc(),
            "at": format_timestamp(self.at),
            "reason": self.reason,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "DispensationRecord":
        return cls(
            approver=Actor.from_doc(doc["approver"]),
            at=parse_timestamp(doc["at"]),
            reason=doc["reason"],
        )


@dataclass(frozen=True)
class NonconformityRecord:
    id: str
    description: str
    source: NcSource
    reported_by: Actor
    reported_at: datetime
    deadline: date
    current_step: int = 0
    steps: tuple[StepRecord, ...] = ()
    extensions: tuple[ExtensionRecord, ...] = ()
    dispensation: Optional[DispensationRecord] = None
    status: NcStatus = NcStatus.OPEN
    overdue_notified_for: Optional[date] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "source", coerce_enum(NcSource, self.source, "source"))
        object.__setattr__(self, "status", coerce_enum(NcStatus, self.status, "status"))

    @property
    def effective_deadline(self) -> date:
        """The base 90-day deadline, superseded by the latest extension."""
        if self.extensions:
            return self.extensions[-1].new_deadline
        return self.deadline

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "description": self.description,
            "source": self.source.value,
            "reportedBy": self.reported_by.to_doc(),
            "reportedAt": format_timestamp(self.reported_at),
            "deadline": format_date(self.deadline),
            "currentStep": self.current_step,
            "steps": [s.to_doc() for s in self.steps],
            "extensions": [e.to_doc() for e in self.extensions],
            "status": self.status.value,
        }
        if self.dispensation is not None:
            doc["dispensation"] = self.dispensation.to_doc()
        if self.overdue_notified_for is not None:
            doc["overdueNotifiedFor"] = format_date(self.overdue_notified_for)
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "NonconformityRecord":
        return cls(
            id=doc["id"],
            description=doc["description"],
            source=doc["source"],
            reported_by=Actor.from_doc(doc["reportedBy"]),
            reported_at=parse_timestamp(doc["reportedAt"]),
            deadline=parse_date(doc["deadline"]),
            current_step=doc["currentStep"],
            steps=tuple(StepRecord.from_doc(s) for s in doc["steps"]),
            extensions=tuple(ExtensionRecord.from_doc(e) for e in doc["extensions"]),
            dispensation=(
                DispensationRecord.from_doc(doc["dispensation"])
                if "dispensation" in doc
                else None
            ),
            status=doc["status"],
            overdue_notified_for=(
                parse_date(doc["overdueNotifiedFor"])
                if "overdueNotifiedFor" in doc
                else None
            ),
        )


def report_nonconformity(
    *,
    id: str,
    description: str,
    source: NcSource | str,
    reporter: Actor,
    reported_at: datetime,
    deadline_days: int = CA_DEADLINE_DAYS,
) -> NonconformityRecord:
    """Open a record at step 0 with the deadline clock started at report date.

    Any actor may report; only the description must be substantive.
    """
    if not isinstance(description, str) or not description.strip():
        raise EmptyDescription("nonconformity description must not be empty")
    return NonconformityRecord(
        id=id,
        description=description,
        source=coerce_enum(NcSource, source, "source"),
        reported_by=reporter,
        reported_at=reported_at,
        deadline=reported_at.date() + timedelta(days=deadline_days),
    )


def advance_ca_step(
    record: NonconformityRecord,
    actor: Actor,
    evidence: str,
    at: datetime,
    step: Optional[int] = None,
    risk_review_ref: Optional[str] = None,
) -> NonconformityRecord:
    """Append the next step record; closing step 7 is CISO-only.

    When ``step`` is given it must be exactly current_step + 1; anything else
    is a skip. Step timestamps must strictly increase.
    """
    if record.status is not NcStatus.OPEN:
        raise AlreadyClosed(f"record {record.id} is {record.status.value}")
    next_step = record.current_step + 1
    if step is not None and step != next_step:
        raise StepSkipped(record.current_step, step)
    if next_step > FINAL_STEP:
        raise AlreadyClosed(f"record {record.id} already completed step {FINAL_STEP}")
    if next_step == RISK_REVIEW_STEP and not risk_review_ref:
        raise RiskReviewMissing(
            f"advancing to step {RISK_REVIEW_STEP} requires a risk review reference"
        )
    if next_step == FINAL_STEP and actor.role is not Role.CISO:
        raise Forbidden(actor.role.value, Role.CISO.value)
    if record.steps and at <= record.steps[-1].at:
        raise ValidationError("step timestamp must be after the previous step's")
    entry = StepRecord(
        step=next_step,
        actor=actor,
        at=at,
        evidence=evidence,
        risk_review_ref=risk_review_ref,
    )
    return replace(
        record,
        current_step=next_step,
        steps=record.steps + (entry,),
        status=NcStatus.CLOSED if next_step == FINAL_STEP else record.status,
    )


def extend_deadline(
    record: NonconformityRecord,
    justification: str,
    new_deadline: date,
    at: datetime,
) -> NonconformityRecord:
    """Push the deadline out; deadlines never shrink and the CISO is notified."""
    if record.status is not NcStatus.OPEN:
        raise AlreadyClosed(f"record {record.id} is {record.status.value}")
    if not isinstance(justification, str) or not justification.strip():
        raise InvalidExtension("extension requires a documented justification")
    if new_deadline <= record.effective_deadline:
        raise InvalidExtension(
            f"new deadline {new_deadline} does not extend past {record.effective_deadline}"
        )
    extension = ExtensionRecord(
        requested_at=at, justification=justification, new_deadline=new_deadline
    )
    return replace(record, extensions=record.extensions + (extension,))


def grant_dispensation(
    record: NonconformityRecord, approver: Actor, reason: str, at: datetime
) -> NonconformityRecord:
    """Freeze the record under a Top-Management dispensation; no reopening."""
    if record.status is not NcStatus.OPEN:
        raise AlreadyClosed(f"record {record.id} is {record.status.value}")
    if approver.role is not Role.TOP_MANAGEMENT:
        raise Forbidden(approver.role.value, Role.TOP_MANAGEMENT.value)
    dispensation = DispensationRecord(approver=approver, at=at, reason=reason)
    return replace(record, dispensation=dispensation, status=NcStatus.DISPENSED)


def check_ca_deadlines(
    records: Iterable[NonconformityRecord], today: date
) -> list[dict]:
    """Classify every open record as OnTrack or Overdue; terminal ones are excluded.

    Overdue means strictly past the effective deadline: the deadline day
    itself is still on track.
    """
    result = []
    for record in records:
        if record.status is not NcStatus.OPEN:
            continue
        state = (
            DeadlineState.OVERDUE
            if today > record.effective_deadline
            else DeadlineState.ON_TRACK
        )
        result.append({"recordId": record.id, "state": state.value})
    return result


def escalation_report(
    records: Sequence[NonconformityRecord], today: date
) -> list[str]:
    """Records overdue with neither extension nor dispensation: the HR-escalation set."""
    overdue = {
        row["recordId"]
        for row in check_ca_deadlines(records, today)
        if row["state"] == DeadlineState.OVERDUE.value
    }
    return [
        r.id
        for r in records
        if r.id in overdue and not r.extensions and r.dispensation is None
    ]


def containment_warnings(
    records: Sequence[NonconformityRecord], today: date, window_days: int = 2
) -> list[str]:
    """Open records still at step 0 or 1 more than window_days after reporting."""
    return [
        r.id
        for r in records
        if r.status is NcStatus.OPEN
        and r.current_step <= 1
        and today > r.reported_at.date() + timedelta(days=window_days)
    ]
