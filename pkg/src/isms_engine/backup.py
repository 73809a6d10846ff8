"""Backup governance: retention matrix, RPO/RTO checks, test-restore draws,
media lifecycle with certified disposal.

Retention rows are a closed matrix: a (category, frequency) pair outside it
is rejected at record time, not at expiry time.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, replace
from datetime import date, datetime, timedelta
from enum import Enum
from typing import Iterable, Optional, Sequence

from .dates import (
    add_months,
    format_timestamp,
    hours_between,
    parse_timestamp,
)
from .errors import (
    AlreadyDisposed,
    EmptyTeam,
    Forbidden,
    IncompleteRestore,
    InvalidMatrixRow,
    InvalidTransition,
    MissingConfirmation,
    ValidationError,
)
from .model import Actor, Role, check_text, coerce_enum

RPO_HOURS = 48
RTO_HOURS = 48
RESTORE_VALIDATION_MONTHS = 6


class BackupCategory(str, Enum):
    CORE_DATABASE = "CoreDatabase"
    MAIL_SERVER = "MailServer"
    OTHER_SERVER = "OtherServer"
    NETWORK_DEVICE = "NetworkDevice"


class FrequencyClass(str, Enum):
    DAILY = "Daily"
    MONTHLY = "Monthly"
    YEARLY = "Yearly"
    ANNUALLY = "Annually"
    ON_DEMAND = "OnDemand"
    HALF_YEARLY = "HalfYearly"


class BackupKind(str, Enum):
    KNOWN_GOOD_STATE = "KnownGoodState"
    CONFIG_SNAPSHOT = "ConfigSnapshot"
    QUARTERLY_BASELINE = "QuarterlyBaseline"
    SCRIPT_BACKUP = "ScriptBackup"


class ChangeContext(str, Enum):
    CONFIG_CHANGE = "ConfigChange"
    ROUTING_CHANGE = "RoutingChange"
    VPN_CHANGE = "VPNChange"
    NONE = "None"


class MediaTier(str, Enum):
    RED = "Red"
    YELLOW = "Yellow"
    GREEN = "Green"


class MediaLocation(str, Enum):
    ON_SITE = "OnSite"
    IN_TRANSIT = "InTransit"
    DR_SITE = "DRSite"
    DISPOSED = "Disposed"


class DisposalMethod(str, Enum):
    DRILLING = "Drilling"
    CRUSHING = "Crushing"
    DEGAUSSING = "Degaussing"


class RestoreOutcome(str, Enum):
    SUCCESS = "Success"
    FAILURE = "Failure"


# Retention matrix: (category, frequency) -> (months, days). Exactly one of
# the two is nonzero per row.
RETENTION_MATRIX: dict[tuple[BackupCategory, FrequencyClass], tuple[int, int]] = {
    (BackupCategory.CORE_DATABASE, FrequencyClass.DAILY): (0, 7),
    (BackupCategory.CORE_DATABASE, FrequencyClass.MONTHLY): (12, 0),
    (BackupCategory.CORE_DATABASE, FrequencyClass.YEARLY): (120, 0),
    (BackupCategory.MAIL_SERVER, FrequencyClass.DAILY): (6, 0),
    (BackupCategory.OTHER_SERVER, FrequencyClass.ANNUALLY): (12, 0),
    (BackupCategory.NETWORK_DEVICE, FrequencyClass.ON_DEMAND): (0, 7),
    (BackupCategory.NETWORK_DEVICE, FrequencyClass.HALF_YEARLY): (6, 0),
}


@dataclass(frozen=True)
class BackupRecord:
    id: str
    system_id: str
    category: BackupCategory
    frequency_class: FrequencyClass
    taken_at: datetime
    succeeded: bool
    transferred_to_dr: bool
    kind: BackupKind
    media_id: Optional[str] = None
    duration_seconds: Optional[float] = None

    def __post_init__(self) -> None:
        check_text("backup id", self.id)
        check_text("systemId", self.system_id)
        object.__setattr__(
            self, "category", coerce_enum(BackupCategory, self.category, "category")
        )
        object.__setattr__(
            self,
            "frequency_class",
            coerce_enum(FrequencyClass, self.frequency_class, "frequencyClass"),
        )
        object.__setattr__(self, "kind", coerce_enum(BackupKind, self.kind, "kind"))
        if (self.category, self.frequency_class) not in RETENTION_MATRIX:
            raise InvalidMatrixRow(self.category, self.frequency_class)
        if self.duration_seconds is not None and self.duration_seconds < 0:
            raise ValidationError("durationSeconds must be non-negative")

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "systemId": self.system_id,
            "category": self.category.value,
            "frequencyClass": self.frequency_class.value,
            "takenAt": format_timestamp(self.taken_at),
            "succeeded": self.succeeded,
            "transferredToDR": self.transferred_to_dr,
            "kind": self.kind.value,
        }
        if self.media_id is not None:
            doc["mediaId"] = self.media_id
        if self.duration_seconds is not None:
            doc["durationSeconds"] = self.duration_seconds
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "BackupRecord":
        return cls(
            id=doc["id"],
            system_id=doc["systemId"],
            category=doc["category"],
            frequency_class=doc["frequencyClass"],
            taken_at=parse_timestamp(doc["takenAt"]),
            succeeded=doc["succeeded"],
            transferred_to_dr=doc["transferredToDR"],
            kind=doc["kind"],
            media_id=doc.get("mediaId"),
            duration_seconds=doc.get("durationSeconds"),
        )


@dataclass(frozen=True)
class TransportEntry:
    authorized_by: Actor
    from_location: MediaLocation
    to_location: MediaLocation
    at: datetime
    courier_ref: str

    def to_doc(self) -> dict:
        return {
            "authorizedBy": self.authorized_by.to_doc(),
            "from": self.from_location.value,
            "to": self.to_location.value,
            "at": format_timestamp(self.at),
            "courierRef": self.courier_ref,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "TransportEntry":
        return cls(
            authorized_by=Actor.from_doc(doc["authorizedBy"]),
            from_location=MediaLocation(doc["from"]),
            to_location=MediaLocation(doc["to"]),
            at=parse_timestamp(doc["at"]),
            courier_ref=doc["courierRef"],
        )


@dataclass(frozen=True)
class DisposalRecord:
    confirmed_by: Actor
    method: DisposalMethod
    at: datetime
    certificate_id: str
    register_seq: int

    def __post_init__(self) -> None:
        check_text("certificateId", self.certificate_id)
        object.__setattr__(
            self, "method", coerce_enum(DisposalMethod, self.method, "method")
        )

    def to_doc(self) -> dict:
        return {
            "confirmedBy": self.confirmed_by.to_doc(),
            "method": self.method.value,
            "at": format_timestamp(self.at),
            "certificateId": self.certificate_id,
            "registerSeq": self.register_seq,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "DisposalRecord":
        return cls(
            confirmed_by=Actor.from_doc(doc["confirmedBy"]),
            method=doc["method"],
            at=parse_timestamp(doc["at"]),
            certificate_id=doc["certificateId"],
            register_seq=doc["registerSeq"],
        )


#: Legal location moves; Disposed is reachable only through dispose_media.
TRANSPORT_ADJACENCY: dict[MediaLocation, tuple[MediaLocation, ...]] = {
    MediaLocation.ON_SITE: (MediaLocation.IN_TRANSIT,),
    MediaLocation.IN_TRANSIT: (MediaLocation.ON_SITE, MediaLocation.DR_SITE),
    MediaLocation.DR_SITE: (MediaLocation.IN_TRANSIT,),
    MediaLocation.DISPOSED: (),
}

TRANSPORT_AUTHORIZER_ROLES = (Role.CISO, Role.HEAD_OF_IT)


@dataclass(frozen=True)
class MediaItem:
    id: str
    tier: MediaTier
    encrypted: bool
    location: MediaLocation = MediaLocation.ON_SITE
    transport_log: tuple[TransportEntry, ...] = ()
    disposal: Optional[DisposalRecord] = None

    def __post_init__(self) -> None:
        check_text("media id", self.id)
        object.__setattr__(self, "tier", coerce_enum(MediaTier, self.tier, "tier"))
        object.__setattr__(
            self, "location", coerce_enum(MediaLocation, self.location, "location")
        )
        if self.tier is MediaTier.RED and not self.encrypted:
            raise ValidationError("Red-tier (confidential) media must be encrypted")
        object.__setattr__(self, "transport_log", tuple(self.transport_log))
        if self.location is MediaLocation.DISPOSED and self.disposal is None:
            raise ValidationError("Disposed media must carry a disposal record")

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "tier": self.tier.value,
            "encrypted": self.encrypted,
            "location": self.location.value,
            "transportLog": [t.to_doc() for t in self.transport_log],
        }
        if self.disposal is not None:
            doc["disposal"] = self.disposal.to_doc()
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "MediaItem":
        return cls(
            id=doc["id"],
            tier=doc["tier"],
            encrypted=doc["encrypted"],
            location=doc["location"],
            transport_log=tuple(TransportEntry.from_doc(t) for t in doc["transportLog"]),
            disposal=(
                DisposalRecord.from_doc(doc["disposal"]) if "disposal" in doc else None
            ),
        )


@dataclass(frozen=True)
class RestoreEvent:
    id: str
    system_id: str
    requested_at: datetime
    approved_by: Actor
    is_test: bool
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    outcome: Optional[RestoreOutcome] = None
    report_signed_by: tuple[Actor, ...] = ()

    def __post_init__(self) -> None:
        check_text("restore id", self.id)
        check_text("systemId", self.system_id)
        if self.approved_by.role is not Role.HEAD_OF_IT:
            raise Forbidden(self.approved_by.role.value, Role.HEAD_OF_IT.value)
        object.__setattr__(self, "report_signed_by", tuple(self.report_signed_by))
        if self.outcome is not None:
            object.__setattr__(
                self, "outcome", coerce_enum(RestoreOutcome, self.outcome, "outcome")
            )
        if self.completed_at is not None:
            if self.outcome is None:
                raise ValidationError("completed restore must state an outcome")
            if self.completed_at < self.requested_at:
                raise ValidationError("completedAt precedes requestedAt")
            signer_roles = {a.role for a in self.report_signed_by}
            if not {Role.DBA, Role.HEAD_OF_IT} <= signer_roles:
                raise ValidationError(
                    "restoration report must be signed by the DBA and the Head of IT"
                )

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "systemId": self.system_id,
            "requestedAt": format_timestamp(self.requested_at),
            "approvedBy": self.approved_by.to_doc(),
            "isTest": self.is_test,
            "reportSignedBy": [a.to_doc() for a in self.report_signed_by],
        }
        if self.started_at is not None:
            doc["startedAt"] = format_timestamp(self.started_at)
        if self.completed_at is not None:
            doc["completedAt"] = format_timestamp(self.completed_at)
        if self.outcome is not None:
            doc["outcome"] = self.outcome.value
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "RestoreEvent":
        return cls(
            id=doc["id"],
            system_id=doc["systemId"],
            requested_at=parse_timestamp(doc["requestedAt"]),
            approved_by=Actor.from_doc(doc["approvedBy"]),
            is_test=doc["isTest"],
            started_at=(
                parse_timestamp(doc["startedAt"]) if "startedAt" in doc else None
            ),
            completed_at=(
                parse_timestamp(doc["completedAt"]) if "completedAt" in doc else None
            ),
            outcome=doc.get("outcome"),
            report_signed_by=tuple(Actor.from_doc(a) for a in doc["reportSignedBy"]),
        )


def retention_expiry(
    category: BackupCategory | str,
    frequency_class: FrequencyClass | str,
    taken_at: datetime | date,
) -> date:
    """Expiry date for a backup under the retention matrix."""
    category = coerce_enum(BackupCategory, category, "category")
    frequency_class = coerce_enum(FrequencyClass, frequency_class, "frequencyClass")
    row = RETENTION_MATRIX.get((category, frequency_class))
    if row is None:
        raise InvalidMatrixRow(category, frequency_class)
    months, days = row
    taken_date = taken_at.date() if isinstance(taken_at, datetime) else taken_at
    if months:
        return add_months(taken_date, months)
    return taken_date + timedelta(days=days)


def rpo_compliance(
    system_id: str,
    records: Iterable[BackupRecord],
    now: datetime,
    rpo_hours: float = RPO_HOURS,
) -> dict:
    """Hours since the last successful backup of a system, against the RPO.

    A system with no successful backup is noncompliant with an unbounded age
    (hoursSinceLast is None).
    """
    latest: Optional[datetime] = None
    for record in records:
        if record.system_id == system_id and record.succeeded:
            if latest is None or record.taken_at > latest:
                latest = record.taken_at
    if latest is None:
        return {"compliant": False, "hoursSinceLast": None}
    hours = hours_between(latest, now)
    return {"compliant": hours <= rpo_hours, "hoursSinceLast": hours}


def rto_compliance(restore: RestoreEvent, rto_hours: float = RTO_HOURS) -> dict:
    """Duration of a completed restore against the RTO; failures never comply."""
    if restore.completed_at is None:
        raise IncompleteRestore(f"restore {restore.id} has not completed")
    hours = hours_between(restore.requested_at, restore.completed_at)
    compliant = hours <= rto_hours and restore.outcome is RestoreOutcome.SUCCESS
    return {"compliant": compliant, "hours": hours}


def schedule_test_restores(
    teams: Sequence[dict], month: str, seed: int
) -> list[dict]:
    """Draw one system per team for the month's test restore.

    The draw is a pure function of (teams, month, seed): the same inputs
    always select the same systems, so an auditor can replay any schedule.
    """
    schedule = []
    for team in teams:
        team_id = team["teamId"]
        systems = sorted(team["systemIds"])
        if not systems:
            raise EmptyTeam(f"team {team_id} has no systems to draw from")
        rng = random.Random(f"{seed}:{month}:{team_id}")
        schedule.append(
            {
                "teamId": team_id,
                "systemId": systems[rng.randrange(len(systems))],
                "dueInMonth": month,
            }
        )
    return schedule


def restore_validation_due(
    system_id: str,
    restores: Iterable[RestoreEvent],
    today: date,
    months: int = RESTORE_VALIDATION_MONTHS,
) -> dict:
    """Whether a system's six-monthly restore validation has come due.

    Any successful restore, test or real, resets the clock; the due date is
    the last success advanced by the validation interval.
    """
    last: Optional[datetime] = None
    for restore in restores:
        if (
            restore.system_id == system_id
            and restore.outcome is RestoreOutcome.SUCCESS
            and restore.completed_at is not None
        ):
            if last is None or restore.completed_at > last:
                last = restore.completed_at
    if last is None:
        return {"due": True, "lastValidatedAt": None}
    due = add_months(last.date(), months) <= today
    return {"due": due, "lastValidatedAt": format_timestamp(last)}


def backup_warnings(
    record: BackupRecord, change_context: ChangeContext | str | None = None
) -> list[str]:
    """Advisory findings for a backup event: missed DR transfer, wrong kind."""
    if change_context is None:
        change_context = ChangeContext.NONE
    change_context = coerce_enum(ChangeContext, change_context, "changeContext")
    warnings = []
    if not record.transferred_to_dr:
        warnings.append("DRTransferMissing")
    if (
        change_context is not ChangeContext.NONE
        and record.kind is not BackupKind.CONFIG_SNAPSHOT
    ):
        warnings.append("WrongBackupKind")
    return warnings


def media_warnings(media: MediaItem) -> list[str]:
    """Advisory warning for unencrypted non-confidential media."""
    if media.tier is not MediaTier.RED and not media.encrypted:
        return ["UnencryptedMedia"]
    return []


def transport_media(
    media: MediaItem,
    to_location: MediaLocation | str,
    authorized_by: Actor,
    courier_ref: str,
    at: datetime,
) -> MediaItem:
    """Move media one hop along OnSite <-> InTransit <-> DRSite, logged and authorized."""
    to_location = coerce_enum(MediaLocation, to_location, "to")
    if media.location is MediaLocation.DISPOSED:
        raise AlreadyDisposed(f"media {media.id} is disposed")
    if to_location not in TRANSPORT_ADJACENCY[media.location]:
        raise InvalidTransition(
            f"cannot move media from {media.location.value} to {to_location.value}"
        )
    if authorized_by.role not in TRANSPORT_AUTHORIZER_ROLES:
        raise Forbidden(
            authorized_by.role.value,
            " or ".join(r.value for r in TRANSPORT_AUTHORIZER_ROLES),
        )
    check_text("courierRef", courier_ref)
    entry = TransportEntry(
        authorized_by=authorized_by,
        from_location=media.location,
        to_location=to_location,
        at=at,
        courier_ref=courier_ref,
    )
    return replace(
        media, location=to_location, transport_log=media.transport_log + (entry,)
    )


def dispose_media(
    media: MediaItem,
    confirmer: Actor,
    method: DisposalMethod | str,
    confirmation: str,
    at: datetime,
    certificate_id: str,
    register_seq: int,
) -> MediaItem:
    """Destroy media under written confirmation, issuing the next register entry."""
    if media.location is MediaLocation.DISPOSED or media.disposal is not None:
        raise AlreadyDisposed(f"media {media.id} is already disposed")
    if not isinstance(confirmation, str) or not confirmation.strip():
        raise MissingConfirmation(
            "disposal requires written confirmation from the responsible team"
        )
    record = DisposalRecord(
        confirmed_by=confirmer,
        method=method,
        at=at,
        certificate_id=certificate_id,
        register_seq=register_seq,
    )
    return replace(media, location=MediaLocation.DISPOSED, disposal=record)


def backup_log_review(
    records: Sequence[BackupRecord], duration_multiplier: float = 3.0
) -> list[dict]:
    """Flag failed backups and jobs running far beyond their system's norm.

    A duration is anomalous when it exceeds duration_multiplier times the
    median of the system's earlier successful runs (needs at least three to
    establish a norm).
    """
    findings = []
    by_system: dict[str, list[float]] = {}
    for record in sorted(records, key=lambda r: r.taken_at):
        if not record.succeeded:
            findings.append(
                {"id": record.id, "systemId": record.system_id, "finding": "Failed"}
            )
        history = by_system.setdefault(record.system_id, [])
        if record.duration_seconds is not None:
            if record.succeeded and len(history) >= 3:
                baseline = statistics.median(history)
                if baseline > 0 and record.duration_seconds > duration_multiplier * baseline:
                    findings.append(
                        {
                            "id": record.id,
                            "systemId": record.system_id,
                            "finding": "AnomalousDuration",
                            "durationSeconds": record.duration_seconds,
                            "medianSeconds": baseline,
                        }
                    )
            if record.succeeded:
                history.append(record.duration_seconds)
    return findings
