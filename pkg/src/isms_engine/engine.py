"""Operation facade: binds the domain modules to the durable store.

Every mutation resolves references, applies a pure domain transition, and
commits exactly one audited write. All mutations accept an optional explicit
id and timestamp so that scripted runs are fully reproducible; when omitted,
ids derive from the store version and timestamps from the wall clock.
"""

from __future__ import annotations

import os
import re
from dataclasses import replace
from datetime import date, datetime
from typing import Optional, Sequence

from . import backup as bk
from . import corrective as ca
from . import register as rg
from . import risk
from .canonical import canonical_json
from .config import ServiceConfig
from .dates import format_date, format_timestamp, now_utc, parse_date, parse_timestamp
from .errors import UnknownRef, ValidationError
from .model import (
    Actor,
    Asset,
    Control,
    Threat,
    Vulnerability,
    check_dependency_cycle,
)
from .store import Store

NOTIFICATIONS_FILE = "notifications.ndjson"

MONTH_RE = re.compile(r"^\d{4}-(0[1-9]|1[0-2])$")


def _as_datetime(value: Optional[datetime | str]) -> datetime:
    if value is None:
        return now_utc()
    if isinstance(value, datetime):
        return value
    return parse_timestamp(value)


def _as_date(value: Optional[date | str]) -> date:
    if value is None:
        return now_utc().date()
    if isinstance(value, date):
        return value
    return parse_date(value)


class Engine:
    def __init__(self, config: Optional[ServiceConfig] = None) -> None:
        self.config = config or ServiceConfig()
        self.store = Store(self.config.data_directory)
        self._notifications_path = os.path.join(
            self.config.data_directory, NOTIFICATIONS_FILE
        )

    @property
    def version(self) -> int:
        return self.store.version

    # plumbing

    def _fresh_id(self, prefix: str, kind: str) -> str:
        n = self.store.version + 1
        while True:
            candidate = f"{prefix}-{n:06d}"
            if self.store.find(kind, candidate) is None:
                return candidate
            n += 1

    def _claim_id(self, kind: str, prefix: str, explicit: Optional[str]) -> str:
        if explicit is not None:
            if not str(explicit).strip():
                raise ValidationError("id must not be empty")
            if self.store.find(kind, explicit) is not None:
                raise ValidationError(f"duplicate {kind} id {explicit!r}")
            return explicit
        return self._fresh_id(prefix, kind)

    def _notify(self, record_id: str, event: str, at: str, recipients: Sequence[str]) -> None:
        line = canonical_json(
            {
                "recordId": record_id,
                "event": event,
                "at": at,
                "recipients": list(recipients),
            }
        )
        with open(self._notifications_path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    def _commit(
        self,
        actor: Actor,
        operation: str,
        doc: dict,
        kind: str,
        *,
        at: datetime,
        before: Optional[dict] = None,
        detail: Optional[dict] = None,
        expected_version: Optional[int] = None,
        extra_puts: Sequence[tuple[str, str, dict]] = (),
    ) -> dict:
        self.store.commit(
            actor=actor,
            operation=operation,
            entity_id=doc["id"],
            at=format_timestamp(at),
            puts=[(kind, doc["id"], doc), *extra_puts],
            primary=doc,
            before=before,
            detail=detail,
            expected_version=expected_version,
        )
        return doc

    # asset catalog

    def create_asset(
        self,
        actor: Actor,
        *,
        name: str,
        group: str,
        owner: str,
        custodian: str,
        criticality: int,
        cia: dict,
        dependencies: Sequence[str] = (),
        id: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        for dep in dependencies:
            self.store.get("assets", dep)
        asset = Asset(
            id=self._claim_id("assets", "asset", id),
            name=name,
            group=group,
            owner=owner,
            custodian=custodian,
            criticality=criticality,
            cia=cia,
            dependencies=tuple(dependencies),
        )
        doc = asset.to_doc()
        known = [Asset.from_doc(d) for d in self.store.list("assets")]
        warnings = check_dependency_cycle(known + [asset])
        self._commit(
            actor, "asset.create", doc, "assets",
            at=at_dt, expected_version=expected_version,
        )
        return {"asset": doc, "cycleWarnings": warnings}

    def get_asset(self, asset_id: str) -> dict:
        return self.store.get("assets", asset_id)

    def list_assets(self) -> list[dict]:
        return self.store.list("assets")

    def create_threat(
        self,
        actor: Actor,
        *,
        name: str,
        category: str,
        frequency: int,
        id: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        threat = Threat(
            id=self._claim_id("threats", "threat", id),
            name=name,
            category=category,
            frequency=frequency,
        )
        return self._commit(
            actor, "threat.create", threat.to_doc(), "threats",
            at=_as_datetime(at), expected_version=expected_version,
        )

    def create_vulnerability(
        self,
        actor: Actor,
        *,
        description: str,
        source: str,
        affected_assets: Sequence[str],
        id: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        for asset_id in affected_assets:
            self.store.get("assets", asset_id)
        vuln = Vulnerability(
            id=self._claim_id("vulnerabilities", "vuln", id),
            description=description,
            source=source,
            affected_assets=tuple(affected_assets),
        )
        return self._commit(
            actor, "vulnerability.create", vuln.to_doc(), "vulnerabilities",
            at=_as_datetime(at), expected_version=expected_version,
        )

    def create_control(
        self,
        actor: Actor,
        *,
        description: str,
        status: str,
        effectiveness: int,
        applies_to: Sequence[str] = (),
        id: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        for asset_id in applies_to:
            self.store.get("assets", asset_id)
        control = Control(
            id=self._claim_id("controls", "control", id),
            description=description,
            status=status,
            effectiveness=effectiveness,
            applies_to=tuple(applies_to),
        )
        return self._commit(
            actor, "control.create", control.to_doc(), "controls",
            at=_as_datetime(at), expected_version=expected_version,
        )

    # assessment cycles

    def open_cycle(
        self,
        actor: Actor,
        *,
        scope: str,
        team: Sequence[dict],
        trigger: str,
        id: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        cycle = rg.open_cycle(
            id=self._claim_id("cycles", "cycle", id),
            scope=scope,
            team=[m if isinstance(m, Actor) else Actor.from_doc(m) for m in team],
            trigger=trigger,
            started_at=at_dt,
        )
        return self._commit(
            actor, "cycle.open", cycle.to_doc(), "cycles",
            at=at_dt, expected_version=expected_version,
        )

    def get_cycle(self, cycle_id: str) -> dict:
        return self.store.get("cycles", cycle_id)

    def list_cycles(self) -> list[dict]:
        return self.store.list("cycles")

    def approve_boundary(
        self,
        actor: Actor,
        cycle_id: str,
        *,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        before = self.store.get("cycles", cycle_id)
        cycle = rg.approve_boundary(rg.AssessmentCycle.from_doc(before), actor)
        return self._commit(
            actor, "cycle.approve-boundary", cycle.to_doc(), "cycles",
            at=_as_datetime(at), before=before, expected_version=expected_version,
        )

    def advance_cycle(
        self,
        actor: Actor,
        cycle_id: str,
        *,
        evidence: str,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        before = self.store.get("cycles", cycle_id)
        entries = [
            rg.RiskEntry.from_doc(d)
            for d in self.store.list("risks")
            if d["cycleId"] == cycle_id
        ]
        cycle = rg.advance_step(
            rg.AssessmentCycle.from_doc(before), actor, evidence, entries
        )
        return self._commit(
            actor, "cycle.advance", cycle.to_doc(), "cycles",
            at=_as_datetime(at), before=before, expected_version=expected_version,
        )

    # risk register

    def add_risk(
        self,
        actor: Actor,
        cycle_id: str,
        *,
        asset_id: str,
        threat_id: str,
        vulnerability_id: str,
        business_loss: int,
        id: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        cycle = rg.AssessmentCycle.from_doc(self.store.get("cycles", cycle_id))
        asset = Asset.from_doc(self.store.get("assets", asset_id))
        threat = Threat.from_doc(self.store.get("threats", threat_id))
        self.store.get("vulnerabilities", vulnerability_id)
        controls = [Control.from_doc(d) for d in self.store.list("controls")]
        entry = rg.build_risk_entry(
            id=self._claim_id("risks", "risk", id),
            cycle=cycle,
            asset=asset,
            threat=threat,
            vulnerability_id=vulnerability_id,
            business_loss=business_loss,
            controls=controls,
            created_at=at_dt,
        )
        doc = entry.to_doc()
        self._commit(
            actor, "risk.add", doc, "risks",
            at=at_dt, expected_version=expected_version,
        )
        prospective = risk.treatment_deadline(entry.base_rating, at_dt.date())
        return {"risk": doc, "prospectiveDueDate": format_date(prospective)}

    def get_risk(self, risk_id: str) -> dict:
        return self.store.get("risks", risk_id)

    def list_risks(self, cycle_id: Optional[str] = None) -> list[dict]:
        docs = self.store.list("risks")
        if cycle_id is not None:
            docs = [d for d in docs if d["cycleId"] == cycle_id]
        return docs

    def plan_treatment(
        self,
        actor: Actor,
        risk_id: str,
        *,
        strategy: str,
        rationale: str,
        controls: Sequence[str] = (),
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        before = self.store.get("risks", risk_id)
        for control_id in controls:
            self.store.get("controls", control_id)
        entry = rg.plan_treatment(
            rg.RiskEntry.from_doc(before),
            strategy,
            rationale,
            tuple(controls),
            actor,
            at_dt.date(),
            self.config.accept_gate_allows_minor,
        )
        return self._commit(
            actor, "risk.treat", entry.to_doc(), "risks",
            at=at_dt, before=before, expected_version=expected_version,
        )

    def set_treatment_status(
        self,
        actor: Actor,
        risk_id: str,
        *,
        status: str,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        before = self.store.get("risks", risk_id)
        entry = rg.set_treatment_status(rg.RiskEntry.from_doc(before), status, actor)
        return self._commit(
            actor, "risk.treatment-status", entry.to_doc(), "risks",
            at=_as_datetime(at), before=before, expected_version=expected_version,
        )

    def record_residual(
        self,
        actor: Actor,
        risk_id: str,
        *,
        post_impact: int,
        post_likelihood: int,
        medium: str,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        before = self.store.get("risks", risk_id)
        entry = rg.record_residual_and_approve(
            rg.RiskEntry.from_doc(before),
            post_impact,
            post_likelihood,
            actor,
            medium,
            at_dt,
        )
        return self._commit(
            actor, "risk.residual-approve", entry.to_doc(), "risks",
            at=at_dt, before=before, expected_version=expected_version,
        )

    def add_note(
        self,
        actor: Actor,
        risk_id: str,
        *,
        kind: str,
        text: str,
        id: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        self.store.get("risks", risk_id)
        note = rg.MonitoringNote(
            id=self._claim_id("notes", "note", id),
            risk_entry_id=risk_id,
            at=at_dt,
            author=actor,
            kind=kind,
            text=text,
        )
        return self._commit(
            actor, "risk.note", note.to_doc(), "notes",
            at=at_dt, expected_version=expected_version,
        )

    def projection(self, risk_id: str, impact: int, likelihood: int) -> dict:
        """What a residual (impact, likelihood) would mean, persisted nowhere."""
        target = self.store.get("risks", risk_id)
        score = risk.compute_residual_risk(impact, likelihood)
        rating = risk.rating_for_score(score)
        scores = [
            score
            if d["id"] == risk_id
            else d.get("residualScore", d["baseScore"])
            for d in self.store.list("risks")
        ]
        health = risk.compute_portfolio_health(scores)
        return {
            "riskId": target["id"],
            "impact": impact,
            "likelihood": likelihood,
            "score": score,
            "rating": rating.to_doc(),
            "portfolioHealth": health.to_doc(),
        }

    # reports

    def portfolio_health(self) -> dict:
        scores = [
            d.get("residualScore", d["baseScore"]) for d in self.store.list("risks")
        ]
        return risk.compute_portfolio_health(scores).to_doc()

    def management_review(self, as_of: Optional[datetime | str] = None) -> dict:
        cycles = [rg.AssessmentCycle.from_doc(d) for d in self.store.list("cycles")]
        entries = [rg.RiskEntry.from_doc(d) for d in self.store.list("risks")]
        notes = [rg.MonitoringNote.from_doc(d) for d in self.store.list("notes")]
        report = rg.generate_management_review_report(
            cycles, entries, notes, _as_datetime(as_of)
        )
        health = report["portfolioHealth"]
        report["header"] = f"{health['percent']:g}% {health['band']}"
        return report

    def export_csv(self, cycle_id: Optional[str] = None) -> str:
        entries = [rg.RiskEntry.from_doc(d) for d in self.list_risks(cycle_id)]
        return rg.risks_to_csv(entries)

    def import_rows(
        self,
        actor: Actor,
        rows: Sequence[tuple[int, dict]],
        *,
        cycle_id: str,
        at: Optional[datetime | str] = None,
    ) -> dict:
        """Insert exchange rows one at a time; each row stands or falls alone.

        Rows may reference assets outside the local catalogs (migrated
        registers), so only the cycle is checked for existence.
        """
        at_dt = _as_datetime(at)
        self.store.get("cycles", cycle_id)
        inserted = 0
        errors: list[dict] = []
        for line_no, row in rows:
            try:
                entry = rg.entry_from_row(row, cycle_id, at_dt)
                if self.store.find("risks", entry.id) is not None:
                    raise ValidationError(f"duplicate risks id {entry.id!r}")
                self._commit(actor, "risk.import", entry.to_doc(), "risks", at=at_dt)
                inserted += 1
            except ValidationError as exc:
                errors.append({"line": line_no, "error": str(exc)})
        return {"inserted": inserted, "errors": errors}

    # corrective actions

    def report_nc(
        self,
        actor: Actor,
        *,
        description: str,
        source: str,
        id: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        record = ca.report_nonconformity(
            id=self._claim_id("nonconformities", "nc", id),
            description=description,
            source=source,
            reporter=actor,
            reported_at=at_dt,
            deadline_days=self.config.ca_deadline_days,
        )
        return self._commit(
            actor, "nc.report", record.to_doc(), "nonconformities",
            at=at_dt, expected_version=expected_version,
        )

    def get_nc(self, nc_id: str) -> dict:
        return self.store.get("nonconformities", nc_id)

    def list_ncs(self) -> list[dict]:
        return self.store.list("nonconformities")

    def advance_nc(
        self,
        actor: Actor,
        nc_id: str,
        *,
        evidence: str,
        step: Optional[int] = None,
        risk_review_ref: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        before = self.store.get("nonconformities", nc_id)
        if risk_review_ref is not None:
            self.store.get("risks", risk_review_ref)
        record = ca.advance_ca_step(
            ca.NonconformityRecord.from_doc(before),
            actor,
            evidence,
            at_dt,
            step=step,
            risk_review_ref=risk_review_ref,
        )
        return self._commit(
            actor, "nc.advance", record.to_doc(), "nonconformities",
            at=at_dt, before=before, expected_version=expected_version,
        )

    def extend_nc(
        self,
        actor: Actor,
        nc_id: str,
        *,
        justification: str,
        new_deadline: date | str,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        before = self.store.get("nonconformities", nc_id)
        record = ca.extend_deadline(
            ca.NonconformityRecord.from_doc(before),
            justification,
            _as_date(new_deadline),
            at_dt,
        )
        doc = self._commit(
            actor, "nc.extend", record.to_doc(), "nonconformities",
            at=at_dt, before=before, expected_version=expected_version,
        )
        self._notify(
            nc_id, "DeadlineExtended", format_timestamp(at_dt), ["CISO", "Management"]
        )
        return doc

    def dispense_nc(
        self,
        actor: Actor,
        nc_id: str,
        *,
        reason: str,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        before = self.store.get("nonconformities", nc_id)
        record = ca.grant_dispensation(
            ca.NonconformityRecord.from_doc(before), actor, reason, at_dt
        )
        return self._commit(
            actor, "nc.dispense", record.to_doc(), "nonconformities",
            at=at_dt, before=before, expected_version=expected_version,
        )

    def overdue_report(self, today: Optional[date | str] = None) -> dict:
        today_d = _as_date(today)
        records = [
            ca.NonconformityRecord.from_doc(d)
            for d in self.store.list("nonconformities")
        ]
        return {
            "today": format_date(today_d),
            "deadlines": ca.check_ca_deadlines(records, today_d),
            "escalations": ca.escalation_report(records, today_d),
            "containmentWarnings": ca.containment_warnings(
                records, today_d, self.config.containment_warning_days
            ),
        }

    def notify_overdue(
        self,
        actor: Actor,
        *,
        today: Optional[date | str] = None,
        at: Optional[datetime | str] = None,
    ) -> dict:
        """Emit one overdue notification per record per effective deadline."""
        today_d = _as_date(today)
        at_dt = _as_datetime(at)
        notified = []
        overdue_ids = {
            row["recordId"]
            for row in self.overdue_report(today_d)["deadlines"]
            if row["state"] == ca.DeadlineState.OVERDUE.value
        }
        for doc in self.store.list("nonconformities"):
            if doc["id"] not in overdue_ids:
                continue
            record = ca.NonconformityRecord.from_doc(doc)
            if record.overdue_notified_for == record.effective_deadline:
                continue
            updated = replace(record, overdue_notified_for=record.effective_deadline)
            self._commit(
                actor, "nc.notify-overdue", updated.to_doc(), "nonconformities",
                at=at_dt, before=doc,
                detail={"deadline": format_date(record.effective_deadline)},
            )
            self._notify(
                record.id, "Overdue", format_timestamp(at_dt),
                ["CISO", "CorrectiveActionsAdmin"],
            )
            notified.append(record.id)
        return {"notified": notified}

    # backup governance

    def record_backup(
        self,
        actor: Actor,
        *,
        system_id: str,
        category: str,
        frequency_class: str,
        succeeded: bool,
        transferred_to_dr: bool,
        kind: str,
        taken_at: Optional[datetime | str] = None,
        media_id: Optional[str] = None,
        duration_seconds: Optional[float] = None,
        change_context: Optional[str] = None,
        id: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        taken = _as_datetime(taken_at) if taken_at is not None else at_dt
        if media_id is not None:
            self.store.get("media", media_id)
        record = bk.BackupRecord(
            id=self._claim_id("backups", "backup", id),
            system_id=system_id,
            category=category,
            frequency_class=frequency_class,
            taken_at=taken,
            succeeded=succeeded,
            transferred_to_dr=transferred_to_dr,
            kind=kind,
            media_id=media_id,
            duration_seconds=duration_seconds,
        )
        doc = record.to_doc()
        self._commit(
            actor, "backup.record", doc, "backups",
            at=at_dt, expected_version=expected_version,
        )
        return {
            "backup": doc,
            "warnings": bk.backup_warnings(record, change_context),
            "retentionExpiry": format_date(
                bk.retention_expiry(record.category, record.frequency_class, taken)
            ),
        }

    def list_backups(self) -> list[dict]:
        return self.store.list("backups")

    def rpo_status(self, system_id: str, now: Optional[datetime | str] = None) -> dict:
        records = [bk.BackupRecord.from_doc(d) for d in self.store.list("backups")]
        return bk.rpo_compliance(
            system_id, records, _as_datetime(now), self.config.rpo_hours
        )

    def rto_status(self, restore_id: str) -> dict:
        restore = bk.RestoreEvent.from_doc(self.store.get("restores", restore_id))
        return bk.rto_compliance(restore, self.config.rto_hours)

    def create_restore(
        self,
        actor: Actor,
        *,
        system_id: str,
        approved_by: dict,
        is_test: bool,
        requested_at: Optional[datetime | str] = None,
        started_at: Optional[datetime | str] = None,
        completed_at: Optional[datetime | str] = None,
        outcome: Optional[str] = None,
        report_signed_by: Sequence[dict] = (),
        id: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        restore = bk.RestoreEvent(
            id=self._claim_id("restores", "restore", id),
            system_id=system_id,
            requested_at=_as_datetime(requested_at) if requested_at else at_dt,
            approved_by=Actor.from_doc(approved_by),
            is_test=is_test,
            started_at=_as_datetime(started_at) if started_at else None,
            completed_at=_as_datetime(completed_at) if completed_at else None,
            outcome=outcome,
            report_signed_by=tuple(Actor.from_doc(a) for a in report_signed_by),
        )
        doc = restore.to_doc()
        self._commit(
            actor, "restore.record", doc, "restores",
            at=at_dt, expected_version=expected_version,
        )
        result = {"restore": doc}
        if restore.completed_at is not None:
            result["rto"] = bk.rto_compliance(restore, self.config.rto_hours)
        return result

    def restore_validation(
        self, system_id: str, today: Optional[date | str] = None
    ) -> dict:
        restores = [bk.RestoreEvent.from_doc(d) for d in self.store.list("restores")]
        return bk.restore_validation_due(restores=restores, system_id=system_id, today=_as_date(today))

    def schedule_restores(
        self,
        actor: Actor,
        *,
        teams: Sequence[dict],
        month: str,
        seed: int,
        id: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        if not MONTH_RE.match(month):
            raise ValidationError(f"month must look like 2024-06, got {month!r}")
        entries = bk.schedule_test_restores(teams, month, seed)
        doc = {
            "id": self._claim_id("schedules", f"sched-{month}", id),
            "month": month,
            "seed": seed,
            "entries": entries,
        }
        at_dt = _as_datetime(at)
        return self._commit(
            actor, "schedule.test-restores", doc, "schedules",
            at=at_dt, detail={"month": month, "seed": seed},
            expected_version=expected_version,
        )

    def backup_review(self) -> list[dict]:
        records = [bk.BackupRecord.from_doc(d) for d in self.store.list("backups")]
        return bk.backup_log_review(records)

    # media lifecycle

    def create_media(
        self,
        actor: Actor,
        *,
        tier: str,
        encrypted: bool,
        location: str = "OnSite",
        id: Optional[str] = None,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        media = bk.MediaItem(
            id=self._claim_id("media", "media", id),
            tier=tier,
            encrypted=encrypted,
            location=location,
        )
        doc = media.to_doc()
        self._commit(
            actor, "media.add", doc, "media",
            at=_as_datetime(at), expected_version=expected_version,
        )
        return {"media": doc, "warnings": bk.media_warnings(media)}

    def get_media(self, media_id: str) -> dict:
        return self.store.get("media", media_id)

    def list_media(self) -> list[dict]:
        return self.store.list("media")

    def transport_media(
        self,
        actor: Actor,
        media_id: str,
        *,
        to: str,
        courier_ref: str,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        before = self.store.get("media", media_id)
        media = bk.transport_media(
            bk.MediaItem.from_doc(before), to, actor, courier_ref, at_dt
        )
        return self._commit(
            actor, "media.transport", media.to_doc(), "media",
            at=at_dt, before=before, expected_version=expected_version,
        )

    def dispose_media(
        self,
        actor: Actor,
        media_id: str,
        *,
        method: str,
        confirmation: str,
        at: Optional[datetime | str] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        at_dt = _as_datetime(at)
        before = self.store.get("media", media_id)
        seq = len(self.disposal_register()) + 1
        media = bk.dispose_media(
            bk.MediaItem.from_doc(before),
            actor,
            method,
            confirmation,
            at_dt,
            certificate_id=f"CERT-{seq:06d}",
            register_seq=seq,
        )
        return self._commit(
            actor, "media.dispose", media.to_doc(), "media",
            at=at_dt, before=before, expected_version=expected_version,
        )

    def disposal_register(self) -> list[dict]:
        rows = []
        for doc in self.store.list("media"):
            disposal = doc.get("disposal")
            if disposal is None:
                continue
            rows.append(
                {
                    "registerSeq": disposal["registerSeq"],
                    "mediaId": doc["id"],
                    "certificateId": disposal["certificateId"],
                    "method": disposal["method"],
                    "at": disposal["at"],
                    "confirmedBy": disposal["confirmedBy"],
                }
            )
        return sorted(rows, key=lambda r: r["registerSeq"])

    # audit and export

    def audit_since(self, since_seq: int = 0) -> list[dict]:
        return self.store.audit_since(since_seq)

    def export_doc(self) -> dict:
        return self.store.export_doc()

    def export_json(self) -> str:
        return self.store.export_json()
