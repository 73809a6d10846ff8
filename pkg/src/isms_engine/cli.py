"""Command-line client: drives every operation either against a local data
directory (offline mode) or a running service over HTTP.

Offline mode embeds the engine directly so a laptop can run the full
governance workflow with no server. Both paths execute the same operations
with the same ids and timestamps, so they produce identical stores.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import register as rg
from .backup import (
    BackupCategory,
    BackupKind,
    ChangeContext,
    DisposalMethod,
    FrequencyClass,
    MediaLocation,
    MediaTier,
    RestoreOutcome,
)
from .config import ServiceConfig, load_config
from .corrective import NcSource
from .engine import Engine
from .errors import FileUnreadable, FormatError, IsmsError
from .model import (
    AssetGroup,
    Actor,
    CiaLevel,
    ControlStatus,
    Role,
    ThreatCategory,
    VulnerabilitySource,
)
from .register import ApprovalMedium, CycleTrigger, NoteKind, TreatmentStatus, TreatmentStrategy

DECISION_LABELS = {
    "RiskAppetite": "Risk Appetite",
    "RiskTolerance": "Risk Tolerance",
    "MgmtNotify": "Management Notification",
    "MgmtTrigger": "Management Trigger",
    "ImmediateAction": "Immediate Action",
}


class RemoteError(Exception):
    """A 4xx/5xx response from the service, carrying its error envelope."""

    def __init__(self, error: str, message: str) -> None:
        self.error = error
        self.message = message
        super().__init__(f"{error}: {message}")


def _values(enum_cls) -> list[str]:
    return [member.value for member in enum_cls]


class LocalClient:
    """Offline mode: the engine runs in-process on the data directory."""

    def __init__(self, engine: Engine, actor: Actor) -> None:
        self.engine = engine
        self.actor = actor

    def mutate(self, op: str, *args, **kwargs):
        return getattr(self.engine, op)(self.actor, *args, **kwargs)

    def read(self, op: str, *args, **kwargs):
        return getattr(self.engine, op)(*args, **kwargs)


class HttpClient:
    """Server mode: the same operations over the JSON API."""

    def __init__(self, base_url: str, actor: Actor) -> None:
        import requests

        self._requests = requests
        self.base_url = base_url.rstrip("/")
        self.headers = {"X-Actor-Id": actor.id, "X-Actor-Role": actor.role.value}

    def _check(self, resp):
        if resp.status_code >= 400:
            try:
                body = resp.json()
            except ValueError:
                raise RemoteError("HttpError", f"{resp.status_code}: {resp.text}")
            raise RemoteError(
                body.get("error", "HttpError"), body.get("message", resp.text)
            )
        return resp

    def get(self, path: str, params: Optional[dict] = None):
        resp = self._check(
            self._requests.get(self.base_url + path, params=params or {})
        )
        return resp.json()

    def get_text(self, path: str) -> str:
        return self._check(self._requests.get(self.base_url + path)).text

    def post(self, path: str, body: dict):
        body = {k: v for k, v in body.items() if v is not None}
        resp = self._check(
            self._requests.post(self.base_url + path, json=body, headers=self.headers)
        )
        return resp.json()


def table(rows: Sequence[dict], columns: Sequence[str]) -> str:
    """Fixed-width text table; empty input renders the header only."""
    cells = [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [
        max(len(c), *(len(row[i]) for row in cells)) if cells else len(c)
        for i, c in enumerate(columns)
    ]
    lines = ["  ".join(c.ljust(widths[i]) for i, c in enumerate(columns)).rstrip()]
    for row in cells:
        lines.append("  ".join(v.ljust(widths[i]) for i, v in enumerate(row)).rstrip())
    return "\n".join(lines)


def emit(args, result, table_text: Optional[str] = None) -> None:
    if args.format == "json" or table_text is None:
        print(json.dumps(result, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print(table_text)


def parse_members(specs: Sequence[str]) -> list[dict]:
    """Team member specs: 'id:Role' or 'id:name:Role'."""
    members = []
    for spec in specs:
        parts = spec.split(":")
        if len(parts) == 2:
            members.append({"id": parts[0], "name": parts[0], "role": parts[1]})
        elif len(parts) == 3:
            members.append({"id": parts[0], "name": parts[1], "role": parts[2]})
        else:
            raise FormatError(0, f"member spec {spec!r} is not id:role or id:name:role")
    return members


def parse_actor_spec(spec: str, default_role: str) -> dict:
    parts = spec.split(":")
    if len(parts) == 1:
        return {"id": parts[0], "name": parts[0], "role": default_role}
    if len(parts) == 2:
        return {"id": parts[0], "name": parts[0], "role": parts[1]}
    return {"id": parts[0], "name": parts[1], "role": parts[2]}


def split_csv(value: Optional[str]) -> list[str]:
    if not value:
        return []
    return [part.strip() for part in value.split(",") if part.strip()]


# command handlers; each returns the process exit code


def cmd_asset_add(client, args) -> int:
    cia_levels = split_csv(args.cia)
    if len(cia_levels) != 3:
        raise FormatError(0, "--cia expects three comma-separated levels, e.g. High,High,Medium")
    body = dict(
        name=args.name,
        group=args.group,
        owner=args.owner,
        custodian=args.custodian,
        criticality=args.criticality,
        cia={
            "confidentiality": cia_levels[0],
            "integrity": cia_levels[1],
            "availability": cia_levels[2],
        },
        dependencies=split_csv(args.depends_on),
        id=args.id,
        at=args.at,
    )
    if isinstance(client, HttpClient):
        result = client.post("/assets", body)
    else:
        result = client.mutate("create_asset", **body)
    asset = result["asset"]
    lines = [f"{asset['id']}: {asset['name']} ({asset['group']}, criticality {asset['criticality']})"]
    for cycle in result["cycleWarnings"]:
        lines.append(f"warning: dependency cycle {' -> '.join(cycle)}")
    emit(args, result, "\n".join(lines))
    return 0


def cmd_asset_list(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get("/assets")
    else:
        result = client.read("list_assets")
    emit(args, result, table(result, ["id", "name", "group", "criticality", "owner"]))
    return 0


def cmd_threat_add(client, args) -> int:
    body = dict(
        name=args.name, category=args.category, frequency=args.frequency,
        id=args.id, at=args.at,
    )
    if isinstance(client, HttpClient):
        result = client.post("/threats", body)
    else:
        result = client.mutate("create_threat", **body)
    emit(args, result, f"{result['id']}: {result['name']} frequency {result['frequency']}")
    return 0


def cmd_vuln_add(client, args) -> int:
    body = dict(
        description=args.description,
        source=args.source,
        id=args.id,
        at=args.at,
    )
    assets = split_csv(args.assets)
    if isinstance(client, HttpClient):
        result = client.post("/vulnerabilities", {**body, "affectedAssets": assets})
    else:
        result = client.mutate("create_vulnerability", affected_assets=assets, **body)
    emit(args, result, f"{result['id']}: {result['description']}")
    return 0


def cmd_control_add(client, args) -> int:
    body = dict(
        description=args.description,
        status=args.status,
        effectiveness=args.effectiveness,
        id=args.id,
        at=args.at,
    )
    applies = split_csv(args.applies_to)
    if isinstance(client, HttpClient):
        result = client.post("/controls", {**body, "appliesTo": applies})
    else:
        result = client.mutate("create_control", applies_to=applies, **body)
    emit(args, result, f"{result['id']}: {result['status']} effectiveness {result['effectiveness']}")
    return 0


def cmd_cycle_open(client, args) -> int:
    team = parse_members(args.member)
    body = dict(scope=args.scope, team=team, trigger=args.trigger, id=args.id, at=args.at)
    if isinstance(client, HttpClient):
        result = client.post("/cycles", body)
    else:
        result = client.mutate("open_cycle", **body)
    emit(args, result, f"{result['id']}: step {result['currentStep']} {result['status']}")
    return 0


def cmd_cycle_advance(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.post(f"/cycles/{args.cycle_id}/advance", {"evidence": args.evidence, "at": args.at})
    else:
        result = client.mutate("advance_cycle", args.cycle_id, evidence=args.evidence, at=args.at)
    emit(args, result, f"{result['id']}: step {result['currentStep']} {result['status']}")
    return 0


def cmd_cycle_approve_boundary(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.post(f"/cycles/{args.cycle_id}/boundary-approval", {"at": args.at})
    else:
        result = client.mutate("approve_boundary", args.cycle_id, at=args.at)
    approver = result["boundaryApprovedBy"]["id"]
    emit(args, result, f"{result['id']}: boundary approved by {approver}")
    return 0


def cmd_cycle_show(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get(f"/cycles/{args.cycle_id}")
    else:
        result = client.read("get_cycle", args.cycle_id)
    emit(args, result, None)
    return 0


def cmd_cycle_list(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get("/cycles")
    else:
        result = client.read("list_cycles")
    emit(args, result, table(result, ["id", "currentStep", "status", "trigger"]))
    return 0


def cmd_risk_add(client, args) -> int:
    body = dict(
        assetId=args.asset, threatId=args.threat, vulnerabilityId=args.vuln,
        businessLoss=args.loss, id=args.id, at=args.at,
    )
    if isinstance(client, HttpClient):
        result = client.post(f"/cycles/{args.cycle}/risks", body)
    else:
        result = client.mutate(
            "add_risk", args.cycle,
            asset_id=args.asset, threat_id=args.threat, vulnerability_id=args.vuln,
            business_loss=args.loss, id=args.id, at=args.at,
        )
    risk = result["risk"]
    band = risk["baseRating"]["band"]
    label = DECISION_LABELS[risk["baseRating"]["decisionBasis"]]
    emit(
        args, result,
        f"{risk['id']}: score {risk['baseScore']}, "
        f"{band} — {label}, due {result['prospectiveDueDate']}",
    )
    return 0


def cmd_risk_treat(client, args) -> int:
    body = dict(
        strategy=args.strategy, rationale=args.rationale,
        controls=split_csv(args.controls), at=args.at,
    )
    if isinstance(client, HttpClient):
        result = client.post(f"/risks/{args.risk_id}/treatment", body)
    else:
        result = client.mutate("plan_treatment", args.risk_id, **body)
    plan = result["treatment"]
    emit(args, result, f"{result['id']}: {plan['strategy']} due {plan['dueDate']} ({plan['status']})")
    return 0


def cmd_risk_status(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.post(f"/risks/{args.risk_id}/treatment-status", {"status": args.status, "at": args.at})
    else:
        result = client.mutate("set_treatment_status", args.risk_id, status=args.status, at=args.at)
    emit(args, result, f"{result['id']}: treatment {result['treatment']['status']}")
    return 0


def cmd_risk_approve(client, args) -> int:
    body = dict(postImpact=args.impact, postLikelihood=args.likelihood, medium=args.medium, at=args.at)
    if isinstance(client, HttpClient):
        result = client.post(f"/risks/{args.risk_id}/residual-approval", body)
    else:
        result = client.mutate(
            "record_residual", args.risk_id,
            post_impact=args.impact, post_likelihood=args.likelihood,
            medium=args.medium, at=args.at,
        )
    emit(
        args, result,
        f"{result['id']}: residual {result['residualScore']} "
        f"(base {result['baseScore']}), approved by {result['ownerApproval']['actor']['id']}",
    )
    return 0


def cmd_risk_note(client, args) -> int:
    body = dict(kind=args.kind, text=args.text, id=args.id, at=args.at)
    if isinstance(client, HttpClient):
        result = client.post(f"/risks/{args.risk_id}/notes", body)
    else:
        result = client.mutate("add_note", args.risk_id, **body)
    emit(args, result, f"{result['id']}: {result['kind']} on {result['riskEntryId']}")
    return 0


def cmd_risk_show(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get(f"/risks/{args.risk_id}")
    else:
        result = client.read("get_risk", args.risk_id)
    emit(args, result, None)
    return 0


def cmd_risk_list(client, args) -> int:
    if isinstance(client, HttpClient):
        params = {"cycleId": args.cycle} if args.cycle else None
        result = client.get("/risks", params)
    else:
        result = client.read("list_risks", args.cycle)
    if args.format == "csv":
        entries = [rg.RiskEntry.from_doc(d) for d in result]
        print(rg.risks_to_csv(entries), end="")
        return 0
    rows = [
        {
            "id": d["id"],
            "asset": d["assetId"],
            "score": d["baseScore"],
            "band": d["baseRating"]["band"],
            "strategy": d.get("treatment", {}).get("strategy", ""),
            "residual": d.get("residualScore", ""),
        }
        for d in result
    ]
    emit(args, result, table(rows, ["id", "asset", "score", "band", "strategy", "residual"]))
    return 0


def cmd_report_health(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get("/reports/portfolio-health")
    else:
        result = client.read("portfolio_health")
    emit(args, result, f"{result['percent']:.1f}% {result['band']}")
    return 0


def cmd_report_review(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get("/reports/management-review", {"asOf": args.as_of} if args.as_of else None)
    else:
        result = client.read("management_review", args.as_of)
    lines = [result["header"], f"entries: {result['entryCount']}"]
    bands = result["entriesByBand"]
    lines.append("bands: " + "  ".join(f"{band}={len(ids)}" for band, ids in bands.items()))
    for item in result["imminentCrystallisation"]:
        lines.append(f"imminent: {item['entryId']} ({item['band']}) due {item['dueDate']}")
    for item in result["residualIncreases"]:
        lines.append(
            f"residual increase: {item['entryId']} {item['baseScore']} -> {item['residualScore']}"
        )
    for cycle in result["openCycles"]:
        lines.append(f"open cycle: {cycle['id']} step {cycle['currentStep']}")
    emit(args, result, "\n".join(lines))
    return 0


def cmd_nc_report(client, args) -> int:
    body = dict(description=args.description, source=args.source, id=args.id, at=args.at)
    if isinstance(client, HttpClient):
        result = client.post("/nonconformities", body)
    else:
        result = client.mutate("report_nc", **body)
    emit(args, result, f"{result['id']}: step {result['currentStep']}, deadline {result['deadline']}")
    return 0


def cmd_nc_advance(client, args) -> int:
    body = dict(evidence=args.evidence, step=args.step, riskReviewRef=args.risk_review, at=args.at)
    if isinstance(client, HttpClient):
        result = client.post(f"/nonconformities/{args.nc_id}/advance", body)
    else:
        result = client.mutate(
            "advance_nc", args.nc_id,
            evidence=args.evidence, step=args.step,
            risk_review_ref=args.risk_review, at=args.at,
        )
    emit(args, result, f"{result['id']}: step {result['currentStep']} {result['status']}")
    return 0


def cmd_nc_extend(client, args) -> int:
    body = dict(justification=args.justification, newDeadline=args.new_deadline, at=args.at)
    if isinstance(client, HttpClient):
        result = client.post(f"/nonconformities/{args.nc_id}/extend", body)
    else:
        result = client.mutate(
            "extend_nc", args.nc_id,
            justification=args.justification, new_deadline=args.new_deadline, at=args.at,
        )
    deadline = result["extensions"][-1]["newDeadline"]
    emit(args, result, f"{result['id']}: deadline extended to {deadline}")
    return 0


def cmd_nc_dispense(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.post(f"/nonconformities/{args.nc_id}/dispensation", {"reason": args.reason, "at": args.at})
    else:
        result = client.mutate("dispense_nc", args.nc_id, reason=args.reason, at=args.at)
    emit(args, result, f"{result['id']}: {result['status']}")
    return 0


def cmd_nc_overdue(client, args) -> int:
    if isinstance(client, HttpClient):
        params = {"state": "overdue"}
        if args.today:
            params["today"] = args.today
        result = client.get("/nonconformities", params)
    else:
        result = client.read("overdue_report", args.today)
    lines = [table(result["deadlines"], ["recordId", "state"])]
    if result["escalations"]:
        lines.append("escalations: " + ", ".join(result["escalations"]))
    if result["containmentWarnings"]:
        lines.append("containment warnings: " + ", ".join(result["containmentWarnings"]))
    emit(args, result, "\n".join(lines))
    return 0


def cmd_nc_notify_overdue(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.post("/nonconformities/notify-overdue", {"today": args.today, "at": args.at})
    else:
        result = client.mutate("notify_overdue", today=args.today, at=args.at)
    emit(args, result, "notified: " + (", ".join(result["notified"]) or "none"))
    return 0


def cmd_nc_show(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get(f"/nonconformities/{args.nc_id}")
    else:
        result = client.read("get_nc", args.nc_id)
    emit(args, result, None)
    return 0


def cmd_backup_record(client, args) -> int:
    body = dict(
        systemId=args.system, category=args.category, frequencyClass=args.frequency,
        succeeded=args.succeeded, transferredToDR=args.transferred, kind=args.kind,
        takenAt=args.taken_at, mediaId=args.media, durationSeconds=args.duration,
        changeContext=args.change_context, id=args.id, at=args.at,
    )
    if isinstance(client, HttpClient):
        result = client.post("/backups", body)
    else:
        result = client.mutate(
            "record_backup",
            system_id=args.system, category=args.category, frequency_class=args.frequency,
            succeeded=args.succeeded, transferred_to_dr=args.transferred, kind=args.kind,
            taken_at=args.taken_at, media_id=args.media, duration_seconds=args.duration,
            change_context=args.change_context, id=args.id, at=args.at,
        )
    backup = result["backup"]
    lines = [f"{backup['id']}: retention until {result['retentionExpiry']}"]
    for warning in result["warnings"]:
        lines.append(f"warning: {warning}")
    emit(args, result, "\n".join(lines))
    return 0


def cmd_backup_rpo(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get(f"/compliance/rpo/{args.system}", {"now": args.now} if args.now else None)
    else:
        result = client.read("rpo_status", args.system, args.now)
    state = "compliant" if result["compliant"] else "NONCOMPLIANT"
    hours = result["hoursSinceLast"]
    detail = f"{hours:.2f}h since last success" if hours is not None else "no successful backup"
    emit(args, result, f"{args.system}: {state} ({detail})")
    return 0


def cmd_backup_rto(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get(f"/compliance/rto/{args.restore}")
    else:
        result = client.read("rto_status", args.restore)
    state = "compliant" if result["compliant"] else "NONCOMPLIANT"
    emit(args, result, f"{args.restore}: {state} ({result['hours']:.2f}h)")
    return 0


def cmd_backup_schedule(client, args) -> int:
    teams = []
    for spec in args.team:
        team_id, _, systems = spec.partition(":")
        teams.append({"teamId": team_id, "systemIds": split_csv(systems)})
    body = dict(teams=teams, month=args.month, seed=args.seed, id=args.id, at=args.at)
    if isinstance(client, HttpClient):
        result = client.post("/test-restore-schedule", body)
    else:
        result = client.mutate("schedule_restores", **body)
    emit(args, result, table(result["entries"], ["teamId", "systemId", "dueInMonth"]))
    return 0


def cmd_backup_review(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get("/reports/backup-review")
    else:
        result = client.read("backup_review")
    emit(args, result, table(result, ["id", "systemId", "finding"]))
    return 0


def cmd_restore_record(client, args) -> int:
    approved = parse_actor_spec(args.approved_by, Role.HEAD_OF_IT.value)
    signers = [parse_actor_spec(s, Role.DBA.value) for s in args.signer]
    body = dict(
        systemId=args.system, approvedBy=approved, isTest=args.is_test,
        requestedAt=args.requested_at, startedAt=args.started_at,
        completedAt=args.completed_at, outcome=args.outcome,
        reportSignedBy=signers, id=args.id, at=args.at,
    )
    if isinstance(client, HttpClient):
        result = client.post("/restores", body)
    else:
        result = client.mutate(
            "create_restore",
            system_id=args.system, approved_by=approved, is_test=args.is_test,
            requested_at=args.requested_at, started_at=args.started_at,
            completed_at=args.completed_at, outcome=args.outcome,
            report_signed_by=signers, id=args.id, at=args.at,
        )
    restore = result["restore"]
    line = f"{restore['id']}: {restore.get('outcome', 'Pending')}"
    if "rto" in result:
        state = "compliant" if result["rto"]["compliant"] else "NONCOMPLIANT"
        line += f", RTO {state} ({result['rto']['hours']:.2f}h)"
    emit(args, result, line)
    return 0


def cmd_restore_validation(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get(
            f"/compliance/restore-validation/{args.system}",
            {"today": args.today} if args.today else None,
        )
    else:
        result = client.read("restore_validation", args.system, args.today)
    due = "DUE" if result["due"] else "not due"
    last = result["lastValidatedAt"] or "never"
    emit(args, result, f"{args.system}: {due} (last validated {last})")
    return 0


def cmd_media_add(client, args) -> int:
    body = dict(tier=args.tier, encrypted=args.encrypted, location=args.location, id=args.id, at=args.at)
    if isinstance(client, HttpClient):
        result = client.post("/media", body)
    else:
        result = client.mutate("create_media", **body)
    media = result["media"]
    lines = [f"{media['id']}: {media['tier']} at {media['location']}"]
    for warning in result["warnings"]:
        lines.append(f"warning: {warning}")
    emit(args, result, "\n".join(lines))
    return 0


def cmd_media_transport(client, args) -> int:
    body = dict(to=args.to, courierRef=args.courier, at=args.at)
    if isinstance(client, HttpClient):
        result = client.post(f"/media/{args.media_id}/transport", body)
    else:
        result = client.mutate(
            "transport_media", args.media_id, to=args.to, courier_ref=args.courier, at=args.at
        )
    emit(args, result, f"{result['id']}: now {result['location']}")
    return 0


def cmd_media_dispose(client, args) -> int:
    body = dict(method=args.method, confirmation=args.confirmation, at=args.at)
    if isinstance(client, HttpClient):
        result = client.post(f"/media/{args.media_id}/dispose", body)
    else:
        result = client.mutate(
            "dispose_media", args.media_id,
            method=args.method, confirmation=args.confirmation, at=args.at,
        )
    disposal = result["disposal"]
    emit(
        args, result,
        f"{result['id']}: disposed by {disposal['method']}, "
        f"certificate {disposal['certificateId']} (register #{disposal['registerSeq']})",
    )
    return 0


def cmd_media_register(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get("/disposal-register")
    else:
        result = client.read("disposal_register")
    emit(args, result, table(result, ["registerSeq", "mediaId", "certificateId", "method", "at"]))
    return 0


def cmd_audit_tail(client, args) -> int:
    if isinstance(client, HttpClient):
        result = client.get("/audit", {"sinceSeq": args.since_seq})
    else:
        result = client.read("audit_since", args.since_seq)
    if args.limit is not None:
        result = result[-args.limit :]
    rows = [
        {
            "seq": e["seq"],
            "at": e["at"],
            "actor": e["actor"]["id"],
            "operation": e["operation"],
            "entityId": e["entityId"],
        }
        for e in result
    ]
    emit(args, result, table(rows, ["seq", "at", "actor", "operation", "entityId"]))
    return 0


def cmd_export(client, args) -> int:
    if isinstance(client, HttpClient):
        text = client.get_text("/export")
    else:
        text = client.read("export_json")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def cmd_import(client, args) -> int:
    try:
        with open(args.path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FileUnreadable(f"cannot read {args.path}: {exc}")
    if args.input_format == "csv":
        rows, fatal = rg.parse_risk_csv(text)
        if fatal:
            line, message = fatal[0]
            raise FormatError(line, message)
    else:
        try:
            data = json.loads(text)
        except ValueError as exc:
            raise FormatError(1, f"invalid JSON: {exc}")
        if not isinstance(data, list):
            raise FormatError(1, "JSON import expects an array of row objects")
        rows = list(enumerate(data, start=1))
    if isinstance(client, HttpClient):
        result = client.post(
            "/register-import",
            {"cycleId": args.cycle, "rows": [[n, r] for n, r in rows], "at": args.at},
        )
    else:
        result = client.mutate("import_rows", rows, cycle_id=args.cycle, at=args.at)
    lines = [f"imported {result['inserted']} rows, {len(result['errors'])} errors"]
    for err in result["errors"]:
        lines.append(f"line {err['line']}: {err['error']}")
    emit(args, result, "\n".join(lines))
    return 0


def cmd_serve(client, args) -> int:  # pragma: no cover - blocks on uvicorn
    from .service import serve

    serve(client.engine)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isms",
        description="ISMS governance engine: risk register, corrective actions, backup and media governance.",
    )
    parser.add_argument("--server", help="service base URL; mutually exclusive with --data-dir")
    parser.add_argument("--data-dir", help="offline mode data directory")
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--actor", default="cli", help="acting identity for mutations")
    parser.add_argument("--role", default=Role.ASSESSOR.value, choices=_values(Role))
    parser.add_argument("--format", default="table", choices=["table", "json", "csv"])

    sub = parser.add_subparsers(dest="group", required=True)

    def command(group_sub, name, handler, **kwargs):
        p = group_sub.add_parser(name, **kwargs)
        p.set_defaults(handler=handler)
        return p

    def opt_id_at(p):
        p.add_argument("--id", help="explicit entity id (defaults to a generated one)")
        p.add_argument("--at", help="explicit ISO-8601 timestamp for the operation")

    asset = sub.add_parser("asset").add_subparsers(dest="command", required=True)
    p = command(asset, "add", cmd_asset_add)
    p.add_argument("--name", required=True)
    p.add_argument("--group", required=True, choices=_values(AssetGroup))
    p.add_argument("--owner", required=True)
    p.add_argument("--custodian", required=True)
    p.add_argument("--criticality", required=True, type=int)
    p.add_argument("--cia", required=True, help="confidentiality,integrity,availability e.g. High,High,Medium")
    p.add_argument("--depends-on", help="comma-separated asset ids")
    opt_id_at(p)
    command(asset, "list", cmd_asset_list)

    threat = sub.add_parser("threat").add_subparsers(dest="command", required=True)
    p = command(threat, "add", cmd_threat_add)
    p.add_argument("--name", required=True)
    p.add_argument("--category", required=True, choices=_values(ThreatCategory))
    p.add_argument("--frequency", required=True, type=int)
    opt_id_at(p)

    vuln = sub.add_parser("vuln").add_subparsers(dest="command", required=True)
    p = command(vuln, "add", cmd_vuln_add)
    p.add_argument("--description", required=True)
    p.add_argument("--source", required=True, choices=_values(VulnerabilitySource))
    p.add_argument("--assets", required=True, help="comma-separated affected asset ids")
    opt_id_at(p)

    control = sub.add_parser("control").add_subparsers(dest="command", required=True)
    p = command(control, "add", cmd_control_add)
    p.add_argument("--description", required=True)
    p.add_argument("--status", required=True, choices=_values(ControlStatus))
    p.add_argument("--effectiveness", required=True, type=int)
    p.add_argument("--applies-to", help="comma-separated asset ids")
    opt_id_at(p)

    cycle = sub.add_parser("cycle").add_subparsers(dest="command", required=True)
    p = command(cycle, "open", cmd_cycle_open)
    p.add_argument("--scope", required=True)
    p.add_argument("--member", action="append", required=True,
                   help="team member as id:role or id:name:role; repeat per member")
    p.add_argument("--trigger", default=CycleTrigger.ANNUAL.value, choices=_values(CycleTrigger))
    opt_id_at(p)
    p = command(cycle, "advance", cmd_cycle_advance)
    p.add_argument("cycle_id")
    p.add_argument("--evidence", required=True)
    p.add_argument("--at")
    p = command(cycle, "approve-boundary", cmd_cycle_approve_boundary)
    p.add_argument("cycle_id")
    p.add_argument("--at")
    p = command(cycle, "show", cmd_cycle_show)
    p.add_argument("cycle_id")
    command(cycle, "list", cmd_cycle_list)

    risk = sub.add_parser("risk").add_subparsers(dest="command", required=True)
    p = command(risk, "add", cmd_risk_add)
    p.add_argument("--cycle", required=True)
    p.add_argument("--asset", required=True)
    p.add_argument("--threat", required=True)
    p.add_argument("--vuln", required=True)
    p.add_argument("--loss", required=True, type=int, help="estimated business loss 1..5")
    opt_id_at(p)
    p = command(risk, "treat", cmd_risk_treat)
    p.add_argument("risk_id")
    p.add_argument("--strategy", required=True, choices=_values(TreatmentStrategy))
    p.add_argument("--rationale", required=True)
    p.add_argument("--controls", help="comma-separated control ids")
    p.add_argument("--at")
    p = command(risk, "status", cmd_risk_status)
    p.add_argument("risk_id")
    p.add_argument("--status", required=True, choices=_values(TreatmentStatus))
    p.add_argument("--at")
    p = command(risk, "approve", cmd_risk_approve)
    p.add_argument("risk_id")
    p.add_argument("--impact", required=True, type=int, help="post-treatment impact 1..5")
    p.add_argument("--likelihood", required=True, type=int, help="post-treatment likelihood 1..5")
    p.add_argument("--medium", default=ApprovalMedium.ELECTRONIC.value, choices=_values(ApprovalMedium))
    p.add_argument("--at")
    p = command(risk, "note", cmd_risk_note)
    p.add_argument("risk_id")
    p.add_argument("--kind", required=True, choices=_values(NoteKind))
    p.add_argument("--text", required=True)
    opt_id_at(p)
    p = command(risk, "show", cmd_risk_show)
    p.add_argument("risk_id")
    p = command(risk, "list", cmd_risk_list)
    p.add_argument("--cycle")

    report = sub.add_parser("report").add_subparsers(dest="command", required=True)
    command(report, "health", cmd_report_health)
    p = command(report, "review", cmd_report_review)
    p.add_argument("--as-of", help="report reference timestamp")

    nc = sub.add_parser("nc").add_subparsers(dest="command", required=True)
    p = command(nc, "report", cmd_nc_report)
    p.add_argument("--description", required=True)
    p.add_argument("--source", required=True, choices=_values(NcSource))
    opt_id_at(p)
    p = command(nc, "advance", cmd_nc_advance)
    p.add_argument("nc_id")
    p.add_argument("--evidence", required=True)
    p.add_argument("--step", type=int, help="must be the next step; anything else is a skip")
    p.add_argument("--risk-review", help="risk entry id (required to reach step 5)")
    p.add_argument("--at")
    p = command(nc, "extend", cmd_nc_extend)
    p.add_argument("nc_id")
    p.add_argument("--justification", required=True)
    p.add_argument("--new-deadline", required=True, help="YYYY-MM-DD, later than the current deadline")
    p.add_argument("--at")
    p = command(nc, "dispense", cmd_nc_dispense)
    p.add_argument("nc_id")
    p.add_argument("--reason", required=True)
    p.add_argument("--at")
    p = command(nc, "overdue", cmd_nc_overdue)
    p.add_argument("--today", help="deadline reference date, default today")
    p = command(nc, "notify-overdue", cmd_nc_notify_overdue)
    p.add_argument("--today")
    p.add_argument("--at")
    p = command(nc, "show", cmd_nc_show)
    p.add_argument("nc_id")

    backup = sub.add_parser("backup").add_subparsers(dest="command", required=True)
    p = command(backup, "record", cmd_backup_record)
    p.add_argument("--system", required=True)
    p.add_argument("--category", required=True, choices=_values(BackupCategory))
    p.add_argument("--frequency", required=True, choices=_values(FrequencyClass))
    p.add_argument("--kind", required=True, choices=_values(BackupKind))
    p.add_argument("--succeeded", default=True, action=argparse.BooleanOptionalAction)
    p.add_argument("--transferred", default=True, action=argparse.BooleanOptionalAction,
                   help="copy shipped to the DR site")
    p.add_argument("--taken-at")
    p.add_argument("--media", help="media item id holding this backup")
    p.add_argument("--duration", type=float, help="job duration in seconds")
    p.add_argument("--change-context", choices=_values(ChangeContext))
    opt_id_at(p)
    p = command(backup, "rpo", cmd_backup_rpo)
    p.add_argument("system")
    p.add_argument("--now", help="reference timestamp, default now")
    p = command(backup, "rto", cmd_backup_rto)
    p.add_argument("restore")
    p = command(backup, "schedule-restores", cmd_backup_schedule)
    p.add_argument("--team", action="append", required=True,
                   help="teamId:systemId,systemId,...; repeat per team")
    p.add_argument("--month", required=True, help="YYYY-MM")
    p.add_argument("--seed", required=True, type=int)
    opt_id_at(p)
    command(backup, "review", cmd_backup_review)

    restore = sub.add_parser("restore").add_subparsers(dest="command", required=True)
    p = command(restore, "record", cmd_restore_record)
    p.add_argument("--system", required=True)
    p.add_argument("--approved-by", required=True, help="approver as id (Head of IT) or id:role")
    p.add_argument("--is-test", default=False, action=argparse.BooleanOptionalAction)
    p.add_argument("--requested-at")
    p.add_argument("--started-at")
    p.add_argument("--completed-at")
    p.add_argument("--outcome", choices=_values(RestoreOutcome))
    p.add_argument("--signer", action="append", default=[],
                   help="report signer as id:role; repeat per signer")
    opt_id_at(p)
    p = command(restore, "validation", cmd_restore_validation)
    p.add_argument("system")
    p.add_argument("--today")

    media = sub.add_parser("media").add_subparsers(dest="command", required=True)
    p = command(media, "add", cmd_media_add)
    p.add_argument("--tier", required=True, choices=_values(MediaTier))
    p.add_argument("--encrypted", default=False, action=argparse.BooleanOptionalAction)
    p.add_argument("--location", default=MediaLocation.ON_SITE.value,
                   choices=[l.value for l in MediaLocation if l is not MediaLocation.DISPOSED])
    opt_id_at(p)
    p = command(media, "transport", cmd_media_transport)
    p.add_argument("media_id")
    p.add_argument("--to", required=True, choices=[l.value for l in MediaLocation if l is not MediaLocation.DISPOSED])
    p.add_argument("--courier", required=True, help="courier or carrier reference")
    p.add_argument("--at")
    p = command(media, "dispose", cmd_media_dispose)
    p.add_argument("media_id")
    p.add_argument("--method", required=True, choices=_values(DisposalMethod))
    p.add_argument("--confirmation", required=True, help="written confirmation reference")
    p.add_argument("--at")
    command(media, "register", cmd_media_register)

    audit = sub.add_parser("audit").add_subparsers(dest="command", required=True)
    p = command(audit, "tail", cmd_audit_tail)
    p.add_argument("--since-seq", type=int, default=0)
    p.add_argument("--limit", type=int, help="show only the last N events")

    p = sub.add_parser("export")
    p.set_defaults(handler=cmd_export, command="export")
    p.add_argument("--out", help="write to a file instead of stdout")

    p = sub.add_parser("import")
    p.set_defaults(handler=cmd_import, command="import")
    p.add_argument("path")
    p.add_argument("--cycle", required=True, help="cycle id the rows belong to")
    p.add_argument("--input-format", default="csv", choices=["csv", "json"])
    p.add_argument("--at")

    p = sub.add_parser("serve")
    p.set_defaults(handler=cmd_serve, command="serve")

    return parser


CSV_CAPABLE = {cmd_risk_list}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.server and args.data_dir:
        parser.error("--server and --data-dir are mutually exclusive")
    if args.format == "csv" and args.handler not in CSV_CAPABLE:
        parser.error("csv output is only available for risk list")

    actor = Actor(id=args.actor, name=args.actor, role=args.role)

    try:
        if args.server:
            if args.handler is cmd_serve:
                parser.error("serve runs against a data directory, not a remote server")
            client = HttpClient(args.server, actor)
        else:
            config = load_config(args.config)
            if args.data_dir:
                from dataclasses import replace

                config = replace(config, data_directory=args.data_dir)
            client = LocalClient(Engine(config), actor)
        return args.handler(client, args)
    except (IsmsError, RemoteError) as exc:
        name = exc.error if isinstance(exc, RemoteError) else type(exc).__name__
        message = exc.message if isinstance(exc, RemoteError) else str(exc)
        print(f"{name}: {message}", file=sys.stderr)
        return 1
    except OSError as exc:  # unreachable server, unwritable output file
        print(f"IOError: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
