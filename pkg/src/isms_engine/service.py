"""HTTP service: every engine operation behind a JSON API.

Mutations trust X-Actor-Id / X-Actor-Role headers for identity (an
authenticating proxy is assumed in front) and map domain errors onto
403/404/409/422. Reads never mutate state; reports accept explicit
time overrides so responses are reproducible.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .engine import Engine
from .errors import ConflictRetry, Forbidden, IsmsError, UnknownRef, ValidationError
from .model import Actor, Role, coerce_enum


def status_for(exc: IsmsError) -> int:
    if isinstance(exc, Forbidden):
        return 403
    if isinstance(exc, UnknownRef):
        return 404
    if isinstance(exc, ConflictRetry):
        return 409
    return 422


class MissingActor(Exception):
    def __init__(self, header: str) -> None:
        self.header = header
        super().__init__(f"mutations require the {header} header")


def request_actor(request: Request) -> Actor:
    actor_id = request.headers.get("X-Actor-Id")
    role = request.headers.get("X-Actor-Role")
    if not actor_id:
        raise MissingActor("X-Actor-Id")
    if not role:
        raise MissingActor("X-Actor-Role")
    try:
        parsed = coerce_enum(Role, role, "X-Actor-Role")
    except ValidationError as exc:
        raise MissingActor(f"X-Actor-Role ({exc})")
    return Actor(id=actor_id, name=actor_id, role=parsed)


def need(body: dict, key: str):
    if key not in body:
        raise ValidationError(f"missing required field {key!r}")
    return body[key]


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="isms-engine", docs_url=None, redoc_url=None)

    @app.exception_handler(IsmsError)
    def domain_error(request: Request, exc: IsmsError) -> JSONResponse:
        return JSONResponse(
            status_code=status_for(exc),
            content={"error": type(exc).__name__, "message": str(exc)},
        )

    @app.exception_handler(MissingActor)
    def actor_error(request: Request, exc: MissingActor) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": "MissingActor", "message": str(exc)},
        )

    # asset catalog

    @app.post("/assets")
    def create_asset(request: Request, body: dict):
        return engine.create_asset(
            request_actor(request),
            name=need(body, "name"),
            group=need(body, "group"),
            owner=need(body, "owner"),
            custodian=need(body, "custodian"),
            criticality=need(body, "criticality"),
            cia=need(body, "cia"),
            dependencies=body.get("dependencies", ()),
            id=body.get("id"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.get("/assets")
    def list_assets():
        return engine.list_assets()

    @app.get("/assets/{asset_id}")
    def get_asset(asset_id: str):
        return engine.get_asset(asset_id)

    @app.post("/threats")
    def create_threat(request: Request, body: dict):
        return engine.create_threat(
            request_actor(request),
            name=need(body, "name"),
            category=need(body, "category"),
            frequency=need(body, "frequency"),
            id=body.get("id"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/vulnerabilities")
    def create_vulnerability(request: Request, body: dict):
        return engine.create_vulnerability(
            request_actor(request),
            description=need(body, "description"),
            source=need(body, "source"),
            affected_assets=need(body, "affectedAssets"),
            id=body.get("id"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/controls")
    def create_control(request: Request, body: dict):
        return engine.create_control(
            request_actor(request),
            description=need(body, "description"),
            status=need(body, "status"),
            effectiveness=need(body, "effectiveness"),
            applies_to=body.get("appliesTo", ()),
            id=body.get("id"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    # assessment cycles

    @app.post("/cycles")
    def open_cycle(request: Request, body: dict):
        return engine.open_cycle(
            request_actor(request),
            scope=need(body, "scope"),
            team=need(body, "team"),
            trigger=need(body, "trigger"),
            id=body.get("id"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.get("/cycles")
    def list_cycles():
        return engine.list_cycles()

    @app.get("/cycles/{cycle_id}")
    def get_cycle(cycle_id: str):
        return engine.get_cycle(cycle_id)

    @app.post("/cycles/{cycle_id}/boundary-approval")
    def approve_boundary(request: Request, cycle_id: str, body: Optional[dict] = None):
        body = body or {}
        return engine.approve_boundary(
            request_actor(request),
            cycle_id,
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/cycles/{cycle_id}/advance")
    def advance_cycle(request: Request, cycle_id: str, body: dict):
        return engine.advance_cycle(
            request_actor(request),
            cycle_id,
            evidence=need(body, "evidence"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/cycles/{cycle_id}/risks")
    def add_risk(request: Request, cycle_id: str, body: dict):
        return engine.add_risk(
            request_actor(request),
            cycle_id,
            asset_id=need(body, "assetId"),
            threat_id=need(body, "threatId"),
            vulnerability_id=need(body, "vulnerabilityId"),
            business_loss=need(body, "businessLoss"),
            id=body.get("id"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    # risk register

    @app.get("/risks")
    def list_risks(cycleId: Optional[str] = None):
        return engine.list_risks(cycleId)

    @app.get("/risks/{risk_id}")
    def get_risk(risk_id: str):
        return engine.get_risk(risk_id)

    @app.get("/risks/{risk_id}/projection")
    def projection(risk_id: str, impact: int, likelihood: int):
        return engine.projection(risk_id, impact, likelihood)

    @app.post("/risks/{risk_id}/treatment")
    def plan_treatment(request: Request, risk_id: str, body: dict):
        return engine.plan_treatment(
            request_actor(request),
            risk_id,
            strategy=need(body, "strategy"),
            rationale=need(body, "rationale"),
            controls=body.get("controls", ()),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/risks/{risk_id}/treatment-status")
    def set_treatment_status(request: Request, risk_id: str, body: dict):
        return engine.set_treatment_status(
            request_actor(request),
            risk_id,
            status=need(body, "status"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/risks/{risk_id}/residual-approval")
    def record_residual(request: Request, risk_id: str, body: dict):
        return engine.record_residual(
            request_actor(request),
            risk_id,
            post_impact=need(body, "postImpact"),
            post_likelihood=need(body, "postLikelihood"),
            medium=need(body, "medium"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/risks/{risk_id}/notes")
    def add_note(request: Request, risk_id: str, body: dict):
        return engine.add_note(
            request_actor(request),
            risk_id,
            kind=need(body, "kind"),
            text=need(body, "text"),
            id=body.get("id"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    # reports

    @app.get("/reports/portfolio-health")
    def portfolio_health():
        return engine.portfolio_health()

    @app.get("/reports/management-review")
    def management_review(asOf: Optional[str] = None):
        return engine.management_review(asOf)

    @app.get("/reports/backup-review")
    def backup_review():
        return engine.backup_review()

    # corrective actions

    @app.post("/nonconformities")
    def report_nc(request: Request, body: dict):
        return engine.report_nc(
            request_actor(request),
            description=need(body, "description"),
            source=need(body, "source"),
            id=body.get("id"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.get("/nonconformities")
    def list_ncs(state: Optional[str] = None, today: Optional[str] = None):
        if state is None:
            return engine.list_ncs()
        if state != "overdue":
            raise ValidationError(f"unknown state filter {state!r}")
        return engine.overdue_report(today)

    @app.get("/nonconformities/{nc_id}")
    def get_nc(nc_id: str):
        return engine.get_nc(nc_id)

    @app.post("/nonconformities/{nc_id}/advance")
    def advance_nc(request: Request, nc_id: str, body: dict):
        return engine.advance_nc(
            request_actor(request),
            nc_id,
            evidence=need(body, "evidence"),
            step=body.get("step"),
            risk_review_ref=body.get("riskReviewRef"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/nonconformities/{nc_id}/extend")
    def extend_nc(request: Request, nc_id: str, body: dict):
        return engine.extend_nc(
            request_actor(request),
            nc_id,
            justification=need(body, "justification"),
            new_deadline=need(body, "newDeadline"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/nonconformities/{nc_id}/dispensation")
    def dispense_nc(request: Request, nc_id: str, body: dict):
        return engine.dispense_nc(
            request_actor(request),
            nc_id,
            reason=need(body, "reason"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/nonconformities/notify-overdue")
    def notify_overdue(request: Request, body: Optional[dict] = None):
        body = body or {}
        return engine.notify_overdue(
            request_actor(request), today=body.get("today"), at=body.get("at")
        )

    # backups, restores, media

    @app.post("/backups")
    def record_backup(request: Request, body: dict):
        return engine.record_backup(
            request_actor(request),
            system_id=need(body, "systemId"),
            category=need(body, "category"),
            frequency_class=need(body, "frequencyClass"),
            succeeded=need(body, "succeeded"),
            transferred_to_dr=need(body, "transferredToDR"),
            kind=need(body, "kind"),
            taken_at=body.get("takenAt"),
            media_id=body.get("mediaId"),
            duration_seconds=body.get("durationSeconds"),
            change_context=body.get("changeContext"),
            id=body.get("id"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.get("/compliance/rpo/{system_id}")
    def rpo_status(system_id: str, now: Optional[str] = None):
        return engine.rpo_status(system_id, now)

    @app.get("/compliance/rto/{restore_id}")
    def rto_status(restore_id: str):
        return engine.rto_status(restore_id)

    @app.get("/compliance/restore-validation/{system_id}")
    def restore_validation(system_id: str, today: Optional[str] = None):
        return engine.restore_validation(system_id, today)

    @app.post("/restores")
    def create_restore(request: Request, body: dict):
        return engine.create_restore(
            request_actor(request),
            system_id=need(body, "systemId"),
            approved_by=need(body, "approvedBy"),
            is_test=need(body, "isTest"),
            requested_at=body.get("requestedAt"),
            started_at=body.get("startedAt"),
            completed_at=body.get("completedAt"),
            outcome=body.get("outcome"),
            report_signed_by=body.get("reportSignedBy", ()),
            id=body.get("id"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/test-restore-schedule")
    def schedule_restores(request: Request, body: dict):
        return engine.schedule_restores(
            request_actor(request),
            teams=need(body, "teams"),
            month=need(body, "month"),
            seed=need(body, "seed"),
            id=body.get("id"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/media")
    def create_media(request: Request, body: dict):
        return engine.create_media(
            request_actor(request),
            tier=need(body, "tier"),
            encrypted=need(body, "encrypted"),
            location=body.get("location", "OnSite"),
            id=body.get("id"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.get("/media")
    def list_media():
        return engine.list_media()

    @app.get("/media/{media_id}")
    def get_media(media_id: str):
        return engine.get_media(media_id)

    @app.post("/media/{media_id}/transport")
    def transport_media(request: Request, media_id: str, body: dict):
        return engine.transport_media(
            request_actor(request),
            media_id,
            to=need(body, "to"),
            courier_ref=need(body, "courierRef"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.post("/media/{media_id}/dispose")
    def dispose_media(request: Request, media_id: str, body: dict):
        return engine.dispose_media(
            request_actor(request),
            media_id,
            method=need(body, "method"),
            confirmation=need(body, "confirmation"),
            at=body.get("at"),
            expected_version=body.get("expectedVersion"),
        )

    @app.get("/disposal-register")
    def disposal_register():
        return engine.disposal_register()

    # register exchange

    @app.post("/register-import")
    def import_rows(request: Request, body: dict):
        return engine.import_rows(
            request_actor(request),
            [(int(line), row) for line, row in need(body, "rows")],
            cycle_id=need(body, "cycleId"),
            at=body.get("at"),
        )

    # audit and export

    @app.get("/audit")
    def audit(sinceSeq: int = 0):
        return engine.audit_since(sinceSeq)

    @app.get("/export")
    def export():
        return Response(
            content=engine.export_json(), media_type="application/json"
        )

    return app


def serve(engine: Engine) -> None:  # pragma: no cover - thin uvicorn wrapper
    import uvicorn

    uvicorn.run(
        create_app(engine),
        host=engine.config.host,
        port=engine.config.port,
        log_level="warning",
    )
