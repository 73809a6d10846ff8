"""Assessment cycles, register entries, treatment rules and CSV exchange."""

from __future__ import annotations

from datetime import date, datetime, timezone

import pytest

from isms_engine import register, risk
from isms_engine.canonical import canonical_json
from isms_engine.errors import (
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
from isms_engine.model import Actor, Asset, CiaProfile, Control, Role, Threat

from conftest import full_team

T0 = datetime(2024, 3, 1, 9, 0, 0, tzinfo=timezone.utc)


def new_cycle(cycle_id="cyc-1"):
    return register.open_cycle(
        id=cycle_id,
        scope="Head office information systems",
        team=full_team(),
        trigger="Annual",
        started_at=T0,
    )


def cycle_at_step(step, approver=None):
    cycle = new_cycle()
    approver = approver or Actor("t-1", "Taylor", Role.TOP_MANAGEMENT)
    cycle = register.approve_boundary(cycle, approver)
    actor = Actor("a-1", "Avery", Role.ASSESSOR)
    while cycle.current_step < step:
        cycle = register.advance_step(cycle, actor, "evidence")
    return cycle


def make_asset(criticality=5):
    return Asset(
        id="as-1", name="Core database", group="Software", owner="own",
        custodian="cust", criticality=criticality,
        cia=CiaProfile("High", "High", "High"),
    )


def make_threat(frequency=5):
    return Threat("th-1", "Ransomware", "Human", frequency)


def make_entry(business_loss=5, controls=(), entry_id="r-1"):
    return register.build_risk_entry(
        id=entry_id,
        cycle=cycle_at_step(8),
        asset=make_asset(),
        threat=make_threat(),
        vulnerability_id="vu-1",
        business_loss=business_loss,
        controls=controls,
        created_at=T0,
    )


class TestCycleLifecycle:
    def test_opens_at_step_one(self):
        cycle = new_cycle()
        assert cycle.current_step == 1
        assert cycle.status is register.CycleStatus.OPEN
        assert cycle.boundary_approved_by is None

    def test_empty_scope_rejected(self):
        with pytest.raises(InvalidScope):
            register.open_cycle(
                id="c", scope="   ", team=full_team(),
                trigger="Annual", started_at=T0,
            )

    def test_understaffed_team_rejected(self):
        team = [m for m in full_team() if m.role is not Role.IT_AUDIT]
        with pytest.raises(InvalidTeam) as exc:
            register.open_cycle(
                id="c", scope="s", team=team, trigger="OnDemand", started_at=T0,
            )
        assert exc.value.missing == (Role.IT_AUDIT,)

    def test_boundary_approval_requires_top_management(self):
        cycle = new_cycle()
        with pytest.raises(Forbidden):
            register.approve_boundary(cycle, Actor("c-1", "Cam", Role.CISO))
        approved = register.approve_boundary(
            cycle, Actor("t-1", "Taylor", Role.TOP_MANAGEMENT)
        )
        assert approved.boundary_approved_by.id == "t-1"

    def test_boundary_cannot_be_approved_twice(self):
        cycle = cycle_at_step(1)
        with pytest.raises(ValidationError):
            register.approve_boundary(cycle, Actor("t-2", "Tn", Role.TOP_MANAGEMENT))

    def test_step_three_blocked_without_boundary_approval(self):
        cycle = new_cycle()
        actor = Actor("a-1", "Avery", Role.ASSESSOR)
        cycle = register.advance_step(cycle, actor, "scoped")
        assert cycle.current_step == 2
        with pytest.raises(GateNotMet) as exc:
            register.advance_step(cycle, actor, "boundary set")
        assert exc.value.step == 3
        assert exc.value.reason == "boundary approval missing"

    def test_final_step_blocked_by_unapproved_entry(self):
        cycle = cycle_at_step(11)
        entry = make_entry()
        with pytest.raises(GateNotMet) as exc:
            register.advance_step(cycle, full_team()[0], "closing", entries=[entry])
        assert exc.value.step == 12
        assert "r-1" in exc.value.reason

    def test_final_step_closes_cycle(self):
        cycle = cycle_at_step(11)
        closed = register.advance_step(cycle, full_team()[0], "closing", entries=[])
        assert closed.current_step == 12
        assert closed.status is register.CycleStatus.CLOSED
        with pytest.raises(CycleClosed):
            register.advance_step(closed, full_team()[0], "again")

    def test_blank_evidence_rejected(self):
        with pytest.raises(ValidationError):
            register.advance_step(cycle_at_step(5), full_team()[0], "  ")


class TestRiskEntries:
    def test_requires_identification_step(self):
        early = cycle_at_step(7)
        with pytest.raises(CycleStepTooEarly):
            register.build_risk_entry(
                id="r-1", cycle=early, asset=make_asset(), threat=make_threat(),
                vulnerability_id="vu-1", business_loss=3, controls=(),
                created_at=T0,
            )

    def test_uncontrolled_worst_case_scores_hundred(self):
        entry = make_entry()
        assert (entry.impact, entry.likelihood) == (5, 5)
        assert entry.base_score == 100
        assert entry.base_rating.band is risk.RiskBand.SEVERE

    def test_existing_control_offsets_likelihood(self):
        strong = Control("ct-1", "EDR agent", "Existing", 3, ("as-1",))
        entry = make_entry(controls=[strong])
        assert entry.likelihood == 2
        assert entry.base_score == 40

    def test_planned_or_unrelated_controls_do_not_count(self):
        planned = Control("ct-1", "EDR agent", "Planned", 4, ("as-1",))
        elsewhere = Control("ct-2", "EDR agent", "Existing", 4, ("as-9",))
        entry = make_entry(controls=[planned, elsewhere])
        assert entry.likelihood == 5

    def test_score_integrity_checked_on_construction(self):
        entry = make_entry()
        with pytest.raises(ValidationError):
            register.RiskEntry(
                id="r-2", cycle_id=entry.cycle_id, asset_id="as-1",
                threat_id="th-1", vulnerability_id="vu-1", business_loss=5,
                impact=5, likelihood=5, base_score=99, created_at=T0,
            )

    def test_effective_score_prefers_residual(self):
        entry = make_entry()
        assert entry.effective_score == 100
        treated = treated_entry()
        assert treated.effective_score == 16
        assert treated.base_score == 100


def treated_entry():
    entry = make_entry()
    officer = Actor("i-1", "Indra", Role.INFOSEC_OFFICIAL)
    entry = register.plan_treatment(
        entry, "Reduce", "segment the network", ("ct-1",), officer, date(2024, 3, 1)
    )
    entry = register.set_treatment_status(entry, "Done", officer)
    return register.record_residual_and_approve(
        entry, 2, 2, Actor("o-1", "Owen", Role.RISK_OWNER), "Electronic", T0
    )


class TestTreatment:
    def test_due_date_follows_band_timeline(self):
        entry = make_entry()  # Severe, one month
        officer = Actor("i-1", "Indra", Role.INFOSEC_OFFICIAL)
        planned = register.plan_treatment(
            entry, "Reduce", "why", (), officer, date(2024, 3, 1)
        )
        assert planned.treatment.due_date == date(2024, 4, 1)

    def test_negligible_accept_gets_a_year(self):
        entry = make_entry(business_loss=1, controls=[
            Control("ct-1", "All of them", "Existing", 4, ("as-1",)),
        ])
        assert entry.base_score == 12  # impact 3, likelihood 1
        officer = Actor("i-1", "Indra", Role.INFOSEC_OFFICIAL)
        planned = register.plan_treatment(
            entry, "Accept", "within appetite", (), officer, date(2024, 3, 1)
        )
        assert planned.treatment.due_date == date(2025, 3, 1)

    def test_accept_refused_above_negligible(self):
        entry = make_entry()  # Severe
        officer = Actor("i-1", "Indra", Role.INFOSEC_OFFICIAL)
        with pytest.raises(AcceptNotAllowed):
            register.plan_treatment(entry, "Accept", "no", (), officer, date(2024, 3, 1))

    def test_accept_minor_needs_opt_in(self):
        mild = Control("ct-1", "Strong control", "Existing", 3, ("as-1",))
        entry = make_entry(business_loss=1, controls=[mild])
        assert entry.base_rating.band is risk.RiskBand.MINOR  # 3 x 2 x 4 = 24
        officer = Actor("i-1", "Indra", Role.INFOSEC_OFFICIAL)
        with pytest.raises(AcceptNotAllowed):
            register.plan_treatment(entry, "Accept", "r", (), officer, date(2024, 3, 1))
        planned = register.plan_treatment(
            entry, "Accept", "r", (), officer, date(2024, 3, 1),
            allow_accept_minor=True,
        )
        assert planned.treatment.strategy is register.TreatmentStrategy.ACCEPT

    def test_only_planner_roles_may_plan(self):
        entry = make_entry()
        with pytest.raises(Forbidden):
            register.plan_treatment(
                entry, "Reduce", "r", (), Actor("a-1", "Avery", Role.ASSESSOR),
                date(2024, 3, 1),
            )

    def test_no_second_plan(self):
        entry = make_entry()
        officer = Actor("h-1", "Harper", Role.HEAD_OF_IT)
        entry = register.plan_treatment(entry, "Transfer", "insure", (), officer, date(2024, 3, 1))
        with pytest.raises(PlanExists):
            register.plan_treatment(entry, "Avoid", "retire", (), officer, date(2024, 3, 1))

    def test_residual_requires_done_plan_and_risk_owner(self):
        entry = make_entry()
        owner = Actor("o-1", "Owen", Role.RISK_OWNER)
        with pytest.raises(TreatmentIncomplete):
            register.record_residual_and_approve(entry, 2, 2, owner, "Electronic", T0)
        officer = Actor("i-1", "Indra", Role.INFOSEC_OFFICIAL)
        entry = register.plan_treatment(entry, "Reduce", "r", (), officer, date(2024, 3, 1))
        entry = register.set_treatment_status(entry, "InProgress", officer)
        with pytest.raises(TreatmentIncomplete):
            register.record_residual_and_approve(entry, 2, 2, owner, "Electronic", T0)
        entry = register.set_treatment_status(entry, "Done", officer)
        with pytest.raises(Forbidden):
            register.record_residual_and_approve(
                entry, 2, 2, Actor("c-1", "Cam", Role.CISO), "Electronic", T0
            )
        approved = register.record_residual_and_approve(entry, 2, 2, owner, "Electronic", T0)
        assert approved.residual_score == 16
        assert approved.base_score == 100
        assert approved.owner_approval.medium is register.ApprovalMedium.ELECTRONIC


class TestManagementReview:
    def test_report_is_byte_stable(self):
        cycles = [cycle_at_step(5)]
        entries = [treated_entry()]
        notes = [register.MonitoringNote(
            id="n-1", risk_entry_id="r-1", at=T0,
            author=Actor("a-1", "Avery", Role.ASSESSOR),
            kind="ProfileReview", text="reviewed",
        )]
        first = register.generate_management_review_report(cycles, entries, notes, T0)
        second = register.generate_management_review_report(cycles, entries, notes, T0)
        assert canonical_json(first) == canonical_json(second)

    def test_report_contents(self):
        entries = [treated_entry()]
        report = register.generate_management_review_report(
            [cycle_at_step(5)], entries, [], T0
        )
        assert report["entryCount"] == 1
        assert report["portfolioHealth"] == {"percent": 16.0, "band": "Fair"}
        assert report["entriesByBand"]["Severe"] == ["r-1"]  # grouped by base band
        assert set(report["entriesByBand"]) == {
            "Negligible", "Minor", "Moderate", "Significant", "Severe",
        }
        assert report["imminentCrystallisation"] == []
        assert report["monitoringNoteCounts"] == {"r-1": 0}
        assert report["residualIncreases"] == []
        assert report["openCycles"][0]["currentStep"] == 5

    def test_overdue_open_treatment_is_flagged(self):
        entry = make_entry()
        officer = Actor("i-1", "Indra", Role.INFOSEC_OFFICIAL)
        entry = register.plan_treatment(entry, "Reduce", "r", (), officer, date(2024, 3, 1))
        later = datetime(2024, 4, 2, tzinfo=timezone.utc)  # due 2024-04-01
        report = register.generate_management_review_report([], [entry], [], later)
        assert report["imminentCrystallisation"] == [{
            "entryId": "r-1", "dueDate": "2024-04-01",
            "strategy": "Reduce", "band": "Severe",
        }]
        # a Done plan never crystallises
        done = register.set_treatment_status(entry, "Done", officer)
        report = register.generate_management_review_report([], [done], [], later)
        assert report["imminentCrystallisation"] == []

    def test_residual_increase_surfaces(self):
        entry = treated_entry()
        worse = register.RiskEntry(
            id="r-9", cycle_id=entry.cycle_id, asset_id="as-1", threat_id="th-1",
            vulnerability_id="vu-1", business_loss=1, impact=1, likelihood=1,
            base_score=4, created_at=T0, treatment=entry.treatment,
            residual_score=36, owner_approval=entry.owner_approval,
        )
        report = register.generate_management_review_report([], [worse], [], T0)
        assert report["residualIncreases"] == [
            {"entryId": "r-9", "baseScore": 4, "residualScore": 36}
        ]


class TestCsvExchange:
    def test_round_trip_preserves_entry(self):
        entry = treated_entry()
        text = register.risks_to_csv([entry])
        rows, errors = register.parse_risk_csv(text)
        assert errors == []
        assert len(rows) == 1
        line_no, row = rows[0]
        assert line_no == 2
        rebuilt = register.entry_from_row(row, entry.cycle_id, T0)
        assert rebuilt.id == entry.id
        assert rebuilt.base_score == entry.base_score
        assert rebuilt.residual_score == entry.residual_score
        assert rebuilt.treatment.strategy == entry.treatment.strategy
        assert rebuilt.treatment.due_date == entry.treatment.due_date
        assert rebuilt.owner_approval.actor.id == entry.owner_approval.actor.id

    def test_header_is_fatal_when_wrong(self):
        rows, errors = register.parse_risk_csv("id,asset\nr-1,as-1\n")
        assert rows == []
        assert errors[0][0] == 1

    def test_empty_text_reports_missing_header(self):
        rows, errors = register.parse_risk_csv("")
        assert rows == []
        assert errors == [(1, "missing header row")]

    def test_blank_lines_skipped(self):
        text = ",".join(register.CSV_COLUMNS) + "\n\n   \n"
        rows, errors = register.parse_risk_csv(text)
        assert rows == [] and errors == []

    def base_row(self):
        return {
            "id": "r-1", "asset": "as-1", "threat": "th-1",
            "vulnerability": "vu-1", "impact": "5", "likelihood": "5",
            "score": "100", "rating": "", "strategy": "", "dueDate": "",
            "residual": "", "approvedBy": "", "approvedAt": "",
        }

    def test_score_mismatch_rejected(self):
        row = self.base_row()
        row["score"] = "99"
        with pytest.raises(ValidationError):
            register.entry_from_row(row, "cyc-1", T0)

    def test_rating_mismatch_rejected(self):
        row = self.base_row()
        row["rating"] = "Minor"
        with pytest.raises(ValidationError):
            register.entry_from_row(row, "cyc-1", T0)

    def test_strategy_without_due_date_rejected(self):
        row = self.base_row()
        row["strategy"] = "Reduce"
        with pytest.raises(ValidationError):
            register.entry_from_row(row, "cyc-1", T0)

    def test_approval_without_timestamp_rejected(self):
        row = self.base_row()
        row["approvedBy"] = "o-1"
        with pytest.raises(ValidationError):
            register.entry_from_row(row, "cyc-1", T0)

    def test_missing_identity_column_rejected(self):
        row = self.base_row()
        row["asset"] = " "
        with pytest.raises(ValidationError):
            register.entry_from_row(row, "cyc-1", T0)
