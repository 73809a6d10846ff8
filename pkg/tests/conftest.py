from __future__ import annotations

import pytest

from isms_engine import Engine, ServiceConfig
from isms_engine.model import Actor, Role

# Populated by test_acceptance.py; echoed after the run so the verdict per
# criterion is visible even when pytest captures stdout.
ACCEPTANCE_RESULTS: list[tuple[int, str, bool]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed in sorted(ACCEPTANCE_RESULTS):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{verdict} criterion {number}: {title}")


@pytest.fixture
def engine(tmp_path):
    return Engine(ServiceConfig(data_directory=str(tmp_path / "data")))


@pytest.fixture
def assessor():
    return Actor("a-1", "Avery", Role.ASSESSOR)


@pytest.fixture
def ciso():
    return Actor("c-1", "Cameron", Role.CISO)


@pytest.fixture
def top_mgmt():
    return Actor("t-1", "Taylor", Role.TOP_MANAGEMENT)


@pytest.fixture
def risk_owner():
    return Actor("o-1", "Owen", Role.RISK_OWNER)


@pytest.fixture
def head_of_it():
    return Actor("h-1", "Harper", Role.HEAD_OF_IT)


def full_team():
    return [
        Actor("iso", "Indra", Role.INFOSEC_OFFICIAL),
        Actor("hit", "Harper", Role.HEAD_OF_IT),
        Actor("ops", "Oakley", Role.IT_OPERATIONS),
        Actor("aud", "Adi", Role.IT_AUDIT),
    ]


def full_team_docs():
    return [m.to_doc() for m in full_team()]
