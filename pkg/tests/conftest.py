import os

import pytest
from hypothesis import HealthCheck, settings

from algentropy.entropy import observe_trajectories

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


class TrajectoryAudit:
    """Collects every trajectory computed during the session."""

    def __init__(self):
        self.count = 0
        self.subgroup_mode = 0
        self.increases: list = []

    def __call__(self, tr):
        self.count += 1
        if tr.subgroup_mode:
            self.subgroup_mode += 1
            b = tr.betas
            if any(b[i + 1] > b[i] for i in range(len(b) - 1)):
                self.increases.append(list(tr.sizes))


AUDIT = TrajectoryAudit()
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_collection_modifyitems(items):
    # acceptance runs last so the trajectory audit covers the whole session
    items.sort(key=lambda it: it.nodeid.startswith("tests/test_acceptance.py"))


@pytest.fixture(autouse=True, scope="session")
def _audit_all_trajectories():
    with observe_trajectories(AUDIT):
        yield


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {line}")
    if AUDIT.count:
        terminalreporter.write_line(f"trajectory audit: {AUDIT.count} trajectories, {AUDIT.subgroup_mode} in subgroup "
                                    f"mode, {len(AUDIT.increases)} with an increasing beta")
