import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# compiled kernels make the first example slow
settings.register_profile("randlink", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("randlink")

HOPF_A = np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
HOPF_B = np.array([[0.5, 0.25, 1.0], [0.5, 0.25, -1.0], [3.0, 0.25, 0.0]])
FAR_A = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.3], [0.0, 1.0, 0.6]])
FAR_B = FAR_A + np.array([10.0, 0.0, 0.0])
CROSSING_SQUARE = np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 0.8], [1.0, 0.0, 0.0], [0.0, 1.0, 1.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --- one summary line per acceptance criterion ------------------------------

_criteria = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        if report.skipped and not detail:
            detail = str(report.longrepr[-1]) if isinstance(report.longrepr, tuple) else ""
        _criteria.append((report.nodeid.split("::")[-1], report.outcome.upper(), detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, detail in _criteria:
        label = {"PASSED": "PASS", "FAILED": "FAIL", "SKIPPED": "SKIP"}.get(outcome, outcome)
        terminalreporter.write_line(f"{label:4}  {name}  {detail}")
