import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    cid = dict(report.user_properties).get("criterion")
    if cid is None:
        return
    detail = dict(report.user_properties).get("detail", "")
    _ACCEPTANCE[cid] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE, key=lambda c: int(c[1:])):
        status, detail = _ACCEPTANCE[cid]
        terminalreporter.write_line(f"{cid}: {status}  {detail}")


@pytest.fixture
def criterion(request, record_property):
    """Tag a test with an acceptance id; returns a callable that stores the measured detail."""
    marker = request.node.get_closest_marker("criterion")
    cid = marker.args[0]
    record_property("criterion", cid)

    def detail(text):
        record_property("detail", text)
        print(f"{cid}: {text}")

    return detail
