from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"

_criteria: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.setdefault(marker.args[0], []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_criteria):
        status = "PASS" if all(_criteria[k]) else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {status} ({len(_criteria[k])} checks)")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def lur_fixture_state():
    from stabwit.cli import load_dense_state

    return load_dense_state(str(DATA / "lur_fixture.json"))
