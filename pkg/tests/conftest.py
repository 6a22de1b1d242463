import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fedgame.coverage import CoverageModel
from fedgame.linear import LinearModel
from fedgame.model import Instance

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        _criteria[number] = (title, report.passed, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, passed, duration = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  "
                                    f"({duration:.2f}s)  {title}")


@pytest.fixture
def two_agent_coverage():
    """Two agents, both uniform over the same two points, requirement 3/4."""
    return Instance(CoverageModel(np.full((2, 2), 0.5)), np.full(2, 0.75))


@pytest.fixture
def coupled_pair():
    return Instance(LinearModel(np.array([[1.0, 0.5], [0.5, 1.0]])), np.ones(2))


@pytest.fixture
def identity_pair():
    return Instance(LinearModel(np.eye(2)), np.ones(2))
