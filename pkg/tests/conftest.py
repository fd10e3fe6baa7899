import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from arhe.translit import default_table  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def table():
    return default_table()


@pytest.fixture
def fixtures():
    return FIXTURES


# acceptance bookkeeping: one summary line per criterion marker
_criteria: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion this test belongs to")


def pytest_runtest_logreport(report):
    name = getattr(report, "criterion", None)
    if name is None:
        return
    outcomes = _criteria.setdefault(name, [])
    if report.when == "call" or report.outcome != "passed":
        outcomes.append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcomes in _criteria.items():
        if "failed" in outcomes:
            status = "FAIL"
        elif outcomes and all(o == "skipped" for o in outcomes):
            status = "SKIP"
        else:
            status = "PASS"
        terminalreporter.write_line(f"{status}  {name}  ({len(outcomes)} checks)")
