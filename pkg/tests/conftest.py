import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def pytest_addoption(parser):
    parser.addoption("--run-extended", action="store_true", help="run long acceptance runs")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-extended") or os.environ.get("SDSYNTH_EXTENDED") == "1":
        return
    skip = pytest.mark.skip(reason="extended run; use --run-extended or SDSYNTH_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


_criteria = {}


def pytest_runtest_logreport(report):
    item_marks = getattr(report, "criterion", None)
    if item_marks is None:
        return
    n, title = item_marks
    if report.when == "call" or report.outcome != "passed":
        prev = _criteria.get(n, (title, "PASS"))[1]
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        if prev == "FAIL":
            outcome = "FAIL"
        _criteria[n] = (title, outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, outcome = _criteria[n]
        terminalreporter.write_line(f"criterion {n:2d}: {outcome}  {title}")
