"""Acceptance bookkeeping: one PASS/FAIL line per numbered criterion.

Tests carry ``@pytest.mark.acceptance(n, budget_s)``. A criterion passes when
every test attached to it passes and their summed runtime fits the budget.
"""
import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS = defaultdict(lambda: {"outcomes": [], "seconds": 0.0, "budget": None, "title": ""})


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, budget_s, title): numbered acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            n, budget, title = mark.args
            entry = _RESULTS[n]
            entry["budget"], entry["title"] = budget, title


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    entry = _RESULTS[mark.args[0]]
    entry["seconds"] += report.duration
    if report.when == "call" or report.outcome != "passed":
        entry["outcomes"].append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        entry = _RESULTS[n]
        if not entry["outcomes"]:
            continue
        failed = [name for name, o in entry["outcomes"] if o != "passed"]
        slow = entry["seconds"] > entry["budget"]
        status = "FAIL" if failed or slow else "PASS"
        line = (f"criterion {n:2d} {status}  {entry['title']}  "
                f"[{entry['seconds']:.1f} s of {entry['budget']} s]")
        if failed:
            line += "  failing: " + ", ".join(failed)
        if slow:
            line += "  over runtime budget"
        terminalreporter.write_line(line)
