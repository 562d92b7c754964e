import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, list[tuple[str, str]]] = defaultdict(list)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if hasattr(report, "wasxfail"):
            state = "xfail"
        else:
            state = report.outcome
        _criteria[marker.args[0]].append((item.name, state))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        bad = [name for name, state in results if state != "passed"]
        line = f"criterion {n}: {'PASS' if not bad else 'FAIL'}"
        if bad:
            line += "  (" + ", ".join(f"{name} {state}" for name, state in results if state != "passed") + ")"
        terminalreporter.write_line(line)
