import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_OUTCOMES = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if name.startswith("test_criterion_") and (report.when == "call" or report.failed):
        _OUTCOMES[int(name.split("_")[2])] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", {})
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        detail = results.get(number, (None, "no detail recorded"))[1]
        terminalreporter.write_line(f"{'PASS' if _OUTCOMES[number] else 'FAIL'} criterion {number:2d}: {detail}")
