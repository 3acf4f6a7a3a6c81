"""Per-criterion PASS/FAIL summary for the acceptance suite.

Acceptance tests carry ``@pytest.mark.acceptance(<id>, <title>)`` and may attach
measured values with ``record_property``.
"""

import pytest

_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(id, title): exit criterion, summarized at the end of the run")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not marker.args:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        measured = ", ".join(f"{k}={v}" for k, v in report.user_properties)
        _RESULTS.append((marker.args[0], marker.args[1], report.outcome, report.duration, measured))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, outcome, duration, measured in sorted(_RESULTS, key=lambda r: r[0]):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        line = f"criterion {cid:<3} {verdict}  {title} ({duration:.1f} s)"
        if measured:
            line += f"  [{measured}]"
        terminalreporter.write_line(line)
