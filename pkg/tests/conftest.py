import re

_LINES = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion\[(\d+)\]", report.nodeid)
    if not m or (report.when != "call" and report.passed):
        return
    detail = dict(report.user_properties).get("detail", "")
    if report.failed:
        detail = str(report.longrepr.reprcrash.message) if hasattr(report.longrepr, "reprcrash") else "error"
    _LINES[int(m.group(1))] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for num in sorted(_LINES):
        status, detail = _LINES[num]
        terminalreporter.write_line(f"criterion {num:2d} {status}  {CRITERIA[num]}: {detail}")
