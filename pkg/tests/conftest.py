import re

import pytest

from iwalog.tables import bundled_fixtures, parse_tables

_CRITERION = re.compile(r"test_criterion_(\d+)")
_acceptance_results = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    match = _CRITERION.search(report.nodeid)
    if match:
        _acceptance_results[int(match.group(1))] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_acceptance_results):
        status = "PASS" if _acceptance_results[num] == "passed" else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE CRITERION {num}: {status}")


@pytest.fixture(scope="session")
def fixture_rows():
    """All bundled table fixtures, parsed once per session."""
    return {name: parse_tables(path)
            for name, path in bundled_fixtures().items()}
