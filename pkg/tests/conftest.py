"""Prints one PASS/FAIL line per acceptance criterion as they run."""

import re

import pytest

_ACCEPTANCE_NAME = re.compile(r"^test_c(\d+[a-z]?)_(.+?)(?:\[.*\])?$")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if "test_acceptance" not in item.nodeid:
        return
    match = _ACCEPTANCE_NAME.match(item.name)
    if match is None:
        return
    failed_early = report.when == "setup" and (report.failed or report.skipped)
    if report.when != "call" and not failed_early:
        return
    if report.passed:
        status = "PASS"
    elif report.skipped:
        reason = report.longrepr[2] if isinstance(report.longrepr, tuple) else ""
        status = f"SKIP ({reason.removeprefix('Skipped: ')})" if reason else "SKIP"
    else:
        status = "FAIL"
    number, slug = match.groups()
    line = f"ACCEPTANCE {number.lstrip('0'):>3} {slug.replace('_', '-')}: {status}"
    terminal = item.config.pluginmanager.get_plugin("terminalreporter")
    if terminal is not None:
        terminal.write_line("")
        terminal.write_line(line)
