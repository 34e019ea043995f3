"""Acceptance bookkeeping: one PASS/FAIL line per criterion after the run."""

from __future__ import annotations

import time

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_START = time.perf_counter()
_RESULTS: dict[int, dict] = {}

# criterion 11 has no test of its own; it is judged on the session wall clock
WALL_CLOCK_LIMIT = 300.0


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _RESULTS.setdefault(number, {"title": title, "passed": 0, "failed": 0})
    if report.when == "call":
        entry["passed" if report.passed else "failed"] += 1
    elif report.failed:
        entry["failed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        verdict = "PASS" if entry["failed"] == 0 and entry["passed"] > 0 else "FAIL"
        tr.write_line(f"[{verdict}] criterion {number:2d}: {entry['title']} ({entry['passed']} passed, {entry['failed']} failed)")
    elapsed = time.perf_counter() - _START
    verdict = "PASS" if elapsed < WALL_CLOCK_LIMIT else "FAIL"
    tr.write_line(f"[{verdict}] criterion 11: session wall clock {elapsed:.1f} s (limit {WALL_CLOCK_LIMIT:.0f} s)")
