import time

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SUITE_LIMIT = 300.0

_results: dict = {}
_start = [time.perf_counter()]


def pytest_sessionstart(session):
    _start[0] = time.perf_counter()


@pytest.fixture
def acceptance():
    """Record the outcome of one acceptance criterion for the summary."""

    def record(number: int, name: str, ok: bool, detail: str = ""):
        _results[number] = (name, ok, detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    elapsed = time.perf_counter() - _start[0]
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        name, ok, detail = _results[number]
        if number == 8:
            ok = ok and elapsed < SUITE_LIMIT
            detail = f"{detail}; suite {elapsed:.1f} s (limit {SUITE_LIMIT:.0f} s)"
        tr.write_line(f"criterion {number} {'PASS' if ok else 'FAIL'}  {name}  {detail}")
