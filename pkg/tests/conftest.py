import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pathmeter.experiments import double_slit  # noqa: E402


@pytest.fixture(scope="session")
def slits():
    """The dark-fringe spin experiment with N = 2 slices."""
    return double_slit()


ACCEPTANCE_RESULTS = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the end-of-run summary."""

    def record(number, title, checks):
        ok = all(bool(v) for v in checks.values())
        failed = [name for name, v in checks.items() if not v]
        ACCEPTANCE_RESULTS[number] = (title, ok, failed)
        assert ok, f"criterion {number} failed: {failed}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, ok, failed = ACCEPTANCE_RESULTS[number]
        line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}"
        if failed:
            line += f"  (failed: {', '.join(failed)})"
        terminalreporter.write_line(line)
