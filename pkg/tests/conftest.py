import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_RESULTS: list[tuple[str, str, str]] = []


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion."""
    notes: list[str] = []
    yield notes
    rep = getattr(request.node, "rep_call", None)
    outcome = "PASS" if rep is not None and rep.passed else "FAIL"
    ACCEPTANCE_RESULTS.append((request.node.name, outcome, "; ".join(notes)))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, note in ACCEPTANCE_RESULTS:
        line = f"{outcome}  {name}"
        if note:
            line += f"  ({note})"
        terminalreporter.write_line(line)
