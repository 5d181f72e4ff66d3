import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

_OUTCOMES: dict[str, str] = {}
_DETAILS: dict[str, list[str]] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def note(request):
    """Attach a detail line to the acceptance summary for this test."""
    lines = _DETAILS.setdefault(request.node.name, [])
    return lines.append


def pytest_runtest_logreport(report):
    if "test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome != "passed":
        if _OUTCOMES.get(name, "passed") == "passed":
            _OUTCOMES[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_OUTCOMES, key=lambda s: int(s.split("_")[2])):
        status = "PASS" if _OUTCOMES[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
        for line in _DETAILS.get(name, []):
            terminalreporter.write_line(f"        {line}")
