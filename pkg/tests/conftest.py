import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pqszasz import PQParams  # noqa: E402


@pytest.fixture
def p95q90():
    return PQParams(0.95, 0.9)


@pytest.fixture
def classical():
    return PQParams.classical_point()


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
