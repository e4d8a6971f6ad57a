import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cayleyvf import build_ball, make_oracle  # noqa: E402

ACCEPTANCE_LINES = {}


@functools.lru_cache(maxsize=None)
def ball(spec: str, radius: int):
    """Balls are immutable, so tests share them."""
    return build_ball(make_oracle(spec), radius)


@pytest.fixture
def get_ball():
    return ball


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
