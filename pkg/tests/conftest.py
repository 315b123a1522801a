import re
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wrightcert.continuation import newton_correct, prepare_basepoint, tangent_solve  # noqa: E402
from wrightcert.fourier import START_ALPHA_EPS, start_seed  # noqa: E402
from wrightcert.interval import PI  # noqa: E402

ALPHA0 = float((PI / 2.0 + START_ALPHA_EPS).lo)

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = []


def _criterion_number(line):
    return int(re.search(r"criterion (\d+)", line).group(1))


def record(n, ok, detail, label=None):
    """Store one acceptance line and return ``ok``."""
    tag = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES.append(f"[{tag}] criterion {n}{label or ''}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_criterion_number):
            terminalreporter.write_line(line)


class StartPoint:
    def __init__(self):
        self.alpha0 = ALPHA0
        self.x = newton_correct(start_seed(), ALPHA0).as_array()
        self.xd = tangent_solve(self.x, ALPHA0).as_array()
        self.pb = prepare_basepoint(self.x, self.xd, ALPHA0, 3)


@pytest.fixture(scope="session")
def base0():
    return StartPoint()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
