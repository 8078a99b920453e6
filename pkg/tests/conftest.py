from pathlib import Path

import numpy as np
import pytest

from ldelta import JointDistribution

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


def random_joint(rng, q_size, s_size, product=False, skew=None):
    """Random strictly positive joint table; optionally product-form."""
    if product:
        q = rng.random(q_size) + 0.05 if skew is None else skew
        s = rng.random(s_size) + 0.05
        return JointDistribution.product(q / q.sum(), s / s.sum())
    table = rng.random((q_size, s_size)) + 1e-3
    return JointDistribution(table / table.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
