import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cifa.multiblock import SyntheticSpec, generate_synthetic  # noqa: E402


@pytest.fixture
def exact_fixture():
    """Noise-free N=5, I=200, J_n=30, c=3, R_n=8 data set with its ground truth."""
    return generate_synthetic(SyntheticSpec(I=200, J=[30] * 5, c=3, R=[8] * 5, seed=7))

GATE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if GATE_LINES:
        terminalreporter.section("acceptance gate")
        for line in GATE_LINES:
            terminalreporter.write_line(line)
