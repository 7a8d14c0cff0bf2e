import numpy as np
import pytest

from odometer.portrait import portrait_from_levels


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def dense_portrait(p, table):
    """Portrait from a plain ``{word string: images}`` dict (test helper)."""
    depth = max((len(k) for k in table), default=-1) + 1
    levels = [np.zeros((p**j, p), dtype=np.int64) for j in range(depth)]
    for key, images in table.items():
        u = sum(int(c) * p**i for i, c in enumerate(key))
        levels[len(key)][u] = images
    return portrait_from_levels(p, levels)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
