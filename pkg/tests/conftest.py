"""Shared fixtures and the acceptance summary printed at the end of a run."""

import numpy as np
import pytest

from dpconnect.verification import four_node_graph

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def four_node():
    return four_node_graph()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
