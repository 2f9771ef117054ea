import numpy as np
import pytest

from zenosim import Grid, TrapPotential, solve_ground_state

REF_G = 0.1
REF_VH = 5e-4

_acceptance_lines = []


def record_acceptance_line(line):
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.line(line)


@pytest.fixture(scope="session")
def trap():
    return TrapPotential(REF_VH)


@pytest.fixture(scope="session")
def small_grid():
    # dx = 0.125: resolves beams down to w = 0.5, cheap enough for unit tests
    return Grid(32.0, 512)


@pytest.fixture(scope="session")
def ground_small(small_grid, trap):
    """Interacting (g=0.1) ground state on the small grid, solved once."""
    return solve_ground_state(small_grid, REF_G, trap, tol=1e-8)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260809)
