"""Shared fixtures: the reference dielectric cylinder, solved once per session."""

import numpy as np
import pytest

from ssie2d import geometry, oracle, solver
from ssie2d.operators import FREE_SPACE, Medium

FREQUENCY = 300e6
DIELECTRIC = Medium(eps_r=4.0)


@pytest.fixture(scope="session")
def circle():
    return geometry.discretize_circle((0.0, 0.0), 1.0, 0.1)


@pytest.fixture(scope="session")
def wave():
    return solver.PlaneWave(frequency=FREQUENCY)


@pytest.fixture(scope="session")
def cylinder_solution(circle, wave):
    return solver.solve(circle, DIELECTRIC, wave)


@pytest.fixture(scope="session")
def cylinder_mie():
    return oracle.mie_coefficients(1.0, DIELECTRIC, FREE_SPACE, FREQUENCY)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)

from hypothesis import settings  # noqa: E402

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("repro")


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criteria")


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
