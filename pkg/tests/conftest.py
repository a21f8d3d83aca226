import numpy as np
import pytest

from spmulti import coulomb, make_grid


@pytest.fixture(scope="session")
def log_grid():
    return make_grid("log", 4000, 60.0, 1e-6)


@pytest.fixture(scope="session")
def uniform_grid():
    return make_grid("uniform", 4000, 60.0)


@pytest.fixture(scope="session")
def small_grid():
    return make_grid("log", 800, 40.0, 1e-5)


@pytest.fixture(scope="session")
def V():
    return coulomb(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture
def acceptance_log(request):
    return request.config.acceptance_lines


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
