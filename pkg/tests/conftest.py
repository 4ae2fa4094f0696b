import numpy as np
import pytest

from normindex.harness import load_iris


@pytest.fixture(scope="session")
def iris():
    return load_iris()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
