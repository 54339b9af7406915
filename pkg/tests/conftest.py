import math

import numpy as np
import pytest

import ewframes as ew


def unit_partition(lo: int = -8, hi: int = 8):
    return ew.build_partition(ew.BoundarySet(tuple(float(k) for k in range(lo, hi + 1))))


def gaussian_rays_system():
    bset = ew.BoundarySet.from_points([-math.inf, -2, 0, 2, math.inf])
    return ew.build_system(ew.build_partition(bset), ew.gaussian().with_essential(0.01))


@pytest.fixture(scope="session")
def shannon_system():
    return ew.build_system(unit_partition(), ew.shannon())


@pytest.fixture(scope="session")
def gaussian_system():
    return gaussian_rays_system()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
