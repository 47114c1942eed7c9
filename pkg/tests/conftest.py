"""Shared fixtures: profile tables and small grids reused across test modules."""

import pytest

from lakevortex.profile import solve_profile
from lakevortex.geometry import Disk, Rectangle, build_grid


@pytest.fixture(scope="session")
def profile_p2():
    return solve_profile(2.0)


@pytest.fixture(scope="session")
def profile_p15():
    return solve_profile(1.5)


@pytest.fixture(scope="session")
def profile_p3():
    return solve_profile(3.0)


@pytest.fixture(scope="session")
def disk_grid_64():
    return build_grid(Disk((0.0, 0.0), 1.0), 1.0 / 32)


@pytest.fixture(scope="session")
def disk_grid_128():
    return build_grid(Disk((0.0, 0.0), 1.0), 1.0 / 64)


@pytest.fixture(scope="session")
def square_grid_64():
    return build_grid(Rectangle(0.0, 0.0, 1.0, 1.0), 1.0 / 64)
