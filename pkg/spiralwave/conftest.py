import logging

import pytest

from spiralwave.apps.geometry.boundary import BoundaryCondition
from spiralwave.apps.geometry.grid import make_grid
from spiralwave.apps.geometry.surface import make_disk, make_sphere
from spiralwave.apps.kinetics.reaction import make_cubic
from spiralwave.apps.real_branch.branch import RealBranchSolver

# Values of lambda where the shared base points sit on C_0^1
SPHERE_BASE_LAMBDA = 4.0
DISK_BASE_LAMBDA = 6.0


def pytest_configure(config):
    # Per-iteration Newton output drowns the test report
    logging.getLogger("spiralwave.apps.real_branch.newton").setLevel(logging.INFO)


@pytest.fixture(scope="session")
def sphere():
    return make_sphere()


@pytest.fixture(scope="session")
def disk():
    return make_disk()


@pytest.fixture(scope="session")
def sphere_grid(sphere):
    return make_grid(sphere)


@pytest.fixture(scope="session")
def disk_grid(disk):
    return make_grid(disk)


@pytest.fixture(scope="session")
def cubic():
    return make_cubic(0.0)


@pytest.fixture(scope="session")
def sphere_solver(sphere, sphere_grid, cubic):
    return RealBranchSolver(sphere, cubic, 1, BoundaryCondition.none(), sphere_grid)


@pytest.fixture(scope="session")
def disk_solver(disk, disk_grid, cubic):
    return RealBranchSolver(disk, cubic, 1, BoundaryCondition.neumann(), disk_grid)


@pytest.fixture(scope="session")
def sphere_branch(sphere_solver):
    """C_0^1 on the sphere up to SPHERE_BASE_LAMBDA."""
    return sphere_solver.continue_branch(0, SPHERE_BASE_LAMBDA, step=0.25)


@pytest.fixture(scope="session")
def sphere_base(sphere_branch):
    return sphere_branch.points[-1]


@pytest.fixture(scope="session")
def disk_base(disk_solver):
    return disk_solver.continue_branch(0, DISK_BASE_LAMBDA, step=0.5).points[-1]
