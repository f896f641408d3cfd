import pytest

from spiralwave.apps.complex_branch.solver import ComplexBranchSolver


@pytest.fixture(scope="session")
def sphere_complex(sphere_base):
    return ComplexBranchSolver(sphere_base)


@pytest.fixture(scope="session")
def decoupled_point(sphere_complex):
    return sphere_complex.solve(0.0, 0.0)


@pytest.fixture(scope="session")
def vortex_point(sphere_complex):
    return sphere_complex.solve(0.05, 0.05)


@pytest.fixture(scope="session")
def spiral_point(sphere_complex):
    return sphere_complex.solve(0.0, 0.05)
