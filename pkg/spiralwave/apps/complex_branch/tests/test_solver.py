import numpy as np
import pytest
from dataclasses import replace
from hypothesis import given, settings as hypothesis_settings, strategies as st
from numpy.testing import assert_allclose

from spiralwave.apps.eigensolver.oracles import disk_eigenvalues
from spiralwave.apps.geometry.boundary import BoundaryCondition
from spiralwave.apps.real_branch.branch import RealBranchSolver

from ..solver import (
    ComplexBranchSolver,
    frequency_relation_residual,
    frequency_sensitivities,
    gauge_residual,
    residual_full,
    solve_perturbed,
)


@pytest.fixture(scope="module")
def sphere_complex(sphere_base):
    return ComplexBranchSolver(sphere_base)


@pytest.fixture(scope="module")
def twisted_point(sphere_complex):
    return sphere_complex.solve(0.05, 0.02)


class TestResidual:
    def test_real_base_embeds(self, sphere_base, cubic):
        op = sphere_base.operator
        r = residual_full(op, cubic, sphere_base.lam, 0.0, sphere_base.u, 0.0, 0.0)
        assert op.norm(op.restrict(r)) <= 1e-10

    def test_trivial_solution(self, sphere_base, cubic):
        op = sphere_base.operator
        zero = np.zeros(op.grid.size, dtype=complex)
        r = residual_full(op, cubic, 3.0, 0.7, zero, -0.4, 0.3)
        assert np.all(r == 0.0)

    @hypothesis_settings(max_examples=25, deadline=None)
    @given(theta=st.floats(-np.pi, np.pi))
    def test_global_phase_equivariance(self, sphere_base, cubic, theta):
        op = sphere_base.operator
        u = sphere_base.u + 0.1j * np.sin(2.0 * op.grid.nodes)
        rotation = np.exp(1j * theta)
        first = residual_full(op, cubic, sphere_base.lam, 0.2, rotation * u, 0.1, 0.3)
        second = rotation * residual_full(op, cubic, sphere_base.lam, 0.2, u, 0.1, 0.3)
        difference = op.norm(op.restrict(first - second))
        assert difference <= 1e-12 * max(1.0, op.norm(op.restrict(second)))


class TestGauge:
    def test_real_profile(self, sphere_base):
        assert gauge_residual(sphere_base.u, sphere_base.u, sphere_base.operator) == 0.0

    def test_imaginary_reference(self, sphere_base):
        value = gauge_residual(1j * sphere_base.u, sphere_base.u, sphere_base.operator)
        assert value == pytest.approx(1.0, rel=1e-14)

    def test_small_rotation(self, sphere_base):
        theta = 1e-3
        value = gauge_residual(np.exp(1j * theta) * sphere_base.u, sphere_base.u, sphere_base.operator)
        assert value == pytest.approx(theta, rel=1e-6)


class TestDecoupling:
    def test_zero_parameters_return_real_base(self, sphere_base):
        point = solve_perturbed(sphere_base, 0.0, 0.0)
        assert abs(point.omega) <= 1e-10
        assert np.max(np.abs(point.u.imag)) <= 1e-10
        assert_allclose(point.u.real, sphere_base.u, atol=1e-10)

    @pytest.mark.parametrize("lam", [3.0, 4.5])
    def test_lambda_perturbation_stays_real(self, sphere_complex, lam):
        point = sphere_complex.solve(0.0, 0.0, lam=lam)
        assert point.lam == lam
        assert abs(point.omega) <= 1e-10
        assert np.max(np.abs(point.u.imag)) <= 1e-10
        assert point.residual_norm <= 1e-10


@pytest.fixture(
    scope="module",
    params=[BoundaryCondition.neumann(), BoundaryCondition.dirichlet(), BoundaryCondition.robin(1.0, 1.0)],
    ids=["neumann", "dirichlet", "robin11"],
)
def disk_base_for(request, disk, disk_grid, cubic):
    """Point of C_0^1 on the disk two units past the bifurcation."""
    bc = request.param
    lam_end = disk_eigenvalues(1, bc, 1)[0] + 2.0
    return RealBranchSolver(disk, cubic, 1, bc, disk_grid).continue_branch(0, lam_end, step=0.5).points[-1]


class TestDiskDecoupling:
    def test_zero_parameters_stay_real(self, disk_base_for):
        point = solve_perturbed(disk_base_for, 0.0, 0.0)
        assert abs(point.omega) <= 1e-10
        assert np.max(np.abs(point.u.imag)) <= 1e-10
        assert_allclose(point.u.real, disk_base_for.u, atol=1e-10)

    @pytest.mark.parametrize("twist", [-0.05, 0.05])
    def test_matched_twist_rotates_rigidly(self, disk_base_for, twist):
        point = solve_perturbed(disk_base_for, twist, twist)
        assert abs(point.omega - twist) <= 1e-8
        assert np.max(np.abs(point.u.imag)) <= 1e-8

@pytest.mark.acceptance
class TestPerturbedSolutions:
    def test_rotating_vortex_line(self, sphere_complex):
        point = sphere_complex.solve(0.05, 0.05)
        assert point.omega == pytest.approx(0.05, abs=1e-8)
        # the real profile solves the equation on eta = beta
        assert np.max(np.abs(point.u.imag)) <= 1e-8

    def test_invariants(self, twisted_point):
        assert twisted_point.residual_norm <= 1e-10
        assert abs(twisted_point.gauge_residual) <= 1e-12
        assert abs(twisted_point.freq_relation_residual) <= 1e-8
        assert np.isfinite(twisted_point.condition)
        assert np.all(np.isfinite(twisted_point.u))

    def test_gauge_fixes_representative(self, sphere_complex, twisted_point):
        rotated = sphere_complex.solve(0.05, 0.02, guess=np.exp(0.3j) * twisted_point.u, omega_guess=twisted_point.omega)
        assert np.max(np.abs(rotated.u - twisted_point.u)) <= 1e-8
        assert rotated.omega == pytest.approx(twisted_point.omega, abs=1e-10)


class TestFrequencyRelation:
    def test_vanishes_on_base(self, sphere_base, cubic):
        point = solve_perturbed(sphere_base, 0.0, 0.0)
        assert abs(frequency_relation_residual(point, cubic)) <= 1e-12

    def test_linear_in_omega(self, twisted_point, cubic):
        shifted = replace(twisted_point, omega=twisted_point.omega + 0.01)
        assert frequency_relation_residual(shifted, cubic) == pytest.approx(0.01, abs=1e-8)


@pytest.mark.acceptance
class TestSensitivities:
    @pytest.fixture(scope="class")
    def sensitivities(self, sphere_base):
        return frequency_sensitivities(sphere_base)

    def test_eta_derivative(self, sensitivities):
        assert 0.0 < sensitivities.d_eta < 1.0
        assert abs(sensitivities.d_eta - sensitivities.d_eta_fd) <= 1e-4

    def test_parameter_derivative(self, sensitivities):
        assert_allclose(sensitivities.d_b, sensitivities.d_b_fd, atol=1e-4)

    def test_cubic_derivatives_sum_to_one(self, sensitivities):
        # Omega(eta, eta) = eta for cubic kinetics
        assert sensitivities.d_eta + sensitivities.d_b[0] == pytest.approx(1.0, rel=1e-12)
        assert sensitivities.locus_slope[0] < 0.0
