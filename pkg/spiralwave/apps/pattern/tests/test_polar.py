from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from spiralwave.apps.complex_branch.solver import SolutionPoint
from spiralwave.apps.real_branch.discretization import build_operator

from ..polar import phase_derivative_integral, polar_decompose


def _constructed_point(sphere, sphere_grid, cubic, profile):
    return SolutionPoint(
        lam=4.0,
        eta=0.0,
        b=np.zeros(1),
        omega=0.0,
        u=profile,
        residual_norm=0.0,
        gauge_residual=0.0,
        freq_relation_residual=0.0,
        operator=build_operator(sphere, sphere_grid, 1),
        kinetics=cubic,
    )


class TestPolarDecompose:
    def test_real_profile_has_no_phase(self, decoupled_point):
        profile = polar_decompose(decoupled_point)
        assert np.all(profile.p_prime == 0.0)
        assert np.all(profile.p == 0.0)
        assert_allclose(profile.A, np.abs(decoupled_point.u))

    def test_linear_phase(self, sphere, sphere_grid, cubic):
        s = sphere_grid.nodes
        point = _constructed_point(sphere, sphere_grid, cubic, np.sin(s) * np.exp(0.7j * s))
        profile = polar_decompose(point)
        assert_allclose(profile.p_prime[1:-1], 0.7, atol=1e-8)
        assert profile.p_prime[0] == 0.0 and profile.p_prime[-1] == 0.0
        assert_allclose(profile.p[1:-1], 0.7 * s[1:-1], atol=1e-5)

    @pytest.mark.acceptance
    @pytest.mark.parametrize("value", [-0.05, -0.02, 0.02, 0.05])
    def test_rotating_vortex_has_flat_phase(self, sphere_complex, value):
        point = sphere_complex.solve(value, value)
        assert abs(point.omega - value) <= 1e-8
        assert polar_decompose(point).sup_p_prime() <= 1e-6

    def test_tips_carry_no_phase_derivative(self, spiral_point):
        profile = polar_decompose(spiral_point)
        assert abs(profile.p_prime[0]) <= 1e-6
        assert abs(profile.p_prime[-1]) <= 1e-6
        assert profile.sup_p_prime() > 1e-4


class TestIntegralRelation:
    def test_agrees_with_polar_form(self, spiral_point):
        profile = polar_decompose(spiral_point)
        integral = phase_derivative_integral(spiral_point)
        resolved = profile.resolved
        assert np.max(np.abs(integral[resolved] - profile.p_prime[resolved])) <= 1e-5

    def test_decoupled_point(self, decoupled_point):
        assert np.max(np.abs(phase_derivative_integral(decoupled_point))) <= 1e-14

    def test_sign_follows_frequency_offset(self, decoupled_point):
        shifted = replace(decoupled_point, omega=decoupled_point.omega + 0.01)
        # the profile is still real, so only the integral form sees the offset
        integral = phase_derivative_integral(shifted)
        interior = integral[1:-1]
        assert np.all(interior < 0.0)

    def test_gauge_invariant(self, spiral_point):
        rotated = replace(spiral_point, u=np.exp(1.1j) * spiral_point.u)
        assert_allclose(polar_decompose(rotated).p_prime, polar_decompose(spiral_point).p_prime, atol=1e-10)
        assert_allclose(phase_derivative_integral(rotated), phase_derivative_integral(spiral_point), atol=1e-12)
