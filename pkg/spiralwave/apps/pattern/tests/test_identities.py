import numpy as np
import pytest

from spiralwave.apps.complex_branch.sweep import sweep_parameters

from ..polar import phase_derivative_integral, polar_decompose


@pytest.mark.slow
@pytest.mark.acceptance
@pytest.mark.parametrize("base_name", ["sphere_base", "disk_base"])
def test_identity_audit_over_sweep(request, base_name):
    base = request.getfixturevalue(base_name)
    values = np.linspace(-0.1, 0.1, 5)
    sheet = sweep_parameters(base, values, values)
    assert not sheet.failures
    for point in sheet.points.values():
        assert abs(point.freq_relation_residual) <= 1e-8
        profile = polar_decompose(point)
        integral = phase_derivative_integral(point)
        resolved = profile.resolved
        assert np.max(np.abs(integral[resolved] - profile.p_prime[resolved])) <= 1e-5
