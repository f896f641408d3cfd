import numpy as np
import pytest

from ..classify import FROZEN, SPIRAL, classify
from ..locus import frozen_locus


@pytest.fixture(scope="module")
def locus(sphere_base):
    return frozen_locus(sphere_base, np.linspace(-0.08, 0.08, 9), threads=4)


@pytest.mark.acceptance
class TestFrozenLocus:
    def test_anchor(self, locus):
        anchor = [sample for sample in locus.samples if sample.beta == 0.0]
        assert len(anchor) == 1
        assert abs(anchor[0].eta_tilde) <= 1e-9

    def test_all_samples_converge(self, locus):
        assert not locus.skipped
        assert len(locus.samples) == 9
        for sample in locus.samples:
            assert abs(sample.omega_residual) <= 1e-10
            assert abs(sample.point.omega) <= 1e-10

    def test_strictly_decreasing(self, locus):
        betas, etas = np.array(locus.as_pairs()).T
        assert np.all(np.diff(betas) > 0.0)
        assert np.all(np.diff(etas) < 0.0)

    def test_frozen_spirals_off_origin(self, locus):
        for sample in locus.samples:
            if sample.beta != 0.0:
                pattern = classify(sample.point)
                assert (pattern.rotation, pattern.shape) == (FROZEN, SPIRAL)

    def test_slope_matches_derivative_ratio(self, sphere_base):
        h = 0.01
        locus = frozen_locus(sphere_base, [-h, h], threads=2)
        (beta_minus, eta_minus), (beta_plus, eta_plus) = locus.as_pairs()
        slope = (eta_plus - eta_minus) / (beta_plus - beta_minus)
        assert slope == pytest.approx(locus.slope_at_zero[0], rel=1e-2)
        assert slope < 0.0
