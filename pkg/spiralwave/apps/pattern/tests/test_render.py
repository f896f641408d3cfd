import numpy as np
import pytest
from numpy.testing import assert_allclose

from spiralwave.apps.complex_branch.solver import SolutionPoint
from spiralwave.apps.real_branch.discretization import build_operator

from ..render import render_pattern


@pytest.fixture(scope="module")
def disk_vortex(disk, disk_grid, cubic):
    op = build_operator(disk, disk_grid, 2)
    return SolutionPoint(
        lam=10.0,
        eta=0.0,
        b=np.zeros(1),
        omega=0.0,
        u=(disk_grid.nodes**2).astype(complex),
        residual_norm=0.0,
        gauge_residual=0.0,
        freq_relation_residual=0.0,
        operator=op,
        kinetics=cubic,
    )


def _rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


class TestRenderPattern:
    def test_disk_vortex_rays(self, disk_vortex):
        curves = render_pattern(disk_vortex, 2, t=3.7, points_per_arm=50)
        assert len(curves.arms) == 4
        for k, arm in enumerate(curves.arms):
            angle = np.arctan2(arm[1:, 1], arm[1:, 0])
            expected = np.angle(np.exp(1j * k * np.pi / 2))
            assert_allclose(np.angle(np.exp(1j * (angle - expected))), 0.0, atol=1e-12)
            assert_allclose(np.hypot(arm[:, 0], arm[:, 1]), curves.s, atol=1e-12)

    def test_sphere_spiral_joins_poles(self, sphere, spiral_point):
        curves = render_pattern(spiral_point, 1, points_per_arm=120)
        assert len(curves.arms) == 2
        for arm in curves.arms:
            assert_allclose(arm[0], [0.0, 0.0, 1.0], atol=1e-12)
            assert_allclose(arm[-1], [0.0, 0.0, -1.0], atol=1e-12)
            radius = np.hypot(arm[:, 0], arm[:, 1])
            assert_allclose(radius, sphere.a(curves.s), atol=1e-12)
            assert_allclose(arm[:, 2], sphere.atilde(curves.s), atol=1e-12)
        # the arms are not meridians
        angles = np.unwrap(np.arctan2(curves.arms[0][1:-1, 1], curves.arms[0][1:-1, 0]))
        assert np.ptp(angles) > 1e-3

    def test_rigid_rotation_in_time(self, spiral_point):
        t = 2.5
        start = render_pattern(spiral_point, 1, t=0.0)
        later = render_pattern(spiral_point, 1, t=t)
        rotation = _rotation(spiral_point.omega * t / 1)
        for first, second in zip(start.arms, later.arms):
            assert np.max(np.abs(first @ rotation.T - second)) <= 1e-10

    def test_rejects_bad_arguments(self, spiral_point):
        with pytest.raises(ValueError):
            render_pattern(spiral_point, 0)
        with pytest.raises(ValueError):
            render_pattern(spiral_point, 1, points_per_arm=1)
