import numpy as np
import pytest
from numpy.testing import assert_allclose

from ..sweep import _wavefronts, sweep_parameters


class TestWavefronts:
    def test_manhattan_order(self):
        fronts = _wavefronts((3, 3), (1, 1))
        assert fronts[0] == [(1, 1)]
        assert sorted(fronts[1]) == [(0, 1), (1, 0), (1, 2), (2, 1)]
        assert sorted(fronts[2]) == [(0, 0), (0, 2), (2, 0), (2, 2)]

    def test_corner_origin(self):
        fronts = _wavefronts((2, 3), (0, 0))
        assert [len(front) for front in fronts] == [1, 2, 2, 1]


class TestSweep:
    def test_single_cell_is_base(self, sphere_base):
        sheet = sweep_parameters(sphere_base, [0.0], [0.0], threads=1)
        assert not sheet.failures
        point = sheet.points[(0, 0)]
        assert_allclose(point.u, sphere_base.u, atol=1e-10)
        assert abs(point.omega) <= 1e-10

    def test_frequency_nonzero_off_axis(self, sphere_base):
        sheet = sweep_parameters(sphere_base, [0.0], [-0.05, 0.0, 0.05], threads=2)
        assert not sheet.failures
        omega = sheet.omega_grid()[0]
        assert abs(omega[1]) <= 1e-10
        assert omega[0] < 0.0 < omega[2]
        assert omega[2] == pytest.approx(-omega[0], rel=1e-6)
        assert sheet.get(0.0, 0.05).omega == omega[2]

    def test_empty_grid(self, sphere_base):
        sheet = sweep_parameters(sphere_base, [], [0.0])
        assert sheet.points == {} and sheet.failures == []


@pytest.mark.slow
@pytest.mark.acceptance
class TestFullSweep:
    def test_eleven_by_eleven(self, sphere_base):
        values = np.linspace(-0.1, 0.1, 11)
        sheet = sweep_parameters(sphere_base, values, values)
        assert not sheet.failures
        assert len(sheet.points) == 121
        assert sheet.max_neighbor_jump() <= 0.05
        for point in sheet.points.values():
            assert point.residual_norm <= 1e-10
            assert abs(point.freq_relation_residual) <= 1e-8
