import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.interpolate import CubicSpline

from spiralwave.core.exceptions import BoundaryConditionError, GeometryError, ValidationFailure

from ..boundary import BoundaryCondition
from ..surface import (
    SurfaceOfRevolution,
    make_custom,
    make_disk,
    make_sphere,
    read_profile_csv,
    validate_surface,
)


def cap_samples(count=4001):
    s = np.linspace(0.0, np.pi / 2, count)
    return np.column_stack([s, np.sin(s), np.cos(s)])


class TestClosedForms:
    def test_disk_profile(self):
        disk = make_disk()
        assert disk.s_star == 1.0
        assert disk.a(0.5) == 0.5
        assert disk.a_prime(0.5) == 1.0
        assert disk.has_boundary is True
        assert disk.reflection_symmetric is False

    def test_sphere_profile(self):
        sphere = make_sphere()
        assert_allclose(sphere.a(np.pi / 2), 1.0)
        assert_allclose(sphere.a_prime(np.pi), -1.0)
        assert sphere.has_boundary is False
        assert sphere.reflection_symmetric is True

    @pytest.mark.parametrize("factory", [make_disk, make_sphere])
    def test_arc_length_exact(self, factory):
        surface = factory()
        s = np.linspace(0.0, surface.s_star, 1001)
        residual = surface.a_prime(s) ** 2 + surface.atilde_prime(s) ** 2 - 1.0
        assert np.max(np.abs(residual)) <= 1e-8
        assert abs(surface.a_prime(0.0) - 1.0) <= 1e-8

    def test_embed_lies_on_surface(self):
        sphere = make_sphere()
        points = sphere.embed(np.array([0.3, 1.2]), np.array([0.0, 2.0]))
        assert points.shape == (2, 3)
        assert_allclose(np.linalg.norm(points, axis=1), 1.0)


class TestValidation:
    def test_sphere_passes(self):
        report = validate_surface(make_sphere())
        assert report.passed
        assert report.reflection_symmetric
        assert report.reflection_residual <= 1e-12

    def test_disk_not_reflection_symmetric(self):
        report = validate_surface(make_disk())
        assert report.passed
        assert report.reflection_symmetric is False

    def test_scaled_disk_fails_arc_length(self):
        scaled = SurfaceOfRevolution(
            name="scaled-disk",
            s_star=1.0,
            profile_a=lambda s: 2.0 * s,
            profile_a_prime=lambda s: 2.0 * np.ones_like(s),
            profile_atilde=np.zeros_like,
            profile_atilde_prime=np.zeros_like,
            has_boundary=True,
            reflection_symmetric=False,
        )
        report = validate_surface(scaled)
        assert not report.passed
        assert report.check("arc_length").passed is False
        assert report.check("arc_length").residual == pytest.approx(3.0)


class TestCustomSurface:
    def test_spherical_cap_has_boundary(self):
        cap = make_custom(cap_samples())
        assert cap.has_boundary is True
        assert_allclose(cap.a(np.pi / 4), np.sin(np.pi / 4), atol=1e-8)

    def test_disk_samples_match_disk(self):
        s = np.linspace(0.0, 1.0, 21)
        custom = make_custom(np.column_stack([s, s, np.zeros_like(s)]))
        samples = np.linspace(0.0, 1.0, 57)
        assert_allclose(custom.a(samples), make_disk().a(samples), atol=1e-12)
        assert_allclose(custom.a_prime(samples), 1.0, atol=1e-10)

    def test_custom_sphere_is_boundaryless_and_symmetric(self):
        s = np.linspace(0.0, np.pi, 8001)
        surface = make_custom(np.column_stack([s, np.sin(s), np.cos(s)]))
        assert surface.has_boundary is False
        assert surface.reflection_symmetric is True

    def test_interpolant_stays_positive_between_samples(self):
        s = np.linspace(0.0, 1.0, 11)
        a = np.where(s < 0.45, 0.02, 1.0)
        a[0] = 0.0
        # an unconstrained cubic spline dips below zero ahead of the jump
        assert CubicSpline(s, a)(np.linspace(0.05, 0.95, 901)).min() < 0.0
        with pytest.raises(GeometryError) as excinfo:
            make_custom(np.column_stack([s, a, np.zeros_like(s)]))
        checks = {check["name"]: check for check in excinfo.value.details["checks"]}
        assert checks["positivity"]["passed"] is True
        assert checks["positivity"]["residual"] > 0.0
        assert checks["arc_length"]["passed"] is False

    def test_profile_derivatives_follow_samples(self):
        cap = make_custom(cap_samples())
        s = np.linspace(0.05, 1.5, 40)
        assert_allclose(cap.a_prime(s), np.cos(s), atol=1e-6)
        assert_allclose(cap.atilde_prime(s), -np.sin(s), atol=1e-6)

    def test_arc_length_violation_rejected(self):
        s = np.linspace(0.0, 1.0, 21)
        with pytest.raises(GeometryError) as excinfo:
            make_custom(np.column_stack([s, 2.0 * s, np.zeros_like(s)]))
        assert isinstance(excinfo.value, ValidationFailure)
        assert excinfo.value.details["passed"] is False

    def test_nonzero_tip_rejected(self):
        samples = cap_samples()
        samples[0, 1] = 0.1
        with pytest.raises(GeometryError):
            make_custom(samples)

    def test_nonpositive_interior_rejected(self):
        samples = cap_samples()
        samples[10, 1] = -0.01
        with pytest.raises(GeometryError):
            make_custom(samples)

    def test_read_profile_csv(self, tmp_path):
        path = tmp_path / "cap.csv"
        rows = "\n".join(f"{s:.17g},{a:.17g},{t:.17g}" for s, a, t in cap_samples(101))
        path.write_text("s,a,atilde\n" + rows + "\n", encoding="utf-8")
        table = read_profile_csv(path)
        assert table.shape == (101, 3)

    def test_read_profile_csv_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y\n0,0\n", encoding="utf-8")
        with pytest.raises(GeometryError):
            read_profile_csv(path)


class TestBoundaryCondition:
    def test_parse(self):
        assert BoundaryCondition.parse("none").is_none
        assert BoundaryCondition.parse("dirichlet").is_dirichlet
        bc = BoundaryCondition.parse("robin:1,1")
        assert (bc.alpha1, bc.alpha2) == (1.0, 1.0)

    @pytest.mark.parametrize("text", ["robin:-1,1", "robin:0,0", "robin:1", "periodic"])
    def test_rejects_inadmissible(self, text):
        with pytest.raises(BoundaryConditionError):
            BoundaryCondition.parse(text)

    def test_surface_compatibility(self):
        with pytest.raises(BoundaryConditionError):
            BoundaryCondition.none().check_surface(make_disk())
        with pytest.raises(BoundaryConditionError):
            BoundaryCondition.neumann().check_surface(make_sphere())
        assert BoundaryCondition.none().check_surface(make_sphere()).is_none
