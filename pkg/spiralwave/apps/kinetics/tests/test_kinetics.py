import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st
from numpy.testing import assert_allclose

from spiralwave.core.exceptions import KineticsError

from ..assumptions import check_assumptions, derivative_agreement, locate_zero
from ..reaction import (
    KineticsSpec,
    make_cubic,
    make_cubic_omega,
    make_custom_kinetics,
    make_polynomial_kinetics,
    parse_kinetics,
)


def handles(f_R, f_I, dy_f_R, dy_f_I, db_f_I):
    return {"f_R": f_R, "f_I": f_I, "dy_f_R": dy_f_R, "dy_f_I": dy_f_I, "db_f_I": db_f_I}


def spec_from(name, **kwargs):
    return KineticsSpec(name=name, param_dim=1, **kwargs)


class TestCubic:
    def test_values(self):
        K = make_cubic(0.3)
        assert K.imag(2.0, 0.3) == pytest.approx(-0.6)
        assert K.real(0.25) == pytest.approx(0.75)
        assert K.C == 1.0
        assert K.param_dim == 1

    def test_beta_zero_has_no_imaginary_part(self):
        K = make_cubic(0.0)
        assert_allclose(K.imag(np.linspace(0.0, 5.0, 11)), 0.0)

    def test_assumptions_pass(self):
        report = check_assumptions(make_cubic(1.0))
        for name in ("single_zero", "decreasing", "fI_zero", "param_sensitive", "tip_real"):
            assert report.get(name).passed is True, name
        assert report.C == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("beta", np.linspace(-10.0, 10.0, 9))
    def test_assumptions_pass_across_beta(self, beta):
        assert check_assumptions(make_cubic(beta)).passed

    def test_derivatives_match_finite_differences(self):
        assert derivative_agreement(make_cubic(0.2)) <= 1e-6
        assert derivative_agreement(make_cubic_omega(0.2)) <= 1e-6

    @hypothesis_settings(max_examples=50, deadline=None)
    @given(y=st.floats(0.01, 0.99), beta=st.floats(-1.0, 1.0))
    def test_cubic_omega_derivative_property(self, y, beta):
        K = make_cubic_omega(beta)
        h = 1e-6
        fd = (K.imag(y + h) - K.imag(y - h)) / (2 * h)
        assert float(K.dy_imag(y)) == pytest.approx(float(fd), abs=1e-7)


class TestCustomKinetics:
    def test_cubic_root_of_one_minus_y_cubed(self):
        K = make_custom_kinetics(
            handles(
                lambda y, b: 1.0 - y**3,
                lambda y, b: -b[0] * y,
                lambda y, b: -3.0 * y**2,
                lambda y, b: -b[0] * np.ones_like(y),
                lambda y, b: np.expand_dims(-y, 0),
            ),
            param_dim=1,
        )
        assert K.C == pytest.approx(1.0, abs=1e-12)

    def test_shifted_zero_is_bisected(self):
        C = locate_zero(lambda y: 1.0 - y / 2.7)
        assert C == pytest.approx(2.7, abs=1e-11)

    def test_omega_kinetics_satisfy_auxiliary_hypotheses(self):
        K = make_custom_kinetics(
            handles(
                lambda y, b: 1.0 - y,
                lambda y, b: b[0] * y * (1.0 - y),
                lambda y, b: -np.ones_like(y),
                lambda y, b: b[0] * (1.0 - 2.0 * y),
                lambda y, b: np.expand_dims(y * (1.0 - y), 0),
            ),
            param_dim=1,
        )
        report = check_assumptions(K)
        assert report.get("param_sensitive").passed is True
        assert report.get("tip_real").passed is True

    def test_unnormalized_real_part_rejected(self):
        with pytest.raises(KineticsError) as excinfo:
            make_custom_kinetics(
                handles(
                    lambda y, b: 0.5 - y,
                    lambda y, b: 0.0 * y,
                    lambda y, b: -np.ones_like(y),
                    lambda y, b: np.zeros_like(y),
                    lambda y, b: np.expand_dims(np.zeros_like(y), 0),
                ),
                param_dim=1,
            )
        assert "single_zero" in excinfo.value.message

    def test_missing_handle_rejected(self):
        with pytest.raises(KineticsError):
            make_custom_kinetics({"f_R": lambda y, b: 1.0 - y}, param_dim=1)

    def test_constant_imaginary_part_fails_tip_real(self):
        K = spec_from(
            "offset",
            f_R=lambda y, b: 1.0 - y,
            f_I=lambda y, b: b[0] * np.ones_like(y),
            dy_f_R=lambda y, b: -np.ones_like(y),
            dy_f_I=lambda y, b: np.zeros_like(y),
            db_f_I=lambda y, b: np.expand_dims(np.ones_like(y), 0),
        )
        report = check_assumptions(K)
        assert report.get("tip_real").passed is False
        assert report.get("single_zero").passed is True

    def test_growing_real_part_fails_single_zero(self):
        K = spec_from(
            "supercritical",
            f_R=lambda y, b: 1.0 + y,
            f_I=lambda y, b: np.zeros_like(y),
            dy_f_R=lambda y, b: np.ones_like(y),
            dy_f_I=lambda y, b: np.zeros_like(y),
            db_f_I=lambda y, b: np.expand_dims(np.zeros_like(y), 0),
        )
        report = check_assumptions(K)
        assert report.get("single_zero").passed is False
        assert report.C is None
        assert not report.passed


class TestPolynomialKinetics:
    def test_matches_cubic(self):
        K = make_polynomial_kinetics([[1.0, 0.0], [-1.0, 0.0]], [[0.0, 0.0], [0.0, -1.0]], b=[0.3])
        cubic = make_cubic(0.3)
        y = np.linspace(0.0, 2.0, 9)
        assert_allclose(K.real(y), cubic.real(y))
        assert_allclose(K.imag(y), cubic.imag(y))
        assert_allclose(K.db_imag(y), cubic.db_imag(y))
        assert K.C == pytest.approx(1.0, abs=1e-12)
        assert derivative_agreement(K) <= 1e-6

    def test_parse_selectors(self):
        assert parse_kinetics("cubic:0.05").b == (0.05,)
        assert parse_kinetics("cubic-omega:0.1").name == "cubic-omega"
        poly = parse_kinetics("poly", {"f_R": [[1.0, 0.0], [-1.0, 0.0]], "f_I": [[0.0, 0.0], [0.0, 1.0]]})
        assert poly.name == "poly"
        with pytest.raises(KineticsError):
            parse_kinetics("quintic:1")
