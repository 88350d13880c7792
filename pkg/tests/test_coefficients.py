from __future__ import annotations

import math

import pytest
from hypothesis import assume, given, settings
from hypothesis.strategies import floats, integers

from heat_content.coefficients import (as_real, bc_correction_coefficient, bc_correction_direct,
                                       bc_right_end_coefficient, beta0_from_y, beta0_theorem12, c_boundary,
                                       c_boundary_direct, c_n, classify_region, log_coefficient,
                                       log_plane_index, theta, x_fn, y_fn)
from heat_content.errors import DomainError, LogPlaneError
from heat_content.models import CutoffSpec, ParamPair
from heat_content.special_fn import EULER_GAMMA

SQRT_PI = math.sqrt(math.pi)
BETA0_CUTOFF = CutoffSpec(plateau_end=0.2, support_end=0.45)


class TestTheta:
    @pytest.mark.parametrize(("n", "a", "expected"), [(0, 0.7, 1), (3, 2, 24), (2, -1, 0), (1, 0.3, 0.3)])
    def test_values(self, n: int, a: float, expected: float) -> None:
        assert theta(n, a) == pytest.approx(expected)

    @given(n=integers(1, 8), a=floats(-3.0, 3.0))
    def test_recurrence(self, *, n: int, a: float) -> None:
        assert theta(n, a) == pytest.approx(theta(n - 1, a) * (a + n - 1), rel=1e-12, abs=1e-12)

    def test_negative_order(self) -> None:
        with pytest.raises(DomainError):
            theta(-1, 0.5)


class TestLogPlane:
    @pytest.mark.parametrize(("s", "k"), [(1.0, 0), (-1.0, 1), (-3.0, 2), (0.0, None), (0.9, None), (3.0, None)])
    def test_index(self, s: float, k: int) -> None:
        assert log_plane_index(complex(s)) == k

    def test_classify(self) -> None:
        assert classify_region(ParamPair.of(0.5, 0.5)).kind == "LogPlane"
        assert classify_region(ParamPair.of(0.5 + 0.1j, 0.5 - 0.1j)).kind == "Invalid"
        tag = classify_region(ParamPair.of(0.3, 0.4))
        assert tag.kind == "InO"
        assert 0 in tag.subregions and 1 not in tag.subregions

    @pytest.mark.parametrize(("a", "k", "expected"), [(0.3, 0, -0.5), (-1.0, 1, 0.0), (0.5, 1, -0.375)])
    def test_log_coefficient(self, a: float, k: int, expected: float) -> None:
        assert log_coefficient(a, k) == pytest.approx(expected, abs=1e-15)


class TestCBoundary:
    def test_matches_direct_product(self) -> None:
        p = ParamPair.of(0.8, 0.7)
        assert c_boundary(p) == pytest.approx(c_boundary_direct(p), rel=1e-12)

    @given(a=floats(-0.9, 0.9), b=floats(-0.9, 0.9))
    @settings(max_examples=50)
    def test_stable_form_matches_direct(self, *, a: float, b: float) -> None:
        s = a + b
        assume(min(abs(s - 1), abs(s + 1), abs(s)) > 0.05 and abs(a) > 0.05 and abs(b) > 0.05)
        p = ParamPair.of(a, b)
        assert c_boundary(p) == pytest.approx(c_boundary_direct(p), rel=1e-10)

    def test_constant_data(self) -> None:
        assert c_boundary(ParamPair.of(0.0, 0.0)).real == pytest.approx(-1.0 / SQRT_PI, rel=1e-14)

    @pytest.mark.parametrize(("a", "b"), [(0.25, -2.25), (0.3, -0.3), (-1.5, -2.5)])
    def test_removable_planes(self, a: float, b: float) -> None:
        value = c_boundary(ParamPair.of(a, b))
        assert math.isfinite(value.real)
        delta = 1e-6
        limit = 0.5 * (c_boundary_direct(ParamPair.of(a + delta, b)) + c_boundary_direct(ParamPair.of(a - delta, b)))
        assert value.real == pytest.approx(limit.real, rel=1e-6, abs=1e-9)

    def test_zero_on_removable_plane(self) -> None:
        # cos(pi (a-b)/2) vanishes when a-b is odd
        assert c_boundary(ParamPair.of(-1.5, -2.5)).real == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize(("a", "b", "k"), [(0.5, 0.5, 0), (0.3, -1.3, 1), (-1.0, -2.0, 2)])
    def test_log_plane_raises(self, a: float, b: float, k: int) -> None:
        with pytest.raises(LogPlaneError) as info:
            c_boundary(ParamPair.of(a, b))
        assert info.value.k == k

    def test_complex_parameters(self) -> None:
        p = ParamPair.of(0.3 + 0.2j, 0.4 - 0.1j)
        assert c_boundary(p) == pytest.approx(c_boundary_direct(p), rel=1e-10)


class TestCN:
    @given(a=floats(-0.9, 0.9), b=floats(-0.9, 0.9))
    def test_c0(self, *, a: float, b: float) -> None:
        assume(abs(1.0 - a - b) > 1e-3)
        assert c_n(0, ParamPair.of(a, b)).real == pytest.approx(1.0 / (1.0 - a - b), rel=1e-12)

    @given(a=floats(-0.9, 0.9), b=floats(-0.9, 0.9))
    def test_c1(self, *, a: float, b: float) -> None:
        assert c_n(1, ParamPair.of(a, b)).real == pytest.approx(-1.0 / SQRT_PI, rel=1e-9)

    def test_c1_on_its_removable_plane(self) -> None:
        assert c_n(1, ParamPair.of(0.3, -0.3)).real == pytest.approx(-1.0 / SQRT_PI, rel=1e-14)

    @given(a=floats(-0.9, 0.9), b=floats(-0.9, 0.9))
    def test_c2(self, *, a: float, b: float) -> None:
        assume(abs(1.0 + a + b) > 1e-3)
        expected = -(a * a + a + b * b + b) / (2.0 * (1.0 + a + b))
        assert c_n(2, ParamPair.of(a, b)).real == pytest.approx(expected, rel=1e-10, abs=1e-14)

    def test_c2_constant_data(self) -> None:
        assert c_n(2, ParamPair.of(0.0, 0.0)) == 0

    def test_even_pole(self) -> None:
        with pytest.raises(LogPlaneError):
            c_n(2, ParamPair.of(-0.5, -0.5))

    def test_odd_pole_removed(self) -> None:
        p = ParamPair.of(-1.2, -0.8)
        nearby = 0.5 * (c_n(3, ParamPair.of(-1.2 + 1e-4, -0.8)) + c_n(3, ParamPair.of(-1.2 - 1e-4, -0.8)))
        assert c_n(3, p) == pytest.approx(nearby, rel=1e-6)

    def test_negative_order(self) -> None:
        with pytest.raises(DomainError):
            c_n(-1, ParamPair.of(0.3, 0.4))


class TestCorrectionCoefficient:
    def test_constant_data(self) -> None:
        assert bc_correction_coefficient(ParamPair.of(0.0, 0.0)).real == pytest.approx(1.0 / SQRT_PI)

    def test_half_half(self) -> None:
        assert bc_correction_coefficient(ParamPair.of(0.5, 0.5)).real == pytest.approx(math.pi / 2.0, rel=1e-14)

    @given(a=floats(-0.9, 0.9), b=floats(-0.9, 0.9))
    def test_duplication_form(self, *, a: float, b: float) -> None:
        assume(abs(a + b) > 1e-3 and abs(a + b - 1) > 1e-3)
        p = ParamPair.of(a, b)
        assert bc_correction_coefficient(p) == pytest.approx(bc_correction_direct(p), rel=1e-10)

    def test_right_end_leading_term(self) -> None:
        assert bc_right_end_coefficient(0, ParamPair.of(0.3, 0.4)).real == pytest.approx(1.0 / SQRT_PI)

    def test_right_end_first_order(self) -> None:
        assert bc_right_end_coefficient(1, ParamPair.of(0.3, 0.4)).real == pytest.approx(0.35)


class TestXY:
    @given(a=floats(0.05, 0.95))
    def test_x_on_plane(self, *, a: float) -> None:
        assert x_fn(ParamPair.of(a, 1.0 - a)).real == pytest.approx(-1.0, rel=1e-12)

    def test_x_off_plane(self) -> None:
        p = ParamPair.of(0.8, 0.7)
        assert x_fn(p) == pytest.approx((1.0 - 1.5) * c_boundary(p), rel=1e-12)

    @pytest.mark.parametrize("a", [0.2, 0.5, 0.7])
    def test_y_is_derivative(self, a: float) -> None:
        h = 1e-5
        diff = (x_fn(ParamPair.of(a + h, 1.0 - a)) - x_fn(ParamPair.of(a - h, 1.0 - a))).real / (2.0 * h)
        assert y_fn(a) == pytest.approx(diff, abs=1e-7)

    def test_y_half(self) -> None:
        assert y_fn(0.5) == pytest.approx(-EULER_GAMMA / 2.0 - 2.0 * math.log(2.0), rel=1e-13)

    @pytest.mark.parametrize("a", [0.0, 1.0])
    def test_y_domain(self, a: float) -> None:
        with pytest.raises(DomainError):
            y_fn(a)

    @pytest.mark.parametrize("a", [0.3, 0.5])
    def test_delta_approximation(self, a: float) -> None:
        delta, t = 1e-5, 1e-2
        shifted = c_boundary(ParamPair.of(a + delta, 1.0 - a)).real * t ** (-delta / 2.0) - 1.0 / delta
        assert shifted == pytest.approx(-0.5 * math.log(t) - y_fn(a), abs=1e-3)

    def test_x_log_plane(self) -> None:
        with pytest.raises(LogPlaneError):
            x_fn(ParamPair.of(-0.3, -0.7))


class TestBeta0:
    @pytest.mark.parametrize("a", [0.3, 0.5])
    def test_closed_form_agrees_with_y(self, a: float) -> None:
        direct = beta0_theorem12(a, 0.05, BETA0_CUTOFF, BETA0_CUTOFF)
        assert direct == pytest.approx(beta0_from_y(a, 0.05, BETA0_CUTOFF, BETA0_CUTOFF), abs=1e-8)

    def test_epsilon_independent(self) -> None:
        values = [beta0_theorem12(0.4, eps, BETA0_CUTOFF, BETA0_CUTOFF) for eps in (0.01, 0.05, 0.1)]
        assert max(values) - min(values) < 1e-9

    def test_off_plane(self) -> None:
        with pytest.raises(DomainError):
            beta0_theorem12(0.3, 0.05, BETA0_CUTOFF, BETA0_CUTOFF, b=0.5)

    def test_cutoff_must_vanish_by_half(self) -> None:
        with pytest.raises(DomainError):
            beta0_theorem12(0.3, 0.05, CutoffSpec(), CutoffSpec())

    def test_epsilon_inside_plateau(self) -> None:
        with pytest.raises(DomainError):
            beta0_theorem12(0.3, 0.3, BETA0_CUTOFF, BETA0_CUTOFF)


class TestAsReal:
    def test_real(self) -> None:
        assert as_real(complex(1.5, 1e-15)) == 1.5

    def test_complex(self) -> None:
        with pytest.raises(DomainError):
            as_real(complex(1.5, 0.1))
