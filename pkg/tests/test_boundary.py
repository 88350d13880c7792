from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats, sampled_from

from heat_content.boundary import (correction_series, fit_correction_coefficient, heat_content_bc, image_kernel,
                                   images_for, kernel_mass, profile_l1_norm, reflection_l1_norm,
                                   right_quadrant_correction, series_theorem51, tail_decay_slope, total_mass,
                                   verify_theorem51)
from heat_content.coefficients import bc_correction_coefficient, c_boundary
from heat_content.errors import DomainError
from heat_content.models import ParamPair, PowerProfile
from heat_content.quadrature import heat_content_interval, quadrant_correction

CONSTANT = ParamPair.of(0.0, 0.0)


class TestKernels:
    @given(x=floats(0.0, 1.0), xt=floats(0.0, 1.0), bc=sampled_from(["DD", "NN", "DN", "ND"]))
    @settings(max_examples=50)
    def test_symmetric(self, *, x: float, xt: float, bc: str) -> None:
        scale = image_kernel(0.5, 0.5, 0.01, "NN")
        assert image_kernel(x, xt, 0.01, bc) == pytest.approx(image_kernel(xt, x, 0.01, bc), rel=1e-12,
                                                              abs=1e-14 * scale)

    @pytest.mark.parametrize("bc", ["DD", "DN"])
    @pytest.mark.parametrize("xt", [0.0, 0.3, 1.0])
    def test_left_dirichlet_exact_zero(self, bc: str, xt: float) -> None:
        assert image_kernel(0.0, xt, 0.01, bc) == 0.0
        assert image_kernel(xt, 0.0, 0.01, bc) == 0.0

    def test_dirichlet_vanishes_at_end(self) -> None:
        assert image_kernel(0.0, 0.3, 0.01, "DD") == pytest.approx(0.0, abs=1e-15)
        assert image_kernel(1.0, 0.3, 0.01, "DN") > 0.0

    def test_image_count(self) -> None:
        with pytest.raises(DomainError):
            image_kernel(0.5, 0.5, 0.01, "NN", images=0)
        assert images_for(1e-3) == 3
        assert images_for(10.0) > 3

    def test_neumann_mass(self) -> None:
        x = np.linspace(0.0, 1.0, 11)
        np.testing.assert_allclose(kernel_mass(x, 0.01, "NN"), 1.0, atol=1e-13)

    @pytest.mark.parametrize("t", [1e-3, 1e-2, 0.05])
    def test_total_mass_neumann(self, t: float) -> None:
        assert total_mass(t, "NN").value == pytest.approx(1.0, abs=1e-10)

    def test_dirichlet_mass_decays(self) -> None:
        masses = [total_mass(t, "DD").value for t in (1e-3, 1e-2, 0.05, 0.2)]
        assert all(m1 > m2 for m1, m2 in zip(masses, masses[1:]))
        assert masses[0] < 1.0


class TestHeatContentBC:
    @pytest.mark.parametrize("t", [1e-3, 1e-2, 0.05])
    def test_neumann_constant(self, t: float) -> None:
        assert heat_content_bc(CONSTANT, t, "NN").value == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize(("bc", "ends"), [("DD", 2), ("DN", 1), ("ND", 1)])
    def test_dirichlet_constant(self, bc: str, ends: int) -> None:
        t = 1e-3
        expected = 1.0 - 2.0 * ends * math.sqrt(t / math.pi)
        assert heat_content_bc(CONSTANT, t, bc).value == pytest.approx(expected, abs=1e-10)

    def test_neumann_is_free_plus_corners(self) -> None:
        p = ParamPair.of(0.3, 0.4)
        t = 1e-3
        pieces = (heat_content_interval(p, t).value + quadrant_correction(p, t).value
                  + right_quadrant_correction(p, t).value)
        assert heat_content_bc(p, t, "NN").value == pytest.approx(pieces, abs=1e-10)

    @pytest.mark.parametrize("t", [1e-7, 0.1])
    def test_t_range(self, t: float) -> None:
        with pytest.raises(DomainError):
            heat_content_bc(CONSTANT, t, "NN")

    def test_bad_code(self) -> None:
        with pytest.raises(ValueError):
            heat_content_bc(CONSTANT, 1e-3, "XY")


class TestCorrection:
    def test_fitted_coefficient(self) -> None:
        p = ParamPair.of(0.3, -0.4)
        coeff, exponent = fit_correction_coefficient(lambda t: quadrant_correction(p, t), p, [1e-3, 1e-4])
        assert coeff == pytest.approx(bc_correction_coefficient(p).real, rel=1e-6)
        assert exponent == pytest.approx(0.55, abs=1e-6)

    def test_right_corner_constant(self) -> None:
        t = 1e-3
        assert right_quadrant_correction(CONSTANT, t).value == pytest.approx(math.sqrt(t / math.pi), rel=1e-10)

    def test_series_boundary_power(self) -> None:
        p = ParamPair.of(0.3, 0.4)
        series = series_theorem51(p, 3, "NN")
        expected = c_boundary(p) + bc_correction_coefficient(p)
        assert series.coefficient((1.0 - p.s) / 2.0) == pytest.approx(expected)

    def test_dirichlet_flips_sign(self) -> None:
        p = ParamPair.of(0.3, 0.4)
        neumann = correction_series(p, 3, "NN")
        dirichlet = correction_series(p, 3, "DD")
        assert dirichlet.evaluate(1e-3) == pytest.approx(-neumann.evaluate(1e-3))

    @pytest.mark.slow
    @pytest.mark.parametrize("bc", ["DD", "NN"])
    def test_verify(self, bc: str) -> None:
        report = verify_theorem51(ParamPair.of(0.3, 0.4), bc=bc)
        assert report.passed, report.fitted_exponent


class TestReflectionNorm:
    def test_constant_data(self) -> None:
        t = 1e-3
        assert reflection_l1_norm(PowerProfile.power(0.0), t) == pytest.approx(math.sqrt(t / math.pi), rel=1e-8)

    def test_bounded_by_profile_norm(self) -> None:
        profile = PowerProfile.power(0.5)
        assert profile_l1_norm(profile) == pytest.approx(2.0, rel=1e-10)
        assert reflection_l1_norm(profile, 0.01) < 0.5 * profile_l1_norm(profile)

    @pytest.mark.parametrize("a", [0.0, 0.3, 0.5])
    def test_power_closed_form(self, a: float) -> None:
        t = 1e-3
        sigma = math.sqrt(4.0 * t)
        expected = 0.5 * sigma ** (1.0 - a) * math.gamma(1.0 - a / 2.0) / ((1.0 - a) * math.sqrt(math.pi))
        assert reflection_l1_norm(PowerProfile.power(a), t) == pytest.approx(expected, rel=1e-8)

    def test_tail_bound(self) -> None:
        t, delta, a = 1e-2, 0.3, 0.3
        tail_mass = (1.0 - delta ** (1.0 - a)) / (1.0 - a)
        bound = 0.5 * math.erfc(delta / math.sqrt(4.0 * t)) * tail_mass
        value = reflection_l1_norm(PowerProfile.power(a), t, delta)
        assert 0.0 < value <= bound
        assert value < reflection_l1_norm(PowerProfile.power(a), t)

    def test_tail_decay(self) -> None:
        slope = tail_decay_slope(PowerProfile.power(0.3), 0.3, [1e-3, 5e-4, 2.5e-4])
        assert slope == pytest.approx(-0.3**2 / 4.0, rel=0.1)

    def test_delta_range(self) -> None:
        with pytest.raises(DomainError):
            reflection_l1_norm(PowerProfile.power(0.0), 1e-3, delta=1.0)
