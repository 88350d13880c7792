"""
Dirichlet / Neumann heat content on [0, 1] by the method of images.

The interval kernel is the free kernel summed over the reflection group
generated by x -> -x and x -> 2 - x:

    K_bc(x, xt) = sum_m (s0 s1)^|m| [ K(x, xt + 2m) + s0 K(x, -xt + 2m) ]

with s = +1 at a Neumann end and -1 at a Dirichlet end. The heat content
splits into the free interval term, one corner term per end and far images.
"""

import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from prefect.logging import get_logger

from heat_content.asymptotics import (
    Evaluator,
    fit_log_coefficient,
    log_coefficient_matches,
    residual_report,
    sequential_evaluator,
    series_thm31,
)
from heat_content.coefficients import (
    bc_correction_coefficient,
    bc_right_end_coefficient,
    c_n,
    log_coefficient,
    log_plane_index,
)
from heat_content.errors import DomainError
from heat_content.models import (
    AsymptoticSeries,
    BCSpec,
    BoundaryCondition,
    ParamPair,
    PowerProfile,
    QuadResult,
    SeriesTerm,
    VerificationReport,
)
from heat_content.quadrature import (
    AxisNodes,
    DEFAULT_TOL,
    corner_integral,
    image_value,
    integrate_1d,
    kernel_line,
    ridge_integral,
    tau_for_power,
)

logger = get_logger(__name__)

BC_T_MIN, BC_T_MAX = 1e-6, 0.05
DEFAULT_IMAGES = 3
NEGLIGIBLE_EXPONENT = 60.0

_erf = np.vectorize(math.erf, otypes=[float])
_erfc = np.vectorize(math.erfc, otypes=[float])


def _as_spec(bc: Union[BCSpec, str]) -> BCSpec:
    return BCSpec.from_code(bc) if isinstance(bc, str) else bc


def images_for(t: float, images: Optional[int] = None) -> int:
    """Smallest image count whose first omitted term is below e^{-80}, at least DEFAULT_IMAGES."""
    needed = math.ceil((math.sqrt(320.0 * t) + 1.0) / 2.0)
    return max(needed, DEFAULT_IMAGES if images is None else images)


# --- Kernels ---

def image_kernel(x, xt, t: float, bc: Union[BCSpec, str], images: int = DEFAULT_IMAGES):
    if images < 1:
        raise DomainError(f"images must be >= 1, got {images}")
    spec = _as_spec(bc)
    s0, s1 = spec.left_sign, spec.right_sign
    x = np.asarray(x, dtype=float)
    xt = np.asarray(xt, dtype=float)
    shape = np.broadcast(x, xt).shape
    terms = []
    for m in range(-images, images + 1):
        weight = float((s0 * s1) ** abs(m))
        terms.append(weight * kernel_line(x, xt + 2 * m, t))
        terms.append(weight * s0 * kernel_line(x, -xt + 2 * m, t))
    # fsum: images that mirror each other cancel exactly, in either argument order
    columns = np.stack(np.broadcast_arrays(*terms)).reshape(len(terms), -1)
    total = np.array([math.fsum(col) for col in columns.T]).reshape(shape)
    return float(total) if total.ndim == 0 else total


def half_line_kernel(x, xt, t: float, bc: Union[BoundaryCondition, str] = BoundaryCondition.NEUMANN):
    """Single-reflection kernel K(x, xt) +/- K(x, -xt) on [0, inf)."""
    sign = BoundaryCondition(bc).sign
    return kernel_line(x, xt, t) + sign * kernel_line(x, -np.asarray(xt, dtype=float), t)


def kernel_mass(x, t: float, bc: Union[BCSpec, str], images: Optional[int] = None) -> np.ndarray:
    """int_0^1 K_bc(x, xt) dxt in closed form (error functions)."""
    spec = _as_spec(bc)
    s0, s1 = spec.left_sign, spec.right_sign
    images = images_for(t, images)
    x = np.asarray(x, dtype=float)
    sigma = math.sqrt(4.0 * t)
    total = np.zeros_like(x)
    for m in range(-images, images + 1):
        weight = float((s0 * s1) ** abs(m))
        shift = x - 2 * m
        translated = 0.5 * (_erf(shift / sigma) - _erf((shift - 1.0) / sigma))
        reflected = 0.5 * (_erf((shift + 1.0) / sigma) - _erf(shift / sigma))
        total = total + weight * (translated + s0 * reflected)
    return total


def total_mass(t: float, bc: Union[BCSpec, str], images: Optional[int] = None,
               tol: float = DEFAULT_TOL) -> QuadResult:
    """int_0^1 int_0^1 K_bc; equal to 1 for Neumann at both ends."""
    return integrate_1d(lambda nodes: kernel_mass(nodes.x, t, bc, images) * np.exp(nodes.log_w),
                        tau_max=3.5, tol=tol, label=f"kernel mass {_as_spec(bc).code}")


# --- Heat content ---

def _far_images(images: int) -> List[Tuple[float, int, int]]:
    """(shift, reflect, m) for the images that stay away from the unit square."""
    out = []
    for m in range(-images, images + 1):
        if m != 0:
            out.append((2.0 * m, 1, m))
        if m not in (0, 1):
            out.append((2.0 * m, -1, m))
    return out


def _image_distance(shift: float, reflect: int) -> float:
    if reflect == 1:
        return abs(shift) - 1.0
    return shift - 2.0 if shift > 0 else -shift


def heat_content_profiles_bc(phi: PowerProfile, rho: PowerProfile, t: float, bc: Union[BCSpec, str],
                             tol: float = DEFAULT_TOL, images: Optional[int] = None) -> QuadResult:
    spec = _as_spec(bc)
    s0, s1 = spec.left_sign, spec.right_sign
    result = ridge_integral(phi, rho, t, tol)
    result = result + corner_integral(phi, rho, t, tol).scaled(s0)
    result = result + corner_integral(phi.mirror(), rho.mirror(), t, tol).scaled(s1)
    for shift, reflect, m in _far_images(images_for(t, images)):
        d = _image_distance(shift, reflect)
        if d * d / (4.0 * t) > NEGLIGIBLE_EXPONENT:
            continue
        sign = (s0 * s1) ** abs(m) * (s0 if reflect == -1 else 1)
        result = result + image_value(phi, rho, t, shift, reflect, tol).scaled(sign)
    return result


def heat_content_bc(p: ParamPair, t: float, bc: Union[BCSpec, str], tol: float = DEFAULT_TOL,
                    images: Optional[int] = None) -> QuadResult:
    """int_0^1 int_0^1 K_bc(x, xt; t) x^{-a} xt^{-b}."""
    if not BC_T_MIN <= t <= BC_T_MAX:
        raise DomainError(f"t must lie in [{BC_T_MIN:g}, {BC_T_MAX:g}], got {t}")
    a, b = p.real()
    spec = _as_spec(bc)
    result = heat_content_profiles_bc(PowerProfile.power(a), PowerProfile.power(b), t, spec, tol, images)
    logger.debug(f"heat content {spec.code} a={a:g} b={b:g} t={t:g}: {result.value:.17g}")
    return result


def right_quadrant_correction(p: ParamPair, t: float, tol: float = DEFAULT_TOL) -> QuadResult:
    """Reflection term at x = 1: (4 pi t)^{-1/2} int int e^{-(2-x-xt)^2/4t} x^{-a} xt^{-b}."""
    a, b = p.real()
    return corner_integral(PowerProfile.power(a).mirror(), PowerProfile.power(b).mirror(), t, tol)


def fit_correction_coefficient(quadrant: Callable[[float], QuadResult], p: ParamPair,
                               t_values: Sequence[float]) -> Tuple[float, float]:
    """(coefficient, exponent) of C t^e through quadrant(t); the exponent is fitted, C read at e=(1-a-b)/2."""
    t = np.asarray(t_values, dtype=float)
    values = np.array([quadrant(tv).value for tv in t_values])
    exponent, _ = np.polyfit(np.log(t), np.log(values), 1)
    power = (1.0 - p.s.real) / 2.0
    coefficient = float(np.mean(values / t**power))
    return coefficient, float(exponent)


# --- Series ---

def right_end_series(p: ParamPair, N: int) -> AsymptoticSeries:
    """sum_{j=0}^{N-1} r_j t^{(1+j)/2}."""
    return AsymptoticSeries.from_terms(
        [SeriesTerm(power=complex((1 + j) / 2.0), coeff=bc_right_end_coefficient(j, p)) for j in range(N)])


def correction_series(p: ParamPair, N: int, bc: Union[BCSpec, str]) -> AsymptoticSeries:
    spec = _as_spec(bc)
    left = AsymptoticSeries(terms=[SeriesTerm(power=(1.0 - p.s) / 2.0, coeff=bc_correction_coefficient(p))])
    return left.scaled(spec.left_sign) + right_end_series(p, N).scaled(spec.right_sign)


def series_theorem51(p: ParamPair, N: int, bc: Union[BCSpec, str]) -> AsymptoticSeries:
    """Free interval series through t^{N/2} plus both end corrections through the same order."""
    return series_thm31(p, N) + correction_series(p, N, bc)


def verify_theorem51(p: ParamPair, t_grid: Optional[Sequence[float]] = None, bc: Union[BCSpec, str] = "NN",
                     N: int = 3, tol: float = 1e-12, slope_tol: float = 0.15, log_coeff_tol: float = 0.05,
                     evaluator: Evaluator = sequential_evaluator) -> VerificationReport:
    spec = _as_spec(bc)
    a, b = p.real()
    t_grid = list(t_grid or [float(t) for t in np.geomspace(1e-2, 1e-5, 6)])
    results = evaluator(lambda t: heat_content_bc(p, t, spec, tol), t_grid)
    k = log_plane_index(p.s)
    if k is None:
        series = series_theorem51(p, N, spec)
        series_values = [series.evaluate(t).real for t in t_grid]
        return residual_report(f"boundary {spec.code} a={a:g} b={b:g} N={N}",
                               {"a": a, "b": b, "bc": spec.code, "N": N}, t_grid, results,
                               series_values, (N + 1) / 2.0, slope_tol)

    N = max(N, 2 * k + 6)
    corrections = correction_series(p, N, spec)
    known = [sum(c_n(n, p).real * t ** (n / 2.0) for n in range(2 * k + 1, N + 1))
             + corrections.evaluate(t).real for t in t_grid]
    values = [r.value - kn for r, kn in zip(results, known)]
    fitted = fit_log_coefficient(t_grid, values, k)
    expected = log_coefficient(a, k)
    passed = log_coefficient_matches(fitted, expected, log_coeff_tol)
    logger.info(f"boundary {spec.code} log plane k={k}: fitted {fitted:.6g}, expected {expected:.6g}")
    return VerificationReport(label=f"boundary {spec.code} log plane k={k} a={a:g}",
                              parameters={"a": a, "b": b, "bc": spec.code, "k": k, "N": N},
                              t_grid=t_grid, quad_values=[r.value for r in results],
                              quad_errors=[r.error_estimate for r in results], series_values=known,
                              residuals=values, fitted_log_coeff=fitted, expected_log_coeff=expected,
                              passed=passed, tolerance_used=log_coeff_tol)


# --- Half-line reflection operator ---

def reflection_l1_norm(profile: PowerProfile, t: float, delta: float = 0.0,
                       tol: float = 0.0, rel_tol: float = 1e-10) -> float:
    """|| T(chi_[delta, inf) phi)(.; t) ||_1 = int_delta^1 |phi(xt)| erfc(xt / (2 sqrt t)) / 2 dxt."""
    if not 0.0 <= delta < 1.0:
        raise DomainError(f"delta must lie in [0, 1), got {delta}")
    sigma = math.sqrt(4.0 * t)

    def integrand(nodes: AxisNodes) -> np.ndarray:
        log_x = nodes.log_d0 if delta == 0.0 else np.log(nodes.x)
        phi = profile.weighted_values(nodes.x, log_x, nodes.log_d1, nodes.log_w)
        return np.abs(phi) * 0.5 * _erfc(nodes.x / sigma)

    return integrate_1d(integrand, delta, 1.0, tol, breakpoints=profile.breakpoints(),
                        tau_max=tau_for_power(profile.min_power), label="reflection L1 norm",
                        rel_tol=rel_tol).value


def profile_l1_norm(profile: PowerProfile) -> float:
    def integrand(nodes: AxisNodes) -> np.ndarray:
        return np.abs(profile.weighted_values(nodes.x, nodes.log_d0, nodes.log_d1, nodes.log_w))

    return integrate_1d(integrand, breakpoints=profile.breakpoints(),
                        tau_max=tau_for_power(profile.min_power), label="L1 norm").value


def tail_decay_slope(profile: PowerProfile, delta: float, t_values: Sequence[float]) -> float:
    """Fitted slope of log || T(chi_[delta, inf) phi) ||_1 against 1/t."""
    inv_t = np.array([1.0 / t for t in t_values])
    logs = np.array([math.log(reflection_l1_norm(profile, t, delta)) for t in t_values])
    slope, _ = np.polyfit(inv_t, logs, 1)
    return float(slope)
