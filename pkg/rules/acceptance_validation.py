"""
Acceptance rules for the heat-content library.

Each rule takes a context dict (seed, tol) and returns {"error": msg},
{"warning": msg} or {} when the check passes.
"""

import math
import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from heat_content.asymptotics import (default_grid, fit_with_basis, log_column, power_column,
                                      verify_expansion, verify_logplane, verify_recursion)
from heat_content.boundary import fit_correction_coefficient, heat_content_bc, total_mass, verify_theorem51
from heat_content.coefficients import bc_correction_direct, beta0_theorem12, c_boundary, c_n
from heat_content.errors import HeatContentError
from heat_content.ladder import MAX_K, eval_G, extract_sigma, in_subregion
from heat_content.models import CutoffSpec, ParamPair, PowerProfile
from heat_content.quadrature import c_k_integral, heat_content_interval, quadrant_correction, singular_coefficient
from heat_content.spectral import gap_decay_slope, heat_content_circle, indicator_profile
from heat_content.special_fn import gamma, reciprocal_gamma

SERIES_PAIRS = [(0.3, 0.4), (-0.5, 0.25), (0.9, -0.2)]
OVERLAP_PAIRS = [(-0.2, -0.3), (-1.5, -0.8)]
RECURSION_PAIRS = [(0.5, 0.3), (0.9, -0.2)]
BETA0_CUTOFF = CutoffSpec(plateau_end=0.2, support_end=0.45)
BETA0_EPSILONS = (0.01, 0.05, 0.1)


def _rng(context: Dict[str, Any]) -> np.random.Generator:
    return np.random.default_rng(context.get("seed", 0))


def _near_log_plane(s: float, margin: float) -> bool:
    k = round((1.0 - s) / 2.0)
    return k >= 0 and abs(s - (1 - 2 * k)) < margin


def sample_generic_pairs(rng: np.random.Generator, count: int, margin: float = 0.05) -> List[Tuple[float, float]]:
    """Random real (a, b) with a, b < 1, kept `margin` away from the log planes."""
    pairs = []
    while len(pairs) < count:
        a, b = rng.uniform(-2.0, 0.95, size=2)
        if not _near_log_plane(a + b, margin):
            pairs.append((float(a), float(b)))
    return pairs


def sample_subregion_pairs(rng: np.random.Generator, k: int, count: int,
                           margin: float = 0.05) -> List[Tuple[float, float]]:
    """Random real (a, b) inside O_k, `margin` away from its excluded planes."""
    pairs = []
    while len(pairs) < count:
        s = rng.uniform(-(2 * k + 1) + margin, 1 - k - margin)
        a = rng.uniform(-1.5, 0.9)
        b = s - a
        if b >= 0.95 or any(abs(s + m) < margin for m in range(1, 2 * k)):
            continue
        p = ParamPair.of(a, b)
        if in_subregion(k, p):
            pairs.append((float(a), float(b)))
    return pairs


def check_coefficient_exactness(context: Dict[str, Any]) -> Dict[str, str]:
    """c_0, c_1, c_2 against their closed forms at random generic points."""
    for a, b in sample_generic_pairs(_rng(context), 20):
        p = ParamPair.of(a, b)
        s = a + b
        expected = {0: 1.0 / (1.0 - s), 1: -1.0 / math.sqrt(math.pi),
                    2: -(a * a + a + b * b + b) / (2.0 * (1.0 + s))}
        for n, value in expected.items():
            deviation = abs(c_n(n, p) - value) / max(1.0, abs(value))
            if deviation > 1e-12:
                return {"error": f"c_{n}({a:.6g}, {b:.6g}) = {c_n(n, p)} differs from {value} by {deviation:.3g}"}
    return {}


def check_removable_singularities(context: Dict[str, Any]) -> Dict[str, str]:
    """Gamma-ratio cancellation on a+b = -2k and continuity of c(a,b) across those planes."""
    rng = _rng(context)
    delta = 1e-3
    for k in range(4):
        for a in rng.uniform(-0.9, 0.9, size=20):
            b = -2.0 * k - a
            left = gamma(1.0 - a) * reciprocal_gamma(b)
            right = gamma(1.0 - b) * reciprocal_gamma(a)
            scale = max(1.0, abs(left), abs(right))
            if abs(left + right) >= 1e-10 * scale:
                return {"error": f"Gamma ratios do not cancel at a={a:.6g}, b={b:.6g}: {abs(left + right):.3g}"}
            centre = c_boundary(ParamPair.of(a, b))
            plus = c_boundary(ParamPair.of(a, b + delta))
            minus = c_boundary(ParamPair.of(a, b - delta))
            jump = abs(centre - 0.5 * (plus + minus))
            if jump >= 1e-5 * max(1.0, abs(centre)):
                return {"error": f"c(a,b) jumps by {jump:.3g} across a+b={-2 * k} at a={a:.6g}"}
    return {}


def check_series_vs_quadrature(context: Dict[str, Any]) -> Dict[str, str]:
    """Residual exponent of the three-term series is (N+1)/2 = 2."""
    failed = []
    for a, b in SERIES_PAIRS:
        report = verify_expansion(ParamPair.of(a, b), default_grid(1e-2, 1e-5, 6), N=3, slope_tol=0.15)
        if not report.passed:
            failed.append(f"({a}, {b}): fitted {report.fitted_exponent}")
    if failed:
        return {"error": f"series residual exponent off 2 at {', '.join(failed)}"}
    return {}


def check_half_line_identity(context: Dict[str, Any]) -> Dict[str, str]:
    """C_{-1} equals c(a,b); the coefficients assembled on consecutive subregions agree on overlaps."""
    p = ParamPair.of(0.8, 0.7)
    integral = c_k_integral(-1, p).value
    closed = c_boundary(p).real
    if abs(integral - closed) > 1e-8:
        return {"error": f"C_-1(0.8, 0.7) = {integral:.12g} but c(0.8, 0.7) = {closed:.12g}"}
    for a, b in OVERLAP_PAIRS:
        p = ParamPair.of(a, b)
        ks = [k for k in range(MAX_K + 1) if in_subregion(k, p)]
        values = {k: singular_coefficient(k, p).value for k in ks}
        closed = c_boundary(p).real
        for k in ks:
            if abs(values[k] - closed) > 1e-8 * max(1.0, abs(closed)):
                return {"error": f"c_{k}({a}, {b}) = {values[k]:.12g} but c(a,b) = {closed:.12g}"}
            if k + 1 in values and abs(values[k] - values[k + 1]) > 1e-8:
                return {"error": f"c_{k} and c_{k + 1} disagree at ({a}, {b}): {values[k]:.12g} vs {values[k + 1]:.12g}"}
        if len(values) < 2:
            return {"warning": f"({a}, {b}) lies in fewer than two subregions: {ks}"}
    return {}


def check_log_plane_k0(context: Dict[str, Any]) -> Dict[str, str]:
    """Log slope, constant term and the cutoff constant beta0 on a+b = 1."""
    a = 0.5
    report = verify_logplane(a, 0)
    if not report.passed:
        return {"error": f"log plane k=0 at a={a}: {'; '.join(report.notes)} "
                         f"(slope {report.fitted_log_coeff}, constant {report.fitted_constant})"}

    betas = [beta0_theorem12(a, eps, BETA0_CUTOFF, BETA0_CUTOFF) for eps in BETA0_EPSILONS]
    spread = max(betas) - min(betas)
    if spread > 1e-9:
        return {"error": f"beta0 depends on epsilon: spread {spread:.3g}"}

    p = ParamPair.of(a, 1.0 - a)
    t_grid = default_grid(1e-3, 1e-6, 6)
    values = [heat_content_interval(p, t, cutoffs=(BETA0_CUTOFF, BETA0_CUTOFF)).value for t in t_grid]
    columns = [log_column(0), power_column(0.0), power_column(0.5), power_column(1.0)]
    extrapolated = float(fit_with_basis(t_grid, values, columns)[1])
    if abs(extrapolated - betas[0]) > 1e-3:
        return {"error": f"beta0 = {betas[0]:.8g} but cutoff quadrature extrapolates to {extrapolated:.8g}"}
    return {}


def check_log_plane_k1(context: Dict[str, Any]) -> Dict[str, str]:
    """t log t coefficient on a+b = -1, and its absence at (-1, 0)."""
    report = verify_logplane(-0.3, 1)
    if not report.passed:
        return {"error": f"t log t coefficient {report.fitted_log_coeff:.6g}, expected {report.expected_log_coeff:.6g}"}
    report = verify_logplane(-1.0, 1)
    if not report.passed:
        return {"error": f"spurious t log t term at (-1, 0): {report.fitted_log_coeff:.3g}"}
    return {}


def check_ladder_certification(context: Dict[str, Any]) -> Dict[str, str]:
    """Exact divisions through k=3, and G_k vanishing to order 2k+2 at eta = 1."""
    for k in range(MAX_K + 1):
        extract_sigma(k)
    rng = _rng(context)
    gaps = [2.0 ** -j for j in range(1, 22)]
    for k in range(MAX_K + 1):
        for a, b in sample_subregion_pairs(rng, k, 50):
            p = ParamPair.of(a, b)
            ratios = [abs(eval_G(k, 1.0 - g, p)) / g ** (2 * k + 2) for g in gaps]
            if not all(math.isfinite(r) for r in ratios):
                return {"error": f"G_{k} ratio not finite at ({a:.6g}, {b:.6g})"}
            limit = ratios[-1]
            if abs(ratios[-2] - limit) > 1e-4 * max(limit, 1e-12):
                return {"error": f"|G_{k}|/(1-eta)^{2 * k + 2} does not settle at ({a:.6g}, {b:.6g}): "
                                 f"{ratios[-2]:.6g} vs {limit:.6g}"}
    return {}


def check_recursion(context: Dict[str, Any]) -> Dict[str, str]:
    for a, b in RECURSION_PAIRS:
        for t in (1e-3, 1e-4):
            check = verify_recursion(ParamPair.of(a, b), t, N=8)
            if not check.passed:
                return {"error": f"recursion residual {check.max_deviation:.3g} above its bound "
                                 f"{check.tolerance:.3g} at ({a}, {b}), t={t:g}"}
            if check.max_deviation >= 1e-8:
                return {"error": f"recursion residual {check.max_deviation:.3g} at ({a}, {b}), t={t:g}"}
    return {}


def check_circle_line_gap(context: Dict[str, Any]) -> Dict[str, str]:
    """Exponential closeness of circle and line heat contents for constant data."""
    one = PowerProfile.power(0.0)
    slope = gap_decay_slope(one, one, [0.02, 0.01, 0.005])
    if slope > -0.125:
        return {"error": f"log gap slope {slope:.4g} against 1/t is above -1/8"}
    indicator = indicator_profile()
    for t in (0.02, 0.01, 0.005):
        circle = heat_content_circle(indicator, indicator, t)
        line = heat_content_interval(ParamPair.of(0.0, 0.0), t).value
        if abs(circle - line) > 1e-10:
            return {"error": f"circle {circle:.15g} vs line {line:.15g} at t={t:g}"}
    return {}


def check_boundary_conditions(context: Dict[str, Any]) -> Dict[str, str]:
    """Neumann conservation, the correction coefficient and boundary-condition series fits."""
    for t in (1e-3, 1e-2, 0.05):
        mass = total_mass(t, "NN").value
        if abs(mass - 1.0) > 1e-10:
            return {"error": f"Neumann kernel mass {mass:.15g} at t={t:g}"}
        content = heat_content_bc(ParamPair.of(0.0, 0.0), t, "NN").value
        if abs(content - 1.0) > 1e-10:
            return {"error": f"Neumann heat content of constants {content:.15g} at t={t:g}"}

    p = ParamPair.of(0.3, -0.4)
    coeff, exponent = fit_correction_coefficient(lambda t: quadrant_correction(p, t), p, [1e-3, 1e-4])
    expected = bc_correction_direct(p).real
    if abs(coeff - expected) > 1e-6 * max(1.0, abs(expected)):
        return {"error": f"correction coefficient {coeff:.12g} vs {expected:.12g} (exponent {exponent:.6g})"}

    for bc in ("DD", "NN"):
        report = verify_theorem51(ParamPair.of(0.3, 0.4), bc=bc)
        if not report.passed:
            return {"error": f"{bc} residual exponent {report.fitted_exponent}, predicted {report.predicted_exponent}"}
    return {}


ALL_RULES = [
    check_coefficient_exactness,
    check_removable_singularities,
    check_series_vs_quadrature,
    check_half_line_identity,
    check_log_plane_k0,
    check_log_plane_k1,
    check_ladder_certification,
    check_recursion,
    check_circle_line_gap,
    check_boundary_conditions,
]


def run_all_validations(context: Dict[str, Any],
                        only: Optional[Sequence[str]] = None) -> List[Dict[str, Any]]:
    """Runs the acceptance rules (all, or those named in `only`) in sequence.

    Returns one {"rule", "result", "seconds"} outcome per rule, the shape run_rule produces.
    """
    outcomes = []
    for rule_func in ALL_RULES:
        if only and rule_func.__name__ not in only:
            continue
        start = time.perf_counter()
        try:
            result = rule_func(context)
        except HeatContentError as e:
            result = {"error": f"{type(e).__name__}: {e}"}
        outcomes.append({"rule": rule_func.__name__, "result": result, "seconds": time.perf_counter() - start})
    return outcomes
