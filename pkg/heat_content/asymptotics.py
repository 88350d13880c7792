"""
Small-time series for the interval heat content and the checks that compare
them with quadrature: residual power-law fits, log-coefficient fits on the
log planes, the three-term recursion and the cutoff variant.
"""

import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from prefect.logging import get_logger

from heat_content.coefficients import (
    c_boundary,
    c_n,
    log_coefficient,
    log_plane_index,
    theta,
    y_fn,
)
from heat_content.errors import DomainError
from heat_content.models import (
    AsymptoticSeries,
    CutoffSpec,
    IdentityCheck,
    ParamPair,
    QuadResult,
    SeriesTerm,
    VerificationReport,
)
from heat_content.quadrature import heat_content_interval

logger = get_logger(__name__)

PointFn = Callable[[float], QuadResult]
Evaluator = Callable[[PointFn, Sequence[float]], List[QuadResult]]

FLOOR_FACTOR = 10.0
RELATIVE_FLOOR = 1e-13
LOGPLANE_SLOPE_TOL = 0.02
LOGPLANE_CONSTANT_TOL = 1e-3
LOGPLANE_MIN_EXPONENT = 0.4
ZERO_LOG_COEFF_TOL = 1e-6


def sequential_evaluator(fn: PointFn, t_grid: Sequence[float]) -> List[QuadResult]:
    return [fn(t) for t in t_grid]


def default_grid(t_max: float = 1e-2, t_min: float = 1e-5, points: int = 6) -> List[float]:
    return [float(t) for t in np.geomspace(t_max, t_min, points)]


# --- Series ---

def series_thm31(p: ParamPair, N: int) -> AsymptoticSeries:
    """c(a,b) t^{(1-a-b)/2} + sum_{n=0}^N c_n(a,b) t^{n/2}; coinciding powers are merged."""
    if N < 0:
        raise DomainError(f"N must be non-negative, got {N}")
    terms = [SeriesTerm(power=(1.0 - p.s) / 2.0, coeff=c_boundary(p))]
    terms += [SeriesTerm(power=complex(n / 2.0), coeff=c_n(n, p)) for n in range(N + 1)]
    return AsymptoticSeries.from_terms(terms)


def series_logplane_k0(a: float, N: int = 4) -> AsymptoticSeries:
    """-1/2 log t - Y(a) + sum_{n=1}^N c_n(a, 1-a) t^{n/2}."""
    if not 0.0 < a < 1.0:
        raise DomainError(f"0 < a < 1 required, got {a}")
    p = ParamPair.of(a, 1.0 - a)
    terms = [SeriesTerm(power=0.0, log_power=1, coeff=-0.5),
             SeriesTerm(power=0.0, coeff=-y_fn(a))]
    terms += [SeriesTerm(power=complex(n / 2.0), coeff=c_n(n, p)) for n in range(1, N + 1)]
    return AsymptoticSeries.from_terms(terms)


def _boundary_term(n: int, b: float, t: float) -> float:
    return (t ** ((n + 2) / 2.0) * 2.0**n * theta(n, b) * math.gamma((n + 1) / 2.0)
            / (math.factorial(n) * math.sqrt(math.pi)))


def recursion_boundary_sum(b: float, t: float, N: int) -> float:
    """pi^{-1/2} sum_{n=0}^N t^{(n+2)/2} 2^n theta_n(b) Gamma((n+1)/2) / n!."""
    return sum(_boundary_term(n, b, t) for n in range(N + 1))


# --- Fits ---

def fit_power_law(t_grid: Sequence[float], residuals: Sequence[float], errors: Sequence[float],
                  values: Sequence[float]) -> Tuple[Optional[float], Optional[float], bool]:
    """Least-squares C t^s through |residual|; points within 10x of the quadrature floor are dropped.

    Returns (exponent, coefficient, below_floor).
    """
    t = np.asarray(t_grid, dtype=float)
    res = np.abs(np.asarray(residuals, dtype=float))
    floor = np.maximum(np.asarray(errors, dtype=float), RELATIVE_FLOOR * np.abs(np.asarray(values, dtype=float)))
    usable = res > FLOOR_FACTOR * floor
    if int(np.count_nonzero(usable)) < 3:
        return None, None, True
    slope, intercept = np.polyfit(np.log(t[usable]), np.log(res[usable]), 1)
    return float(slope), float(math.exp(intercept)), False


def fit_with_basis(t_grid: Sequence[float], values: Sequence[float],
                   columns: Sequence[Callable[[np.ndarray], np.ndarray]]) -> np.ndarray:
    """Least squares with column scaling; returns one coefficient per column."""
    t = np.asarray(t_grid, dtype=float)
    design = np.column_stack([col(t) for col in columns])
    scale = np.max(np.abs(design), axis=0)
    scale[scale == 0.0] = 1.0
    coeffs, *_ = np.linalg.lstsq(design / scale, np.asarray(values, dtype=float), rcond=None)
    return coeffs / scale


def power_column(power: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda t: t**power


def log_column(k: int) -> Callable[[np.ndarray], np.ndarray]:
    return lambda t: t**k * np.log(t)


def fit_log_coefficient(t_grid: Sequence[float], values: Sequence[float], k: int,
                        n_smooth: Optional[int] = None) -> float:
    """Coefficient of t^k log t with free smooth powers t^{n/2}, n <= max(n_smooth, 2k)."""
    top = 2 * k if n_smooth is None else max(n_smooth, 2 * k)
    columns = [power_column(n / 2.0) for n in range(top + 1)] + [log_column(k)]
    return float(fit_with_basis(t_grid, values, columns)[-1])


def log_coefficient_matches(fitted: float, expected: float, rel_tol: float) -> bool:
    if expected == 0.0:
        return abs(fitted) <= ZERO_LOG_COEFF_TOL
    return abs(fitted - expected) <= rel_tol * abs(expected)


# --- Verification ---

def _quad(p: ParamPair, tol: float, cutoffs: Optional[Tuple[CutoffSpec, CutoffSpec]] = None) -> PointFn:
    return lambda t: heat_content_interval(p, t, cutoffs=cutoffs, tol=tol)


def _params(p: ParamPair) -> dict:
    a, b = p.real()
    return {"a": a, "b": b}


def residual_report(label: str, parameters: dict, t_grid: Sequence[float], results: Sequence[QuadResult],
                    series_values: Sequence[float], predicted: float, slope_tol: float) -> VerificationReport:
    """Residual fit against a predicted exponent."""
    quad_values = [r.value for r in results]
    quad_errors = [r.error_estimate for r in results]
    residuals = [q - s for q, s in zip(quad_values, series_values)]
    exponent, _, below_floor = fit_power_law(t_grid, residuals, quad_errors, quad_values)
    passed = below_floor or abs(exponent - predicted) <= slope_tol
    notes = ["residuals below quadrature floor"] if below_floor else []
    logger.info(f"{label}: fitted exponent {exponent}, predicted {predicted}, pass={passed}")
    return VerificationReport(label=label, parameters=parameters, t_grid=list(t_grid),
                              quad_values=quad_values, quad_errors=quad_errors,
                              series_values=list(series_values), residuals=residuals,
                              fitted_exponent=exponent, predicted_exponent=predicted,
                              passed=passed, below_floor=below_floor, tolerance_used=slope_tol,
                              notes=notes)


def verify_expansion(p: ParamPair, t_grid: Optional[Sequence[float]] = None, N: int = 3,
                     tol: float = 1e-12, slope_tol: float = 0.15,
                     evaluator: Evaluator = sequential_evaluator,
                     include_boundary_term: bool = True) -> VerificationReport:
    """Residual of quadrature against the N-term series, fitted as C t^s with s ~ (N+1)/2."""
    t_grid = list(t_grid or default_grid())
    if include_boundary_term:
        series = series_thm31(p, N)
    else:
        series = AsymptoticSeries.from_terms(
            [SeriesTerm(power=complex(n / 2.0), coeff=c_n(n, p)) for n in range(N + 1)])
    results = evaluator(_quad(p, tol), t_grid)
    series_values = [series.evaluate(t).real for t in t_grid]
    label = f"expansion a={p.a.real:g} b={p.b.real:g} N={N}"
    if not include_boundary_term:
        label += " without boundary term"
    return residual_report(label, {**_params(p), "N": N}, t_grid, results, series_values,
                           (N + 1) / 2.0, slope_tol)


def verify_smooth_rho_case(a: float, b: int, t_grid: Optional[Sequence[float]] = None, N: int = 3,
                           tol: float = 1e-12, slope_tol: float = 0.15,
                           evaluator: Evaluator = sequential_evaluator,
                           include_boundary_term: bool = True) -> VerificationReport:
    """Integer b in {0, -1, -2}: the generic series still applies."""
    if b not in (0, -1, -2):
        raise DomainError(f"b must be one of 0, -1, -2, got {b}")
    return verify_expansion(ParamPair.of(a, b), t_grid, N, tol, slope_tol, evaluator,
                            include_boundary_term)


def verify_logplane(a: float, k: int, t_grid: Optional[Sequence[float]] = None,
                    N: Optional[int] = None, tol: float = 1e-12, log_coeff_tol: float = 0.05,
                    evaluator: Evaluator = sequential_evaluator) -> VerificationReport:
    """Log term on the plane a+b = 1-2k."""
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    b = 1.0 - 2 * k - a
    p = ParamPair.of(a, b)
    expected = log_coefficient(a, k)
    if k == 0:
        return _verify_logplane_k0(p, list(t_grid or default_grid(1e-3, 1e-6)), N or 0, tol, evaluator)

    t_grid = list(t_grid or default_grid(1e-2, 1e-5, 8))
    N = 2 * k + 6 if N is None else N
    results = evaluator(_quad(p, tol), t_grid)
    known = [sum(c_n(n, p).real * t ** (n / 2.0) for n in range(2 * k + 1, N + 1)) for t in t_grid]
    values = [r.value - kn for r, kn in zip(results, known)]
    fitted = fit_log_coefficient(t_grid, values, k)
    passed = log_coefficient_matches(fitted, expected, log_coeff_tol)
    logger.info(f"log plane k={k}, a={a}: fitted t^k log t coefficient {fitted:.6g}, expected {expected:.6g}")
    return VerificationReport(label=f"log plane k={k} a={a:g}", parameters={"a": a, "b": b, "k": k, "N": N},
                              t_grid=t_grid, quad_values=[r.value for r in results],
                              quad_errors=[r.error_estimate for r in results], series_values=known,
                              residuals=values, fitted_log_coeff=fitted, expected_log_coeff=expected,
                              passed=passed, tolerance_used=log_coeff_tol)


def _verify_logplane_k0(p: ParamPair, t_grid: List[float], N: int, tol: float,
                        evaluator: Evaluator) -> VerificationReport:
    a = p.a.real
    results = evaluator(_quad(p, tol), t_grid)
    quad_values = [r.value for r in results]
    quad_errors = [r.error_estimate for r in results]
    slope, _ = np.polyfit(np.log(t_grid), quad_values, 1)
    series = series_logplane_k0(a, N)
    series_values = [series.evaluate(t).real for t in t_grid]
    residuals = [q - s for q, s in zip(quad_values, series_values)]
    exponent, _, below_floor = fit_power_law(t_grid, residuals, quad_errors, quad_values)
    t_small = min(t_grid)
    constant = quad_values[t_grid.index(t_small)] + 0.5 * math.log(t_small)
    expected_constant = -y_fn(a)
    checks = {
        "log slope": abs(slope + 0.5) <= LOGPLANE_SLOPE_TOL,
        "residual exponent": below_floor or exponent >= LOGPLANE_MIN_EXPONENT,
        "constant": abs(constant - expected_constant) <= LOGPLANE_CONSTANT_TOL,
    }
    notes = [f"{name} failed" for name, ok in checks.items() if not ok]
    logger.info(f"log plane k=0, a={a}: slope {slope:.6g}, constant {constant:.6g} vs {expected_constant:.6g}")
    return VerificationReport(label=f"log plane k=0 a={a:g}", parameters={"a": a, "b": 1.0 - a, "k": 0, "N": N},
                              t_grid=t_grid, quad_values=quad_values, quad_errors=quad_errors,
                              series_values=series_values, residuals=residuals,
                              fitted_exponent=exponent, predicted_exponent=0.5,
                              fitted_log_coeff=float(slope), expected_log_coeff=-0.5,
                              fitted_constant=constant, expected_constant=expected_constant,
                              passed=all(checks.values()), below_floor=below_floor,
                              tolerance_used=LOGPLANE_SLOPE_TOL, notes=notes)


def _floor(result: QuadResult) -> float:
    return max(result.error_estimate, RELATIVE_FLOOR * abs(result.value))


def verify_recursion(p: ParamPair, t: float, N: int = 8, tol: float = 1e-14) -> IdentityCheck:
    """|h_{a,b} - (h_{a-2,b} - h_{a-1,b-1} + Z_N) / (2t(1-a))| from three quadratures.

    Passes when the residual is within max(10 x quadrature floor, truncation), where
    truncation is 10x the larger of the next two omitted boundary terms. Both are
    scaled by 1/(2t|1-a|) like the right-hand side.
    """
    a, b = p.real()
    h = heat_content_interval(p, t, tol=tol)
    h_up = heat_content_interval(ParamPair.of(a - 2.0, b), t, tol=tol)
    h_mixed = heat_content_interval(ParamPair.of(a - 1.0, b - 1.0), t, tol=tol)
    rhs = (h_up.value - h_mixed.value + recursion_boundary_sum(b, t, N)) / (2.0 * t * (1.0 - a))
    residual = abs(h.value - rhs)
    scale = 2.0 * t * abs(1.0 - a)
    floor = _floor(h) + (_floor(h_up) + _floor(h_mixed)) / scale
    truncation = FLOOR_FACTOR * max(abs(_boundary_term(n, b, t)) for n in (N + 1, N + 2)) / scale
    bound = max(FLOOR_FACTOR * floor, truncation)
    logger.info(f"recursion a={a} b={b} t={t:g}: residual {residual:.3g} (bound {bound:.3g}, floor {floor:.3g})")
    return IdentityCheck(label=f"recursion a={a:g} b={b:g} t={t:g} N={N}", max_deviation=residual,
                         tolerance=bound, passed=residual <= bound,
                         details={"quadrature_floor": floor, "truncation": truncation, "t": t, "N": N})


def verify_cutoff_expansion(p: ParamPair, cutoff: Optional[CutoffSpec] = None,
                            t_grid: Optional[Sequence[float]] = None, n_smooth: int = 4,
                            tol: float = 1e-12, log_coeff_tol: float = 0.05,
                            evaluator: Evaluator = sequential_evaluator) -> VerificationReport:
    """Fit the heat content of x^{-a} Xi, x^{-b} Xi to smooth powers plus the singular term."""
    cutoff = cutoff or CutoffSpec()
    a, b = p.real()
    t_grid = list(t_grid or default_grid(1e-2, 1e-5, 8))
    results = evaluator(_quad(p, tol, (cutoff, cutoff)), t_grid)
    values = [r.value for r in results]
    smooth = [power_column(n / 2.0) for n in range(n_smooth + 1)]
    k = log_plane_index(p.s)
    base = dict(label=f"cutoff expansion a={a:g} b={b:g}", parameters={"a": a, "b": b, "n_smooth": n_smooth},
                t_grid=t_grid, quad_values=values, quad_errors=[r.error_estimate for r in results],
                tolerance_used=log_coeff_tol)
    if k is not None:
        fitted = fit_log_coefficient(t_grid, values, k, n_smooth)
        expected = log_coefficient(a, k)
        return VerificationReport(**base, fitted_log_coeff=fitted, expected_log_coeff=expected,
                                  passed=log_coefficient_matches(fitted, expected, log_coeff_tol))
    power = (1.0 - a - b) / 2.0
    if any(abs(power - n / 2.0) < 1e-9 for n in range(n_smooth + 1)):
        raise DomainError(f"singular power {power} coincides with a smooth power")
    fitted = float(fit_with_basis(t_grid, values, smooth + [power_column(power)])[-1])
    expected = c_boundary(p).real
    passed = abs(fitted - expected) <= log_coeff_tol * abs(expected)
    logger.info(f"cutoff expansion a={a} b={b}: singular coefficient {fitted:.6g} vs c(a,b) {expected:.6g}")
    return VerificationReport(**base, fitted_constant=fitted, expected_constant=expected, passed=passed,
                              notes=[f"singular power {power:g}"])
