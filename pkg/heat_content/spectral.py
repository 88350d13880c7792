"""
Heat content on the circle of circumference 2 pi, with [0, 1] embedded in [-pi, pi).

beta_circle(phi, rho)(t) = sum_n e^{-t n^2} gamma_n(phi) gamma_{-n}(rho),
gamma_n(f) = (2 pi)^{-1/2} int_0^1 f(x) e^{-i n x} dx.
"""

import math
from typing import List, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from prefect.logging import get_logger

from heat_content.errors import DomainError, MaxRefinementError, TruncationError
from heat_content.models import FourierProfile, IdentityCheck, PowerProfile
from heat_content.quadrature import AxisNodes, axis_nodes, image_integral, integrate_1d, tau_for_power

logger = get_logger(__name__)

DEFAULT_N_MAX = 4096
COEFF_TOL = 1e-11
TRUNCATION_TOL = 1e-14
GAUSS_POINTS = 16
END_PANEL_LEVEL = 6
CHUNK = 256
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _panel_edges(profile: PowerProfile, panels: int) -> List[float]:
    edges = set(np.linspace(0.0, 1.0, panels + 1).tolist())
    edges.update(profile.breakpoints())
    return sorted(edges)


def _weighted_nodes(profile: PowerProfile, panels: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes x and contributions f(x) w on [0, 1]: tanh-sinh on the end panels, Gauss elsewhere."""
    edges = _panel_edges(profile, panels)
    tau = tau_for_power(profile.min_power)
    gx, gw = leggauss(GAUSS_POINTS)
    xs, vs = [], []
    for i, (u, v) in enumerate(zip(edges[:-1], edges[1:])):
        if i == 0 or i == len(edges) - 2:
            nodes = axis_nodes(u, v, END_PANEL_LEVEL, tau)
        else:
            half = 0.5 * (v - u)
            x = u + half * (gx + 1.0)
            nodes = AxisNodes(x, x, 1.0 - x, np.log(x), np.log1p(-x), np.log(half * gw))
        xs.append(nodes.x)
        vs.append(_values(profile, nodes))
    return np.concatenate(xs), np.concatenate(vs)


def _values(profile: PowerProfile, nodes: AxisNodes) -> np.ndarray:
    return profile.weighted_values(nodes.x, nodes.log_d0, nodes.log_d1, nodes.log_w)


def _transform(x: np.ndarray, v: np.ndarray, n_max: int) -> np.ndarray:
    """gamma_n for n = 0..n_max."""
    out = np.empty(n_max + 1, dtype=complex)
    for start in range(0, n_max + 1, CHUNK):
        n = np.arange(start, min(start + CHUNK, n_max + 1))
        out[start:start + n.size] = np.exp(-1j * np.outer(n, x)) @ v
    return out * _INV_SQRT_2PI


def _full(nonneg: np.ndarray) -> np.ndarray:
    """Extend gamma_0..gamma_N to n = -N..N for real data."""
    return np.concatenate([np.conj(nonneg[:0:-1]), nonneg])


def fourier_coefficients(profile: PowerProfile, n_max: int = DEFAULT_N_MAX,
                         tol: float = COEFF_TOL) -> FourierProfile:
    if n_max < 1:
        raise DomainError(f"n_max must be positive, got {n_max}")
    if profile.min_power <= -1.0:
        raise DomainError(f"profile not integrable: exponent {-profile.min_power} >= 1")
    panels = max(8, math.ceil(n_max / 8))
    coarse = _transform(*_weighted_nodes(profile, panels), n_max)
    for _ in range(3):
        panels *= 2
        fine = _transform(*_weighted_nodes(profile, panels), n_max)
        error = float(np.max(np.abs(fine - coarse)))
        logger.debug(f"fourier_coefficients: {panels} panels, estimate {error:.3g}")
        if error <= tol:
            return FourierProfile(coefficients=_full(fine), n_max=n_max,
                                  provenance="FromSamples", error_estimate=error)
        coarse = fine
    raise MaxRefinementError(f"Fourier coefficients did not reach {tol:.3g}", error_estimate=error)


def indicator_profile(n_max: int = DEFAULT_N_MAX) -> FourierProfile:
    """Closed-form coefficients of the indicator of [0, 1]."""
    n = np.arange(1, n_max + 1)
    nonneg = np.empty(n_max + 1, dtype=complex)
    nonneg[0] = _INV_SQRT_2PI
    nonneg[1:] = -np.expm1(-1j * n) / (1j * n) * _INV_SQRT_2PI
    return FourierProfile(coefficients=_full(nonneg), n_max=n_max, provenance="FromClosedForm")


def heat_content_circle(phi: FourierProfile, rho: FourierProfile, t: float) -> float:
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    n_max = min(phi.n_max, rho.n_max)
    g_phi = phi.coefficients[phi.n_max - n_max: phi.n_max + n_max + 1]
    g_rho = rho.coefficients[rho.n_max - n_max: rho.n_max + n_max + 1]
    scale = float(np.max(np.abs(g_phi)) * np.max(np.abs(g_rho)))
    if scale > 0.0 and math.exp(-t * n_max * n_max) * scale >= TRUNCATION_TOL:
        raise TruncationError(math.ceil(math.sqrt(math.log(scale / TRUNCATION_TOL) / t)))
    n = np.arange(-n_max, n_max + 1)
    total = np.sum(np.exp(-t * n * n) * g_phi * g_rho[::-1])
    if abs(total.imag) >= 1e-10:
        raise DomainError(f"circle heat content has imaginary part {total.imag:.3g}")
    return float(total.real)


def _check_vanishing(profile: PowerProfile, what: str, tol: float = 1e-12) -> None:
    left, right = profile.endpoint_values()
    if abs(left) > tol or abs(right) > tol:
        raise DomainError(f"{what} must vanish at both ends, got f(0)={left}, f(1)={right}")


def verify_derivative_identity(profile: PowerProfile, n_max: int = DEFAULT_N_MAX) -> float:
    """max_n |gamma_n(f') - i n gamma_n(f)|."""
    _check_vanishing(profile, "f")
    g = fourier_coefficients(profile, n_max)
    g_prime = fourier_coefficients(profile.derivative(), n_max)
    deviation = np.abs(g_prime.coefficients - 1j * g.modes * g.coefficients)
    return float(np.max(deviation))


def _central_difference(phi: FourierProfile, rho: FourierProfile, t: float, dt: float) -> float:
    return (heat_content_circle(phi, rho, t + dt) - heat_content_circle(phi, rho, t - dt)) / (2.0 * dt)


def verify_time_derivative(phi: PowerProfile, rho: PowerProfile, t_grid: Sequence[float],
                           n_max: int = DEFAULT_N_MAX, dt: float = 1e-5,
                           tol: float = 1e-6) -> IdentityCheck:
    """beta(phi'', rho) against a centred difference of beta(phi, rho) in t."""
    _check_vanishing(phi, "phi")
    _check_vanishing(phi.derivative(), "phi'")
    f_phi = fourier_coefficients(phi, n_max)
    f_phi2 = fourier_coefficients(phi.derivative().derivative(), n_max)
    f_rho = fourier_coefficients(rho, n_max)
    deviations = []
    for t in t_grid:
        lhs = heat_content_circle(f_phi2, f_rho, t)
        rhs = _central_difference(f_phi, f_rho, t, dt)
        deviations.append(abs(lhs - rhs) / max(abs(rhs), 1e-300))
    worst = max(deviations)
    return IdentityCheck(label="time derivative", max_deviation=worst, tolerance=tol,
                         passed=worst <= tol, details={"t_grid": list(t_grid), "deviations": deviations})


def verify_mixed_derivative(phi: PowerProfile, rho: PowerProfile, t_grid: Sequence[float],
                            n_max: int = DEFAULT_N_MAX, dt: float = 1e-5,
                            tol: float = 1e-6) -> IdentityCheck:
    """beta(phi', rho') against minus a centred difference of beta(phi, rho)."""
    _check_vanishing(phi, "phi")
    _check_vanishing(rho, "rho")
    f_phi = fourier_coefficients(phi, n_max)
    f_rho = fourier_coefficients(rho, n_max)
    f_phi1 = fourier_coefficients(phi.derivative(), n_max)
    f_rho1 = fourier_coefficients(rho.derivative(), n_max)
    deviations = []
    for t in t_grid:
        lhs = heat_content_circle(f_phi1, f_rho1, t)
        rhs = -_central_difference(f_phi, f_rho, t, dt)
        deviations.append(abs(lhs - rhs) / max(abs(rhs), 1e-300))
    worst = max(deviations)
    return IdentityCheck(label="mixed derivative", max_deviation=worst, tolerance=tol,
                         passed=worst <= tol, details={"t_grid": list(t_grid), "deviations": deviations})


def parseval_defect(profile: PowerProfile, n_max: int = DEFAULT_N_MAX) -> Tuple[float, float]:
    """(sum_{|n| <= N} |gamma_n|^2, int |f|^2); the first never exceeds the second."""
    if profile.min_power <= -0.5:
        raise DomainError("profile is not square integrable")

    def integrand(nodes: AxisNodes) -> np.ndarray:
        root = profile.weighted_values(nodes.x, nodes.log_d0, nodes.log_d1, 0.5 * nodes.log_w)
        return root * root

    norm = integrate_1d(integrand, 0.0, 1.0, breakpoints=profile.breakpoints(),
                        tau_max=tau_for_power(2.0 * profile.min_power), label="L2 norm").value
    coeffs = fourier_coefficients(profile, n_max).coefficients
    return float(np.sum(np.abs(coeffs) ** 2)), norm


def decay_exponent(profile: FourierProfile, n_lo: int = 64, n_hi: int = 512) -> float:
    """Slope of log |gamma_n| against log n over n_lo..n_hi."""
    if n_hi > profile.n_max:
        raise DomainError(f"n_hi={n_hi} exceeds n_max={profile.n_max}")
    n = np.arange(n_lo, n_hi + 1)
    mags = np.abs(profile.coefficients[profile.n_max + n])
    slope, _ = np.polyfit(np.log(n), np.log(mags), 1)
    return float(slope)


def circle_line_gap(phi: PowerProfile, rho: PowerProfile, t: float, images: int = 3) -> float:
    """log |beta_circle - beta_line|, summed over the periodic images x~ + 2 pi m, m != 0."""
    logs, values = [], []
    for m in range(1, images + 1):
        for shift in (2.0 * math.pi * m, -2.0 * math.pi * m):
            result, log_factor = image_integral(phi, rho, t, shift, 1, tol=0.0)
            logs.append(log_factor)
            values.append(result.value)
    top = max(logs)
    total = sum(v * math.exp(lf - top) for v, lf in zip(values, logs))
    if total == 0.0:
        raise DomainError("circle and line heat contents coincide to all represented digits")
    return top + math.log(abs(total))


def gap_decay_slope(phi: PowerProfile, rho: PowerProfile, t_values: Sequence[float]) -> float:
    """Fitted slope of log |beta_circle - beta_line| against 1/t."""
    inv_t = np.array([1.0 / t for t in t_values])
    gaps = np.array([circle_line_gap(phi, rho, t) for t in t_values])
    slope, _ = np.polyfit(inv_t, gaps, 1)
    return float(slope)
