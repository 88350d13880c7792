"""
Singular quadrature for heat-content integrals on [0, 1].

Every integral goes through a nested tanh-sinh (double-exponential) rule whose
nodes carry their distances to both ends of the unit interval in log form, so
endpoint powers x^p (p > -1) and Gaussian factors are combined in log space.

Two-dimensional integrals follow the Gaussian:
  ridge   inner variable restricted to |x - xt| <= U sqrt(4t)      (free kernel)
  corner  x + xt <= U sqrt(4t)                                    (reflection at 0)
  image   whole square, kernel shifted away from the diagonal      (far images)
"""

import math
from functools import lru_cache
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from prefect.logging import get_logger

from heat_content.errors import DomainError, MaxRefinementError, RegionError
from heat_content.ladder import in_subregion, sigma_values
from heat_content.models import CutoffSpec, ParamPair, PowerProfile, QuadResult
from heat_content.special_fn import gamma

logger = get_logger(__name__)

DEFAULT_TOL = 1e-11
WINDOW = 6.5                 # Gaussian window in units of sqrt(4t); e^{-42} neglected
T_MIN, T_MAX = 1e-7, 1.0
MIN_LEVEL = 3
MAX_LEVEL_1D = 10
MAX_LEVEL_2D = 8
TAU_SMOOTH = 3.5
TAU_CEILING = 8.0
_EPS = np.finfo(float).eps
_LOG_PI = math.log(math.pi)


class AxisNodes(NamedTuple):
    """Tanh-sinh nodes on a sub-interval of [0, 1] with precise end distances."""

    x: np.ndarray
    d0: np.ndarray        # x - 0
    d1: np.ndarray        # 1 - x
    log_d0: np.ndarray
    log_d1: np.ndarray
    log_w: np.ndarray


@lru_cache(maxsize=64)
def _reference_nodes(level: int, tau_max: float) -> Tuple[np.ndarray, ...]:
    h = 2.0 ** -level
    k = int(tau_max / h)
    tau = h * np.arange(-k, k + 1)
    y = 0.5 * math.pi * np.sinh(tau)
    log_dlo = -np.logaddexp(0.0, -2.0 * y)
    log_dhi = -np.logaddexp(0.0, 2.0 * y)
    log_cosh = np.abs(tau) + np.log1p(np.exp(-2.0 * np.abs(tau))) - math.log(2.0)
    log_w = math.log(h) + _LOG_PI + log_cosh + log_dlo + log_dhi
    return np.exp(log_dlo), np.exp(log_dhi), log_dlo, log_dhi, log_w


def tau_for_power(power: float) -> float:
    """Truncation point of the tanh-sinh sum for an endpoint behaving like d^power."""
    if power <= -1.0:
        raise DomainError(f"endpoint power must exceed -1, got {power}")
    y_needed = 46.0 / (2.0 * (1.0 + min(power, 0.0)))
    return float(min(TAU_CEILING, max(TAU_SMOOTH, math.asinh(2.0 * y_needed / math.pi))))


def axis_nodes(lo, hi, level: int, tau_max: float) -> AxisNodes:
    """Nodes on [lo, hi] inside [0, 1]; lo and hi may be arrays of shape (n, 1)."""
    dlo, dhi, log_dlo, log_dhi, log_wref = _reference_nodes(level, tau_max)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    length = np.maximum(hi - lo, 1e-300)
    log_len = np.log(length)
    x = lo + length * dlo
    with np.errstate(divide="ignore"):
        d0 = np.where(lo == 0.0, length * dlo, x)
        log_d0 = np.where(lo == 0.0, log_len + log_dlo, np.log(np.maximum(x, 1e-320)))
        d1 = np.where(hi == 1.0, length * dhi, 1.0 - x)
        log_d1 = np.where(hi == 1.0, log_len + log_dhi, np.log1p(-np.minimum(x, 1.0)))
    log_w = log_wref + log_len
    return AxisNodes(x, d0, d1, log_d0, log_d1, np.broadcast_to(log_w, x.shape))


def _refine(level_sum: Callable[[int], Tuple[float, float, int]], tol: float, label: str,
            max_level: int, rel_tol: float = 0.0) -> QuadResult:
    """Run levels MIN_LEVEL-1, MIN_LEVEL, ... until successive sums agree."""
    previous, _, nodes = level_sum(MIN_LEVEL - 1)
    total_nodes = nodes
    estimate = math.inf
    current = previous
    for level in range(MIN_LEVEL, max_level + 1):
        current, abs_sum, nodes = level_sum(level)
        total_nodes += nodes
        estimate = max(abs(current - previous), 16.0 * _EPS * abs_sum)
        target = max(tol, rel_tol * abs(current), 16.0 * _EPS * abs_sum)
        logger.debug(f"{label}: level {level} value {current:.17g} estimate {estimate:.3g}")
        if estimate <= target:
            return QuadResult(value=current, error_estimate=estimate, nodes_used=total_nodes)
        previous = current
    raise MaxRefinementError(
        f"{label}: tolerance {tol:.3g} not reached at level {max_level} (estimate {estimate:.3g})",
        value=current, error_estimate=estimate)


def _split(points: Iterable[float], lo: float = 0.0, hi: float = 1.0) -> List[Tuple[float, float]]:
    inner = sorted({p for p in points if lo < p < hi})
    edges = [lo] + inner + [hi]
    return [(u, v) for u, v in zip(edges[:-1], edges[1:]) if v > u]


# --- 1-D ---

def integrate_1d(func: Callable[[AxisNodes], np.ndarray], lo: float = 0.0, hi: float = 1.0,
                 tol: float = DEFAULT_TOL, breakpoints: Sequence[float] = (),
                 tau_max: float = 7.5, label: str = "integrate_1d",
                 rel_tol: float = 0.0) -> QuadResult:
    """Integrate over [lo, hi]; func maps nodes to weighted contributions.

    Node distances (d0, d1) are measured from lo and hi. Callers working on
    sub-intervals of [0, 1] should pass lo=0, hi=1 and breakpoints.
    """
    if not hi > lo:
        raise DomainError(f"empty interval [{lo}, {hi}]")
    span = hi - lo
    pieces = _split([(p - lo) / span for p in breakpoints])

    def level_sum(level: int) -> Tuple[float, float, int]:
        total = 0.0
        abs_total = 0.0
        count = 0
        for u, v in pieces:
            nodes = axis_nodes(u, v, level, tau_max)
            scaled = AxisNodes(lo + span * nodes.x, span * nodes.d0, span * nodes.d1,
                               nodes.log_d0 + math.log(span), nodes.log_d1 + math.log(span),
                               nodes.log_w + math.log(span))
            contrib = np.asarray(func(scaled), dtype=float)
            total += float(np.sum(contrib))
            abs_total += float(np.sum(np.abs(contrib)))
            count += contrib.size
        return total, abs_total, count

    return _refine(level_sum, tol, label, MAX_LEVEL_1D, rel_tol)


def kernel_line(x, xt, t: float):
    """Free heat kernel (4 pi t)^{-1/2} exp(-(x - xt)^2 / (4t))."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    diff = np.asarray(x, dtype=float) - np.asarray(xt, dtype=float)
    value = np.exp(-diff * diff / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
    return float(value) if np.ndim(value) == 0 else value


def interval_constant_closed_form(t: float) -> float:
    """h_{0,0}(t) = 1 - 2 sqrt(t/pi)(1 - e^{-1/(4t)}) - erfc(1/(2 sqrt t))."""
    return (1.0 - 2.0 * math.sqrt(t / math.pi) * (-math.expm1(-1.0 / (4.0 * t)))
            - math.erfc(1.0 / (2.0 * math.sqrt(t))))


# --- 2-D building blocks ---

def _profile_tau(profile: PowerProfile) -> float:
    return tau_for_power(profile.min_power)


def _values(profile: PowerProfile, nodes: AxisNodes, extra_log=0.0) -> np.ndarray:
    return profile.weighted_values(nodes.x, nodes.log_d0, nodes.log_d1, nodes.log_w + extra_log)


def _check_t(t: float, lo: float = T_MIN, hi: float = T_MAX) -> None:
    if not lo <= t <= hi:
        raise DomainError(f"t must lie in [{lo:g}, {hi:g}], got {t}")


def ridge_integral(phi: PowerProfile, rho: PowerProfile, t: float,
                   tol: float = DEFAULT_TOL) -> QuadResult:
    """(4 pi t)^{-1/2} int int e^{-(x-xt)^2/4t} phi(x) rho(xt) over [0,1]^2."""
    sigma = math.sqrt(4.0 * t)
    reach = WINDOW * sigma
    pieces = _split([reach, 1.0 - reach] + phi.breakpoints())
    tau_out, tau_in = _profile_tau(phi), _profile_tau(rho)
    log_pref = -0.5 * math.log(4.0 * math.pi * t)
    rho_breaks = rho.breakpoints()

    def level_sum(level: int) -> Tuple[float, float, int]:
        total = 0.0
        abs_total = 0.0
        count = 0
        for u, v in pieces:
            outer = axis_nodes(u, v, level, tau_out)
            phi_w = _values(phi, outer, log_pref)
            x = outer.x[:, None]
            lo_i = np.maximum(0.0, x - reach)
            hi_i = np.minimum(1.0, x + reach)
            inner_sum = np.zeros_like(outer.x)
            inner_abs = np.zeros_like(outer.x)
            # rho's cutoff points split the window where they fall inside it
            cuts = [lo_i] + [np.clip(np.full_like(lo_i, c), lo_i, hi_i) for c in rho_breaks] + [hi_i]
            for c0, c1 in zip(cuts[:-1], cuts[1:]):
                inner = axis_nodes(c0, c1, level, tau_in)
                diff = x - inner.x
                vals = _values(rho, inner, -diff * diff / (4.0 * t))
                vals = np.where(c1 > c0, vals, 0.0)
                inner_sum += vals.sum(axis=1)
                inner_abs += np.abs(vals).sum(axis=1)
                count += vals.size
            total += float(np.sum(phi_w * inner_sum))
            abs_total += float(np.sum(np.abs(phi_w) * inner_abs))
        return total, abs_total, count

    return _refine(level_sum, tol, f"ridge t={t:g}", MAX_LEVEL_2D)


def corner_integral(phi: PowerProfile, rho: PowerProfile, t: float,
                    tol: float = DEFAULT_TOL) -> QuadResult:
    """(4 pi t)^{-1/2} int int e^{-(x+xt)^2/4t} phi(x) rho(xt) over [0,1]^2."""
    sigma = math.sqrt(4.0 * t)
    reach = WINDOW * sigma
    x_end = min(1.0, reach)
    pieces = _split([reach - 1.0] + phi.breakpoints(), 0.0, x_end)
    tau_out, tau_in = _profile_tau(phi), _profile_tau(rho)
    log_pref = -0.5 * math.log(4.0 * math.pi * t)
    rho_breaks = rho.breakpoints()

    def level_sum(level: int) -> Tuple[float, float, int]:
        total = 0.0
        abs_total = 0.0
        count = 0
        for u, v in pieces:
            outer = axis_nodes(u, v, level, tau_out)
            phi_w = _values(phi, outer, log_pref)
            x = outer.x[:, None]
            hi_i = np.clip(reach - x, 0.0, 1.0)
            lo_i = np.zeros_like(hi_i)
            inner_sum = np.zeros_like(outer.x)
            inner_abs = np.zeros_like(outer.x)
            cuts = [lo_i] + [np.minimum(np.full_like(hi_i, c), hi_i) for c in rho_breaks] + [hi_i]
            for c0, c1 in zip(cuts[:-1], cuts[1:]):
                inner = axis_nodes(c0, c1, level, tau_in)
                total_arg = x + inner.x
                vals = _values(rho, inner, -total_arg * total_arg / (4.0 * t))
                vals = np.where(c1 > c0, vals, 0.0)
                inner_sum += vals.sum(axis=1)
                inner_abs += np.abs(vals).sum(axis=1)
                count += vals.size
            total += float(np.sum(phi_w * inner_sum))
            abs_total += float(np.sum(np.abs(phi_w) * inner_abs))
        return total, abs_total, count

    return _refine(level_sum, tol, f"corner t={t:g}", MAX_LEVEL_2D)


def image_min_distance(shift: float, reflect: int) -> Tuple[float, float, float]:
    """Closest vertex (x*, xt*) of [0,1]^2 to the line x = reflect*xt + shift and |arg| there."""
    best = None
    for xs in (0.0, 1.0):
        for ys in (0.0, 1.0):
            arg = xs - reflect * ys - shift
            if best is None or abs(arg) < abs(best[2]):
                best = (xs, ys, arg)
    return best


def image_integral(phi: PowerProfile, rho: PowerProfile, t: float, shift: float, reflect: int,
                   tol: float = DEFAULT_TOL, rel_tol: float = 1e-10) -> Tuple[QuadResult, float]:
    """(4 pi t)^{-1/2} int int e^{-(x - reflect*xt - shift)^2/4t} phi(x) rho(xt) for a far image.

    Returns (scaled result, log factor); the integral is scaled.value * exp(log factor),
    with the factor exp(-d^2/4t) (4 pi t)^{-1/2} taken out, d the distance of the image
    from the square.
    """
    xs, ys, arg_star = image_min_distance(shift, reflect)
    lo_arg = min(-1.0 - shift, -shift) if reflect == 1 else -shift
    hi_arg = 1.0 - shift if reflect == 1 else 2.0 - shift
    if lo_arg <= 0.0 <= hi_arg:
        raise DomainError(f"image (shift={shift}, reflect={reflect}) meets the square; use the ridge or corner rule")
    d = abs(arg_star)
    sign = 1.0 if arg_star > 0 else -1.0
    log_factor = -d * d / (4.0 * t) - 0.5 * math.log(4.0 * math.pi * t)
    tau_x, tau_y = _profile_tau(phi), _profile_tau(rho)
    x_pieces = _split(phi.breakpoints())
    y_pieces = _split(rho.breakpoints())

    def offset(nodes: AxisNodes, star: float) -> np.ndarray:
        return nodes.d0 if star == 0.0 else -nodes.d1

    def level_sum(level: int) -> Tuple[float, float, int]:
        total = 0.0
        abs_total = 0.0
        count = 0
        for u, v in x_pieces:
            xn = axis_nodes(u, v, level, tau_x)
            phi_w = _values(phi, xn)
            dx = offset(xn, xs)[:, None]
            for p, q in y_pieces:
                yn = axis_nodes(p, q, level, tau_y)
                dy = offset(yn, ys)[None, :]
                excess = sign * (dx - reflect * dy)          # |arg| - d >= 0
                exponent = -excess * (excess + 2.0 * d) / (4.0 * t)
                vals = _values(rho, AxisNodes(*[a[None, :] for a in yn]), exponent)
                inner = vals.sum(axis=1)
                total += float(np.sum(phi_w * inner))
                abs_total += float(np.sum(np.abs(phi_w) * np.abs(vals).sum(axis=1)))
                count += vals.size
        return total, abs_total, count

    scaled_tol = tol * math.exp(min(-log_factor, 700.0))
    result = _refine(level_sum, scaled_tol, f"image shift={shift:g} reflect={reflect} t={t:g}",
                     MAX_LEVEL_2D, rel_tol)
    return result, log_factor


def image_value(phi: PowerProfile, rho: PowerProfile, t: float, shift: float, reflect: int,
                tol: float = DEFAULT_TOL) -> QuadResult:
    result, log_factor = image_integral(phi, rho, t, shift, reflect, tol)
    return result.scaled(math.exp(log_factor))


# --- Public heat-content integrals ---

def _profiles(p: ParamPair, cutoffs: Optional[Tuple[CutoffSpec, CutoffSpec]]) -> Tuple[PowerProfile, PowerProfile]:
    a, b = p.real()
    if cutoffs is None:
        return PowerProfile.power(a), PowerProfile.power(b)
    return PowerProfile.power(a, cutoffs[0]), PowerProfile.power(b, cutoffs[1])


def heat_content_profiles(phi: PowerProfile, rho: PowerProfile, t: float,
                          tol: float = DEFAULT_TOL) -> QuadResult:
    """Free heat content of arbitrary power-cutoff data on [0, 1]."""
    _check_t(t)
    return ridge_integral(phi, rho, t, tol)


def heat_content_interval(p: ParamPair, t: float,
                          cutoffs: Optional[Tuple[CutoffSpec, CutoffSpec]] = None,
                          tol: float = DEFAULT_TOL) -> QuadResult:
    """h_{a,b}(t) for data x^{-a}, x^{-b} (optionally times cutoffs)."""
    phi, rho = _profiles(p, cutoffs)
    result = heat_content_profiles(phi, rho, t, tol)
    logger.debug(f"h(a={p.a.real:g}, b={p.b.real:g}; t={t:g}) = {result.value:.17g} ± {result.error_estimate:.2g}")
    return result


def quadrant_profiles(phi: PowerProfile, rho: PowerProfile, t: float,
                      tol: float = DEFAULT_TOL) -> QuadResult:
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    return corner_integral(phi, rho, t, tol)


def quadrant_correction(p: ParamPair, t: float, tol: float = DEFAULT_TOL) -> QuadResult:
    """Reflection term (4 pi t)^{-1/2} int int e^{-(x+xt)^2/4t} x^{-a} xt^{-b} over [0,1]^2."""
    phi, rho = _profiles(p, None)
    return quadrant_profiles(phi, rho, t, tol)


# --- Regularized half-line constant ---

def _moment_coefficients(k: int, p: ParamPair, sigma: List[complex], terms: int = 60) -> np.ndarray:
    """2 M_m / (2m)! for m = k+1 .. k+terms."""
    a, b = p.real()
    s = a + b
    half_d = (a - b) / 2.0
    sig = [sg.real for sg in sigma]
    out = []
    for m in range(k + 1, k + 1 + terms):
        moment = half_d ** (2 * m) - sum(sg * (ell + s / 2.0) ** (2 * m) for ell, sg in enumerate(sig))
        out.append(2.0 * moment / math.factorial(2 * m))
    return np.array(out)


def c_k_integral(k: int, p: ParamPair, tol: float = DEFAULT_TOL) -> QuadResult:
    """C_k(a,b) = pi^{-1/2} 2^{-s} Gamma((2-s)/2) int_0^1 G_k(eta) (1-eta)^{s-2} d eta.

    For k >= 0 this is the regularized part only; it differs from c(a, b) by the
    boundary coefficients of the subtracted pairs (see singular_coefficient).
    """
    if not -1 <= k <= 3:
        raise DomainError(f"k must lie in [-1, 3], got {k}")
    a, b = p.real()
    s = a + b
    if not in_subregion(k, p):
        raise RegionError(f"(a, b) = ({a}, {b}) is outside O_{k}")
    sigma = [sg.real for sg in sigma_values(k, p)] if k >= 0 else []
    coeffs = _moment_coefficients(k, p, sigma_values(k, p)) if k >= 0 else None
    near_power = s - 2.0 if k < 0 else 2 * k + s
    far_power = -max([a, b] + ([s + k] if k >= 0 else []))
    tau = max(tau_for_power(far_power), tau_for_power(near_power))

    def integrand(nodes: AxisNodes) -> np.ndarray:
        log_eta = nodes.log_d0
        base = nodes.log_w + (s - 2.0) * nodes.log_d1
        direct = np.exp(base - a * log_eta) + np.exp(base - b * log_eta)
        for ell, sg in enumerate(sigma):
            direct -= sg * (np.exp(base - (s + ell) * log_eta) + np.exp(base + ell * log_eta))
        if coeffs is None:
            return direct
        with np.errstate(divide="ignore"):
            neg_u = np.where(nodes.d1 < 1e-8, nodes.d1 * (1.0 + nodes.d1 / 2.0), -np.log1p(-nodes.d1))
            log_neg_u = np.where(nodes.d1 < 1e-8, nodes.log_d1 + np.log1p(nodes.d1 / 2.0), np.log(neg_u))
        u2 = neg_u * neg_u
        series = np.zeros_like(u2)
        for c in coeffs[::-1]:
            series = series * u2 + c
        # eta^{-s/2} = exp(s * neg_u / 2)
        near = series * np.exp(base + (2 * k + 2) * log_neg_u + s * neg_u / 2.0)
        return np.where(neg_u <= 1.0, near, direct)

    raw = integrate_1d(integrand, 0.0, 1.0, tol, tau_max=tau, label=f"C_{k}")
    return raw.scaled(_half_line_prefactor(s))


def _half_line_prefactor(s: float) -> float:
    return gamma((2.0 - s) / 2.0).real * 2.0 ** (-s) / math.sqrt(math.pi)


def subtraction_coefficient(ell: int, s: float) -> float:
    """Boundary coefficient of the pair (s+ell, -ell): prefactor * B(ell+1, s-1).

    The Beta ratio ell! Gamma(s-1) / Gamma(s+ell) is expanded as a finite product, so
    it is finite wherever the subregions allow a+b = s.
    """
    denom = math.prod(s + j for j in range(-1, ell))
    if denom == 0.0:
        raise RegionError(f"a+b = {s} is an excluded plane for the subtraction term ell={ell}")
    return _half_line_prefactor(s) * math.factorial(ell) / denom


def singular_coefficient(k: int, p: ParamPair, tol: float = DEFAULT_TOL) -> QuadResult:
    """Coefficient of t^{(1-a-b)/2} assembled on O_k: C_k plus the subtracted pairs.

    Equals c(a, b) on every subregion, so values from neighbouring k agree on overlaps.
    """
    regularized = c_k_integral(k, p, tol)
    if k < 0:
        return regularized
    s = sum(p.real())
    added = sum(sg.real * subtraction_coefficient(ell, s) for ell, sg in enumerate(sigma_values(k, p)))
    return regularized.model_copy(update={"value": regularized.value + added})
