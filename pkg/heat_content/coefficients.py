"""
Closed-form coefficients of the heat-content expansions.

c(a,b) and the correction coefficient are evaluated through the stable form

    c(a,b) = -bc(a,b) cos(pi(a-b)/2) / cos(pi(a+b)/2),
    bc(a,b) = Gamma(1-a) Gamma(1-b) / (2 Gamma((3-a-b)/2)),

which is finite on the planes a+b = 0, -2, -4, ... where the displayed
product of Gammas has cancelling poles. Poles on the log planes
a+b = 1, -1, -3, ... are reported as LogPlaneError.
"""

import cmath
import math
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from prefect.logging import get_logger

from heat_content.errors import DomainError, LogPlaneError
from heat_content.ladder import MAX_K, in_subregion
from heat_content.models import CutoffSpec, ParamPair, RegionTag
from heat_content.polynomials import RationalPoly
from heat_content.quadrature import AxisNodes, integrate_1d, tau_for_power
from heat_content.special_fn import EULER_GAMMA, cos_pi, digamma, gamma, reciprocal_gamma, sinc_pi

logger = get_logger(__name__)

LOG_PLANE_TOL = 1e-12
ODD_POLE_GUARD = 1e-6


def theta(n: int, a):
    """Rising factorial a(a+1)...(a+n-1); theta(0, a) = 1. Exact for int/Fraction input."""
    if n < 0:
        raise DomainError(f"theta needs n >= 0, got {n}")
    value = 1
    for i in range(n):
        value = value * (a + i)
    return value


@lru_cache(maxsize=None)
def theta_poly(n: int, index: int) -> RationalPoly:
    """theta_n of the variable `index` (0 -> a, 1 -> b) as an exact polynomial in (a, b)."""
    poly = RationalPoly.constant(1)
    var = RationalPoly.variable(index)
    for i in range(n):
        poly = poly * (var + i)
    return poly


def log_plane_index(s: complex, tol: float = LOG_PLANE_TOL) -> Optional[int]:
    """k if s is within tol of 1-2k (k >= 0), else None."""
    k = round((1.0 - s.real) / 2.0)
    if k >= 0 and abs(s - (1 - 2 * k)) < tol:
        return int(k)
    return None


def classify_region(p: ParamPair) -> RegionTag:
    k = log_plane_index(p.s)
    if k is not None:
        if p.is_real:
            return RegionTag(kind="LogPlane", log_plane_k=k)
        return RegionTag(kind="Invalid")
    subs = [j for j in range(-1, MAX_K + 1) if in_subregion(j, p)]
    return RegionTag(kind="InO", subregions=subs)


def _check_log_plane(p: ParamPair) -> None:
    k = log_plane_index(p.s)
    if k is not None:
        raise LogPlaneError(k)


def bc_correction_coefficient(p: ParamPair) -> complex:
    """Coefficient of t^{(1-a-b)/2} in the quadrant correction."""
    return gamma(1.0 - p.a) * gamma(1.0 - p.b) * reciprocal_gamma((3.0 - p.s) / 2.0) / 2.0


def bc_correction_direct(p: ParamPair) -> complex:
    """The same coefficient through 2^{-s} pi^{-1/2} Gamma((2-s)/2) Gamma(1-a) Gamma(1-b) / Gamma(2-s)."""
    s = p.s
    return (cmath.exp(-s * math.log(2.0)) / math.sqrt(math.pi) * gamma((2.0 - s) / 2.0)
            * gamma(1.0 - p.a) * gamma(1.0 - p.b) * reciprocal_gamma(2.0 - s))


def bc_right_end_coefficient(j: int, p: ParamPair) -> complex:
    """r_j: coefficient of t^{(1+j)/2} in the reflection correction at x = 1."""
    total = sum(theta(n, p.a) * theta(j - n, p.b) for n in range(j + 1))
    return complex(total) * reciprocal_gamma((3.0 + j) / 2.0) / 2.0


def c_boundary(p: ParamPair) -> complex:
    _check_log_plane(p)
    return -bc_correction_coefficient(p) * cos_pi((p.a - p.b) / 2.0) / cos_pi(p.s / 2.0)


def c_boundary_direct(p: ParamPair) -> complex:
    """Unsimplified product of Gammas; poles at a+b = 0, -2, ... surface as PoleError."""
    a, b, s = p.a, p.b, p.s
    return (cmath.exp(-s * math.log(2.0)) / math.sqrt(math.pi) * gamma((2.0 - s) / 2.0) * gamma(s - 1.0)
            * (gamma(1.0 - a) * reciprocal_gamma(b) + gamma(1.0 - b) * reciprocal_gamma(a)))


def _c_n_prefactor(n: int) -> float:
    return 2.0 ** (n - 1) * math.gamma((1 + n) / 2.0) / (math.sqrt(math.pi) * math.factorial(n))


@lru_cache(maxsize=None)
def _odd_quotient(n: int) -> RationalPoly:
    """(theta_n(a) + theta_n(b)) / ((1-n) - a - b), certified exact."""
    numerator = theta_poly(n, 0) + theta_poly(n, 1)
    divisor = RationalPoly.constant(1 - n) - RationalPoly.variable(0) - RationalPoly.variable(1)
    return numerator.exact_divide(divisor, step=f"c_{n} pole cancellation")


def c_n(n: int, p: ParamPair) -> complex:
    if n < 0:
        raise DomainError(f"c_n needs n >= 0, got {n}")
    denom = 1.0 - p.s - n
    if n % 2 == 0:
        if abs(denom) < LOG_PLANE_TOL:
            raise LogPlaneError(n // 2)
        return _c_n_prefactor(n) * complex(theta(n, p.a) + theta(n, p.b)) / denom
    if abs(denom) < ODD_POLE_GUARD:
        return _c_n_prefactor(n) * _odd_quotient(n).evaluate((p.a, p.b))
    return _c_n_prefactor(n) * complex(theta(n, p.a) + theta(n, p.b)) / denom


def x_fn(p: ParamPair) -> complex:
    """(1 - a - b) c(a, b), continued across a+b = 1 where it equals -1."""
    s = p.s
    k = log_plane_index(s)
    if k is not None and k >= 1:
        raise LogPlaneError(k)
    return (-bc_correction_coefficient(p) * cos_pi((p.a - p.b) / 2.0) * 2.0
            / (math.pi * sinc_pi((1.0 - s) / 2.0)))


def y_fn(a: float) -> float:
    """d/d delta of x_fn(a + delta, 1 - a) at delta = 0."""
    if not 0.0 < a < 1.0:
        raise DomainError(f"y_fn needs 0 < a < 1, got {a}")
    value = digamma(1.0 - a) - 0.5 * digamma(1.0) - 0.5 * math.pi / math.tan(math.pi * a)
    return value.real


def log_coefficient(a: float, k: int) -> float:
    """Coefficient of t^k log t on the plane a+b = 1-2k."""
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    return -float(theta(2 * k, a)) / (2.0 * math.factorial(k))


# --- Constant term on the plane a+b = 1 ---

def _expm1_weighted(exponent: np.ndarray, log_w: np.ndarray) -> np.ndarray:
    """(e^exponent - 1) e^log_w without overflow for large exponents."""
    big = exponent > 1.0
    safe = np.where(big, 0.0, exponent)
    small_part = np.expm1(safe) * np.exp(log_w)
    big_part = np.exp(np.where(big, exponent, 0.0) + log_w) - np.exp(log_w)
    return np.where(big, big_part, small_part)


def _q_integral(a: float, tol: float) -> float:
    def integrand(nodes: AxisNodes) -> np.ndarray:
        q = nodes.x
        log_plus = np.log1p(q)
        log_minus = nodes.log_d1
        e1 = _expm1_weighted((a - 1.0) * log_plus - a * log_minus, nodes.log_w)
        e2 = _expm1_weighted((a - 1.0) * log_minus - a * log_plus, nodes.log_w)
        e3 = _expm1_weighted(-0.5 * np.log1p(q * q), nodes.log_w)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (e1 + e2 - 2.0 * e3) / q
        return np.where(q > 0.0, out, 0.0)

    tau = tau_for_power(min(a - 1.0, -a))
    return integrate_1d(integrand, 0.0, 1.0, tol, tau_max=tau, label="beta0 q-integral").value


def _cutoff_log_integral(epsilon: float, xi1: CutoffSpec, xi2: CutoffSpec, tol: float) -> float:
    def integrand(nodes: AxisNodes) -> np.ndarray:
        x = nodes.x
        return xi1.values(x) * xi2.values(x) * np.exp(nodes.log_w - np.log(x))

    breaks = xi1.breakpoints() + xi2.breakpoints()
    return integrate_1d(integrand, epsilon, 0.5, tol, breakpoints=breaks, tau_max=3.5,
                        label="beta0 cutoff integral").value


def beta0_theorem12(a: float, epsilon: float, xi1: CutoffSpec, xi2: CutoffSpec,
                    b: Optional[float] = None, tol: float = 1e-12) -> float:
    """Constant term of the heat content of x^{-a} Xi1, x^{-(1-a)} Xi2 as t -> 0.

    Both cutoffs must equal 1 near 0 and vanish on [1/2, 1].
    """
    b = 1.0 - a if b is None else b
    if abs(a + b - 1.0) > LOG_PLANE_TOL:
        raise DomainError(f"beta0 needs a+b = 1, got a+b = {a + b}")
    if not 0.0 < a < 1.0:
        raise DomainError(f"beta0 needs 0 < a < 1, got {a}")
    for xi in (xi1, xi2):
        if xi.kind != "smooth_step" or xi.support_end > 0.5:
            raise DomainError("beta0 cutoffs must be smooth steps vanishing on [1/2, 1]")
    plateau = min(xi1.plateau_end, xi2.plateau_end)
    if not 0.0 < epsilon < plateau:
        raise DomainError(f"0 < epsilon < {plateau} required, got {epsilon}")
    closed = (math.log(epsilon) + 0.5 * EULER_GAMMA + math.log(math.sqrt(2.0) - 1.0)
              + 2.0 * math.log(2.0))
    value = closed + _cutoff_log_integral(epsilon, xi1, xi2, tol) + 0.5 * _q_integral(a, tol)
    logger.debug(f"beta0(a={a}, epsilon={epsilon}) = {value:.17g}")
    return value


def beta0_from_y(a: float, epsilon: float, xi1: CutoffSpec, xi2: CutoffSpec, tol: float = 1e-12) -> float:
    """-Y(a) + log(epsilon) + int_epsilon^{1/2} Xi1 Xi2 dx / x."""
    return -y_fn(a) + math.log(epsilon) + _cutoff_log_integral(epsilon, xi1, xi2, tol)


def as_real(value: Union[complex, float]) -> float:
    value = complex(value)
    if abs(value.imag) > 1e-12 * max(1.0, abs(value.real)):
        raise DomainError(f"expected a real value, got {value}")
    return value.real
