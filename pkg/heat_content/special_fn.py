"""
Complex Gamma, log-Gamma, digamma and principal-branch powers.

Gamma uses a fixed Lanczos approximation (g = 7, nine terms) for Re(z) >= 1/2
and the reflection formula below that. Poles are never smoothed: arguments within
1e-14 of a non-positive integer raise PoleError.
"""

import cmath
import math
from typing import Union

from heat_content.errors import DomainError, PoleError

Number = Union[int, float, complex]

EULER_GAMMA = 0.57721566490153286061
POLE_TOL = 1e-14

_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Asymptotic digamma tail: B_2k / (2k) for k = 1..7
_DIGAMMA_TAIL = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def _check_pole(z: complex) -> None:
    n = round(z.real)
    if n <= 0 and abs(z - n) < POLE_TOL:
        raise PoleError(z)


def sin_pi(z: Number) -> complex:
    """sin(pi z) with the real part reduced first, exact zeros at the integers."""
    z = complex(z)
    n = round(z.real)
    r = z.real - n
    sign = -1.0 if n % 2 else 1.0
    if z.imag == 0.0:
        return complex(sign * math.sin(math.pi * r), 0.0)
    return sign * cmath.sin(math.pi * complex(r, z.imag))


def cos_pi(z: Number) -> complex:
    """cos(pi z) with the real part reduced first, exact zeros at the half-integers."""
    z = complex(z)
    n = round(z.real)
    r = z.real - n
    sign = -1.0 if n % 2 else 1.0
    if z.imag == 0.0:
        if abs(r) == 0.5:
            return complex(0.0, 0.0)
        return complex(sign * math.cos(math.pi * r), 0.0)
    return sign * cmath.cos(math.pi * complex(r, z.imag))


def sinc_pi(z: Number) -> complex:
    """sin(pi z)/(pi z), continuous at z = 0."""
    z = complex(z)
    if abs(z) < 1e-4:
        u = (math.pi * z) ** 2
        return 1.0 - u / 6.0 + u * u / 120.0
    return sin_pi(z) / (math.pi * z)


def _lanczos_log_gamma(z: complex) -> complex:
    z = z - 1.0
    x = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        x += _LANCZOS_COEFFS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def log_gamma(z: Number) -> complex:
    """Principal log-Gamma; continuous along rays in Re(z) > 0."""
    z = complex(z)
    _check_pole(z)
    if z.real < 0.5:
        return cmath.log(math.pi) - cmath.log(sin_pi(z)) - log_gamma(1.0 - z)
    return _lanczos_log_gamma(z)


def gamma(z: Number) -> complex:
    z = complex(z)
    _check_pole(z)
    if z.real < 0.5:
        return math.pi / (sin_pi(z) * gamma(1.0 - z))
    return cmath.exp(_lanczos_log_gamma(z))


def reciprocal_gamma(z: Number) -> complex:
    """1/Gamma(z), entire: exactly 0 at the non-positive integers."""
    z = complex(z)
    try:
        return 1.0 / gamma(z)
    except PoleError:
        return complex(0.0, 0.0)


def digamma(z: Number) -> complex:
    z = complex(z)
    _check_pole(z)
    if z.real < 0.5:
        return digamma(1.0 - z) - math.pi * cos_pi(z) / sin_pi(z)
    shift = complex(0.0, 0.0)
    while z.real < 10.0:
        shift -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    tail = complex(0.0, 0.0)
    power = inv2
    for coeff in _DIGAMMA_TAIL:
        tail += coeff * power
        power *= inv2
    return shift + cmath.log(z) - 0.5 / z - tail


def complex_power(x: float, s: Number) -> complex:
    """x**s = exp(s log x) with the real logarithm; real s gives a real result."""
    if not x > 0:
        raise DomainError(f"complex_power needs x > 0, got {x}")
    s = complex(s)
    if s.imag == 0.0:
        return complex(math.exp(s.real * math.log(x)), 0.0)
    return cmath.exp(s * math.log(x))
