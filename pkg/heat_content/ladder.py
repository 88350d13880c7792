"""
Regularization ladder: exact construction of the A..H chain and X_0..X_7 as
truncated series in w = eta - 1, certification of every division, and the
subtraction coefficients sigma_{k,l}(a,b) with G_k, F_k evaluation.

The chain levels depend on (a, b) only through s = a+b and are built as
polynomials in s; they are lifted to (a, b) where the X chain needs them.
"""

import cmath
import math
import threading
from fractions import Fraction
from typing import Dict, List, Tuple, Union

from prefect.logging import get_logger
from pydantic import BaseModel, ConfigDict

from heat_content.errors import CertificationError, DivisionNotExactError, DomainError, RegionError
from heat_content.models import ParamPair
from heat_content.polynomials import FormalSeries, RationalFunction, RationalPoly

logger = get_logger(__name__)

DEFAULT_ORDER = 18
MAX_K = 3
CHAIN_NAMES = ("A", "B", "C", "D", "E", "F", "G", "H")
LEVEL_MULTIPLIERS = {m: 4 * m - 2 for m in range(1, 8)}       # 2, 6, 10, ..., 26
X_MULTIPLIERS = {n: (2 * n + 1) * (2 * n + 2) for n in range(1, 8)}  # 12, 30, ..., 240

_LADDER_CACHE: Dict[int, "LadderTable"] = {}
_SIGMA_CACHE: Dict[int, "SigmaTable"] = {}
_CACHE_LOCK = threading.Lock()


class LadderTable(BaseModel):
    """Every chain function as a FormalSeries plus the list of certified steps."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    order: int
    levels: Dict[str, List[FormalSeries]]   # "A".."H" -> [L(0), L(1), ...], polynomials in s
    x_chain: List[FormalSeries]             # X_0..X_7, polynomials in (a, b)
    certified_steps: List[str]

    def level(self, name: str, i: int = 0) -> FormalSeries:
        return self.levels[name][i]


class SigmaTable(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    k: int
    entries: List[RationalFunction]

    def values(self, p: ParamPair) -> List[complex]:
        return [e.evaluate((p.a, p.b)) for e in self.entries]

    def denominator_factors(self) -> List[int]:
        """m such that (m + a + b) divides some denominator."""
        return sorted({m for e in self.entries for m in e.denominator_factors()})

    def to_records(self) -> List[Dict]:
        return [{"k": self.k, "l": ell, **e.to_record()} for ell, e in enumerate(self.entries)]

    @classmethod
    def from_records(cls, records: List[Dict]) -> "SigmaTable":
        ordered = sorted(records, key=lambda r: int(r["l"]))
        ks = {int(r["k"]) for r in ordered}
        if len(ks) != 1:
            raise ValueError(f"sigma records mix several k values: {sorted(ks)}")
        return cls(k=ks.pop(), entries=[RationalFunction.from_record(r) for r in ordered])


# --- Chain construction ---

def _s_series(exponent_const: int, s_coeff: int, order: int) -> FormalSeries:
    """(1+w)^(exponent_const + s_coeff*s) as a series over polynomials in s."""
    exponent = RationalPoly({(0,): exponent_const, (1,): s_coeff}, nvars=1)
    return FormalSeries.binomial(exponent, order)


def _ab_power(a_coeff: int, b_coeff: int, order: int) -> FormalSeries:
    exponent = RationalPoly({(1, 0): a_coeff, (0, 1): b_coeff}, nvars=2)
    return FormalSeries.binomial(exponent, order)


def build_ladder(T: int = DEFAULT_ORDER) -> LadderTable:
    """Construct and certify the ladder through H and X_7; cached per order."""
    if T < DEFAULT_ORDER:
        raise DomainError(f"ladder order T >= {DEFAULT_ORDER} required, got {T}")
    with _CACHE_LOCK:
        if T in _LADDER_CACHE:
            return _LADDER_CACHE[T]
        table = _build_ladder(T)
        _LADDER_CACHE[T] = table
        return table


def _build_ladder(T: int) -> LadderTable:
    certified: List[str] = []
    depth = len(CHAIN_NAMES) - 1

    # A_i = eta^{-s-i} + eta^i, i = 0..7
    levels: Dict[str, List[FormalSeries]] = {
        "A": [_s_series(-i, -1, T) + _s_series(i, 0, T) for i in range(depth + 1)]
    }
    for m in range(1, depth + 1):
        prev = levels[CHAIN_NAMES[m - 1]]
        name = CHAIN_NAMES[m]
        current = []
        for i in range(len(prev) - 1):
            step = f"{name}_{i}"
            shifted = (prev[i] - prev[i + 1]).shift_down(2, step)
            current.append(shifted.divide_by_factor(2 * i + m, -LEVEL_MULTIPLIERS[m]))
            certified.append(step)
        levels[name] = current
        logger.debug(f"Ladder level {name}: {len(current)} functions to order {T - 2 * m}")

    a = RationalPoly.variable(0)
    b = RationalPoly.variable(1)

    # X_0 = (A_0 - eta^{-a} - eta^{-b}) / (ab w^2)
    numerator = levels["A"][0].lift() - _ab_power(-1, 0, T) - _ab_power(0, -1, T)
    x_chain = [numerator.shift_down(2, "X_0").exact_divide_coefficients(a * b, "X_0")]
    certified.append("X_0")

    # X_n = c_n (X_{n-1} - Y_{n-1}/2) / (-(n+a)(n+b) w^2), Y = B_0, C_0, ...
    for n in range(1, depth + 1):
        step = f"X_{n}"
        half_y = levels[CHAIN_NAMES[n]][0].lift().scale(Fraction(1, 2))
        shifted = (x_chain[n - 1] - half_y).shift_down(2, step).scale(X_MULTIPLIERS[n])
        divisor = -((a + n) * (b + n))
        x_chain.append(shifted.exact_divide_coefficients(divisor, step))
        certified.append(step)

    logger.debug(f"Ladder built to order {T}: {len(certified)} exact divisions certified")
    return LadderTable(order=T, levels=levels, x_chain=x_chain, certified_steps=certified)


# --- Sigma extraction ---

def _lagrange_sigma(k: int) -> List[RationalFunction]:
    """sigma_{k,l} = prod_{j != l} [-(a+j)(b+j)] / [(l-j)(l+j+s)]."""
    a = RationalPoly.variable(0)
    b = RationalPoly.variable(1)
    entries = []
    for ell in range(k + 1):
        num = RationalPoly.constant(1)
        den: Dict[int, int] = {}
        scale = Fraction(1)
        for j in range(k + 1):
            if j == ell:
                continue
            num = num * (-((a + j) * (b + j)))
            scale /= ell - j
            den[ell + j] = den.get(ell + j, 0) + 1
        entries.append(RationalFunction(num * scale, den))
    return entries


def _chain_sigma(k: int) -> Tuple[List[RationalFunction], RationalFunction]:
    """sigma from the chain identities, and the remainder factor -ab prod mu_n."""
    a = RationalPoly.variable(0)
    b = RationalPoly.variable(1)

    # V_m(i): coordinates of w^{2m} L_m(i) in the basis A_0..A_{k}, over polynomials in s
    zero = RationalFunction.constant(0, 1)
    v_prev = [[RationalFunction.constant(1 if ell == i else 0, 1) for ell in range(k + 1)]
              for i in range(k + 1)]
    v_levels = [v_prev]
    for m in range(1, k + 1):
        current = []
        for i in range(k + 1 - m):
            row = []
            for ell in range(k + 1):
                diff = v_prev[i][ell] - v_prev[i + 1][ell]
                row.append(zero if diff.is_zero() else diff.divide_by_factor(2 * i + m, -LEVEL_MULTIPLIERS[m]))
            current.append(row)
        v_levels.append(current)
        v_prev = current

    ab = a * b
    sigma = [RationalFunction.constant(1 if ell == 0 else 0) for ell in range(k + 1)]
    mu_product = RationalFunction.constant(1)
    for m in range(1, k + 1):
        weight = mu_product * (-ab) * Fraction(1, 2)
        for ell in range(k + 1):
            sigma[ell] = sigma[ell] + weight * v_levels[m][0][ell].lift()
        mu = RationalFunction(-((a + m) * (b + m)) * Fraction(1, X_MULTIPLIERS[m]))
        mu_product = mu_product * mu
    remainder_factor = mu_product * (-ab)
    return sigma, remainder_factor


def _g_series(sigma: List[RationalFunction], order: int) -> FormalSeries:
    """eta^{-a} + eta^{-b} - sum_l sigma_l (eta^{-s-l} + eta^l)."""
    series = _ab_power(-1, 0, order) + _ab_power(0, -1, order)
    for ell, sig in enumerate(sigma):
        if sig.is_zero():
            continue
        basis = _ab_shifted_power(-ell, order) + FormalSeries.constant_power(ell, order)
        series = series - basis.scale(sig)
    return series


def _ab_shifted_power(const: int, order: int) -> FormalSeries:
    exponent = RationalPoly({(0, 0): const, (1, 0): -1, (0, 1): -1}, nvars=2)
    return FormalSeries.binomial(exponent, order)


def extract_sigma(k: int, T: int = DEFAULT_ORDER) -> SigmaTable:
    """sigma_{k,l} with G_k = O(w^{2k+2}) certified exactly and cross-checked against the chain."""
    if not 0 <= k <= MAX_K:
        raise DomainError(f"k must lie in [0, {MAX_K}], got {k}")
    with _CACHE_LOCK:
        if k in _SIGMA_CACHE:
            return _SIGMA_CACHE[k]

    ladder = build_ladder(T)
    sigma = _lagrange_sigma(k)

    g_low = _g_series(sigma, 2 * k + 1)
    valuation = g_low.valuation()
    if valuation is not None:
        raise DivisionNotExactError(f"G_{k} order", g_low.coefficients[valuation])

    chain_sigma, remainder_factor = _chain_sigma(k)
    for ell, (lhs, rhs) in enumerate(zip(sigma, chain_sigma)):
        if not lhs == rhs:
            raise CertificationError(f"sigma_{{{k},{ell}}} disagrees between the moment solve and the chain")

    # G_k = -ab (prod mu) w^{2k+2} X_k through the ladder order
    residual = _g_series(chain_sigma, ladder.order) - ladder.x_chain[k].scale(remainder_factor).shift_up(2 * k + 2)
    valuation = residual.valuation()
    if valuation is not None:
        raise DivisionNotExactError(f"G_{k} remainder vs X_{k}", residual.coefficients[valuation])

    table = SigmaTable(k=k, entries=[e.reduced() for e in sigma])
    allowed = set(range(1, 2 * k))
    if not set(table.denominator_factors()) <= allowed:
        raise CertificationError(
            f"sigma_{k} denominators {table.denominator_factors()} leave the excluded planes {sorted(allowed)}")
    logger.debug(f"sigma table k={k} certified; denominator factors {table.denominator_factors()}")
    with _CACHE_LOCK:
        _SIGMA_CACHE[k] = table
    return table


# --- Numerical evaluation ---

def in_subregion(k: int, p: ParamPair, tol: float = 1e-12) -> bool:
    """(a, b) in O_k: -(2k+1) < Re(a+b) < 1-k and a+b != -1..-(2k-1)."""
    s = p.s
    if not -(2 * k + 1) < s.real < 1 - k:
        return False
    return all(abs(s + m) >= tol for m in range(1, 2 * k))


def sigma_values(k: int, p: ParamPair) -> List[complex]:
    """Floating-point sigma_{k,l}(a,b) from the closed form."""
    s = p.s
    out = []
    for ell in range(k + 1):
        value = complex(1.0, 0.0)
        for j in range(k + 1):
            if j != ell:
                value *= -(p.a + j) * (p.b + j) / ((ell - j) * (ell + j + s))
        out.append(value)
    return out


def _moment_series(k: int, p: ParamPair, u: float, sigma: List[complex]) -> complex:
    """eta^{s/2} G_k = sum_{m > k} 2 u^{2m}/(2m)! [(d/2)^{2m} - sum_l sigma_l (l + s/2)^{2m}]."""
    half_d = (p.a - p.b) / 2.0
    centers = [ell + p.s / 2.0 for ell in range(k + 1)]
    total = complex(0.0, 0.0)
    for m in range(k + 1, 200):
        moment = half_d ** (2 * m) - sum(sg * c ** (2 * m) for sg, c in zip(sigma, centers))
        log_scale = 2 * m * math.log(abs(u)) - math.lgamma(2 * m + 1) if u != 0.0 else -math.inf
        term = 2.0 * moment * math.exp(log_scale) if log_scale > -745.0 else 0.0
        total += term
        if m > k + 3 and abs(term) <= 1e-17 * max(abs(total), 1e-300):
            break
    return total


def _as_output(value: complex, p: ParamPair) -> Union[float, complex]:
    return value.real if p.is_real else value


def eval_G(k: int, eta: float, p: ParamPair) -> Union[float, complex]:
    """G_k(eta; a, b) for eta in (0, 1]."""
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"eta must lie in (0, 1], got {eta}")
    if k == -1:
        return _as_output(cmath.exp(-p.a * math.log(eta)) + cmath.exp(-p.b * math.log(eta)), p)
    if not 0 <= k <= MAX_K:
        raise DomainError(f"k must lie in [-1, {MAX_K}], got {k}")
    if not in_subregion(k, p):
        raise RegionError(f"(a, b) = ({p.a}, {p.b}) is outside O_{k}")
    sigma = sigma_values(k, p)
    u = math.log(eta)
    if abs(u) <= 1.0:
        value = cmath.exp(-p.s * u / 2.0) * _moment_series(k, p, u, sigma)
    else:
        value = cmath.exp(-p.a * u) + cmath.exp(-p.b * u)
        for ell, sg in enumerate(sigma):
            value -= sg * (cmath.exp((-p.s - ell) * u) + eta**ell)
    return _as_output(value, p)


def eval_F(k: int, x: float, xt: float, p: ParamPair) -> Union[float, complex]:
    """F_k(x, xt; a, b) = max(x, xt)^{-a-b} G_k(min/max)."""
    if not (x > 0.0 and xt > 0.0):
        raise DomainError(f"x, xt must be positive, got {x}, {xt}")
    hi, lo = max(x, xt), min(x, xt)
    value = cmath.exp(-p.s * math.log(hi)) * complex(eval_G(k, lo / hi, p))
    return _as_output(value, p)
