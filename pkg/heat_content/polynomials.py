"""
Exact arithmetic for the regularization ladder.

RationalPoly       sparse polynomial over Fraction, keys are exponent tuples
                   ((k,) for polynomials in s = a+b, (i, j) for a^i b^j)
RationalFunction   RationalPoly over a factored denominator prod (m + s)^mult
FormalSeries       truncated power series in w = eta - 1 with RationalFunction coefficients
"""

from fractions import Fraction
from math import comb
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from heat_content.errors import DivisionNotExactError

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]


class RationalPoly:
    """Sparse polynomial with exact rational coefficients, lex order (first variable highest)."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None, nvars: int = 2):
        self.nvars = nvars
        self.terms: Dict[Monomial, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                if len(mono) != nvars:
                    raise ValueError(f"monomial {mono} does not have {nvars} exponents")
                c = Fraction(c)
                if c != 0:
                    self.terms[tuple(mono)] = c

    # --- constructors ---

    @classmethod
    def zero(cls, nvars: int = 2) -> "RationalPoly":
        return cls(nvars=nvars)

    @classmethod
    def constant(cls, c: Scalar, nvars: int = 2) -> "RationalPoly":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def variable(cls, index: int, nvars: int = 2) -> "RationalPoly":
        mono = [0] * nvars
        mono[index] = 1
        return cls({tuple(mono): 1}, nvars)

    @classmethod
    def s_plus(cls, m: Scalar, nvars: int = 2) -> "RationalPoly":
        """The linear form m + s, with s = a+b (bivariate) or the single variable (univariate)."""
        if nvars == 1:
            return cls({(0,): m, (1,): 1}, 1)
        return cls({(0, 0): m, (1, 0): 1, (0, 1): 1}, 2)

    # --- ring operations ---

    def is_zero(self) -> bool:
        return not self.terms

    def _coerce(self, other: Union["RationalPoly", Scalar]) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            if other.nvars != self.nvars:
                raise ValueError("cannot combine polynomials in different variables")
            return other
        return RationalPoly.constant(other, self.nvars)

    def __add__(self, other: Union["RationalPoly", Scalar]) -> "RationalPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, 0) + c
        return RationalPoly(out, self.nvars)

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        return RationalPoly({m: -c for m, c in self.terms.items()}, self.nvars)

    def __sub__(self, other: Union["RationalPoly", Scalar]) -> "RationalPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Scalar) -> "RationalPoly":
        return (-self) + other

    def __mul__(self, other: Union["RationalPoly", Scalar]) -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            f = Fraction(other)
            if f == 0:
                return RationalPoly.zero(self.nvars)
            return RationalPoly({m: c * f for m, c in self.terms.items()}, self.nvars)
        other = self._coerce(other)
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(x + y for x, y in zip(m1, m2))
                out[mono] = out.get(mono, 0) + c1 * c2
        return RationalPoly(out, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RationalPoly":
        result = RationalPoly.constant(1, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RationalPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == RationalPoly.constant(other, self.nvars)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = "s" if self.nvars == 1 else "ab"
        parts = []
        for mono in sorted(self.terms, reverse=True):
            factors = [f"{names[k]}^{e}" if e > 1 else names[k] for k, e in enumerate(mono) if e]
            parts.append("*".join([str(self.terms[mono])] + factors))
        return " + ".join(parts)

    # --- structure ---

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def leading_monomial(self) -> Monomial:
        return max(self.terms)

    def divide(self, divisor: "RationalPoly") -> Tuple["RationalPoly", "RationalPoly"]:
        """Lex-order division; returns (quotient, remainder)."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lead = divisor.leading_monomial()
        lead_c = divisor.terms[lead]
        rest = dict(self.terms)
        quotient: Dict[Monomial, Fraction] = {}
        remainder: Dict[Monomial, Fraction] = {}
        while rest:
            mono = max(rest)
            c = rest[mono]
            if all(x >= y for x, y in zip(mono, lead)):
                q_mono = tuple(x - y for x, y in zip(mono, lead))
                q_c = c / lead_c
                quotient[q_mono] = quotient.get(q_mono, 0) + q_c
                for d_mono, d_c in divisor.terms.items():
                    tgt = tuple(x + y for x, y in zip(q_mono, d_mono))
                    val = rest.get(tgt, 0) - q_c * d_c
                    if val == 0:
                        rest.pop(tgt, None)
                    else:
                        rest[tgt] = val
            else:
                remainder[mono] = c
                del rest[mono]
        return RationalPoly(quotient, self.nvars), RationalPoly(remainder, self.nvars)

    def exact_divide(self, divisor: "RationalPoly", step: str) -> "RationalPoly":
        quotient, remainder = self.divide(divisor)
        if not remainder.is_zero():
            raise DivisionNotExactError(step, remainder)
        return quotient

    def evaluate(self, point: Sequence[complex]) -> complex:
        total = complex(0.0, 0.0)
        for mono, c in self.terms.items():
            value = complex(float(c))
            for x, e in zip(point, mono):
                if e:
                    value *= x**e
            total += value
        return total

    def lift(self) -> "RationalPoly":
        """Substitute s = a+b into a polynomial in s."""
        if self.nvars != 1:
            raise ValueError("lift expects a polynomial in s")
        out: Dict[Monomial, Fraction] = {}
        for (k,), c in self.terms.items():
            for i in range(k + 1):
                mono = (i, k - i)
                out[mono] = out.get(mono, 0) + c * comb(k, i)
        return RationalPoly(out, 2)

    def to_records(self) -> List[List]:
        return [list(mono) + [str(self.terms[mono])] for mono in sorted(self.terms)]

    @classmethod
    def from_records(cls, records: Iterable[Sequence], nvars: int = 2) -> "RationalPoly":
        return cls({tuple(int(x) for x in rec[:nvars]): Fraction(rec[nvars]) for rec in records}, nvars)


class RationalFunction:
    """numerator / prod_m (m + s)^mult, s = a+b."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: RationalPoly, denominator: Optional[Mapping[int, int]] = None):
        self.numerator = numerator
        self.denominator: Dict[int, int] = {m: e for m, e in (denominator or {}).items() if e > 0}
        if numerator.is_zero():
            self.denominator = {}

    @property
    def nvars(self) -> int:
        return self.numerator.nvars

    @classmethod
    def polynomial(cls, poly: RationalPoly) -> "RationalFunction":
        return cls(poly)

    @classmethod
    def constant(cls, c: Scalar, nvars: int = 2) -> "RationalFunction":
        return cls(RationalPoly.constant(c, nvars))

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def _expanded_factor(self, factors: Mapping[int, int]) -> RationalPoly:
        poly = RationalPoly.constant(1, self.nvars)
        for m, e in factors.items():
            poly = poly * RationalPoly.s_plus(m, self.nvars) ** e
        return poly

    def _over(self, common: Mapping[int, int]) -> RationalPoly:
        missing = {m: e - self.denominator.get(m, 0) for m, e in common.items()}
        return self.numerator * self._expanded_factor(missing)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        common = dict(self.denominator)
        for m, e in other.denominator.items():
            common[m] = max(common.get(m, 0), e)
        return RationalFunction(self._over(common) + other._over(common), common)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __mul__(self, other: Union["RationalFunction", RationalPoly, Scalar]) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            den = dict(self.denominator)
            for m, e in other.denominator.items():
                den[m] = den.get(m, 0) + e
            return RationalFunction(self.numerator * other.numerator, den)
        return RationalFunction(self.numerator * other, self.denominator)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self) -> str:
        if not self.denominator:
            return f"({self.numerator})"
        den = "*".join(f"({m}+s)^{e}" if e > 1 else f"({m}+s)" for m, e in sorted(self.denominator.items()))
        return f"({self.numerator}) / {den}"

    def divide_by_factor(self, m: int, multiplier: Scalar = 1) -> "RationalFunction":
        """multiplier * self / (m + s)."""
        den = dict(self.denominator)
        den[m] = den.get(m, 0) + 1
        return RationalFunction(self.numerator * multiplier, den)

    def exact_divide_numerator(self, divisor: RationalPoly, step: str) -> "RationalFunction":
        return RationalFunction(self.numerator.exact_divide(divisor, step), self.denominator)

    def reduced(self) -> "RationalFunction":
        """Cancel denominator factors that divide the numerator."""
        num = self.numerator
        den = dict(self.denominator)
        for m in list(den):
            factor = RationalPoly.s_plus(m, self.nvars)
            while den[m] > 0:
                q, r = num.divide(factor)
                if not r.is_zero():
                    break
                num = q
                den[m] -= 1
        return RationalFunction(num, den)

    def denominator_factors(self) -> List[int]:
        return sorted(self.denominator)

    def lift(self) -> "RationalFunction":
        return RationalFunction(self.numerator.lift(), self.denominator)

    def evaluate(self, point: Sequence[complex]) -> complex:
        s = point[0] if self.nvars == 1 else point[0] + point[1]
        value = self.numerator.evaluate(point)
        for m, e in self.denominator.items():
            value /= (m + s) ** e
        return value

    def to_record(self) -> Dict[str, List]:
        return {
            "numerator": self.numerator.to_records(),
            "denominator": [[m, e] for m, e in sorted(self.denominator.items())],
        }

    @classmethod
    def from_record(cls, record: Mapping[str, List], nvars: int = 2) -> "RationalFunction":
        num = RationalPoly.from_records(record["numerator"], nvars)
        return cls(num, {int(m): int(e) for m, e in record["denominator"]})


class FormalSeries:
    """sum_{n<=order} c_n w^n with RationalFunction coefficients, w = eta - 1."""

    __slots__ = ("coefficients", "order")

    def __init__(self, coefficients: Sequence[RationalFunction], order: Optional[int] = None):
        if order is None:
            order = len(coefficients) - 1
        if len(coefficients) < order + 1:
            raise ValueError(f"series of order {order} needs {order + 1} coefficients")
        self.coefficients: List[RationalFunction] = list(coefficients[: order + 1])
        self.order = order

    @property
    def nvars(self) -> int:
        return self.coefficients[0].nvars

    @classmethod
    def binomial(cls, exponent: RationalPoly, order: int) -> "FormalSeries":
        """(1 + w)^c, k-th coefficient c(c-1)...(c-k+1)/k!."""
        coeffs = [RationalFunction.constant(1, exponent.nvars)]
        term = RationalPoly.constant(1, exponent.nvars)
        for k in range(1, order + 1):
            term = term * (exponent - (k - 1)) * Fraction(1, k)
            coeffs.append(RationalFunction(term))
        return cls(coeffs, order)

    @classmethod
    def constant_power(cls, c: int, order: int, nvars: int = 2) -> "FormalSeries":
        return cls.binomial(RationalPoly.constant(c, nvars), order)

    def truncate(self, order: int) -> "FormalSeries":
        return FormalSeries(self.coefficients, min(order, self.order))

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        order = min(self.order, other.order)
        return FormalSeries([x + y for x, y in zip(self.coefficients[: order + 1],
                                                  other.coefficients[: order + 1])], order)

    def __neg__(self) -> "FormalSeries":
        return FormalSeries([-c for c in self.coefficients], self.order)

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return self + (-other)

    def scale(self, factor: Union[RationalFunction, RationalPoly, Scalar]) -> "FormalSeries":
        return FormalSeries([c * factor for c in self.coefficients], self.order)

    def valuation(self) -> Optional[int]:
        for n, c in enumerate(self.coefficients):
            if not c.is_zero():
                return n
        return None

    def is_zero(self) -> bool:
        return self.valuation() is None

    def shift_down(self, n: int, step: str) -> "FormalSeries":
        """Divide by w^n, certifying that the first n coefficients vanish."""
        for k in range(n):
            if not self.coefficients[k].is_zero():
                raise DivisionNotExactError(f"{step} (w^{k})", self.coefficients[k])
        return FormalSeries(self.coefficients[n:], self.order - n)

    def shift_up(self, n: int) -> "FormalSeries":
        zero = RationalFunction.constant(0, self.nvars)
        return FormalSeries([zero] * n + self.coefficients, self.order + n)

    def divide_by_factor(self, m: int, multiplier: Scalar = 1) -> "FormalSeries":
        return FormalSeries([c.divide_by_factor(m, multiplier) for c in self.coefficients], self.order)

    def exact_divide_coefficients(self, divisor: RationalPoly, step: str) -> "FormalSeries":
        out = []
        for k, c in enumerate(self.coefficients):
            out.append(c.exact_divide_numerator(divisor, f"{step} (w^{k})"))
        return FormalSeries(out, self.order)

    def lift(self) -> "FormalSeries":
        return FormalSeries([c.lift() for c in self.coefficients], self.order)

    def evaluate(self, w: complex, point: Sequence[complex]) -> complex:
        total = complex(0.0, 0.0)
        for c in reversed(self.coefficients):
            total = total * w + c.evaluate(point)
        return total
