"""
Pydantic records shared across the library: parameter pairs, data profiles,
quadrature results, series and verification reports, run configuration.
"""

import cmath
import math
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from heat_content.errors import DomainError


# --- Parameters ---

class ParamPair(BaseModel):
    """Exponent pair (a, b) of the data x^{-a}, x^{-b}; Re(a) < 1 and Re(b) < 1."""

    model_config = ConfigDict(frozen=True)

    a: complex
    b: complex

    @field_validator("a", "b")
    @classmethod
    def _real_part_below_one(cls, v: complex) -> complex:
        if not v.real < 1.0:
            raise ValueError(f"Re(a) < 1 and Re(b) < 1 required, got {v}")
        return v

    @classmethod
    def of(cls, a: complex, b: complex) -> "ParamPair":
        return cls(a=complex(a), b=complex(b))

    @property
    def s(self) -> complex:
        return self.a + self.b

    @property
    def is_real(self) -> bool:
        return self.a.imag == 0.0 and self.b.imag == 0.0

    def real(self) -> Tuple[float, float]:
        if not self.is_real:
            raise DomainError(f"real parameters required, got a={self.a}, b={self.b}")
        return self.a.real, self.b.real

    def swapped(self) -> "ParamPair":
        return ParamPair(a=self.b, b=self.a)


class RegionTag(BaseModel):
    kind: Literal["InO", "LogPlane", "Invalid"]
    log_plane_k: Optional[int] = None
    subregions: List[int] = Field(default_factory=list)

    def describe(self) -> str:
        if self.kind == "LogPlane":
            return f"LogPlane(k={self.log_plane_k})"
        if self.kind == "Invalid":
            return "Invalid"
        return f"InO subregions={self.subregions}"


# --- Data profiles ---

class CutoffSpec(BaseModel):
    """Smooth monotone step: 1 on [0, plateau_end], 0 on [support_end, inf)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["none", "smooth_step"] = "smooth_step"
    plateau_end: float = 1.0 / 3.0
    support_end: float = 2.0 / 3.0

    @model_validator(mode="after")
    def _ordered(self) -> "CutoffSpec":
        if self.kind == "smooth_step" and not 0.0 < self.plateau_end < self.support_end:
            raise ValueError(f"0 < plateau_end < support_end required, got {self.plateau_end}, {self.support_end}")
        return self

    @classmethod
    def none(cls) -> "CutoffSpec":
        return cls(kind="none")

    def values(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        """Cutoff (order 0) or its first/second derivative at x."""
        x = np.asarray(x, dtype=float)
        if order not in (0, 1, 2):
            raise DomainError(f"cutoff derivative order must be 0, 1 or 2, got {order}")
        if self.kind == "none":
            return np.ones_like(x) if order == 0 else np.zeros_like(x)

        p, e = self.plateau_end, self.support_end
        kappa = 1.0 / (e - p)
        out = np.zeros_like(x)
        if order == 0:
            out[x <= p] = 1.0
        inside = (x > p) & (x < e)
        if not np.any(inside):
            return out

        r = (e - x[inside]) * kappa
        with np.errstate(divide="ignore", over="ignore"):
            g = 1.0 / r - 1.0 / (1.0 - r)
        lse_pos = np.logaddexp(0.0, g)
        lse_neg = np.logaddexp(0.0, -g)
        step = np.exp(-lse_pos)
        if order == 0:
            out[inside] = step
            return out

        # S(1-S) underflows long before g_r overflows; clip both ends to exact zero
        live = np.abs(g) < 700.0
        q = np.exp(-lse_pos - lse_neg)
        rl = np.where(live, r, 0.5)
        g_r = -1.0 / rl**2 - 1.0 / (1.0 - rl) ** 2
        if order == 1:
            vals = kappa * q * g_r
        else:
            g_rr = 2.0 / rl**3 - 2.0 / (1.0 - rl) ** 3
            vals = kappa**2 * q * ((1.0 - 2.0 * step) * g_r**2 - g_rr)
        out[inside] = np.where(live, vals, 0.0)
        return out

    def breakpoints(self) -> List[float]:
        return [] if self.kind == "none" else [self.plateau_end, self.support_end]


class ProfileTerm(BaseModel):
    """coeff * x^power * (1-x)^right_power * Xi^(cutoff_order)(u), u = x or 1-x."""

    model_config = ConfigDict(frozen=True)

    coeff: float
    power: float
    right_power: float = 0.0
    cutoff_order: int = 0


class PowerProfile(BaseModel):
    """Finite sum of power-times-cutoff terms on [0, 1]; closed under differentiation."""

    model_config = ConfigDict(frozen=True)

    terms: List[ProfileTerm]
    cutoff: CutoffSpec = Field(default_factory=CutoffSpec.none)
    mirrored: bool = False

    @classmethod
    def power(cls, exponent: float, cutoff: Optional[CutoffSpec] = None) -> "PowerProfile":
        """x^{-exponent}, optionally times a cutoff."""
        return cls(terms=[ProfileTerm(coeff=1.0, power=-float(exponent))],
                   cutoff=cutoff or CutoffSpec.none())

    @classmethod
    def bump(cls, p: float, q: float, coeff: float = 1.0) -> "PowerProfile":
        """coeff * x^p (1-x)^q with no cutoff."""
        return cls(terms=[ProfileTerm(coeff=coeff, power=p, right_power=q)])

    @property
    def min_power(self) -> float:
        """Most singular exponent at either end."""
        return min(min(tm.power, tm.right_power) for tm in self.terms)

    def scaled(self, factor: float) -> "PowerProfile":
        terms = [tm.model_copy(update={"coeff": tm.coeff * factor}) for tm in self.terms]
        return self.model_copy(update={"terms": terms})

    def mirror(self) -> "PowerProfile":
        """Profile of x -> f(1-x)."""
        terms = [ProfileTerm(coeff=tm.coeff, power=tm.right_power, right_power=tm.power,
                             cutoff_order=tm.cutoff_order) for tm in self.terms]
        return PowerProfile(terms=terms, cutoff=self.cutoff, mirrored=not self.mirrored)

    def derivative(self) -> "PowerProfile":
        has_cutoff = self.cutoff.kind != "none"
        chain = -1.0 if self.mirrored else 1.0
        out: Dict[Tuple[float, float, int], float] = {}

        def add(c: float, p: float, q: float, m: int) -> None:
            if c == 0.0:
                return
            key = (p, q, m)
            out[key] = out.get(key, 0.0) + c

        for tm in self.terms:
            add(tm.coeff * tm.power, tm.power - 1.0, tm.right_power, tm.cutoff_order)
            add(-tm.coeff * tm.right_power, tm.power, tm.right_power - 1.0, tm.cutoff_order)
            if has_cutoff:
                if tm.cutoff_order >= 2:
                    raise DomainError("cutoff derivatives beyond second order are not supported")
                add(chain * tm.coeff, tm.power, tm.right_power, tm.cutoff_order + 1)
        terms = [ProfileTerm(coeff=c, power=p, right_power=q, cutoff_order=m)
                 for (p, q, m), c in sorted(out.items()) if c != 0.0]
        return self.model_copy(update={"terms": terms})

    def _cutoff_factor(self, x: np.ndarray, order: int) -> np.ndarray:
        u = 1.0 - x if self.mirrored else x
        return self.cutoff.values(u, order)

    def breakpoints(self) -> List[float]:
        pts = self.cutoff.breakpoints()
        if self.mirrored:
            pts = [1.0 - p for p in pts]
        return sorted(p for p in pts if 0.0 < p < 1.0)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.weighted_values(x, np.log(x), np.log1p(-x), np.zeros_like(x))

    def weighted_values(self, x: np.ndarray, log_x: np.ndarray, log_xr: np.ndarray,
                        log_weight: np.ndarray) -> np.ndarray:
        """Sum of terms times exp(log_weight), powers combined in log space.

        log_xr is log(1-x) supplied by the caller at full relative precision.
        """
        total = np.zeros_like(np.asarray(x, dtype=float))
        cache: Dict[int, np.ndarray] = {}
        for tm in self.terms:
            if tm.cutoff_order not in cache:
                cache[tm.cutoff_order] = self._cutoff_factor(x, tm.cutoff_order)
            xi = cache[tm.cutoff_order]
            expo = log_weight + tm.power * log_x
            if tm.right_power != 0.0:
                expo = expo + tm.right_power * log_xr
            total = total + tm.coeff * np.exp(expo) * xi
        return total

    def endpoint_values(self) -> Tuple[float, float]:
        """(f(0+), f(1-)); inf where a term blows up."""

        def at(end: float) -> float:
            value = 0.0
            for tm in self.terms:
                p = tm.power if end == 0.0 else tm.right_power
                if p > 0.0:
                    continue
                if p < 0.0:
                    return math.inf
                xi = float(self._cutoff_factor(np.array([end]), tm.cutoff_order)[0])
                value += tm.coeff * xi
            return value

        return at(0.0), at(1.0)


# --- Results ---

class QuadResult(BaseModel):
    value: float
    error_estimate: float = Field(ge=0.0)
    nodes_used: int = Field(gt=0)

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(value=self.value + other.value,
                          error_estimate=self.error_estimate + other.error_estimate,
                          nodes_used=self.nodes_used + other.nodes_used)

    def scaled(self, factor: float) -> "QuadResult":
        return QuadResult(value=self.value * factor,
                          error_estimate=self.error_estimate * abs(factor),
                          nodes_used=self.nodes_used)


class BoundaryCondition(str, Enum):
    DIRICHLET = "D"
    NEUMANN = "N"

    @property
    def sign(self) -> int:
        return 1 if self is BoundaryCondition.NEUMANN else -1


class BCSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    left: BoundaryCondition
    right: BoundaryCondition

    @classmethod
    def from_code(cls, code: str) -> "BCSpec":
        """'DN' -> Dirichlet at 0, Neumann at 1."""
        code = code.strip().upper()
        if len(code) != 2 or any(c not in "DN" for c in code):
            raise ValueError(f"boundary code must be two letters from D/N, got {code!r}")
        return cls(left=BoundaryCondition(code[0]), right=BoundaryCondition(code[1]))

    @property
    def code(self) -> str:
        return self.left.value + self.right.value

    @property
    def left_sign(self) -> int:
        return self.left.sign

    @property
    def right_sign(self) -> int:
        return self.right.sign


# --- Series ---

class SeriesTerm(BaseModel):
    model_config = ConfigDict(frozen=True)

    power: complex
    log_power: Literal[0, 1] = 0
    coeff: complex

    @property
    def key(self) -> Tuple[float, float, int]:
        return (self.power.real, self.power.imag, self.log_power)

    def evaluate(self, t: float) -> complex:
        log_t = math.log(t)
        value = self.coeff * cmath.exp(self.power * log_t)
        return value * log_t if self.log_power else value


class AsymptoticSeries(BaseModel):
    """Sum of coeff * t^power * log(t)^log_power, sorted, no duplicate keys."""

    terms: List[SeriesTerm] = Field(default_factory=list)

    @model_validator(mode="after")
    def _canonical(self) -> "AsymptoticSeries":
        keys = [tm.key for tm in self.terms]
        if keys != sorted(keys) or len(set(keys)) != len(keys):
            raise ValueError("series terms must be sorted by (power, log_power) without duplicates")
        return self

    @classmethod
    def from_terms(cls, terms: List[SeriesTerm]) -> "AsymptoticSeries":
        merged: Dict[Tuple[float, float, int], SeriesTerm] = {}
        for tm in terms:
            if tm.key in merged:
                prev = merged[tm.key]
                merged[tm.key] = prev.model_copy(update={"coeff": prev.coeff + tm.coeff})
            else:
                merged[tm.key] = tm
        return cls(terms=[merged[k] for k in sorted(merged)])

    def __add__(self, other: "AsymptoticSeries") -> "AsymptoticSeries":
        return AsymptoticSeries.from_terms(self.terms + other.terms)

    def scaled(self, factor: complex) -> "AsymptoticSeries":
        return AsymptoticSeries(terms=[tm.model_copy(update={"coeff": tm.coeff * factor})
                                       for tm in self.terms])

    def coefficient(self, power: complex, log_power: int = 0) -> complex:
        for tm in self.terms:
            if tm.power == power and tm.log_power == log_power:
                return tm.coeff
        return complex(0.0, 0.0)

    def evaluate(self, t: float) -> complex:
        if not t > 0:
            raise DomainError(f"series evaluation needs t > 0, got {t}")
        return sum((tm.evaluate(t) for tm in self.terms), complex(0.0, 0.0))


class VerificationReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    label: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    t_grid: List[float] = Field(default_factory=list)
    quad_values: List[float] = Field(default_factory=list)
    quad_errors: List[float] = Field(default_factory=list)
    series_values: List[float] = Field(default_factory=list)
    residuals: List[float] = Field(default_factory=list)
    fitted_exponent: Optional[float] = None
    predicted_exponent: Optional[float] = None
    fitted_log_coeff: Optional[float] = None
    expected_log_coeff: Optional[float] = None
    fitted_constant: Optional[float] = None
    expected_constant: Optional[float] = None
    passed: bool = Field(alias="pass")
    below_floor: bool = False
    tolerance_used: float
    notes: List[str] = Field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True)


class IdentityCheck(BaseModel):
    """Outcome of a numerical identity check (max deviation against a tolerance)."""

    model_config = ConfigDict(populate_by_name=True)

    label: str
    max_deviation: float
    tolerance: float
    passed: bool = Field(alias="pass")
    details: Dict[str, Any] = Field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True)


class FourierProfile(BaseModel):
    """Coefficients gamma_n, |n| <= n_max, stored at index n + n_max."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    coefficients: np.ndarray
    n_max: int = Field(gt=0)
    provenance: Literal["FromSamples", "FromClosedForm"]
    error_estimate: float = 0.0

    @model_validator(mode="after")
    def _length(self) -> "FourierProfile":
        if self.coefficients.shape != (2 * self.n_max + 1,):
            raise ValueError(f"expected {2 * self.n_max + 1} coefficients, got {self.coefficients.shape}")
        return self

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def coefficient(self, n: int) -> complex:
        return complex(self.coefficients[n + self.n_max])

    def scaled(self, factor: float) -> "FourierProfile":
        return self.model_copy(update={"coefficients": self.coefficients * factor,
                                       "error_estimate": self.error_estimate * abs(factor)})


# --- Configuration ---

class RunConfig(BaseModel):
    t_min: float = 1e-5
    t_max: float = 1e-2
    points: int = 6
    tol: float = 1e-12
    N: int = 3
    slope_tol: float = 0.15
    log_coeff_tol: float = 0.05
    output_format: Literal["csv", "json"] = "csv"
    seed: int = 0
    threads: int = 4

    @field_validator("t_min")
    @classmethod
    def _t_min_floor(cls, v: float) -> float:
        if v < 1e-7:
            raise ValueError(f"t_min >= 1e-7 required, got {v}")
        return v

    @field_validator("t_max")
    @classmethod
    def _t_max_ceiling(cls, v: float) -> float:
        if v > 1.0:
            raise ValueError(f"t_max <= 1 required, got {v}")
        return v

    @field_validator("points")
    @classmethod
    def _enough_points(cls, v: int) -> int:
        if v < 4:
            raise ValueError(f"points >= 4 required, got {v}")
        return v

    @field_validator("tol", "slope_tol", "log_coeff_tol")
    @classmethod
    def _positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError(f"tolerances must be positive, got {v}")
        return v

    @field_validator("threads")
    @classmethod
    def _threads(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"threads >= 1 required, got {v}")
        return v

    @model_validator(mode="after")
    def _ordered(self) -> "RunConfig":
        if not self.t_min < self.t_max:
            raise ValueError(f"t_min < t_max required, got {self.t_min} >= {self.t_max}")
        return self

    def t_grid(self) -> List[float]:
        """Log-spaced grid from t_max down to t_min."""
        return [float(t) for t in np.geomspace(self.t_max, self.t_min, self.points)]
