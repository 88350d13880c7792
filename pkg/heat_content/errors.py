"""
Exception hierarchy for the heat-content library.
"""

from typing import Any, Optional


class HeatContentError(Exception):
    """Base class for every error raised by the library."""


class PoleError(HeatContentError):
    """Gamma-type function evaluated at (or numerically on) a pole."""

    def __init__(self, z: complex, message: Optional[str] = None):
        self.z = z
        super().__init__(message or f"pole at z={z} (non-positive integer)")


class DomainError(HeatContentError, ValueError):
    """Input outside the domain an operation is defined on."""


class LogPlaneError(HeatContentError):
    """Parameter pair lies on a log plane a+b = 1-2k where a coefficient has a genuine pole."""

    def __init__(self, k: int, message: Optional[str] = None):
        self.k = k
        super().__init__(message or f"a+b on log plane k={k}")


class RegionError(HeatContentError):
    """Parameter pair outside the sub-region an operation needs."""


class MaxRefinementError(HeatContentError):
    """Quadrature did not reach the requested tolerance at the deepest level."""

    def __init__(self, message: str, value: float = float("nan"), error_estimate: float = float("inf")):
        self.value = value
        self.error_estimate = error_estimate
        super().__init__(message)


class TruncationError(HeatContentError):
    """Fourier truncation too short for the requested time."""

    def __init__(self, suggested_n_max: int, message: Optional[str] = None):
        self.suggested_n_max = suggested_n_max
        super().__init__(message or f"Fourier truncation too short; use N_max >= {suggested_n_max}")


class CertificationError(HeatContentError):
    """An exact-arithmetic certificate failed."""


class DivisionNotExactError(CertificationError):
    """A ladder division left a non-zero remainder."""

    def __init__(self, step: str, coefficient: Any = None):
        self.step = step
        self.coefficient = coefficient
        detail = f": offending coefficient {coefficient}" if coefficient is not None else ""
        super().__init__(f"division not exact at step {step}{detail}")
