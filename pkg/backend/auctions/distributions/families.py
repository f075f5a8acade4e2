"""
Parametric value distributions.

Every family is an immutable dataclass exposing closed-form CDF, survival,
quantile (F^{-1}), inverse survival and density. Quantile space is the
canonical coordinate: sampling, quadrature and revenue curves all go through
F^{-1} so that heavy tails never require value-space integration.

Families:
---------
    Exponential(rate)                 1 - F(v) = exp(-rate v)
    ShiftedExponential(rate, shift)   1 - F(v) = exp(-rate (v - shift)), v >= shift
    GeneralizedPareto(alpha)          1 - F(v) = (1 + v)^(-1/(1-alpha)); exponential at alpha = 1
    EqualRevenue                      1 - F(v) = 1/v on [1, inf)
    Uniform(lo, hi)
    TwoPoint(high_value, high_prob)   atoms at 0 and high_value
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from ..core import DomainError, NoDensityError, ParameterError

ArrayLike = Union[float, np.ndarray]


class FamilyKind(Enum):
    """Built-in value distribution families."""

    EXPONENTIAL = "exponential"
    SHIFTED_EXPONENTIAL = "shifted_exponential"
    GENERALIZED_PARETO = "generalized_pareto"
    EQUAL_REVENUE = "equal_revenue"
    UNIFORM = "uniform"
    TWO_POINT = "two_point"


def _wrap(result: np.ndarray, scalar: bool) -> ArrayLike:
    return float(result) if scalar else result


class Marginal(ABC):
    """
    One-dimensional value distribution.

    Subclasses implement the private vectorized primitives; the public
    methods validate arguments and preserve scalar-in/scalar-out.
    """

    kind: FamilyKind
    has_density: bool = True

    # ==========================================
    # Family primitives
    # ==========================================

    @property
    @abstractmethod
    def lower(self) -> float:
        """Lower end of the support."""

    @property
    @abstractmethod
    def upper(self) -> float:
        """Upper end of the support (may be inf)."""

    @abstractmethod
    def _cdf(self, v: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _isf(self, s: np.ndarray) -> np.ndarray:
        """F^{-1}(1 - s)."""

    @abstractmethod
    def _quantile(self, q: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def params(self) -> Dict[str, float]:
        ...

    @abstractmethod
    def mean(self) -> float:
        ...

    def _survival(self, v: np.ndarray) -> np.ndarray:
        return 1.0 - self._cdf(v)

    def _density(self, v: np.ndarray) -> np.ndarray:
        raise NoDensityError(self.kind.value)

    def _inverse_hazard(self, v: np.ndarray) -> np.ndarray:
        return self._survival(v) / self._density(v)

    @property
    def tail_exponent(self) -> float:
        """gamma with F^{-1}(q) ~ (1 - q)^(-gamma) as q -> 1."""
        return 0.0

    @property
    def top_revenue(self) -> float:
        """lim_{q -> 0} q F^{-1}(1 - q), the revenue carried by the far tail."""
        return 0.0

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """Quantile levels where F^{-1} jumps."""
        return ()

    # ==========================================
    # Public API
    # ==========================================

    def cdf(self, v: ArrayLike) -> ArrayLike:
        arr = np.asarray(v, dtype=float)
        return _wrap(self._cdf(arr), arr.ndim == 0)

    def survival(self, v: ArrayLike) -> ArrayLike:
        arr = np.asarray(v, dtype=float)
        return _wrap(self._survival(arr), arr.ndim == 0)

    def quantile(self, q: ArrayLike) -> ArrayLike:
        """inf{v : F(v) >= q}."""
        arr = np.asarray(q, dtype=float)
        if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
            raise DomainError("quantile level outside [0, 1]")
        if math.isinf(self.upper) and np.any(arr == 1.0):
            raise DomainError("infinite quantile: q = 1 on unbounded support")
        return _wrap(self._quantile(arr), arr.ndim == 0)

    def isf(self, s: ArrayLike) -> ArrayLike:
        """Inverse survival F^{-1}(1 - s), exact in the upper tail."""
        arr = np.asarray(s, dtype=float)
        if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
            raise DomainError("survival level outside [0, 1]")
        if math.isinf(self.upper) and np.any(arr == 0.0):
            raise DomainError("infinite quantile: survival 0 on unbounded support")
        return _wrap(self._isf(arr), arr.ndim == 0)

    def density(self, v: ArrayLike) -> ArrayLike:
        if not self.has_density:
            raise NoDensityError(self.kind.value)
        arr = np.asarray(v, dtype=float)
        return _wrap(self._density(arr), arr.ndim == 0)

    def inverse_hazard(self, v: ArrayLike) -> ArrayLike:
        """(1 - F(v)) / f(v)."""
        if not self.has_density:
            raise NoDensityError(self.kind.value)
        arr = np.asarray(v, dtype=float)
        return _wrap(self._inverse_hazard(arr), arr.ndim == 0)

    def tail_mass(self, v: float) -> float:
        """P(V >= v)."""
        return float(self._survival(np.asarray(v, dtype=float)))

    def sample(self, rng: np.random.Generator, shape: Union[int, Tuple[int, ...]]) -> np.ndarray:
        """Inverse-transform draws."""
        return self._quantile(rng.random(shape))

    def spec(self) -> Dict[str, Any]:
        """Family-spec record that rebuilds this marginal."""
        return {"family": self.kind.value, "params": self.params()}

    def has_finite_moment(self, k: int, power: int = 1) -> bool:
        """Whether E[X_(k)^power] is finite for the k-th highest of any n draws."""
        return k > power * self.tail_exponent


@dataclass(frozen=True)
class Exponential(Marginal):
    """Exponential values with the given rate."""

    rate: float = 1.0
    kind = FamilyKind.EXPONENTIAL

    def __post_init__(self):
        if not self.rate > 0 or math.isinf(self.rate):
            raise ParameterError("rate", f"out of range: {self.rate} (must be > 0)")

    @property
    def offset(self) -> float:
        return 0.0

    @property
    def lower(self) -> float:
        return self.offset

    @property
    def upper(self) -> float:
        return math.inf

    def _cdf(self, v):
        x = np.maximum(v - self.offset, 0.0)
        return -np.expm1(-self.rate * x)

    def _survival(self, v):
        return np.exp(-self.rate * np.maximum(v - self.offset, 0.0))

    def _quantile(self, q):
        return self.offset - np.log1p(-q) / self.rate

    def _isf(self, s):
        with np.errstate(divide="ignore"):
            return self.offset - np.log(s) / self.rate

    def _density(self, v):
        inside = v >= self.offset
        return np.where(inside, self.rate * np.exp(-self.rate * np.where(inside, v - self.offset, 0.0)), 0.0)

    def _inverse_hazard(self, v):
        return np.full_like(v, 1.0 / self.rate, dtype=float)

    def mean(self) -> float:
        return self.offset + 1.0 / self.rate

    def params(self) -> Dict[str, float]:
        return {"rate": self.rate}


@dataclass(frozen=True)
class ShiftedExponential(Exponential):
    """Exponential values shifted to start at `shift`."""

    shift: float = 0.0
    kind = FamilyKind.SHIFTED_EXPONENTIAL

    def __post_init__(self):
        super().__post_init__()
        if not math.isfinite(self.shift):
            raise ParameterError("shift", f"out of range: {self.shift} (must be finite)")

    @property
    def offset(self) -> float:
        return self.shift

    def params(self) -> Dict[str, float]:
        return {"rate": self.rate, "shift": self.shift}


@dataclass(frozen=True)
class GeneralizedPareto(Marginal):
    """
    Extremal alpha-strongly regular family.

    Survival (1 + v)^(-1/(1-alpha)) with virtual value alpha v - (1 - alpha);
    alpha = 1 is the unit exponential, alpha = 0 an equal-revenue tail
    shifted to start at 0.
    """

    alpha: float
    kind = FamilyKind.GENERALIZED_PARETO

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError("alpha", f"out of range: {self.alpha} not in [0, 1]")

    @property
    def is_exponential(self) -> bool:
        return self.alpha == 1.0

    @property
    def lower(self) -> float:
        return 0.0

    @property
    def upper(self) -> float:
        return math.inf

    def _cdf(self, v):
        return 1.0 - self._survival(v)

    def _survival(self, v):
        x = np.maximum(v, 0.0)
        if self.is_exponential:
            return np.exp(-x)
        return np.exp(-np.log1p(x) / (1.0 - self.alpha))

    def _quantile(self, q):
        if self.is_exponential:
            return -np.log1p(-q)
        return np.expm1(-(1.0 - self.alpha) * np.log1p(-q))

    def _isf(self, s):
        with np.errstate(divide="ignore"):
            if self.is_exponential:
                return -np.log(s)
            return np.expm1(-(1.0 - self.alpha) * np.log(s))

    def _density(self, v):
        inside = v >= 0.0
        x = np.where(inside, v, 0.0)
        if self.is_exponential:
            return np.where(inside, np.exp(-x), 0.0)
        beta = 1.0 / (1.0 - self.alpha)
        return np.where(inside, beta * np.exp(-(beta + 1.0) * np.log1p(x)), 0.0)

    def _inverse_hazard(self, v):
        if self.is_exponential:
            return np.ones_like(v, dtype=float)
        return (1.0 - self.alpha) * (1.0 + v)

    @property
    def tail_exponent(self) -> float:
        return 0.0 if self.is_exponential else 1.0 - self.alpha

    @property
    def top_revenue(self) -> float:
        return 1.0 if self.alpha == 0.0 else 0.0

    def mean(self) -> float:
        if self.is_exponential:
            return 1.0
        if self.alpha == 0.0:
            return math.inf
        return 1.0 / self.alpha - 1.0

    def params(self) -> Dict[str, float]:
        return {"alpha": self.alpha}


@dataclass(frozen=True)
class EqualRevenue(Marginal):
    """Survival 1/v on [1, inf); every posted price earns revenue 1."""

    kind = FamilyKind.EQUAL_REVENUE

    @property
    def lower(self) -> float:
        return 1.0

    @property
    def upper(self) -> float:
        return math.inf

    def _cdf(self, v):
        return np.where(v < 1.0, 0.0, 1.0 - 1.0 / np.maximum(v, 1.0))

    def _survival(self, v):
        return 1.0 / np.maximum(v, 1.0)

    def _quantile(self, q):
        return 1.0 / (1.0 - q)

    def _isf(self, s):
        with np.errstate(divide="ignore"):
            return 1.0 / s

    def _density(self, v):
        return np.where(v < 1.0, 0.0, 1.0 / np.maximum(v, 1.0) ** 2)

    def _inverse_hazard(self, v):
        return np.asarray(v, dtype=float).copy()

    @property
    def tail_exponent(self) -> float:
        return 1.0

    @property
    def top_revenue(self) -> float:
        return 1.0

    def mean(self) -> float:
        return math.inf

    def params(self) -> Dict[str, float]:
        return {}


@dataclass(frozen=True)
class Uniform(Marginal):
    """Uniform values on [lo, hi]."""

    lo: float = 0.0
    hi: float = 1.0
    kind = FamilyKind.UNIFORM

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ParameterError("lo", "and hi must be finite")
        if not self.lo < self.hi:
            raise ParameterError("lo", f"out of range: lo={self.lo} must be < hi={self.hi}")

    @property
    def lower(self) -> float:
        return self.lo

    @property
    def upper(self) -> float:
        return self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def _cdf(self, v):
        return np.clip((v - self.lo) / self.width, 0.0, 1.0)

    def _survival(self, v):
        return np.clip((self.hi - v) / self.width, 0.0, 1.0)

    def _quantile(self, q):
        return self.lo + q * self.width

    def _isf(self, s):
        return self.hi - s * self.width

    def _density(self, v):
        return np.where((v >= self.lo) & (v <= self.hi), 1.0 / self.width, 0.0)

    def _inverse_hazard(self, v):
        return np.clip(self.hi - v, 0.0, None)

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def params(self) -> Dict[str, float]:
        return {"lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class TwoPoint(Marginal):
    """
    Atoms at 0 (mass 1 - high_prob) and high_value (mass high_prob).

    Has no density; operations that need one reject it.
    """

    high_value: float
    high_prob: float = 0.5
    kind = FamilyKind.TWO_POINT
    has_density = False

    def __post_init__(self):
        if not (0.0 < self.high_prob <= 1.0):
            raise ParameterError("high_prob", f"out of range: {self.high_prob} not in (0, 1]")
        if not (0.0 <= self.high_value < math.inf):
            raise ParameterError("high_value", f"out of range: {self.high_value} (must be finite and >= 0)")

    @property
    def lower(self) -> float:
        return 0.0

    @property
    def upper(self) -> float:
        return self.high_value

    def _cdf(self, v):
        return np.where(v < 0.0, 0.0, np.where(v < self.high_value, 1.0 - self.high_prob, 1.0))

    def _quantile(self, q):
        return np.where(q <= 1.0 - self.high_prob, 0.0, self.high_value)

    def _isf(self, s):
        return np.where(s >= self.high_prob, 0.0, self.high_value)

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return (1.0 - self.high_prob,)

    def tail_mass(self, v: float) -> float:
        if v <= 0.0:
            return 1.0
        return self.high_prob if v <= self.high_value else 0.0

    def mean(self) -> float:
        return self.high_prob * self.high_value

    def params(self) -> Dict[str, float]:
        return {"high_value": self.high_value, "high_prob": self.high_prob}


# ==========================================
# Spec parsing
# ==========================================

_FAMILIES = {
    FamilyKind.EXPONENTIAL: Exponential,
    FamilyKind.SHIFTED_EXPONENTIAL: ShiftedExponential,
    FamilyKind.GENERALIZED_PARETO: GeneralizedPareto,
    FamilyKind.EQUAL_REVENUE: EqualRevenue,
    FamilyKind.UNIFORM: Uniform,
    FamilyKind.TWO_POINT: TwoPoint,
}

_ALIASES = {
    "exp": FamilyKind.EXPONENTIAL,
    "gp": FamilyKind.GENERALIZED_PARETO,
    "er": FamilyKind.EQUAL_REVENUE,
}

_PARAMS = {
    FamilyKind.EXPONENTIAL: ("rate",),
    FamilyKind.SHIFTED_EXPONENTIAL: ("rate", "shift"),
    FamilyKind.GENERALIZED_PARETO: ("alpha",),
    FamilyKind.EQUAL_REVENUE: (),
    FamilyKind.UNIFORM: ("lo", "hi"),
    FamilyKind.TWO_POINT: ("high_value", "high_prob"),
}


class FamilySpec(BaseModel):
    """Configuration record for one marginal: `family` plus `params`."""

    family: str
    params: Dict[str, float] = Field(default_factory=dict)


def family_kind(name: str) -> FamilyKind:
    key = name.strip().lower().replace("-", "_")
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return FamilyKind(key)
    except ValueError:
        known = ", ".join(k.value for k in FamilyKind)
        raise ParameterError("family", f"unknown: {name!r} (known: {known})") from None


def make_marginal(spec: Union[FamilySpec, Mapping[str, Any], Marginal]) -> Marginal:
    """
    Build a validated Marginal from a family-spec record.

    Args:
        spec: FamilySpec or mapping with keys `family` and `params`

    Returns:
        Immutable Marginal

    Raises:
        ParameterError: Unknown family, unknown parameter or out-of-range value
    """
    if isinstance(spec, Marginal):
        return spec
    if not isinstance(spec, FamilySpec):
        spec = FamilySpec(**dict(spec))

    kind = family_kind(spec.family)
    allowed = _PARAMS[kind]
    for name in spec.params:
        if name not in allowed:
            raise ParameterError(name, f"is not a parameter of {kind.value}")

    if kind is FamilyKind.TWO_POINT and "high_value" not in spec.params:
        raise ParameterError("high_value", "is required for two_point")
    if kind is FamilyKind.GENERALIZED_PARETO and "alpha" not in spec.params:
        raise ParameterError("alpha", "is required for generalized_pareto")

    return _FAMILIES[kind](**spec.params)


@dataclass(frozen=True)
class ProductPrior:
    """
    Independent item values, one marginal per item.

    Attributes:
        marginals: Ordered marginals, one per item
    """

    marginals: Tuple[Marginal, ...]

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if len(self.marginals) < 1:
            raise ParameterError("marginals", "must contain at least one item")
        for marginal in self.marginals:
            if not isinstance(marginal, Marginal):
                raise ParameterError("marginals", f"entry {marginal!r} is not a Marginal")

    @property
    def m(self) -> int:
        return len(self.marginals)

    @property
    def is_iid(self) -> bool:
        first = self.marginals[0]
        return all(marginal == first for marginal in self.marginals[1:])

    @property
    def has_density(self) -> bool:
        return all(marginal.has_density for marginal in self.marginals)

    @property
    def tail_exponent(self) -> float:
        return max(marginal.tail_exponent for marginal in self.marginals)

    @property
    def top_revenues(self) -> np.ndarray:
        return np.array([marginal.top_revenue for marginal in self.marginals])

    def values(self, quantiles: np.ndarray) -> np.ndarray:
        """Map quantiles with trailing item axis to values, item by item."""
        out = np.empty_like(quantiles, dtype=float)
        for j, marginal in enumerate(self.marginals):
            out[..., j] = marginal._quantile(quantiles[..., j])
        return out

    def sample(self, rng: np.random.Generator, shape: Union[int, Tuple[int, ...]] = ()) -> np.ndarray:
        """Draw values with shape `shape + (m,)`."""
        lead = (shape,) if isinstance(shape, int) else tuple(shape)
        return self.values(rng.random(lead + (self.m,)))

    def spec(self) -> List[Dict[str, Any]]:
        return [marginal.spec() for marginal in self.marginals]


def make_prior(specs: Sequence[Union[FamilySpec, Mapping[str, Any], Marginal]]) -> ProductPrior:
    """Build a ProductPrior from one family spec per item."""
    return ProductPrior(tuple(make_marginal(spec) for spec in specs))


def iid_prior(marginal: Union[FamilySpec, Mapping[str, Any], Marginal], m: int) -> ProductPrior:
    """m independent copies of one marginal."""
    if m < 1:
        raise ParameterError("m", f"out of range: {m} (must be >= 1)")
    built = make_marginal(marginal)
    return ProductPrior((built,) * m)
