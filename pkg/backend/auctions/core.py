"""
Core data types and errors for the competition-complexity lab.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Optional, Tuple


class AuctionLabError(ValueError):
    """Base error for every rejected lab computation."""


class ParameterError(AuctionLabError):
    """A parameter lies outside its legal range."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name} {message}")


class DomainError(AuctionLabError):
    """Argument outside the domain of a function."""


class NoDensityError(AuctionLabError):
    """Density-requiring operation on an atom-bearing family."""

    def __init__(self, family: str):
        super().__init__(f"no density: {family} has atoms only")


class DivergentExpectationError(AuctionLabError):
    """The requested expectation is infinite."""


class UnboundedRevenueError(AuctionLabError):
    """The revenue curve has no finite maximum."""


class DegenerateCoreError(AuctionLabError):
    """Conditioning event of the core has probability zero."""


class RegularityError(AuctionLabError):
    """A marginal failed the regularity check."""


class EnumerationTooLargeError(AuctionLabError):
    """Exact enumeration requested beyond its supported size."""


class DimensionMismatchError(AuctionLabError):
    """Matrix and prior shapes disagree."""


class EstimateMethod(Enum):
    """How a quantity was evaluated."""

    MONTE_CARLO = "monte_carlo"
    QUADRATURE = "quadrature"
    CLOSED_FORM = "closed_form"


class MechanismKind(Enum):
    """Mechanisms and benchmarks the lab evaluates."""

    WEL = "WEL"
    VCG = "VCG"
    BSPA = "BSPA"
    SREV = "SREV"
    BREV = "BREV"
    CDW = "CDW"


class CoreVariant(Enum):
    """Convention for the core of a core-tail split."""

    TRUNCATED = "truncated"
    CONDITIONAL = "conditional"


INFINITE_FLAG = "infinite"
INFINITE_VARIANCE_FLAG = "infinite_variance"
MAX_BATCH_CELLS = 1 << 22


@dataclass
class SampleConfig:
    """
    Monte Carlo sampling configuration.

    Attributes:
        seed: Root seed; chunk substreams derive from (seed, chunk index)
        samples: Total number of draws
        chunks: Number of independent substreams
        method: Requested evaluation method
        n_jobs: joblib worker count (scheduling only, never changes results)
        batch_size: Rows drawn per batch inside a chunk
        groups: Median-of-means group count for heavy tails
    """

    seed: int = 20240601
    samples: int = 200_000
    chunks: int = 8
    method: EstimateMethod = EstimateMethod.MONTE_CARLO
    n_jobs: int = 1
    batch_size: int = 65_536
    groups: int = 32

    def __post_init__(self):
        if isinstance(self.method, str):
            self.method = EstimateMethod(self.method)
        if self.samples < 1:
            raise ParameterError("samples", "must be >= 1")
        if self.chunks < 1:
            raise ParameterError("chunks", "must be >= 1")
        if self.batch_size < 1:
            raise ParameterError("batch_size", "must be >= 1")
        if self.groups < 1:
            raise ParameterError("groups", "must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed", "must be a 64-bit unsigned integer")

    def scaled(self, factor: int) -> "SampleConfig":
        """Same stream layout with `factor` times the draws."""
        return replace(self, samples=self.samples * factor)

    def with_seed(self, seed: int) -> "SampleConfig":
        return replace(self, seed=seed)

    def with_method(self, method: EstimateMethod) -> "SampleConfig":
        return replace(self, method=method)

    def with_samples(self, samples: int) -> "SampleConfig":
        return replace(self, samples=samples)

    def capped(self, width: int) -> "SampleConfig":
        """Shrink batch_size so one batch holds at most MAX_BATCH_CELLS values of `width` columns."""
        return replace(self, batch_size=max(1, min(self.batch_size, MAX_BATCH_CELLS // max(1, width))))


@dataclass(frozen=True)
class Estimate:
    """
    A numerically evaluated quantity.

    Attributes:
        mean: Point estimate (may be inf for divergent expectations)
        stderr: Standard error. Zero for quadrature and closed form; a Monte Carlo
            estimate is zero only when the statistic is constant on every draw
            (a single bidder paying nothing), and is_exact stays False
        samples: Number of draws behind the estimate (0 when not sampled)
        seed: Root seed used
        method: Evaluation method
        flags: Warning flags such as "infinite_variance"
        details: Auxiliary outputs (e.g. an optimized price)
    """

    mean: float
    stderr: float
    samples: int
    seed: int
    method: EstimateMethod
    flags: Tuple[str, ...] = ()
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.stderr < 0 or math.isnan(self.stderr):
            raise ParameterError("stderr", "must be >= 0")

    @property
    def is_exact(self) -> bool:
        """Check if the estimate carries no sampling error."""
        return self.method is not EstimateMethod.MONTE_CARLO

    @property
    def is_infinite(self) -> bool:
        return INFINITE_FLAG in self.flags

    @classmethod
    def exact(
        cls, value: float, method: EstimateMethod = EstimateMethod.CLOSED_FORM, seed: int = 0, **details: Any
    ) -> "Estimate":
        """Build an error-free estimate."""
        flags: Tuple[str, ...] = (INFINITE_FLAG,) if math.isinf(value) else ()
        return cls(mean=float(value), stderr=0.0, samples=0, seed=seed, method=method, flags=flags, details=dict(details))

    def scaled(self, factor: float) -> "Estimate":
        """Multiply mean and stderr by a positive constant."""
        return Estimate(
            mean=self.mean * factor,
            stderr=self.stderr * abs(factor),
            samples=self.samples,
            seed=self.seed,
            method=self.method,
            flags=self.flags,
            details=dict(self.details),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
            "method": self.method.value,
            "flags": list(self.flags),
            "details": dict(self.details),
        }


@dataclass(frozen=True)
class RevenueCurvePoint:
    """
    One point of a revenue curve.

    Attributes:
        quantile: Sale probability q in [0, 1]
        revenue: R(q) = q * F^{-1}(1 - q)
    """

    quantile: float
    revenue: float


@dataclass(frozen=True)
class CrossingPair:
    """Interval [q_dagger, q_ddagger] on which xi_{2:N} >= xi_{1:n}."""

    q_dagger: float
    q_ddagger: float

    def __post_init__(self):
        if not 0.0 <= self.q_dagger <= self.q_ddagger <= 1.0:
            raise DomainError(f"crossing pair out of order: ({self.q_dagger}, {self.q_ddagger})")

    @property
    def is_degenerate(self) -> bool:
        return self.q_dagger == self.q_ddagger


@dataclass(frozen=True)
class CompetitionResult:
    """
    Competition-complexity constant C(n, alpha) with its certificate.

    Attributes:
        n: Incumbent bidder count
        alpha: Strong-regularity coefficient in (0, 1]
        c: Minimal number of extra bidders
        f1_n: F_{1:n}
        f1_nc: F_{1:n+c}
        f2_nc: F_{2:n+c}
        f2_prev: F_{2:n+c-1} (fails the inequality by minimality)
        lower_bound: Exclusive lower bound max(1/alpha - 1, 1) * n
        upper_bound: Inclusive upper bound 11 n / alpha
    """

    n: int
    alpha: float
    c: int
    f1_n: float
    f1_nc: float
    f2_nc: float
    f2_prev: float
    lower_bound: float
    upper_bound: float

    @property
    def within_bounds(self) -> bool:
        return self.lower_bound < self.c <= self.upper_bound

    def to_row(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "c": self.c,
            "lb": self.lower_bound,
            "ub": self.upper_bound,
            "F1n": self.f1_n,
            "F1nc": self.f1_nc,
            "F2nc": self.f2_nc,
        }


def combine_stderr(*estimates: Optional[Estimate]) -> float:
    """Standard error of a sum of independent estimates."""
    return math.sqrt(sum(e.stderr**2 for e in estimates if e is not None and math.isfinite(e.stderr)))
