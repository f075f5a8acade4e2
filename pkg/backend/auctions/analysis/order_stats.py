"""
Expected order statistics and their quantile densities.

Mathematical Framework:
-----------------------
    xi_{k:n}(q) = n! / ((k-1)! (n-k)!) * (1 - q)^(k-1) * q^(n-k)
    F_{k:n}     = integral_0^1 xi_{k:n}(q) F^{-1}(q) dq      (k-th highest of n)

F_{k:n} is finite iff k exceeds the tail exponent gamma of F^{-1}(q) ~ (1-q)^(-gamma);
its variance is finite iff k > 2 gamma. By convention F_{2:1} = 0.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import optimize, special, stats

from ..core import CrossingPair, DivergentExpectationError, Estimate, EstimateMethod, ParameterError, SampleConfig
from ..distributions import (
    EqualRevenue,
    Exponential,
    GeneralizedPareto,
    Marginal,
    TwoPoint,
    Uniform,
)
from ..distributions.families import ArrayLike
from ..sampling import monte_carlo
from .quadrature import DEFAULT_TOLERANCE, integrate_quantile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrderStatQuery:
    """
    Expected k-th highest of n i.i.d. draws.

    Attributes:
        marginal: Value distribution
        k: Rank, 1 = highest
        n: Number of draws
    """

    marginal: Marginal
    k: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("n", f"out of range: {self.n} (must be >= 1)")
        if self.k < 1:
            raise ParameterError("k", f"out of range: {self.k} (must be >= 1)")
        if self.k > self.n and not self.is_empty_competitor:
            raise ParameterError("k", f"out of range: rank {self.k} exceeds n={self.n}")

    @property
    def is_empty_competitor(self) -> bool:
        return self.k == 2 and self.n == 1


def _log_coefficient(k: int, n: int) -> float:
    # log of n! / ((k-1)! (n-k)!)
    return float(special.gammaln(n + 1) - special.gammaln(k) - special.gammaln(n - k + 1))


def order_stat_density(k: int, n: int, q: ArrayLike) -> ArrayLike:
    """
    Density of the quantile of the k-th highest of n uniform draws.

    Args:
        k: Rank (1 = highest)
        n: Number of draws
        q: Quantile(s) in [0, 1]

    Returns:
        xi_{k:n}(q)
    """
    if not 1 <= k <= n:
        raise ParameterError("k", f"out of range: rank {k} with n={n}")
    arr = np.asarray(q, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise ParameterError("q", "out of range: must lie in [0, 1]")
    coefficient = n * math.comb(n - 1, k - 1)
    out = coefficient * (1.0 - arr) ** (k - 1) * arr ** (n - k)
    return float(out) if arr.ndim == 0 else out


def _density_qs(k: int, n: int, q: float, s: float) -> float:
    # same density, with the survival 1 - q supplied separately
    if s <= 0.0:
        return 0.0 if k > 1 else float(n)
    if q <= 0.0:
        return 0.0 if n > k else math.exp(_log_coefficient(k, n) + (k - 1) * math.log(s))
    return math.exp(_log_coefficient(k, n) + (k - 1) * math.log(s) + (n - k) * math.log(q))


def harmonic(n: int) -> float:
    """H_n = 1 + 1/2 + ... + 1/n."""
    if n < 0:
        raise ParameterError("n", f"out of range: {n}")
    if n <= 64:
        return math.fsum(1.0 / i for i in range(1, n + 1))
    return float(special.digamma(n + 1) + np.euler_gamma)


@lru_cache(maxsize=256)
def harmonic_exact(n: int) -> Fraction:
    """H_n as an exact rational."""
    total = Fraction(0)
    for i in range(1, n + 1):
        total += Fraction(1, i)
    return total


def _closed_form(marginal: Marginal, k: int, n: int):
    if isinstance(marginal, Exponential):
        return marginal.offset + (harmonic(n) - harmonic(k - 1)) / marginal.rate
    if isinstance(marginal, GeneralizedPareto):
        if marginal.is_exponential:
            return harmonic(n) - harmonic(k - 1)
        log_value = _log_coefficient(k, n) + special.betaln(n - k + 1, k - 1 + marginal.alpha)
        return math.exp(log_value) - 1.0
    if isinstance(marginal, EqualRevenue):
        return n / (k - 1)
    if isinstance(marginal, Uniform):
        return marginal.lo + marginal.width * (n - k + 1) / (n + 1)
    if isinstance(marginal, TwoPoint):
        # the k-th highest is high_value iff at least k draws are high
        return marginal.high_value * float(stats.binom.sf(k - 1, n, marginal.high_prob))
    return None


def expected_order_stat(query: OrderStatQuery, method: str = "auto", tol: float = DEFAULT_TOLERANCE) -> float:
    """
    Expected k-th highest of n draws, F_{k:n}.

    Args:
        query: Marginal, rank and sample count
        method: "auto" (closed form when available) or "quadrature"
        tol: Absolute quadrature tolerance

    Returns:
        F_{k:n}

    Raises:
        DivergentExpectationError: The expectation is infinite
    """
    marginal, k, n = query.marginal, query.k, query.n
    if query.is_empty_competitor:
        return 0.0
    if not marginal.has_finite_moment(k):
        raise DivergentExpectationError(f"divergent expectation: F_{{{k}:{n}}} of {marginal.kind.value}")

    if method == "auto":
        value = _closed_form(marginal, k, n)
        if value is not None:
            return float(value)
    elif method != "quadrature":
        raise ParameterError("method", f"unknown: {method!r}")

    result = integrate_quantile(marginal, lambda q, s: _density_qs(k, n, q, s), tol=tol)
    return result.value


def order_stat(marginal: Marginal, k: int, n: int, method: str = "auto", tol: float = DEFAULT_TOLERANCE) -> float:
    """Shorthand for expected_order_stat(OrderStatQuery(marginal, k, n))."""
    return expected_order_stat(OrderStatQuery(marginal, k, n), method=method, tol=tol)


def order_stat_finite_variance(marginal: Marginal, k: int) -> bool:
    return marginal.has_finite_moment(k, power=2)


def _kth_highest(marginal: Marginal, k: int, n: int, rng: np.random.Generator, batch: int) -> np.ndarray:
    draws = marginal.sample(rng, (batch, n))
    return -np.partition(-draws, k - 1, axis=1)[:, k - 1]


def sampled_order_stat(marginal: Marginal, k: int, n: int, cfg: SampleConfig) -> Estimate:
    """Monte Carlo estimate of F_{k:n}."""
    if OrderStatQuery(marginal, k, n).is_empty_competitor:
        return Estimate.exact(0.0, seed=cfg.seed)
    if not marginal.has_finite_moment(k):
        raise DivergentExpectationError(f"divergent expectation: F_{{{k}:{n}}} of {marginal.kind.value}")
    return monte_carlo(
        lambda rng, batch: _kth_highest(marginal, k, n, rng, batch),
        cfg,
        heavy_tailed=not order_stat_finite_variance(marginal, k),
        label=f"F_{k}:{n}",
    )


def three_interval_crossings(n: int, N: int) -> CrossingPair:
    """
    Interval on which xi_{2:N} >= xi_{1:n}.

    xi_{2:N}(q) - xi_{1:n}(q) = q^(n-1) * (N (N-1) (1-q) q^(N-n-1) - n); the bracket
    is single-peaked with its maximum at q = (N-n-1)/(N-n), so each side has
    at most one root.

    Args:
        n: Incumbent count
        N: Larger count, N > n

    Returns:
        CrossingPair (q_dagger, q_ddagger); degenerate when xi_{1:n} dominates
    """
    if n < 1:
        raise ParameterError("n", f"out of range: {n} (must be >= 1)")
    if N <= n:
        raise ParameterError("N", f"out of range: {N} (must exceed n={n})")

    a = N - n - 1
    scale = N * (N - 1)

    def gap(q: float) -> float:
        return scale * (1.0 - q) * q**a - n

    if a == 0:
        return CrossingPair(0.0, 1.0 - n / scale)

    peak = a / (a + 1.0)
    if gap(peak) <= 0.0:
        logger.info(f"No crossing for n={n}, N={N}: xi_1:n dominates")
        return CrossingPair(peak, peak)

    q_dagger = optimize.brentq(gap, 0.0, peak, xtol=1e-15)
    q_ddagger = optimize.brentq(gap, peak, 1.0, xtol=1e-15)
    return CrossingPair(float(q_dagger), float(q_ddagger))
