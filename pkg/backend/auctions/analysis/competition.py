"""
Competition-complexity constant C(n, alpha).

Mathematical Framework:
-----------------------
C(n, alpha) is the smallest integer c with

    F_{2:n+c} = alpha * F_{1:n+c} - (1 - alpha) >= F_{1:n}

under GeneralizedPareto(alpha). At alpha = 1 (unit exponential) this reads
H_{n+c} - H_n >= 1. Known bounds:

    max(1/alpha - 1, 1) * n  <  C(n, alpha)  <=  11 n / alpha
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

from joblib import Parallel, delayed

from ..core import CompetitionResult, ParameterError
from ..distributions import GeneralizedPareto
from .order_stats import harmonic, harmonic_exact, order_stat

logger = logging.getLogger(__name__)


@dataclass
class CompetitionConfig:
    """Numerical settings for the constant search."""

    tolerance: float = 1e-9  # |gap| at or below this counts as failing
    quad_tolerance: float = 1e-9  # absolute tolerance of the quadrature fallback
    recheck_window: float = 1e-7  # |gap| below this triggers a quadrature recheck
    recheck_tolerance: float = 1e-12  # quadrature tolerance of the recheck
    max_c: int = 1 << 40


def _validate(n: int, alpha: float) -> None:
    if n < 1:
        raise ParameterError("n", f"out of range: {n} (must be >= 1)")
    if alpha <= 0.0:
        raise ParameterError("alpha", f"out of range: {alpha} (regular case has unbounded constant)")
    if alpha > 1.0:
        raise ParameterError("alpha", f"out of range: {alpha} not in (0, 1]")


def competition_constant_bounds(n: int, alpha: float) -> Tuple[float, float]:
    """(exclusive lower, inclusive upper) bounds on C(n, alpha)."""
    _validate(n, alpha)
    return max(1.0 / alpha - 1.0, 1.0) * n, 11.0 * n / alpha


def gp_max_bounds(n: int, alpha: float) -> Tuple[float, float]:
    """
    Bounds on F_{1:n} of GeneralizedPareto(alpha), alpha in (0, 1).

    Returns:
        ((2n)^(1-alpha) (1-alpha) / (2 alpha),  n^(1-alpha) / alpha - 1)
    """
    _validate(n, alpha)
    if alpha == 1.0:
        raise ParameterError("alpha", "out of range: bounds hold for alpha < 1")
    lower = (2.0 * n) ** (1.0 - alpha) * (1.0 - alpha) / (2.0 * alpha)
    upper = n ** (1.0 - alpha) / alpha - 1.0
    return lower, upper


def _harmonic_constant(n: int, config: CompetitionConfig) -> int:
    gap = 0.0
    c = 0
    while True:
        c += 1
        gap += 1.0 / (n + c)
        if abs(gap - 1.0) <= config.recheck_window:
            exact = harmonic_exact(n + c) - harmonic_exact(n)
            if exact >= Fraction(1):
                return c
        elif gap > 1.0:
            return c


def competition_constant(n: int, alpha: float, config: Optional[CompetitionConfig] = None) -> CompetitionResult:
    """
    Smallest c such that VCG with n + c bidders matches welfare with n bidders
    on the extremal alpha-strongly regular family.

    Args:
        n: Incumbent bidder count
        alpha: Strong-regularity coefficient in (0, 1]
        config: Search tolerances

    Returns:
        CompetitionResult with the certificate values
    """
    _validate(n, alpha)
    config = config or CompetitionConfig()
    lower, upper = competition_constant_bounds(n, alpha)

    if alpha == 1.0:
        c = _harmonic_constant(n, config)
        f1_n, f1_nc = harmonic(n), harmonic(n + c)
        result = CompetitionResult(
            n=n,
            alpha=alpha,
            c=c,
            f1_n=f1_n,
            f1_nc=f1_nc,
            f2_nc=f1_nc - 1.0,
            f2_prev=harmonic(n + c - 1) - 1.0,
            lower_bound=lower,
            upper_bound=upper,
        )
        logger.info(f"C({n}, 1) = {c}")
        return result

    family = GeneralizedPareto(alpha)
    f1_n = order_stat(family, 1, n, tol=config.quad_tolerance)

    def second(N: int, method: str = "auto", tol: float = config.quad_tolerance) -> float:
        return alpha * order_stat(family, 1, N, method=method, tol=tol) - (1.0 - alpha)

    def satisfied(c: int) -> bool:
        gap = second(n + c) - f1_n
        if abs(gap) < config.recheck_window:
            tight = config.recheck_tolerance
            gap = second(n + c, "quadrature", tight) - order_stat(family, 1, n, method="quadrature", tol=tight)
        return gap > config.tolerance

    c = 1
    while not satisfied(c):
        c *= 2
        if c > config.max_c:
            raise ParameterError("alpha", f"search exceeded {config.max_c} bidders")

    low, high = c // 2, c
    while high - low > 1:
        mid = (low + high) // 2
        if satisfied(mid):
            high = mid
        else:
            low = mid

    c = high
    result = CompetitionResult(
        n=n,
        alpha=alpha,
        c=c,
        f1_n=f1_n,
        f1_nc=order_stat(family, 1, n + c),
        f2_nc=second(n + c),
        f2_prev=second(n + c - 1),
        lower_bound=lower,
        upper_bound=upper,
    )
    logger.info(f"C({n}, {alpha}) = {c}")
    return result


def competition_sweep(
    ns: Iterable[int],
    alphas: Iterable[float],
    n_jobs: int = 1,
    config: Optional[CompetitionConfig] = None,
) -> List[CompetitionResult]:
    """C(n, alpha) over a grid, ordered by (n, alpha)."""
    pairs = [(n, alpha) for n in ns for alpha in alphas]
    return Parallel(n_jobs=n_jobs)(delayed(competition_constant)(n, alpha, config) for n, alpha in pairs)
