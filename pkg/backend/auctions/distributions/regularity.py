"""
Regularity machinery: hazard, virtual value, revenue curve and monopoly pricing.

Mathematical Framework:
-----------------------
    phi(v)  = v - (1 - F(v)) / f(v)                  virtual value
    R(q)    = q * F^{-1}(1 - q)                      revenue curve
    F is alpha-strongly regular iff phi'(v) >= alpha (regular: alpha = 0, MHR: alpha = 1)
    Gamma_alpha(x) = (1 + (1 - alpha) x)^(-1/(1 - alpha)),  Gamma_1(x) = exp(-x)

An alpha-strongly regular survival curve through two anchors (v_low, s_low),
(v_high, s_high) is bounded by s_low * Gamma_alpha(Gamma_alpha^{-1}(s_high / s_low)
* (v - v_low) / (v_high - v_low)); the generalized Pareto family meets it with equality.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import optimize

from ..core import (
    DomainError,
    NoDensityError,
    ParameterError,
    RegularityError,
    RevenueCurvePoint,
    UnboundedRevenueError,
)
from .families import ArrayLike, Marginal, TwoPoint

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 512


@dataclass(frozen=True)
class Monopoly:
    """
    Optimal posted price for a single bidder.

    Attributes:
        reserve: Revenue-maximizing price (inf when only approached in the limit)
        revenue: Maximum revenue OPT_1(F)
        quantile: Sale probability at the reserve
    """

    reserve: float
    revenue: float
    quantile: float

    def __iter__(self):
        # unpacks as (reserve, revenue)
        return iter((self.reserve, self.revenue))


def _require_density(marginal: Marginal) -> None:
    if not marginal.has_density:
        raise NoDensityError(marginal.kind.value)


def virtual_value(marginal: Marginal, v: ArrayLike) -> ArrayLike:
    """
    Myerson virtual value v - (1 - F(v)) / f(v).

    Args:
        marginal: Atomless marginal
        v: Value(s) inside the support

    Returns:
        Virtual value(s), scalar for scalar input

    Raises:
        NoDensityError: Atom-bearing family
        DomainError: Value outside the support, where the hazard is undefined
    """
    _require_density(marginal)
    arr = np.asarray(v, dtype=float)
    if np.any(arr < marginal.lower) or np.any(arr > marginal.upper):
        raise DomainError("hazard undefined: value outside the support")
    phi = arr - marginal._inverse_hazard(arr)
    return float(phi) if arr.ndim == 0 else phi


def hazard_rate(marginal: Marginal, v: ArrayLike) -> ArrayLike:
    """f(v) / (1 - F(v))."""
    _require_density(marginal)
    arr = np.asarray(v, dtype=float)
    if np.any(arr < marginal.lower) or np.any(arr > marginal.upper):
        raise DomainError("hazard undefined: value outside the support")
    with np.errstate(divide="ignore"):
        h = 1.0 / marginal._inverse_hazard(arr)
    return float(h) if arr.ndim == 0 else h


def default_grid(marginal: Marginal, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Log-spaced survival levels from 0.999 down to 1e-6 mapped to values."""
    if points < 2:
        raise ParameterError("points", f"out of range: {points} (need >= 2)")
    levels = np.geomspace(0.999, 1e-6, points)
    return np.asarray(marginal.isf(levels), dtype=float)


def strong_regularity_coefficient(marginal: Marginal, grid: Optional[Sequence[float]] = None) -> float:
    """
    Smallest slope of the virtual value between consecutive grid points.

    An estimate of the largest alpha for which the marginal is
    alpha-strongly regular on the grid.

    Args:
        marginal: Atomless marginal
        grid: Strictly increasing support-interior values (default: 512 points)

    Returns:
        min over consecutive pairs of (phi(v') - phi(v)) / (v' - v)
    """
    _require_density(marginal)
    values = default_grid(marginal) if grid is None else np.asarray(grid, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise DomainError("grid needs at least two points")
    if np.any(np.diff(values) <= 0):
        raise DomainError("grid must be strictly increasing")
    if np.any(values <= marginal.lower) or np.any(values >= marginal.upper):
        raise DomainError("grid must lie inside the support")

    phi = virtual_value(marginal, values)
    return float(np.min(np.diff(phi) / np.diff(values)))


def is_regular(marginal: Marginal, grid: Optional[Sequence[float]] = None, tol: float = 1e-9) -> bool:
    """Virtual value nondecreasing on the grid."""
    if not marginal.has_density:
        return False
    return strong_regularity_coefficient(marginal, grid) >= -tol


def is_mhr(marginal: Marginal, grid: Optional[Sequence[float]] = None, tol: float = 1e-9) -> bool:
    """Monotone hazard rate, i.e. 1-strong regularity."""
    if not marginal.has_density:
        return False
    return strong_regularity_coefficient(marginal, grid) >= 1.0 - tol


def gamma_alpha(alpha: float, x: ArrayLike, inverse: bool = False) -> ArrayLike:
    """
    Tail envelope function Gamma_alpha or its inverse.

    Args:
        alpha: Coefficient in [0, 1]
        x: x >= 0 (forward) or x in (0, 1] (inverse)
        inverse: Evaluate Gamma_alpha^{-1}

    Returns:
        Gamma_alpha(x) or Gamma_alpha^{-1}(x)
    """
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError("alpha", f"out of range: {alpha} not in [0, 1]")
    arr = np.asarray(x, dtype=float)

    if inverse:
        if np.any(arr <= 0.0) or np.any(arr > 1.0):
            raise DomainError("inverse Gamma_alpha needs x in (0, 1]")
        if alpha == 1.0:
            out = -np.log(arr)
        else:
            out = np.expm1(-(1.0 - alpha) * np.log(arr)) / (1.0 - alpha)
    else:
        if np.any(arr < 0.0):
            raise DomainError("Gamma_alpha needs x >= 0")
        if alpha == 1.0:
            out = np.exp(-arr)
        else:
            out = np.exp(-np.log1p((1.0 - alpha) * arr) / (1.0 - alpha))

    return float(out) if arr.ndim == 0 else out


def tail_envelope(
    alpha: float,
    v: ArrayLike,
    v_low: float,
    s_low: float,
    v_high: float,
    s_high: float,
) -> ArrayLike:
    """
    Survival envelope of alpha-strongly regular curves through two anchors.

    Args:
        alpha: Strong-regularity coefficient
        v: Value(s) at or above v_low
        v_low, s_low: Lower anchor (value, survival)
        v_high, s_high: Upper anchor with v_high > v_low and 0 < s_high <= s_low

    Returns:
        s_low * Gamma_alpha(Gamma_alpha^{-1}(s_high / s_low) * (v - v_low) / (v_high - v_low))
    """
    if not v_high > v_low:
        raise DomainError("anchors need v_high > v_low")
    if not 0.0 < s_high <= s_low <= 1.0:
        raise DomainError("anchors need 0 < s_high <= s_low <= 1")
    arr = np.asarray(v, dtype=float)
    if np.any(arr < v_low):
        raise DomainError("envelope defined only at or above v_low")
    slope = gamma_alpha(alpha, s_high / s_low, inverse=True) / (v_high - v_low)
    out = s_low * np.asarray(gamma_alpha(alpha, slope * (arr - v_low)))
    return float(out) if arr.ndim == 0 else out


# ==========================================
# Revenue curve and monopoly pricing
# ==========================================


def revenue_values(marginal: Marginal, q: ArrayLike) -> np.ndarray:
    """Vectorized R(q) = q F^{-1}(1 - q) with R(0) the far-tail limit."""
    arr = np.atleast_1d(np.asarray(q, dtype=float))
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise DomainError("sale probability outside [0, 1]")
    out = np.full(arr.shape, marginal.top_revenue)
    positive = arr > 0.0
    out[positive] = arr[positive] * marginal._isf(arr[positive])
    return out


def revenue_curve(marginal: Marginal, q: float) -> RevenueCurvePoint:
    """One point of the revenue curve."""
    return RevenueCurvePoint(quantile=float(q), revenue=float(revenue_values(marginal, q)[0]))


def monopoly(marginal: Marginal) -> Monopoly:
    """
    Revenue-maximizing posted price for one bidder.

    Bootstraps on a mixed log/linear quantile grid, then refines the best
    bracket with scipy's bounded golden-section/Brent search.

    Returns:
        Monopoly(reserve, revenue, quantile)

    Raises:
        UnboundedRevenueError: Revenue curve without a finite maximum
    """
    if isinstance(marginal, TwoPoint):
        high = marginal.high_value
        return Monopoly(reserve=high, revenue=marginal.high_prob * high, quantile=marginal.high_prob)

    grid = np.unique(np.concatenate([np.geomspace(1e-9, 1.0, 600), np.linspace(1e-3, 1.0, 1000)]))
    revenue = revenue_values(marginal, grid)
    if not np.all(np.isfinite(revenue)):
        raise UnboundedRevenueError(f"revenue unbounded for {marginal.kind.value}")

    best = float(revenue.max())
    # flat curves resolve toward the largest sale probability
    ties = np.flatnonzero(revenue >= best - 1e-12 * max(1.0, abs(best)))
    i = int(ties[-1])

    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    q_star, r_star = float(grid[i]), float(revenue[i])
    if hi > lo:
        result = optimize.minimize_scalar(
            lambda q: -float(revenue_values(marginal, q)[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-13},
        )
        if -result.fun > r_star + 1e-12 * max(1.0, abs(r_star)):
            q_star, r_star = float(result.x), float(-result.fun)

    if marginal.top_revenue > r_star + 1e-12:
        # supremum approached only as the price grows without bound
        logger.info(f"Monopoly revenue of {marginal.kind.value} attained only in the limit")
        return Monopoly(reserve=math.inf, revenue=marginal.top_revenue, quantile=0.0)

    return Monopoly(reserve=float(marginal.isf(q_star)), revenue=r_star, quantile=q_star)


def two_point_auxiliary(marginal: Marginal) -> TwoPoint:
    """Two-point distribution with atoms at 0 and OPT_1(F), each of mass 1/2."""
    return TwoPoint(high_value=monopoly(marginal).revenue, high_prob=0.5)


def mass_above_monopoly_revenue(marginal: Marginal) -> float:
    """P(V >= OPT_1(F)); at least 1/2 for every regular marginal."""
    return marginal.tail_mass(monopoly(marginal).revenue)


def require_regular(marginals: Union[Marginal, Sequence[Marginal]]) -> None:
    """Reject any marginal whose virtual value decreases on the default grid."""
    items = [marginals] if isinstance(marginals, Marginal) else list(marginals)
    for marginal in items:
        if not marginal.has_density:
            raise RegularityError(f"{marginal.kind.value} has no density; regularity undefined")
        if not is_regular(marginal):
            raise RegularityError(f"{marginal.kind.value} {marginal.params()} is not regular")
