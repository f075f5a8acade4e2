"""
Order Statistics and Competition Complexity

Implements:
- Quantile-space quadrature with tail substitution
- Expected order statistics (closed forms and quadrature)
- Three-interval crossing structure of order-statistic densities
- The competition-complexity constant C(n, alpha) and its bounds
"""

from .competition import (
    CompetitionConfig,
    competition_constant,
    competition_constant_bounds,
    competition_sweep,
    gp_max_bounds,
)
from .order_stats import (
    OrderStatQuery,
    expected_order_stat,
    harmonic,
    harmonic_exact,
    order_stat,
    order_stat_density,
    order_stat_finite_variance,
    sampled_order_stat,
    three_interval_crossings,
)
from .quadrature import QuadratureResult, integrate_quantile

__all__ = [
    "CompetitionConfig",
    "competition_constant",
    "competition_constant_bounds",
    "competition_sweep",
    "gp_max_bounds",
    "OrderStatQuery",
    "expected_order_stat",
    "harmonic",
    "harmonic_exact",
    "order_stat",
    "order_stat_density",
    "order_stat_finite_variance",
    "sampled_order_stat",
    "three_interval_crossings",
    "QuadratureResult",
    "integrate_quantile",
]
