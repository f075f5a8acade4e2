"""
Value Distributions

Implements:
- Built-in families with closed-form CDF, quantile and density
- Product priors over items
- Virtual values, strong regularity, revenue curves and monopoly pricing
- Gamma_alpha tail envelopes and the two-point auxiliary construction
"""

from .families import (
    EqualRevenue,
    Exponential,
    FamilyKind,
    FamilySpec,
    GeneralizedPareto,
    Marginal,
    ProductPrior,
    ShiftedExponential,
    TwoPoint,
    Uniform,
    iid_prior,
    make_marginal,
    make_prior,
)
from .regularity import (
    Monopoly,
    gamma_alpha,
    hazard_rate,
    is_mhr,
    is_regular,
    mass_above_monopoly_revenue,
    monopoly,
    require_regular,
    revenue_curve,
    revenue_values,
    strong_regularity_coefficient,
    tail_envelope,
    two_point_auxiliary,
    virtual_value,
)

__all__ = [
    "EqualRevenue",
    "Exponential",
    "FamilyKind",
    "FamilySpec",
    "GeneralizedPareto",
    "Marginal",
    "ProductPrior",
    "ShiftedExponential",
    "TwoPoint",
    "Uniform",
    "iid_prior",
    "make_marginal",
    "make_prior",
    "Monopoly",
    "gamma_alpha",
    "hazard_rate",
    "is_mhr",
    "is_regular",
    "mass_above_monopoly_revenue",
    "monopoly",
    "require_regular",
    "revenue_curve",
    "revenue_values",
    "strong_regularity_coefficient",
    "tail_envelope",
    "two_point_auxiliary",
    "virtual_value",
]
