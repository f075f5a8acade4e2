"""
Competition-complexity lab for multi-item auctions.

Numerical evaluation of welfare, VCG, bundle auctions, optimal separate and
bundle pricing and the quantile-duality benchmark, plus the competition
constant C(n, alpha), the quantile game and the verification suites.
"""

from .core import (
    AuctionLabError,
    CompetitionResult,
    CoreVariant,
    Estimate,
    EstimateMethod,
    MechanismKind,
    ParameterError,
    SampleConfig,
)

__version__ = "1.0.0"

__all__ = [
    "AuctionLabError",
    "CompetitionResult",
    "CoreVariant",
    "Estimate",
    "EstimateMethod",
    "MechanismKind",
    "ParameterError",
    "SampleConfig",
]
