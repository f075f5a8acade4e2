"""
Mechanism Evaluation Layer

Implements:
- Welfare, VCG and bundle second-price auction (Monte Carlo and quadrature)
- Optimal separate and bundle pricing (SRev, BRev)
- Quantile-duality benchmark and core-tail bounds
- Two-part tariff, bundling gap and bundle hazard profile
"""

from .benchmarks import UpperBoundReport, eval_cdw, eval_core, revenue_upper_bounds
from .hazard import HazardProfile, bundle_hazard_profile
from .pricing import best_posted_price, best_reserve, bundle_price_revenue, eval_brev, eval_srev, phi_plus
from .simple import eval_simple, infinite_estimate, top_two
from .tariff import BundlingGap, bundling_gap_experiment, tariff_fee, two_part_tariff

__all__ = [
    "UpperBoundReport",
    "eval_cdw",
    "eval_core",
    "revenue_upper_bounds",
    "HazardProfile",
    "bundle_hazard_profile",
    "best_posted_price",
    "best_reserve",
    "bundle_price_revenue",
    "eval_brev",
    "eval_srev",
    "phi_plus",
    "eval_simple",
    "infinite_estimate",
    "top_two",
    "BundlingGap",
    "bundling_gap_experiment",
    "tariff_fee",
    "two_part_tariff",
]
