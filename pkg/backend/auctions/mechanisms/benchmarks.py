"""
Revenue upper bounds: the quantile-duality (CDW) benchmark and the core.

CDW with n bidders draws an n x m matrix of uniform quantiles q_ij and scores

    sum_j max_i [ phi_j(F_j^{-1}(q_ij))^+  if q_ij is bidder i's top quantile
                  F_j^{-1}(q_ij)            otherwise ]

For a single bidder the top item additionally carries R_j(0) = lim q F_j^{-1}(1-q),
the revenue of the far tail; for equal revenue this is what makes CDW_1 = OPT_1 = 1.

The core of a single bidder's values uses the threshold t = SRev_1:
    truncated:   E[sum_j v_j 1{v_j <= t}]
    conditional: E[sum_j v_j | v_j <= t for all j]
"""

import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, Optional, Union

import numpy as np

from ..analysis import integrate_quantile
from ..analysis.order_stats import _density_qs
from ..core import (
    CoreVariant,
    DegenerateCoreError,
    Estimate,
    EstimateMethod,
    MechanismKind,
    ParameterError,
    SampleConfig,
)
from ..distributions import ProductPrior, require_regular
from ..sampling import monte_carlo
from .pricing import eval_brev, eval_srev, phi_plus, phi_plus_heavy
from .simple import eval_simple

logger = logging.getLogger(__name__)

CORE_STREAM = 4
CONCENTRATION_STREAM = 5


def _top_items(quantiles: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Index of each row's largest quantile; ties broken uniformly at random."""
    top = quantiles.argmax(axis=-1)
    is_max = quantiles == quantiles.max(axis=-1, keepdims=True)
    tied = is_max.sum(axis=-1) > 1
    if np.any(tied):
        keys = np.where(is_max, rng.random(quantiles.shape), -1.0)
        top = np.where(tied, keys.argmax(axis=-1), top)
    return top


def _cdw_draw(prior: ProductPrior, bidders: int, rng: np.random.Generator, batch: int) -> np.ndarray:
    quantiles = rng.random((batch, bidders, prior.m))
    values = prior.values(quantiles)
    top = _top_items(quantiles, rng)
    is_top = np.arange(prior.m)[None, None, :] == top[..., None]
    score = np.where(is_top, phi_plus(prior, values), values).max(axis=1).sum(axis=1)
    if bidders == 1:
        score = score + prior.top_revenues[top[:, 0]]
    return score


def _cdw_quadrature(prior: ProductPrior, bidders: int, tol: float = 1e-9) -> float:
    marginal = prior.marginals[0]

    def positive_phi(v: float) -> float:
        return max(v - float(marginal._inverse_hazard(np.asarray(v))), 0.0)

    surplus = integrate_quantile(marginal, lambda q, s: _density_qs(1, bidders, q, s), transform=positive_phi, tol=tol)
    return surplus.value + marginal.top_revenue


def eval_cdw(prior: ProductPrior, bidders: int, cfg: SampleConfig) -> Estimate:
    """
    Quantile-duality upper bound on optimal revenue.

    Args:
        prior: Regular item value distribution
        bidders: Number of bidders
        cfg: Sampling configuration; single-item instances use quadrature
            when requested or when the values are heavy tailed

    Returns:
        Estimate of the benchmark
    """
    if bidders < 1:
        raise ParameterError("bidders", f"out of range: {bidders} (must be >= 1)")
    require_regular(prior.marginals)
    if bidders > 1 and np.any(prior.top_revenues > 0):
        raise ParameterError("bidders", "tail revenue at q -> 0 is only supported for a single bidder")

    if prior.m == 1 and (cfg.method is EstimateMethod.QUADRATURE or prior.tail_exponent >= 0.5):
        return Estimate.exact(_cdw_quadrature(prior, bidders), method=EstimateMethod.QUADRATURE, seed=cfg.seed)

    cfg = cfg.capped(bidders * prior.m)
    heavy = (prior.m >= 2 and prior.tail_exponent >= 1.0) or any(phi_plus_heavy(marginal) for marginal in prior.marginals)
    return monte_carlo(partial(_cdw_draw, prior, bidders), cfg, heavy_tailed=heavy, label=f"CDW_{bidders}")


# ==========================================
# Core
# ==========================================


def _core_draw(prior: ProductPrior, threshold: float, variant: CoreVariant, mass: np.ndarray, rng, batch: int) -> np.ndarray:
    u = rng.random((batch, prior.m))
    if variant is CoreVariant.CONDITIONAL:
        return prior.values(u * mass).sum(axis=1)
    values = prior.values(u)
    return np.where(values <= threshold, values, 0.0).sum(axis=1)


def eval_core(
    prior: ProductPrior,
    cfg: SampleConfig,
    variant: Union[CoreVariant, str] = CoreVariant.TRUNCATED,
) -> Estimate:
    """
    Core of a single bidder's values below the threshold SRev_1.

    Args:
        prior: Item value distribution
        cfg: Sampling configuration (method=quadrature integrates each item)
        variant: truncated (default) or conditional

    Returns:
        Estimate with the threshold in `details`

    Raises:
        DegenerateCoreError: Conditional variant with P(v_j <= t) = 0
    """
    variant = CoreVariant(variant) if isinstance(variant, str) else variant
    threshold = eval_srev(prior, 1, cfg).mean
    mass = np.array([float(marginal.cdf(threshold)) for marginal in prior.marginals])

    if variant is CoreVariant.CONDITIONAL and np.any(mass <= 0.0):
        raise DegenerateCoreError(f"degenerate core: P(v <= {threshold:.6g}) = 0 for item {int(np.argmin(mass))}")

    if cfg.method is EstimateMethod.QUADRATURE:
        total = 0.0
        for marginal, upper in zip(prior.marginals, mass):
            if upper <= 0.0:
                continue
            part = integrate_quantile(marginal, lambda q, s: 1.0, upper=float(upper)).value
            total += part / upper if variant is CoreVariant.CONDITIONAL else part
        return Estimate.exact(total, method=EstimateMethod.QUADRATURE, seed=cfg.seed, threshold=threshold)

    draw = partial(_core_draw, prior, threshold, variant, mass)
    estimate = monte_carlo(draw, cfg.capped(prior.m), stream=CORE_STREAM, label="CORE")
    return Estimate(
        mean=estimate.mean,
        stderr=estimate.stderr,
        samples=estimate.samples,
        seed=estimate.seed,
        method=estimate.method,
        details={"threshold": threshold, "variant": variant.value},
    )


# ==========================================
# Core-tail and separate-plus-bundle bounds on OPT_1
# ==========================================


@dataclass
class UpperBoundReport:
    """
    Computable upper bounds on single-bidder optimal revenue.

    Attributes:
        srev: SRev_1
        brev: BRev_1
        bspa2: BSPA with two bidders
        core: CORE_1 (truncated)
        separate_bundle_bound: 2 BRev_1 + 4 SRev_1
        core_tail_bound: 6 SRev_1 if CORE <= 4 SRev_1, else 2 SRev_1 + CORE
        case: "small_core" or "large_core"
        concentration: P(sum v >= 2/5 CORE) in the large-core case
    """

    srev: Estimate
    brev: Estimate
    bspa2: Estimate
    core: Estimate
    separate_bundle_bound: float
    core_tail_bound: float
    case: str
    concentration: Optional[Estimate] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def brev_ratio(self) -> float:
        """separate_bundle_bound / BRev_1 (at most 18 since 4 BRev_1 >= SRev_1)."""
        return self.separate_bundle_bound / self.brev.mean if self.brev.mean > 0 else math.inf

    @property
    def bspa_ratio(self) -> float:
        """core_tail_bound / BSPA_2 (at most 48)."""
        return self.core_tail_bound / self.bspa2.mean if self.bspa2.mean > 0 else math.inf

    def to_dict(self) -> Dict[str, Any]:
        return {
            "srev": self.srev.to_dict(),
            "brev": self.brev.to_dict(),
            "bspa2": self.bspa2.to_dict(),
            "core": self.core.to_dict(),
            "separate_bundle_bound": self.separate_bundle_bound,
            "core_tail_bound": self.core_tail_bound,
            "case": self.case,
            "concentration": self.concentration.to_dict() if self.concentration else None,
            "brev_ratio": self.brev_ratio,
            "bspa_ratio": self.bspa_ratio,
        }


def _concentration_draw(prior: ProductPrior, level: float, rng, batch: int) -> np.ndarray:
    return (prior.sample(rng, batch).sum(axis=1) >= level).astype(float)


def revenue_upper_bounds(prior: ProductPrior, cfg: SampleConfig) -> UpperBoundReport:
    """Core-tail split and the 2 BRev + 4 SRev bound for one bidder."""
    srev = eval_srev(prior, 1, cfg)
    brev = eval_brev(prior, 1, cfg)
    bspa2 = eval_simple(MechanismKind.BSPA, prior, 2, cfg)
    core = eval_core(prior, cfg, CoreVariant.TRUNCATED)

    separate_bundle = 2.0 * brev.mean + 4.0 * srev.mean
    if core.mean <= 4.0 * srev.mean:
        return UpperBoundReport(srev, brev, bspa2, core, separate_bundle, 6.0 * srev.mean, "small_core")

    level = 0.4 * core.mean
    draw = partial(_concentration_draw, prior, level)
    concentration = monte_carlo(draw, cfg.capped(prior.m), stream=CONCENTRATION_STREAM, label="concentration")
    logger.info(f"Large core: P(sum v >= {level:.4g}) = {concentration.mean:.4f}")
    return UpperBoundReport(srev, brev, bspa2, core, separate_bundle, 2.0 * srev.mean + core.mean, "large_core", concentration)
