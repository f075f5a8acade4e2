"""
Welfare, VCG and bundle second-price auction.

With n bidders, m items and values v_ij:
    WEL  = E[sum_j max_i v_ij]
    VCG  = E[sum_j second_i v_ij]         (per-item second-price auctions)
    BSPA = E[second_i sum_j v_ij]         (second price on the grand bundle)
"""

import logging
from functools import partial
from typing import Tuple, Union

import numpy as np

from ..analysis import order_stat
from ..core import INFINITE_FLAG, Estimate, EstimateMethod, MechanismKind, ParameterError, SampleConfig
from ..distributions import ProductPrior
from ..sampling import monte_carlo

logger = logging.getLogger(__name__)


def top_two(x: np.ndarray, axis: int) -> Tuple[np.ndarray, np.ndarray]:
    """Highest and second-highest along an axis (second is 0 for a single entry)."""
    size = x.shape[axis]
    if size == 1:
        top = np.take(x, 0, axis=axis)
        return top, np.zeros_like(top)
    part = np.partition(x, (size - 2, size - 1), axis=axis)
    return np.take(part, size - 1, axis=axis), np.take(part, size - 2, axis=axis)


def _welfare_draw(prior: ProductPrior, bidders: int, rng: np.random.Generator, batch: int) -> np.ndarray:
    values = prior.sample(rng, (batch, bidders))
    return values.max(axis=1).sum(axis=1)


def _vcg_draw(prior: ProductPrior, bidders: int, rng: np.random.Generator, batch: int) -> np.ndarray:
    values = prior.sample(rng, (batch, bidders))
    return top_two(values, axis=1)[1].sum(axis=1)


def _bspa_draw(prior: ProductPrior, bidders: int, rng: np.random.Generator, batch: int) -> np.ndarray:
    bundles = prior.sample(rng, (batch, bidders)).sum(axis=2)
    return top_two(bundles, axis=1)[1]


_DRAWS = {
    MechanismKind.WEL: _welfare_draw,
    MechanismKind.VCG: _vcg_draw,
    MechanismKind.BSPA: _bspa_draw,
}


def infinite_estimate(cfg: SampleConfig, reason: str) -> Estimate:
    logger.warning(f"Divergent expectation: {reason}")
    return Estimate(
        mean=float("inf"),
        stderr=0.0,
        samples=0,
        seed=cfg.seed,
        method=EstimateMethod.CLOSED_FORM,
        flags=(INFINITE_FLAG,),
        details={"reason": reason},
    )


def eval_simple(
    kind: Union[MechanismKind, str],
    prior: ProductPrior,
    bidders: int,
    cfg: SampleConfig,
) -> Estimate:
    """
    Evaluate WEL, VCG or BSPA.

    Args:
        kind: WEL, VCG or BSPA
        prior: Item value distribution (shared by all bidders)
        bidders: Number of bidders
        cfg: Sampling configuration; method=quadrature selects the
            order-statistic path (any m for WEL/VCG, m = 1 for BSPA)

    Returns:
        Estimate; infinite welfare is reported with the "infinite" flag
    """
    kind = MechanismKind(kind) if isinstance(kind, str) else kind
    if kind not in _DRAWS:
        raise ParameterError("kind", f"unsupported by eval_simple: {kind.value}")
    if bidders < 1:
        raise ParameterError("bidders", f"out of range: {bidders} (must be >= 1)")
    cfg = cfg.capped(bidders * prior.m)
    if kind is not MechanismKind.WEL and bidders == 1:
        # no competitor, so the second price is zero
        return Estimate.exact(0.0, seed=cfg.seed)

    rank = 1 if kind is MechanismKind.WEL else 2
    if kind is MechanismKind.BSPA:
        finite_mean = rank > prior.tail_exponent
        finite_var = rank > 2 * prior.tail_exponent
    else:
        finite_mean = all(marginal.has_finite_moment(rank) for marginal in prior.marginals)
        finite_var = all(marginal.has_finite_moment(rank, power=2) for marginal in prior.marginals)
    if not finite_mean:
        return infinite_estimate(cfg, f"{kind.value} with rank {rank} diverges")

    quadrature = cfg.method is EstimateMethod.QUADRATURE or (prior.m == 1 and not finite_var)
    if quadrature:
        if kind is not MechanismKind.BSPA or prior.m == 1:
            value = sum(order_stat(marginal, rank, bidders) for marginal in prior.marginals)
            return Estimate.exact(value, method=EstimateMethod.QUADRATURE, seed=cfg.seed)
        logger.info(f"BSPA on {prior.m} items has no quadrature path; using Monte Carlo")

    return monte_carlo(
        partial(_DRAWS[kind], prior, bidders),
        cfg,
        heavy_tailed=not finite_var,
        label=f"{kind.value}_{bidders}",
    )
