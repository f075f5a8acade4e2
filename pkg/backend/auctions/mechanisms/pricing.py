"""
Optimal separate and bundle pricing: SRev and BRev.

SRev runs Myerson's auction item by item. With one bidder that is the
monopoly price; with n bidders it is the expected positive virtual surplus
E[sum_j max_i phi_j(v_ij)^+] plus n * R_j(0) for families whose revenue curve
keeps mass at q -> 0 (the virtual-surplus integral misses that boundary term).

BRev runs the revenue-optimal single-item auction on the grand bundle. The
price (one bidder) or reserve (several bidders) is optimized on one half of
the draws and evaluated on an independent half.
"""

import logging
from functools import partial
from typing import Optional

import numpy as np

from ..core import Estimate, EstimateMethod, ParameterError, SampleConfig
from ..distributions import Marginal, ProductPrior, monopoly, require_regular
from ..sampling import draw_all, monte_carlo
from .simple import top_two

logger = logging.getLogger(__name__)

TRAIN_STREAM = 1
EVAL_STREAM = 2
PRICE_STREAM = 3
RESERVE_CANDIDATES = 256


def phi_plus(prior: ProductPrior, values: np.ndarray) -> np.ndarray:
    """Positive part of each item's virtual value; trailing axis indexes items."""
    out = np.empty_like(values)
    for j, marginal in enumerate(prior.marginals):
        v = values[..., j]
        out[..., j] = np.maximum(v - marginal._inverse_hazard(v), 0.0)
    return out


def phi_plus_heavy(marginal: Marginal) -> bool:
    """Whether max phi^+ has infinite variance."""
    if marginal.tail_exponent >= 1.0:
        # built-in families with gamma = 1 have phi <= 0
        return False
    return not marginal.has_finite_moment(1, power=2)


def _srev_draw(prior: ProductPrior, bidders: int, rng: np.random.Generator, batch: int) -> np.ndarray:
    values = prior.sample(rng, (batch, bidders))
    return phi_plus(prior, values).max(axis=1).sum(axis=1)


def eval_srev(prior: ProductPrior, bidders: int, cfg: SampleConfig) -> Estimate:
    """
    Optimal revenue from selling items separately.

    Args:
        prior: Item value distribution
        bidders: Number of bidders
        cfg: Sampling configuration (unused with one bidder)

    Returns:
        Closed-form estimate for one bidder, Monte Carlo otherwise
    """
    if bidders < 1:
        raise ParameterError("bidders", f"out of range: {bidders} (must be >= 1)")

    if bidders == 1:
        results = [monopoly(marginal) for marginal in prior.marginals]
        return Estimate.exact(
            sum(r.revenue for r in results),
            seed=cfg.seed,
            reserves=[r.reserve for r in results],
        )

    require_regular(prior.marginals)
    cfg = cfg.capped(bidders * prior.m)
    boundary = float(bidders * prior.top_revenues.sum())
    estimate = monte_carlo(
        partial(_srev_draw, prior, bidders),
        cfg,
        heavy_tailed=any(phi_plus_heavy(marginal) for marginal in prior.marginals),
        label=f"SREV_{bidders}",
    )
    if boundary == 0.0:
        return estimate
    return Estimate(
        mean=estimate.mean + boundary,
        stderr=estimate.stderr,
        samples=estimate.samples,
        seed=estimate.seed,
        method=estimate.method,
        flags=estimate.flags,
        details={**estimate.details, "boundary": boundary},
    )


# ==========================================
# Bundle pricing
# ==========================================


def _bundle_draw(prior: ProductPrior, bidders: int, rng: np.random.Generator, batch: int) -> np.ndarray:
    return prior.sample(rng, (batch, bidders)).sum(axis=2)


def _posted_price_draw(prior: ProductPrior, price: float, rng: np.random.Generator, batch: int) -> np.ndarray:
    bundles = prior.sample(rng, batch).sum(axis=1)
    return np.where(bundles >= price, price, 0.0)


def _reserve_draw(prior: ProductPrior, bidders: int, reserve: float, rng: np.random.Generator, batch: int) -> np.ndarray:
    top, second = top_two(_bundle_draw(prior, bidders, rng, batch), axis=1)
    return _reserve_revenue(top, second, reserve)


def _reserve_revenue(top: np.ndarray, second: np.ndarray, reserve: float) -> np.ndarray:
    return np.where(top >= reserve, np.maximum(second, reserve), 0.0)


def _halves(cfg: SampleConfig):
    train = max(1, cfg.samples // 2)
    evaluate = max(1, cfg.samples - train)
    return cfg.with_samples(train), cfg.with_samples(evaluate)


def best_posted_price(bundles: np.ndarray) -> float:
    """
    Sample point maximizing p * (empirical P(bundle >= p)).

    Candidates need at least sqrt(N) training sales; the extreme order
    statistics of heavy tails would otherwise win by luck.
    """
    ordered = np.sort(bundles)
    at_or_above = ordered.size - np.searchsorted(ordered, ordered, side="left")
    revenue = ordered * at_or_above / ordered.size
    revenue[at_or_above < max(1, int(np.sqrt(ordered.size)))] = -np.inf
    return float(ordered[int(np.argmax(revenue))])


def best_reserve(bundles: np.ndarray) -> float:
    """Reserve maximizing empirical second-price-with-reserve revenue."""
    top, second = top_two(bundles, axis=1)
    candidates = np.unique(np.concatenate([[0.0], np.quantile(top, np.linspace(0.0, 0.999, RESERVE_CANDIDATES))]))
    revenues = [float(_reserve_revenue(top, second, r).mean()) for r in candidates]
    return float(candidates[int(np.argmax(revenues))])


def bundle_price_revenue(prior: ProductPrior, price: float, cfg: SampleConfig) -> Estimate:
    """Revenue of posting one price for the grand bundle to a single bidder."""
    if price < 0:
        raise ParameterError("price", f"out of range: {price} (must be >= 0)")
    draw = partial(_posted_price_draw, prior, price)
    estimate = monte_carlo(draw, cfg.capped(prior.m), stream=PRICE_STREAM, label="bundle price")
    return Estimate(
        mean=estimate.mean,
        stderr=estimate.stderr,
        samples=estimate.samples,
        seed=estimate.seed,
        method=estimate.method,
        details={"price": price},
    )


def eval_brev(prior: ProductPrior, bidders: int, cfg: SampleConfig, price: Optional[float] = None) -> Estimate:
    """
    Optimal revenue from selling the grand bundle.

    Args:
        prior: Item value distribution
        bidders: Number of bidders
        cfg: Sampling configuration; half the draws pick the price/reserve,
            the other half evaluate it
        price: Fixed bundle price for one bidder (skips the optimization)

    Returns:
        Estimate with the chosen price or reserve in `details`
    """
    if bidders < 1:
        raise ParameterError("bidders", f"out of range: {bidders} (must be >= 1)")
    if price is not None:
        if bidders != 1:
            raise ParameterError("price", "a fixed bundle price applies to a single bidder")
        return bundle_price_revenue(prior, price, cfg)

    train_cfg, eval_cfg = _halves(cfg.capped(bidders * prior.m))
    bundles = draw_all(partial(_bundle_draw, prior, bidders), train_cfg, stream=TRAIN_STREAM).reshape(-1, bidders)

    if bidders == 1:
        chosen = best_posted_price(bundles[:, 0])
        logger.info(f"BRev price {chosen:.6g} from {bundles.shape[0]} training draws")
        estimate = monte_carlo(partial(_posted_price_draw, prior, chosen), eval_cfg, stream=EVAL_STREAM, label="BREV_1")
        key = "price"
    else:
        chosen = best_reserve(bundles)
        logger.info(f"BRev reserve {chosen:.6g} for {bidders} bidders")
        estimate = monte_carlo(
            partial(_reserve_draw, prior, bidders, chosen),
            eval_cfg,
            stream=EVAL_STREAM,
            heavy_tailed=prior.tail_exponent >= 1.0,
            label=f"BREV_{bidders}",
        )
        key = "reserve"

    return Estimate(
        mean=estimate.mean,
        stderr=estimate.stderr,
        samples=estimate.samples,
        seed=estimate.seed,
        method=EstimateMethod.MONTE_CARLO,
        flags=estimate.flags,
        details={**estimate.details, key: chosen},
    )
