"""
Two-part tariff and the bundling gap.

Two-part tariff (n i.i.d. bidders, m items):
    fee      E = max(0, m * (z_n / n - eps)),   z_n = F_{1:n} - F_{2:n}
    opt-in   bidder i pays E iff  sum_j (v_ij - max_{i' != i} v_i'j)^+ >= E
    revenue  fees collected + per-item second price among participants

Participation is decided ex post on realized surplus, which lower-bounds the
revenue of the ex-ante equilibrium as m grows.
"""

import logging
from dataclasses import dataclass
from functools import partial

import numpy as np

from ..analysis import order_stat
from ..core import Estimate, MechanismKind, ParameterError, SampleConfig
from ..distributions import ProductPrior, Uniform, iid_prior
from ..sampling import monte_carlo
from .simple import eval_simple, top_two

logger = logging.getLogger(__name__)


def tariff_fee(prior: ProductPrior, bidders: int, epsilon: float) -> tuple:
    """(entry fee, z_n) for an i.i.d. prior."""
    marginal = prior.marginals[0]
    z_n = order_stat(marginal, 1, bidders) - order_stat(marginal, 2, bidders)
    return max(0.0, prior.m * (z_n / bidders - epsilon)), z_n


def _tariff_draw(prior: ProductPrior, bidders: int, fee: float, rng: np.random.Generator, batch: int) -> np.ndarray:
    values = prior.sample(rng, (batch, bidders))
    top, second = top_two(values, axis=1)
    is_top = values == top[:, None, :]
    surplus = np.where(is_top, values - second[:, None, :], 0.0).sum(axis=2)
    joins = surplus >= fee

    # fewer than two participants on an item means a zero price
    among = np.where(joins[..., None], values, -np.inf)
    second_among = top_two(among, axis=1)[1]
    payments = np.where(np.isfinite(second_among), second_among, 0.0).sum(axis=1)
    return fee * joins.sum(axis=1) + payments


def two_part_tariff(prior: ProductPrior, bidders: int, epsilon: float, cfg: SampleConfig) -> Estimate:
    """
    Revenue of the entry-fee plus per-item second-price mechanism.

    Args:
        prior: I.i.d. item value distribution
        bidders: Number of bidders
        epsilon: Fee discount per item, > 0
        cfg: Sampling configuration

    Returns:
        Estimate with `fee` and `z_n` in details

    Raises:
        ParameterError: Non-identical marginals or epsilon <= 0
    """
    if bidders < 1:
        raise ParameterError("bidders", f"out of range: {bidders} (must be >= 1)")
    if epsilon <= 0:
        raise ParameterError("epsilon", f"out of range: {epsilon} (must be > 0)")
    if not prior.is_iid:
        raise ParameterError("prior", "two-part tariff needs identical marginals")

    cfg = cfg.capped(bidders * prior.m)
    fee, z_n = tariff_fee(prior, bidders, epsilon)
    logger.info(f"Tariff with {bidders} bidders, m={prior.m}: fee {fee:.6g} (z_n={z_n:.6g})")

    estimate = monte_carlo(
        partial(_tariff_draw, prior, bidders, fee),
        cfg,
        heavy_tailed=not prior.marginals[0].has_finite_moment(2, power=2),
        label=f"tariff_{bidders}",
    )
    return Estimate(
        mean=estimate.mean,
        stderr=estimate.stderr,
        samples=estimate.samples,
        seed=estimate.seed,
        method=estimate.method,
        flags=estimate.flags,
        details={**estimate.details, "fee": fee, "z_n": z_n, "epsilon": epsilon},
    )


@dataclass(frozen=True)
class BundlingGap:
    """
    Per-item BSPA with extra bidders against per-item welfare without them.

    Attributes:
        m: Number of Uniform(0, 1) items
        bspa_per_item: BSPA(base + extra) / m
        wel_per_item: WEL(base) / m
        bspa_stderr: Standard error of bspa_per_item
        wel_stderr: Standard error of wel_per_item
    """

    m: int
    bspa_per_item: float
    wel_per_item: float
    bspa_stderr: float
    wel_stderr: float

    @property
    def separation(self) -> float:
        """(wel - bspa) in units of the combined standard error."""
        spread = float(np.hypot(self.bspa_stderr, self.wel_stderr))
        gap = self.wel_per_item - self.bspa_per_item
        return gap / spread if spread > 0 else float(np.sign(gap) * np.inf)


def bundling_gap_experiment(m: int, base_bidders: int, extra_bidders: int, cfg: SampleConfig) -> BundlingGap:
    """Bundle second price with base + extra bidders vs welfare with base bidders, Uniform(0, 1)^m."""
    if m < 1:
        raise ParameterError("m", f"out of range: {m} (must be >= 1)")
    if base_bidders < 2:
        raise ParameterError("base_bidders", f"out of range: {base_bidders} (must be >= 2)")
    if extra_bidders < 0:
        raise ParameterError("extra_bidders", f"out of range: {extra_bidders} (must be >= 0)")

    prior = iid_prior(Uniform(), m)
    bspa = eval_simple(MechanismKind.BSPA, prior, base_bidders + extra_bidders, cfg).scaled(1.0 / m)
    wel = eval_simple(MechanismKind.WEL, prior, base_bidders, cfg).scaled(1.0 / m)
    return BundlingGap(m, bspa.mean, wel.mean, bspa.stderr, wel.stderr)
