"""
Empirical hazard rate of the bundle sum.

Sums of independent MHR values are MHR. The profile bins the bundle sum up to
an upper quantile and estimates the hazard on each bin as

    h_b = (draws in bin b) / (draws at or above the bin's left edge * width)

with a binomial band of z standard deviations. The profile is nondecreasing
when no bin falls below the running maximum of earlier lower band edges.
"""

import logging
from dataclasses import dataclass
from functools import partial
from typing import Optional

import numpy as np

from ..core import ParameterError, SampleConfig
from ..distributions import ProductPrior
from ..sampling import draw_all

logger = logging.getLogger(__name__)

HAZARD_STREAM = 6


@dataclass
class HazardProfile:
    """
    Binned hazard estimate of the bundle sum.

    Attributes:
        edges: Bin edges, length bins + 1
        hazard: Hazard estimate per bin
        band: Half-width of the z-sigma binomial band per bin
        at_risk: Draws at or above each bin's left edge
        max_violation: Largest drop of an upper band edge below the running
            maximum of earlier lower band edges (0 when monotone)
    """

    edges: np.ndarray
    hazard: np.ndarray
    band: np.ndarray
    at_risk: np.ndarray
    max_violation: float

    @property
    def is_nondecreasing(self) -> bool:
        return self.max_violation <= 0.0

    @property
    def first_violation(self) -> Optional[int]:
        drops = _drops(self.hazard, self.band)
        bad = np.flatnonzero(drops > 0.0)
        return int(bad[0]) if bad.size else None


def _drops(hazard: np.ndarray, band: np.ndarray) -> np.ndarray:
    floor = np.maximum.accumulate(hazard - band)
    drops = np.zeros_like(hazard)
    drops[1:] = floor[:-1] - (hazard[1:] + band[1:])
    return drops


def _sum_draw(prior: ProductPrior, rng: np.random.Generator, batch: int) -> np.ndarray:
    return prior.sample(rng, batch).sum(axis=1)


def bundle_hazard_profile(
    prior: ProductPrior,
    cfg: SampleConfig,
    bins: int = 200,
    upper_quantile: float = 0.99,
    z: float = 4.0,
) -> HazardProfile:
    """
    Histogram-ratio hazard of the sum of item values.

    Args:
        prior: Item value distribution
        cfg: Sampling configuration (one draw of the bundle per sample)
        bins: Number of equal-width bins
        upper_quantile: Empirical quantile of the last bin edge
        z: Band width in binomial standard deviations

    Returns:
        HazardProfile
    """
    if bins < 2:
        raise ParameterError("bins", f"out of range: {bins} (must be >= 2)")
    if not 0.0 < upper_quantile < 1.0:
        raise ParameterError("upper_quantile", f"out of range: {upper_quantile} not in (0, 1)")

    sums = np.sort(draw_all(partial(_sum_draw, prior), cfg.capped(prior.m), stream=HAZARD_STREAM))
    edges = np.linspace(sums[0], float(np.quantile(sums, upper_quantile)), bins + 1)
    width = edges[1] - edges[0]

    at_risk = sums.size - np.searchsorted(sums, edges[:-1], side="left")
    counts = np.diff(np.searchsorted(sums, edges, side="left"))
    p = counts / at_risk
    hazard = p / width
    band = z * np.sqrt(p * (1.0 - p) / at_risk) / width

    max_violation = float(_drops(hazard, band).max())
    if max_violation > 0.0:
        logger.warning(f"Bundle hazard drops by {max_violation:.4g} beyond a {z}-sigma band")
    return HazardProfile(edges, hazard, band, at_risk, max(max_violation, 0.0))
