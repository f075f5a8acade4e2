"""
Deterministic chunked Monte Carlo.

Draws are split into `chunks` substreams seeded from (seed, stream, chunk).
joblib returns chunk results in submission order and the reduction walks
them by chunk index, so an estimate depends only on its SampleConfig and
never on how many workers ran it.
"""

import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import Callable, List

import numpy as np
from joblib import Parallel, delayed

from .core import INFINITE_VARIANCE_FLAG, Estimate, EstimateMethod, SampleConfig

logger = logging.getLogger(__name__)

Statistic = Callable[[np.random.Generator, int], np.ndarray]


def substream(seed: int, chunk: int, stream: int = 0) -> np.random.Generator:
    """Generator for one chunk of one logical stream."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream, chunk)))


def derive_seed(*keys: int) -> int:
    """64-bit seed derived from a tuple of integers (e.g. base seed, m, cell)."""
    return int(np.random.SeedSequence(list(keys)).generate_state(1, dtype=np.uint64)[0])


def chunk_sizes(samples: int, chunks: int) -> List[int]:
    base, extra = divmod(samples, chunks)
    return [base + (1 if i < extra else 0) for i in range(chunks)]


@dataclass
class RunningMoments:
    """
    Mergeable count/mean/M2 accumulator with per-group sums.

    Attributes:
        count: Number of values
        mean: Running mean
        m2: Sum of squared deviations from the mean
        group_sums: Per-group value sums (median-of-means)
        group_counts: Per-group counts
    """

    count: int
    mean: float
    m2: float
    group_sums: np.ndarray
    group_counts: np.ndarray

    @classmethod
    def empty(cls, groups: int) -> "RunningMoments":
        return cls(0, 0.0, 0.0, np.zeros(groups), np.zeros(groups, dtype=np.int64))

    @classmethod
    def from_values(cls, values: np.ndarray, group_ids: np.ndarray, groups: int) -> "RunningMoments":
        count = int(values.size)
        if count == 0:
            return cls.empty(groups)
        mean = float(values.mean())
        m2 = float(np.sum((values - mean) ** 2))
        sums = np.bincount(group_ids, weights=values, minlength=groups)
        counts = np.bincount(group_ids, minlength=groups).astype(np.int64)
        return cls(count, mean, m2, sums, counts)

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        """Chan et al. pairwise update."""
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        total = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / total
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / total
        return RunningMoments(
            total,
            mean,
            m2,
            self.group_sums + other.group_sums,
            self.group_counts + other.group_counts,
        )

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return math.inf
        return math.sqrt(self.m2 / (self.count - 1) / self.count)

    def group_means(self) -> np.ndarray:
        filled = self.group_counts > 0
        return self.group_sums[filled] / self.group_counts[filled]


def _run_chunk(
    statistic: Statistic,
    seed: int,
    stream: int,
    chunk: int,
    size: int,
    offset: int,
    samples: int,
    groups: int,
    batch_size: int,
) -> RunningMoments:
    rng = substream(seed, chunk, stream)
    acc = RunningMoments.empty(groups)
    done = 0
    while done < size:
        batch = min(batch_size, size - done)
        values = np.asarray(statistic(rng, batch), dtype=float).reshape(-1)
        ids = (offset + done + np.arange(batch, dtype=np.int64)) * groups // samples
        acc = acc.merge(RunningMoments.from_values(values, ids, groups))
        done += batch
    return acc


def run_chunks(statistic: Statistic, cfg: SampleConfig, stream: int = 0) -> RunningMoments:
    """Evaluate a per-draw statistic over all chunks and reduce in chunk order."""
    sizes = chunk_sizes(cfg.samples, cfg.chunks)
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int)
    parts = Parallel(n_jobs=cfg.n_jobs)(
        delayed(_run_chunk)(statistic, cfg.seed, stream, i, sizes[i], int(offsets[i]), cfg.samples, cfg.groups, cfg.batch_size)
        for i in range(cfg.chunks)
        if sizes[i] > 0
    )
    return reduce(lambda a, b: a.merge(b), parts, RunningMoments.empty(cfg.groups))


def monte_carlo(
    statistic: Statistic,
    cfg: SampleConfig,
    stream: int = 0,
    heavy_tailed: bool = False,
    label: str = "",
) -> Estimate:
    """
    Monte Carlo estimate of E[statistic].

    Args:
        statistic: Maps (rng, batch) to `batch` per-draw values
        cfg: Sampling configuration
        stream: Logical stream id (separates e.g. training and evaluation draws)
        heavy_tailed: The statistic has infinite variance; report the
            median of group means and flag it
        label: Name used in log messages

    Returns:
        Estimate with method monte_carlo
    """
    acc = run_chunks(statistic, cfg, stream)

    if heavy_tailed:
        means = acc.group_means()
        center = float(np.median(means))
        spread = float(np.std(means, ddof=1) / math.sqrt(means.size)) if means.size > 1 else math.inf
        logger.warning(f"{label or 'statistic'}: infinite variance, reporting median of {means.size} group means")
        return Estimate(
            mean=center,
            stderr=spread,
            samples=acc.count,
            seed=cfg.seed,
            method=EstimateMethod.MONTE_CARLO,
            flags=(INFINITE_VARIANCE_FLAG,),
            details={"sample_mean": acc.mean},
        )

    return Estimate(mean=acc.mean, stderr=acc.stderr, samples=acc.count, seed=cfg.seed, method=EstimateMethod.MONTE_CARLO)


def draw_all(draw: Statistic, cfg: SampleConfig, stream: int = 0) -> np.ndarray:
    """Concatenate per-chunk draws in chunk order (for procedures that need the full sample)."""
    sizes = chunk_sizes(cfg.samples, cfg.chunks)
    parts = Parallel(n_jobs=cfg.n_jobs)(
        delayed(_draw_chunk)(draw, cfg.seed, stream, i, sizes[i], cfg.batch_size) for i in range(cfg.chunks)
    )
    return np.concatenate(parts)


def _draw_chunk(draw: Statistic, seed: int, stream: int, chunk: int, size: int, batch_size: int) -> np.ndarray:
    rng = substream(seed, chunk, stream)
    out = []
    done = 0
    while done < size:
        batch = min(batch_size, size - done)
        out.append(np.asarray(draw(rng, batch), dtype=float).reshape(-1))
        done += batch
    return np.concatenate(out) if out else np.empty(0)
