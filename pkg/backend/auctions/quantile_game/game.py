"""
Zero-sum game value of a quantile matrix.

Nature permutes each row r of Q by sigma_r and assigns rows to items by tau.
Column j then describes bidder j, whose bundle value is

    s_j = sum_i F_i^{-1}(Q[tau(i), sigma_{tau(i)}(j)])

The adversary removes one column and the optimizer collects the best
remaining column sum, so each realization is worth s_2, the second-highest
column sum. The value of Q averages s_2 over (sigma, tau), by exact
enumeration for m <= 3 or by sampling.
"""

import logging
import math
from dataclasses import dataclass
from itertools import permutations
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..core import EnumerationTooLargeError, Estimate, EstimateMethod, ParameterError, SampleConfig
from ..distributions import ProductPrior
from ..sampling import derive_seed, monte_carlo
from .matrix import QuantileMatrix, cdw_of_matrix

logger = logging.getLogger(__name__)

MAX_EXACT_M = 3
ASSERTED_M = (2, 3)
DOMINANCE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GamePermutation:
    """
    One realization of nature's move.

    Attributes:
        row_perms: sigma_r for each row r; row_perms[r][j] is the column of
            row r that bidder j receives
        row_assignment: tau; row_assignment[i] is the row assigned to item i
    """

    row_perms: Tuple[Tuple[int, ...], ...]
    row_assignment: Tuple[int, ...]

    def __post_init__(self):
        rows = tuple(tuple(int(c) for c in perm) for perm in self.row_perms)
        tau = tuple(int(r) for r in self.row_assignment)
        m = len(tau)
        if sorted(tau) != list(range(m)):
            raise ParameterError("row_assignment", f"not a permutation of {m} rows: {tau}")
        if len(rows) != m:
            raise ParameterError("row_perms", f"expected {m} row permutations, got {len(rows)}")
        for perm in rows:
            if sorted(perm) != list(range(m + 1)):
                raise ParameterError("row_perms", f"not a permutation of {m + 1} columns: {perm}")
        object.__setattr__(self, "row_perms", rows)
        object.__setattr__(self, "row_assignment", tau)

    @property
    def m(self) -> int:
        return len(self.row_assignment)

    @classmethod
    def identity(cls, m: int) -> "GamePermutation":
        return cls(tuple(tuple(range(m + 1)) for _ in range(m)), tuple(range(m)))


@dataclass(frozen=True)
class ColumnSums:
    """Bundle value of each of the m + 1 columns in one realization."""

    s: Tuple[float, ...]

    @property
    def second_highest(self) -> float:
        return float(np.partition(np.asarray(self.s), len(self.s) - 2)[len(self.s) - 2])


def column_sums(Q: QuantileMatrix, prior: ProductPrior, perm: GamePermutation) -> ColumnSums:
    """Column sums s_j for one realization of (sigma, tau)."""
    if perm.m != Q.m:
        raise ParameterError("perm", f"permutation is for m={perm.m}, matrix has m={Q.m}")
    table = Q.value_table(prior)
    sums = []
    for j in range(Q.m + 1):
        total = 0.0
        for i in range(Q.m):
            row = perm.row_assignment[i]
            total += table[i, row, perm.row_perms[row][j]]
        sums.append(float(total))
    return ColumnSums(tuple(sums))


def realization_value(sums: Union[ColumnSums, Sequence[float]]) -> float:
    """
    Value of the game for fixed column sums.

    The adversary removes column a, the optimizer then picks column b and
    collects s_b unless b = a. Over pure strategies this is
    min_a max_{b != a} s_b.
    """
    s = np.asarray(sums.s if isinstance(sums, ColumnSums) else sums, dtype=float)
    if s.size < 2:
        raise ParameterError("sums", "the game needs at least two columns")
    payoff = np.where(np.eye(s.size, dtype=bool), 0.0, s[None, :])
    return float(payoff.max(axis=1).min())


# ==========================================
# Game value
# ==========================================


def _exact_value(table: np.ndarray) -> Tuple[float, int]:
    m = table.shape[0]
    perms = np.array(list(permutations(range(m + 1))))
    count = perms.shape[0]
    second: list = []
    for tau in permutations(range(m)):
        total = np.zeros((count,) * m + (m + 1,))
        for i, row in enumerate(tau):
            # bidder j's value for item i under every sigma_row
            per_item = table[i, row][perms]
            shape = [1] * m + [m + 1]
            shape[row] = count
            total = total + per_item.reshape(shape)
        second.append(np.partition(total, m - 1, axis=-1)[..., m - 1].ravel())
    values = np.concatenate(second)
    # fsum is order independent, so relabelled matrices give identical values
    return math.fsum(values) / values.size, int(values.size)


def _sampled_second(table: np.ndarray, rng: np.random.Generator, batch: int) -> np.ndarray:
    m = table.shape[0]
    sigma = rng.random((batch, m, m + 1)).argsort(axis=-1)
    tau = rng.random((batch, m)).argsort(axis=-1)
    per_item_sigma = sigma[np.arange(batch)[:, None], tau]
    values = table[np.arange(m)[None, :, None], tau[..., None], per_item_sigma]
    totals = values.sum(axis=1)
    return np.partition(totals, m - 1, axis=-1)[:, m - 1]


def game_value(
    Q: QuantileMatrix,
    prior: ProductPrior,
    mode: str = "exact",
    cfg: Optional[SampleConfig] = None,
) -> Estimate:
    """
    Expected game value BSPA_{1+m}(Q).

    Args:
        Q: Quantile matrix
        prior: Prior over the m items
        mode: "exact" (m <= 3) or "monte_carlo"
        cfg: Sampling configuration for monte_carlo mode

    Returns:
        Estimate; exact mode has zero stderr

    Raises:
        EnumerationTooLargeError: Exact mode with m > 3
    """
    table = Q.value_table(prior)
    if mode == "exact":
        if Q.m > MAX_EXACT_M:
            size = math.factorial(Q.m + 1) ** Q.m * math.factorial(Q.m)
            raise EnumerationTooLargeError(f"enumeration too large: {size} permutation tuples for m={Q.m}")
        value, count = _exact_value(table)
        return Estimate.exact(value, mode="exact", realizations=count)
    if mode != "monte_carlo":
        raise ParameterError("mode", f"unknown: {mode!r}")

    cfg = cfg or SampleConfig()
    return monte_carlo(lambda rng, batch: _sampled_second(table, rng, batch), cfg, label=f"game m={Q.m}")


# ==========================================
# Dominance and coupling sweeps
# ==========================================


@dataclass
class DominanceReport:
    """
    Minimum of game_value - cdw_of_matrix over random matrices.

    Attributes:
        m: Number of items
        trials: Matrices drawn
        seed: Seed of the matrix generator
        mode: Game value mode
        min_gap: Smallest gap observed
        asserted: Whether dominance is claimed for this m
        violations: Matrices whose gap is below the tolerance (asserted m only)
        violating_matrix: The worst violating matrix, if any
    """

    m: int
    trials: int
    seed: int
    mode: str
    min_gap: float
    asserted: bool
    violations: int = 0
    violating_matrix: Optional[np.ndarray] = None

    @property
    def holds(self) -> Optional[bool]:
        """True/False for asserted m, None in exploratory mode."""
        return self.violations == 0 if self.asserted else None

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "trials": self.trials,
            "seed": self.seed,
            "mode": self.mode,
            "min_gap": self.min_gap,
            "asserted": self.asserted,
            "violations": self.violations,
            "violating_matrix": None if self.violating_matrix is None else self.violating_matrix.tolist(),
        }


def dominance_report(
    prior: ProductPrior,
    trials: int,
    seed: int,
    mode: str = "exact",
    cfg: Optional[SampleConfig] = None,
) -> DominanceReport:
    """
    Check game_value(Q) >= cdw_of_matrix(Q) on random matrices.

    Dominance is asserted for m in {2, 3}; other m run in exploratory mode,
    and exact mode falls back to sampling when m > 3.

    Args:
        prior: Prior over m items
        trials: Number of random matrices
        seed: Matrix generator seed
        mode: "exact" or "monte_carlo"
        cfg: Sampling configuration for monte_carlo mode

    Returns:
        DominanceReport
    """
    if trials < 1:
        raise ParameterError("trials", f"out of range: {trials} (must be >= 1)")
    m = prior.m
    if mode == "exact" and m > MAX_EXACT_M:
        logger.info(f"m={m} exceeds exact enumeration; sampling game values instead")
        mode = "monte_carlo"
    # sampled game values carry noise, so only exact sweeps assert dominance
    asserted = m in ASSERTED_M and mode == "exact"

    rng = np.random.default_rng(seed)
    logger.info(f"Dominance sweep: m={m}, {trials} matrices, mode={mode}")

    min_gap = math.inf
    violations = 0
    worst = None
    for trial in range(trials):
        Q = QuantileMatrix.random(m, rng)
        trial_cfg = (cfg or SampleConfig()).with_seed(derive_seed(seed, trial)) if mode == "monte_carlo" else None
        cdw = cdw_of_matrix(Q, prior)
        gap = game_value(Q, prior, mode, trial_cfg).mean - cdw
        if gap < min_gap:
            min_gap = gap
        if asserted and gap < -DOMINANCE_TOLERANCE * max(1.0, abs(cdw)):
            violations += 1
            if worst is None or gap <= min_gap:
                worst = Q.entries.copy()

    if violations:
        logger.error(f"Dominance fails on {violations} of {trials} matrices for m={m} (min gap {min_gap:.3e})")
    else:
        logger.info(f"Dominance sweep done: min gap {min_gap:.6g}")
    return DominanceReport(m, trials, seed, mode, float(min_gap), asserted, violations, worst)


@dataclass
class CouplingReport:
    """
    Averages over random matrices.

    Attributes:
        game: Mean game value (compare with BSPA with m + 1 bidders)
        cdw: Mean CDW_1(Q) (compare with the CDW benchmark of one bidder)
    """

    game: Estimate
    cdw: Estimate


def _mean_estimate(values: np.ndarray, seed: int) -> Estimate:
    stderr = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.inf
    return Estimate(
        mean=float(values.mean()), stderr=stderr, samples=int(values.size), seed=seed, method=EstimateMethod.MONTE_CARLO
    )


def coupling_averages(prior: ProductPrior, trials: int, seed: int) -> CouplingReport:
    """Average exact game values and CDW_1(Q) over `trials` uniform matrices (m <= 3)."""
    if trials < 2:
        raise ParameterError("trials", f"out of range: {trials} (must be >= 2)")
    rng = np.random.default_rng(seed)
    games = np.empty(trials)
    cdws = np.empty(trials)
    for trial in range(trials):
        Q = QuantileMatrix.random(prior.m, rng)
        games[trial] = game_value(Q, prior, "exact").mean
        cdws[trial] = cdw_of_matrix(Q, prior)
    return CouplingReport(_mean_estimate(games, seed), _mean_estimate(cdws, seed))
