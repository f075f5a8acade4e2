"""
Quantile matrices and the per-matrix CDW benchmark.

A quantile matrix Q is m x (m + 1): row i holds the quantiles that m + 1
bidders draw for one item. Q* sorts each row in decreasing order, with ties
ranked by column index (lower index first). With g(q) = (1/m) sum_j F_j^{-1}(q),

    CDW_1(Q) = 1/(m + 1) * sum_i ( 2 g(Q*[i, 2]) + sum_{k >= 3} g(Q*[i, k]) )

(columns 1-indexed as above).
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..core import DimensionMismatchError, ParameterError
from ..distributions import ProductPrior

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QuantileMatrix:
    """
    m x (m + 1) matrix of quantiles in [0, 1].

    Attributes:
        entries: The matrix, rows are items' quantile rows
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] != arr.shape[0] + 1:
            raise DimensionMismatchError(f"quantile matrix must be m x (m + 1), got shape {arr.shape}")
        if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
            raise ParameterError("entries", "out of range: quantiles must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def random(cls, m: int, rng: np.random.Generator) -> "QuantileMatrix":
        """Matrix of independent uniform quantiles."""
        if m < 1:
            raise ParameterError("m", f"out of range: {m} (must be >= 1)")
        return cls(rng.random((m, m + 1)))

    def row_order(self) -> np.ndarray:
        """Column index of each row's k-th largest entry, ties to the lower column."""
        return np.argsort(-self.entries, axis=1, kind="stable")

    def row_sorted(self) -> np.ndarray:
        """Q*: each row sorted in decreasing order."""
        return np.take_along_axis(self.entries, self.row_order(), axis=1)

    def value_table(self, prior: ProductPrior) -> np.ndarray:
        """
        Values of every item at every entry.

        Returns:
            Array T of shape (m, m, m + 1) with T[i, r, c] = F_i^{-1}(Q[r, c])
        """
        _check_dimensions(self, prior)
        return np.stack([np.asarray(marginal.quantile(self.entries), dtype=float) for marginal in prior.marginals])


def _check_dimensions(Q: QuantileMatrix, prior: ProductPrior) -> None:
    if prior.m != Q.m:
        raise DimensionMismatchError(f"dimension mismatch: matrix has {Q.m} rows, prior has {prior.m} items")


def cdw_weights(m: int) -> np.ndarray:
    """Weights on the sorted columns of one row; they sum to 1."""
    weights = np.zeros(m + 1)
    weights[1] = 2.0
    weights[2:] = 1.0
    return weights / (m + 1)


def cdw_of_matrix(Q: QuantileMatrix, prior: ProductPrior) -> float:
    """
    Quantile-duality benchmark of one matrix.

    Args:
        Q: Quantile matrix with m rows
        prior: Prior over the same m items

    Returns:
        CDW_1(Q)

    Raises:
        DimensionMismatchError: Q and prior disagree on m
    """
    _check_dimensions(Q, prior)
    sorted_q = Q.row_sorted()
    # g averages the item quantile functions at each entry
    g = np.mean([np.asarray(marginal.quantile(sorted_q), dtype=float) for marginal in prior.marginals], axis=0)
    return float(np.sum(g @ cdw_weights(Q.m)))
