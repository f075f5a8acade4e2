"""
Quantile Game Layer

Implements:
- Quantile matrices and the per-matrix CDW benchmark
- Zero-sum game value by exact enumeration or sampling
- Dominance sweeps and coupling averages over random matrices
- Exact case probabilities and the m = 3 mixture weights
"""

from .combinatorics import CaseCounts, MixtureWeights, case_probabilities, enumerate_cases, mixture_weights_m3
from .game import (
    ColumnSums,
    CouplingReport,
    DominanceReport,
    GamePermutation,
    column_sums,
    coupling_averages,
    dominance_report,
    game_value,
    realization_value,
)
from .matrix import QuantileMatrix, cdw_of_matrix, cdw_weights

__all__ = [
    "CaseCounts",
    "MixtureWeights",
    "case_probabilities",
    "enumerate_cases",
    "mixture_weights_m3",
    "ColumnSums",
    "CouplingReport",
    "DominanceReport",
    "GamePermutation",
    "column_sums",
    "coupling_averages",
    "dominance_report",
    "game_value",
    "realization_value",
    "QuantileMatrix",
    "cdw_of_matrix",
    "cdw_weights",
]
