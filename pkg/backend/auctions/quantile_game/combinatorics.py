"""
Exact case frequencies of row permutations.

A row permutation is described by the rank (0 = largest) that lands in each
column. Enumerating every tuple of row permutations classifies it as follows.

m = 2 (three columns):
    case 1  both rows place their smallest entry in the same column
    case 2  otherwise

m = 3 (four columns), with X_r the two columns holding row r's two largest entries:
    case 1  some column lies in X_r for every row
    case 2  column counts over the X_r are (2, 2, 2, 0)
    case 3  two rows share the same X_r
    case 4  everything else
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Callable, Dict, Sequence, Tuple

from ..core import ParameterError

logger = logging.getLogger(__name__)

Ranks = Tuple[int, ...]

# conditional selection rates of the sorted columns 2, 3, 4 in each m = 3 case
CASE_RATES_M3 = (
    (Fraction(17, 27), Fraction(13, 54), Fraction(7, 54)),
    (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)),
    (Fraction(2, 3), Fraction(0), Fraction(1, 3)),
    (Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)),
)
CDW_TARGET_M3 = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))


def _classify_m2(rows: Sequence[Ranks]) -> int:
    smallest = [row.index(2) for row in rows]
    return 1 if smallest[0] == smallest[1] else 2


def _classify_m3(rows: Sequence[Ranks]) -> int:
    tops = [frozenset(col for col, rank in enumerate(row) if rank <= 1) for row in rows]
    counts = Counter(col for top in tops for col in top)
    if max(counts.values()) == 3:
        return 1
    if sorted(counts.values()) == [2, 2, 2]:
        return 2
    if len(set(tops)) < len(tops):
        return 3
    return 4


_CLASSIFIERS: Dict[int, Tuple[int, Callable[[Sequence[Ranks]], int]]] = {
    2: (2, _classify_m2),
    3: (4, _classify_m3),
}


@dataclass(frozen=True)
class CaseCounts:
    """
    Raw case counts over all row-permutation tuples.

    Attributes:
        m: Number of rows
        counts: Tuples falling in each case, case 1 first
        total: Number of tuples enumerated, ((m + 1)!)^m
    """

    m: int
    counts: Tuple[int, ...]
    total: int

    def probabilities(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(count, self.total) for count in self.counts)


def enumerate_cases(m: int) -> CaseCounts:
    """Classify every tuple of m row permutations of m + 1 columns."""
    if m not in _CLASSIFIERS:
        raise ParameterError("m", f"out of range: {m} (case analysis exists for m in {{2, 3}})")
    cases, classify = _CLASSIFIERS[m]
    counts = [0] * cases
    total = 0
    for rows in product(permutations(range(m + 1)), repeat=m):
        counts[classify(rows) - 1] += 1
        total += 1
    logger.debug(f"Enumerated {total} permutation tuples for m={m}: {counts}")
    return CaseCounts(m, tuple(counts), total)


def case_probabilities(m: int) -> Tuple[Fraction, ...]:
    """Exact case probabilities for m in {2, 3}."""
    return enumerate_cases(m).probabilities()


@dataclass(frozen=True)
class MixtureWeights:
    """
    Aggregate selection weights on the sorted columns 2, 3, 4 (m = 3).

    Attributes:
        weights: Probability of collecting each sorted column
        dominates_cdw: Prefix sums of `weights` are at least those of (1/2, 1/4, 1/4)
    """

    weights: Tuple[Fraction, Fraction, Fraction]
    dominates_cdw: bool

    def as_strings(self) -> Tuple[str, ...]:
        return tuple(f"{w.numerator}/{w.denominator}" for w in self.weights)


def mixture_weights_m3() -> MixtureWeights:
    """Mix the per-case selection rates by the enumerated case probabilities."""
    probabilities = case_probabilities(3)
    weights = tuple(
        sum((p * rates[k] for p, rates in zip(probabilities, CASE_RATES_M3)), Fraction(0)) for k in range(3)
    )

    dominates = True
    running, target = Fraction(0), Fraction(0)
    for weight, reference in zip(weights, CDW_TARGET_M3):
        running += weight
        target += reference
        dominates = dominates and running >= target
    return MixtureWeights(weights, dominates)
