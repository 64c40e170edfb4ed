"""
Pair-counting agreement between two segmentations.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.sparse import coo_matrix

from src.core.errors import EvaluationError

DISTANCE_KINDS = ("rand", "jaccard")


@dataclass(frozen=True)
class PairCounts:
    """
    Face pairs classified by agreement.

    Attributes:
        n11 (int): Together in both segmentations.
        n00 (int): Apart in both.
        n10 (int): Together in the first only.
        n01 (int): Together in the second only.
    """
    n11: int
    n00: int
    n10: int
    n01: int

    @property
    def total(self) -> int:
        return self.n11 + self.n00 + self.n10 + self.n01


def _labels(segmentation) -> np.ndarray:
    labels = getattr(segmentation, "labels", segmentation)
    return np.asarray(labels).ravel()


def _paired(a, b):
    a, b = _labels(a), _labels(b)
    if a.size != b.size:
        raise EvaluationError(f"segmentations differ in length: {a.size} vs {b.size}")
    return a, b


def _pairs_within(sizes: np.ndarray) -> int:
    sizes = sizes.astype(np.int64)
    return int(np.sum(sizes * (sizes - 1) // 2))


def pair_counts(a, b) -> PairCounts:
    """Pair counts from the contingency table of the two labelings."""
    a, b = _paired(a, b)
    n = a.size
    if n == 0:
        return PairCounts(0, 0, 0, 0)
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = coo_matrix((np.ones(n, dtype=np.int64), (ia.ravel(), ib.ravel()))).tocsr()
    table.sum_duplicates()
    n11 = _pairs_within(table.data)
    together_a = _pairs_within(np.asarray(table.sum(axis=1)).ravel())
    together_b = _pairs_within(np.asarray(table.sum(axis=0)).ravel())
    total = n * (n - 1) // 2
    n10 = together_a - n11
    n01 = together_b - n11
    return PairCounts(n11, total - n11 - n10 - n01, n10, n01)


def pair_counts_bruteforce(a, b) -> PairCounts:
    """Enumerates every pair; quadratic, kept as an oracle."""
    a, b = _paired(a, b)
    n11 = n00 = n10 = n01 = 0
    for i, j in combinations(range(a.size), 2):
        same_a, same_b = a[i] == a[j], b[i] == b[j]
        if same_a and same_b:
            n11 += 1
        elif same_a:
            n10 += 1
        elif same_b:
            n01 += 1
        else:
            n00 += 1
    return PairCounts(n11, n00, n10, n01)


def rand_index(a, b) -> float:
    """(n11 + n00) / C(n, 2); 1 for fewer than two faces."""
    counts = pair_counts(a, b)
    if counts.total == 0:
        return 1.0
    return (counts.n11 + counts.n00) / counts.total


def jaccard_index(a, b) -> float:
    """n11 / (n11 + n10 + n01); 1 when neither segmentation groups any pair."""
    counts = pair_counts(a, b)
    denominator = counts.n11 + counts.n10 + counts.n01
    if denominator == 0:
        return 1.0
    return counts.n11 / denominator


def seg_distance(a, b, kind: str = "rand") -> float:
    """1 - RI (``rand``) or 1 - JI (``jaccard``)."""
    if kind == "rand":
        return 1.0 - rand_index(a, b)
    if kind == "jaccard":
        return 1.0 - jaccard_index(a, b)
    raise EvaluationError(f"unknown distance {kind!r}; expected one of {DISTANCE_KINDS}")
