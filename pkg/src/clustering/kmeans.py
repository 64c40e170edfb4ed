"""
Spherical k-means++ under cosine distance.

Points are unit rows; the distance between two of them is one minus the
cosine of their angle, and centroids are renormalized member means.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.core.errors import ClusteringError
from src.core.logger import get_logger
from src.core.parallel import thread_map

logger = get_logger(__name__)

DEFAULT_REPLICATES = 10
DEFAULT_MAX_ITER = 100
UNIT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Segmentation:
    """
    Face labels in 1..n_c.

    Attributes:
        labels (np.ndarray): Length-n labels, numbered by first appearance.
        n_c (int): Number of clusters, all nonempty.
        inertia (float): Sum of cosine distances from points to their centroid.
        n_iter (int): Lloyd iterations of the winning replicate.
        inertia_history (Tuple[float, ...]): Inertia after each iteration of that replicate.
        replicate (int): Index of the winning replicate.
    """
    labels: np.ndarray
    n_c: int
    inertia: float = 0.0
    n_iter: int = 0
    inertia_history: Tuple[float, ...] = ()
    replicate: int = 0

    @property
    def n(self) -> int:
        return int(self.labels.size)

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_c + 1)[1:]


def canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Renumbers labels 1, 2, ... in order of first appearance."""
    labels = np.asarray(labels)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(1, first.size + 1)
    return rank[inverse.ravel()]


def cosine_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    return np.clip(1.0 - points @ centroids.T, 0.0, 2.0)


def _unit_centroids(points: np.ndarray, labels: np.ndarray, n_c: int) -> np.ndarray:
    sums = np.zeros((n_c, points.shape[1]))
    np.add.at(sums, labels, points)
    norms = np.linalg.norm(sums, axis=1)
    for c in np.flatnonzero(norms == 0):
        # members cancel out exactly; fall back to the first member
        sums[c] = points[np.flatnonzero(labels == c)[0]]
        norms[c] = 1.0
    return sums / norms[:, None]


def kmeanspp_seeds(points: np.ndarray, n_c: int, rng: np.random.Generator) -> np.ndarray:
    """
    k-means++ seeding: each new seed is drawn with probability proportional to
    its cosine distance from the nearest seed so far.

    Raises:
        ClusteringError: fewer than n_c distinct directions.
    """
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    nearest = cosine_distances(points, points[chosen])[:, 0]
    for _ in range(1, n_c):
        total = nearest.sum()
        if total <= 0.0:
            raise ClusteringError(f"only {len(chosen)} distinct row directions; cannot seed {n_c} clusters")
        nxt = int(rng.choice(n, p=nearest / total))
        chosen.append(nxt)
        np.minimum(nearest, cosine_distances(points, points[nxt:nxt + 1])[:, 0], out=nearest)
    return points[chosen].copy()


def _repair_empty(labels: np.ndarray, dist_own: np.ndarray, n_c: int) -> np.ndarray:
    labels = labels.copy()
    counts = np.bincount(labels, minlength=n_c)
    for c in np.flatnonzero(counts == 0):
        movable = counts[labels] > 1
        candidates = np.where(movable, dist_own, -np.inf)
        p = int(np.argmax(candidates))
        if not np.isfinite(candidates[p]):
            raise ClusteringError(f"cluster {c + 1} is empty and no point can be moved into it")
        logger.debug(f"cluster {c + 1} emptied; reseeded with point {p}")
        counts[labels[p]] -= 1
        counts[c] += 1
        labels[p] = c
        dist_own[p] = 0.0
    return labels


def _lloyd(points: np.ndarray, n_c: int, rng: np.random.Generator, max_iter: int):
    centroids = kmeanspp_seeds(points, n_c, rng)
    dist = cosine_distances(points, centroids)
    labels = np.argmin(dist, axis=1)
    history = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        labels = _repair_empty(labels, dist[np.arange(labels.size), labels], n_c)
        centroids = _unit_centroids(points, labels, n_c)
        dist = cosine_distances(points, centroids)
        history.append(float(dist[np.arange(labels.size), labels].sum()))
        # argmin keeps the lowest centroid index on ties
        new_labels = np.argmin(dist, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels, history[-1], n_iter, tuple(history)


def kmeans_cosine(points: np.ndarray, n_c: int, seed: int = 0, replicates: int = DEFAULT_REPLICATES,
                  max_iter: int = DEFAULT_MAX_ITER, threads: Optional[int] = None) -> Segmentation:
    """
    Best-inertia spherical k-means++ over independent replicates.

    Args:
        points: (n, k) rows of unit Euclidean norm.
        n_c: Cluster count, 1 <= n_c <= n.
        seed: Replicate r draws from ``default_rng([seed, r])``.
        replicates: Independent seedings; ties in inertia go to the lowest replicate.
        max_iter: Lloyd iteration cap per replicate.
        threads: Worker cap for replicates.

    Raises:
        ClusteringError: n_c out of range, rows not unit-norm, or too few distinct rows.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if not 1 <= n_c <= n:
        raise ClusteringError(f"n_c={n_c} outside [1, {n}]")
    if replicates < 1 or max_iter < 1:
        raise ClusteringError(f"replicates and max_iter must be >= 1, got {replicates}, {max_iter}")
    norms = np.linalg.norm(points, axis=1)
    if not np.allclose(norms, 1.0, atol=UNIT_TOL):
        raise ClusteringError(f"rows must be unit-norm; row {int(np.argmax(np.abs(norms - 1.0)))} "
                              f"has norm {norms.max():.6g}")
    if n_c == 1:
        centroid = _unit_centroids(points, np.zeros(n, dtype=np.int64), 1)
        inertia = float(cosine_distances(points, centroid).sum())
        return Segmentation(np.ones(n, dtype=np.int64), 1, inertia, 1, (inertia,))

    def run(r: int):
        return _lloyd(points, n_c, np.random.default_rng([seed, r]), max_iter)

    runs = thread_map(run, range(replicates), threads)
    best = 0
    for r, (_, inertia, n_iter, _) in enumerate(runs):
        logger.debug(f"replicate {r}: inertia={inertia:.6g} after {n_iter} iterations")
        if inertia < runs[best][1]:
            best = r
    labels, inertia, n_iter, history = runs[best]
    logger.info(f"k-means: n_c={n_c}, best replicate {best} of {replicates}, inertia={inertia:.6g}")
    return Segmentation(canonical_labels(labels), n_c, inertia, n_iter, history, best)
