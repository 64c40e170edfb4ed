from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from src.core.errors import SamplingError
from src.core.logger import get_logger
from src.graph.dual_graph import DualGraph
from src.graph.shortest_path import sssp

logger = get_logger(__name__)

DEFAULT_SLOPE_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class FarthestSample:
    """
    Ordered max-min sample of faces.

    Attributes:
        indices (np.ndarray): j_1..j_k, distinct face indices in selection order.
        X (np.ndarray): (n, k) distances; column l holds distances to face indices[l].
        betas (np.ndarray): beta_l = max_i min_{r<=l} X[i, r], non-increasing.
        sssp_calls (int): Shortest-path solves spent building X.
        distance_evaluations (int): Face distances produced (n per solve).
    """
    indices: np.ndarray
    X: np.ndarray
    betas: np.ndarray
    sssp_calls: int = 0
    distance_evaluations: int = 0

    @property
    def k(self) -> int:
        return int(self.indices.size)

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def first_face(self) -> int:
        return int(self.indices[0])

    def prefix(self, k: int) -> "FarthestSample":
        """The sample of size k with the same first face (greedy selection is prefix-stable)."""
        if not 1 <= k <= self.k:
            raise SamplingError(f"prefix size {k} outside [1, {self.k}]")
        return FarthestSample(self.indices[:k], self.X[:, :k], self.betas[:k], k, k * self.n)


def pick_first_face(n: int, first_face: Optional[int] = None, seed: int = 0) -> int:
    """The given face, or a draw from the seeded generator."""
    if first_face is not None:
        if not 0 <= first_face < n:
            raise SamplingError(f"first face {first_face} outside [0, {n})")
        return int(first_face)
    return int(np.random.default_rng(seed).integers(n))


def _farthest(column_of: Callable[[int], np.ndarray], n: int, first_face: int,
              k: Optional[int] = None, epsilon: Optional[float] = None) -> FarthestSample:
    # running per-face minimum over the chosen columns
    min_dist = np.full(n, np.inf)
    columns: List[np.ndarray] = []
    indices: List[int] = []
    betas: List[float] = []
    j = first_face
    while True:
        column = np.asarray(column_of(j), dtype=np.float64)
        columns.append(column)
        indices.append(j)
        np.minimum(min_dist, column, out=min_dist)
        nxt = int(np.argmax(min_dist))
        beta = float(min_dist[nxt])
        betas.append(beta)
        l = len(indices)
        logger.debug(f"sample step {l}: face {j}, beta={beta:.6g}")

        if l == n:
            break
        if epsilon is None and l == k:
            break
        if epsilon is not None and l >= 2 and beta < epsilon * betas[0]:
            break
        if beta == 0.0:
            if betas[0] == 0.0 and epsilon is not None:
                break
            raise SamplingError(f"all faces are at distance 0 from the first {l} samples; "
                                "the graph has zero-weight arcs")
        j = nxt

    return FarthestSample(
        indices=np.asarray(indices, dtype=np.int64),
        X=np.column_stack(columns),
        betas=np.asarray(betas),
        sssp_calls=len(indices),
        distance_evaluations=len(indices) * n,
    )


def sample_fixed_k(graph: DualGraph, k: int, first_face: Optional[int] = None, seed: int = 0,
                   engine: str = "heap") -> FarthestSample:
    """
    Farthest-point sample of exactly k faces.

    Args:
        graph: Connected dual graph.
        k: Sample size, 1 <= k <= n.
        first_face: j_1; drawn from ``seed`` when omitted.
        engine: Shortest-path engine, see :func:`sssp`.

    Raises:
        SamplingError: k out of range.
    """
    if not 1 <= k <= graph.n:
        raise SamplingError(f"sample size k={k} outside [1, {graph.n}]")
    j1 = pick_first_face(graph.n, first_face, seed)
    sample = _farthest(lambda j: sssp(graph, j, engine), graph.n, j1, k=k)
    logger.info(f"Farthest sample: k={sample.k} from face {j1}, beta_k/beta_1={_ratio(sample):.4g}")
    return sample


def sample_epsilon(graph: DualGraph, epsilon: float, first_face: Optional[int] = None, seed: int = 0,
                   engine: str = "heap") -> FarthestSample:
    """
    Farthest-point sample grown until beta_k / beta_1 < epsilon (k >= 2), or k = n.

    Raises:
        SamplingError: epsilon outside (0, 1).
    """
    if not 0.0 < epsilon < 1.0:
        raise SamplingError(f"epsilon must lie in (0, 1), got {epsilon}")
    j1 = pick_first_face(graph.n, first_face, seed)
    sample = _farthest(lambda j: sssp(graph, j, engine), graph.n, j1, epsilon=epsilon)
    logger.info(f"Epsilon rule ({epsilon}) stopped at k={sample.k} (beta_k/beta_1={_ratio(sample):.4g})")
    return sample


def sample_from_distances(D: np.ndarray, k: Optional[int] = None, first_face: Optional[int] = None,
                          seed: int = 0, epsilon: Optional[float] = None) -> FarthestSample:
    """Same selection driven by a precomputed symmetric distance matrix."""
    D = np.asarray(D, dtype=np.float64)
    n = D.shape[0]
    if epsilon is None and (k is None or not 1 <= k <= n):
        raise SamplingError(f"sample size k={k} outside [1, {n}]")
    j1 = pick_first_face(n, first_face, seed)
    return _farthest(lambda j: D[:, j], n, j1, k=k, epsilon=epsilon)


def _ratio(sample: FarthestSample) -> float:
    return float(sample.betas[-1] / sample.betas[0]) if sample.betas[0] > 0 else 0.0


def beta_curve(sample: FarthestSample) -> List[Tuple[int, float]]:
    """Normalized curve (l, beta_l / beta_1) for l = 1..k."""
    if sample.k == 0:
        raise SamplingError("empty sample")
    beta1 = sample.betas[0]
    if beta1 == 0.0:
        return [(1, 1.0)] + [(l, 0.0) for l in range(2, sample.k + 1)]
    return [(l, float(b / beta1)) for l, b in enumerate(sample.betas, start=1)]


def suggest_k_star(sample: FarthestSample, slope_tol: float = DEFAULT_SLOPE_TOL) -> Optional[int]:
    """
    First l where the normalized beta drop (beta_{l-1} - beta_l) / beta_1 falls below ``slope_tol``.

    A heuristic knee of the beta curve; None when the curve never flattens.
    """
    if sample.betas[0] == 0.0:
        return None
    drops = -np.diff(sample.betas) / sample.betas[0]
    flat = np.flatnonzero(drops < slope_tol)
    return int(flat[0]) + 2 if flat.size else None


def write_beta_csv(sample: FarthestSample, path: Union[str, Path]) -> Path:
    """Columns: l, face, beta, beta_over_beta1, selection_probability (1 - beta_l/beta_1)."""
    path = Path(path)
    with open(path, "w") as f:
        f.write("l,face,beta,beta_over_beta1,selection_probability\n")
        for (l, ratio), face, beta in zip(beta_curve(sample), sample.indices.tolist(), sample.betas.tolist()):
            f.write(f"{l},{face},{beta!r},{ratio!r},{1.0 - ratio!r}\n")
    return path
