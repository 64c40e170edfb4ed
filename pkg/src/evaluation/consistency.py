"""
Agreement between sampled and full-matrix segmentations, and against ground truth.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.affinity.kernel import (DEFAULT_FULL_GUARD, build_full_w, build_wk, kernel_exponent, normalize_rows,
                                 rows_from_exponents)
from src.clustering.kmeans import DEFAULT_REPLICATES, kmeans_cosine
from src.clustering.pipeline import k_from_fraction, prepare_graph, segment
from src.core.errors import EvaluationError
from src.core.logger import get_logger
from src.core.parallel import default_threads, thread_map
from src.evaluation.indices import seg_distance
from src.graph.dual_graph import DualGraph
from src.mesh.trimesh import TriMesh
from src.sampling.farthest import sample_from_distances

logger = get_logger(__name__)

DEFAULT_FRACTIONS = (0.005, 0.01, 0.05, 0.1, 0.25)

# published (d_R, d_J) per benchmark model and metric; other tooling may use index variants
REFERENCE_DISTANCES: Dict[Tuple[str, str], Tuple[float, float]] = {
    ("hand", "geodesic"): (0.124, 0.303),
    ("bearing", "angular"): (0.033, 0.452),
    ("octopus", "sdf"): (0.043, 0.105),
}


@dataclass(frozen=True, eq=False)
class ConsistencyHistogram:
    """
    Rand distances between fraction runs and the full-matrix run.

    Attributes:
        distances (Dict[float, np.ndarray]): Per fraction, one distance per trial.
        edges (np.ndarray): Shared bin edges.
        rel_freq (Dict[float, np.ndarray]): Per fraction, relative frequency per bin.
    """
    distances: Dict[float, np.ndarray]
    edges: np.ndarray
    rel_freq: Dict[float, np.ndarray]
    sample_sizes: Dict[float, int] = field(default_factory=dict)

    @property
    def fractions(self) -> List[float]:
        return list(self.distances)

    def rows(self) -> List[Tuple[float, float, float, float]]:
        out = []
        for frac, freq in self.rel_freq.items():
            for lo, hi, f in zip(self.edges[:-1], self.edges[1:], freq):
                out.append((frac, float(lo), float(hi), float(f)))
        return out

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with open(path, "w") as f:
            f.write("fraction,bin_lo,bin_hi,rel_freq\n")
            for frac, lo, hi, freq in self.rows():
                f.write(f"{frac!r},{lo!r},{hi!r},{freq!r}\n")
        return path


def consistency_histogram(mesh: Optional[TriMesh], metric, fracs: Sequence[float] = DEFAULT_FRACTIONS,
                          trials: int = 10, n_c: int = 4, *, graph: Optional[DualGraph] = None, bins: int = 20,
                          value_range: Tuple[float, float] = (0.0, 1.0), seed: int = 0,
                          replicates: int = DEFAULT_REPLICATES, kernel: str = "distance",
                          full_guard: int = DEFAULT_FULL_GUARD, sdf_values: Optional[np.ndarray] = None,
                          threads: Optional[int] = None) -> ConsistencyHistogram:
    """
    Relative-frequency histograms of d_R(fraction run, full run) over trials.

    The full distance matrix is computed once; trial t seeds both the first
    sampled face and k-means with ``seed + t``. Sampled columns are read from
    that matrix, which holds the same values the per-column solves produce.

    Raises:
        SizeGuardError: the full matrix exceeds ``full_guard``.
    """
    if trials < 1:
        raise EvaluationError(f"trials must be >= 1, got {trials}")
    graph = graph if graph is not None else prepare_graph(mesh, metric, sdf_values)
    full = build_full_w(graph, guard=full_guard, kernel=kernel)
    full_rows = rows_from_exponents(kernel_exponent(full.D, full.sigma, kernel))
    n = graph.n
    # trials already share the pool; a single trial hands the cap to k-means
    inner_threads = (threads or default_threads()) if trials == 1 else 1

    def trial(t: int) -> Dict[float, float]:
        trial_seed = seed + t
        reference = kmeans_cosine(full_rows, n_c, trial_seed, replicates, threads=inner_threads)
        out = {}
        for frac in fracs:
            k = k_from_fraction(n, frac)
            sample = sample_from_distances(full.D, k=k, seed=trial_seed)
            rows = normalize_rows(build_wk(sample, kernel)).Wk
            labels = kmeans_cosine(rows, n_c, trial_seed, replicates, threads=inner_threads)
            out[frac] = seg_distance(labels, reference, "rand")
        logger.debug(f"trial {t}: {out}")
        return out

    per_trial = thread_map(trial, range(trials), threads)
    edges = np.linspace(value_range[0], value_range[1], bins + 1)
    distances, rel_freq = {}, {}
    for frac in fracs:
        d = np.array([result[frac] for result in per_trial])
        counts, _ = np.histogram(np.clip(d, *value_range), bins=edges)
        distances[frac] = d
        rel_freq[frac] = counts / trials
        logger.info(f"fraction {frac}: median d_R={np.median(d):.4f} over {trials} trials")
    sizes = {frac: k_from_fraction(n, frac) for frac in fracs}
    return ConsistencyHistogram(distances, edges, rel_freq, sizes)


@dataclass(frozen=True)
class BenchmarkComparison:
    model: str
    metric: str
    d_rand: float
    d_jaccard: float
    k: int
    reference: Optional[Tuple[float, float]] = None


def reference_for(model: str, metric: str) -> Optional[Tuple[float, float]]:
    """Published distances for a model whose name contains a benchmark key."""
    model = model.lower()
    for (key, ref_metric), values in REFERENCE_DISTANCES.items():
        if key in model and ref_metric == metric:
            return values
    return None


def compare_with_ground_truth(mesh: TriMesh, truth, metric="geodesic", n_c: Optional[int] = None,
                              **segment_options) -> BenchmarkComparison:
    """
    Segments ``mesh`` and measures d_R, d_J against per-face ground-truth labels.

    ``n_c`` defaults to the number of distinct ground-truth labels; remaining
    keyword arguments go to :func:`segment` (at least one sampling mode).
    """
    truth = np.asarray(truth).ravel()
    if truth.size != mesh.n:
        raise EvaluationError(f"ground truth has {truth.size} labels for {mesh.n} faces")
    n_c = n_c or int(np.unique(truth).size)
    result = segment(mesh, metric, n_c, **segment_options)
    metric_name = result.graph.metric
    comparison = BenchmarkComparison(
        model=mesh.name,
        metric=metric_name,
        d_rand=seg_distance(result.segmentation, truth, "rand"),
        d_jaccard=seg_distance(result.segmentation, truth, "jaccard"),
        k=result.k,
        reference=reference_for(mesh.name, metric_name),
    )
    logger.info(f"{mesh.name}/{metric_name}: d_R={comparison.d_rand:.4f}, d_J={comparison.d_jaccard:.4f}")
    return comparison
