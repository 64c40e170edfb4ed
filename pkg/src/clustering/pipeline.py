"""
The farthest sampling segmentation pipeline, from mesh to face labels.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from src.affinity.kernel import (DEFAULT_FULL_GUARD, FullAffinity, build_full_w, build_wk, kernel_exponent,
                                 normalize_rows, rows_from_exponents)
from src.clustering.kmeans import DEFAULT_MAX_ITER, DEFAULT_REPLICATES, Segmentation, kmeans_cosine
from src.core.errors import ConfigError
from src.core.logger import get_logger
from src.graph.dual_graph import DualGraph, build_dual_graph
from src.graph.metrics import MetricKind, MetricSpec
from src.mesh.trimesh import TriMesh, face_geometry
from src.sampling.farthest import FarthestSample, sample_epsilon, sample_fixed_k, sample_from_distances
from src.sdf.shape_diameter import SdfConfig, compute_sdf

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class SegmentationResult:
    """
    Output of :func:`segment`.

    Attributes:
        segmentation (Segmentation): Face labels.
        graph (DualGraph): The dual graph the distances came from.
        sample (FarthestSample): The farthest sample; on the full path, the
                                 complete ordering drawn from D.
        sigma (float): Kernel scale used (sigma_k, or sigma on the full path).
        full (Optional[FullAffinity]): Set when the full matrix was used.
    """
    segmentation: Segmentation
    graph: DualGraph
    sample: FarthestSample
    sigma: float
    full: Optional[FullAffinity] = None

    @property
    def labels(self) -> np.ndarray:
        return self.segmentation.labels

    @property
    def k(self) -> int:
        return self.sample.k

    @property
    def full_path(self) -> bool:
        return self.full is not None


def k_from_fraction(n: int, frac: float) -> int:
    """Integer part of frac * n, at least 2 and at most n."""
    if not 0.0 < frac <= 1.0:
        raise ConfigError(f"fraction must lie in (0, 1], got {frac}")
    return min(n, max(2, int(frac * n)))


def resolve_sample_size(n: int, k: Optional[int] = None, frac: Optional[float] = None,
                        epsilon: Optional[float] = None) -> Optional[int]:
    """
    The fixed sample size for exactly one of k / frac / epsilon; None for the epsilon rule.

    Raises:
        ConfigError: not exactly one sampling mode.
    """
    modes = [name for name, value in (("k", k), ("frac", frac), ("epsilon", epsilon)) if value is not None]
    if len(modes) != 1:
        raise ConfigError(f"exactly one of k, frac, epsilon must be set, got {modes or 'none'}")
    if frac is not None:
        return k_from_fraction(n, frac)
    if k is not None:
        if not 1 <= k <= n:
            raise ConfigError(f"k={k} outside [1, {n}]")
        return int(k)
    return None


def prepare_graph(mesh: TriMesh, metric, sdf_values: Optional[np.ndarray] = None,
                  sdf_config: Optional[SdfConfig] = None, allow_nonmanifold: bool = False) -> DualGraph:
    """Dual graph for ``metric``, computing the SDF first when the metric needs it."""
    spec = MetricSpec.parse(metric)
    geom = face_geometry(mesh)
    if spec.kind is MetricKind.SDF and sdf_values is None:
        sdf_values = compute_sdf(mesh, geom, sdf_config)
    return build_dual_graph(mesh, geom, spec, sdf_values=sdf_values, allow_nonmanifold=allow_nonmanifold)


def segment(mesh: TriMesh, metric="geodesic", n_c: int = 2, *, k: Optional[int] = None,
            frac: Optional[float] = None, epsilon: Optional[float] = None, first_face: Optional[int] = None,
            sample_seed: int = 0, cluster_seed: int = 0, replicates: int = DEFAULT_REPLICATES,
            max_iter: int = DEFAULT_MAX_ITER, kernel: str = "distance", engine: str = "heap",
            sdf_values: Optional[np.ndarray] = None, sdf_config: Optional[SdfConfig] = None,
            allow_nonmanifold: bool = False, full_guard: int = DEFAULT_FULL_GUARD,
            threads: Optional[int] = None, graph: Optional[DualGraph] = None) -> SegmentationResult:
    """
    Segments a mesh into n_c clusters from k sampled affinity columns.

    Builds the dual graph, samples k farthest faces (k single-source solves),
    kernels the n x k distance block with sigma_k, normalizes its rows and
    clusters them with cosine k-means++. Face i gets the label of row i.

    When k = n the full distance matrix is computed instead and kerneled with
    sigma, which equals sigma_k for that k.

    Args:
        mesh: A validated triangle mesh.
        metric: :class:`MetricSpec` or metric name.
        n_c: Number of clusters.
        k / frac / epsilon: Exactly one sampling mode.
        first_face: j_1; drawn from ``sample_seed`` when omitted.
        graph: A prebuilt dual graph for ``mesh``, reused as-is.

    Returns:
        SegmentationResult: labels plus everything needed for a run manifest.
    """
    graph = graph if graph is not None else prepare_graph(mesh, metric, sdf_values, sdf_config, allow_nonmanifold)
    k_fixed = resolve_sample_size(graph.n, k, frac, epsilon)

    if k_fixed == graph.n and graph.n > 1:
        logger.info(f"k = n = {graph.n}: using the full affinity matrix")
        full = build_full_w(graph, guard=full_guard, kernel=kernel)
        sample = sample_from_distances(full.D, k=graph.n, first_face=first_face, seed=sample_seed)
        points = rows_from_exponents(kernel_exponent(full.D, full.sigma, kernel))
        seg = kmeans_cosine(points, n_c, cluster_seed, replicates, max_iter, threads)
        return SegmentationResult(seg, graph, sample, full.sigma, full)

    if k_fixed is None:
        sample = sample_epsilon(graph, epsilon, first_face, sample_seed, engine)
    else:
        sample = sample_fixed_k(graph, k_fixed, first_face, sample_seed, engine)
    aff = normalize_rows(build_wk(sample, kernel))
    seg = kmeans_cosine(aff.Wk, n_c, cluster_seed, replicates, max_iter, threads)
    return SegmentationResult(seg, graph, sample, aff.sigma_k)


def cluster_components(graph: DualGraph, seg: Segmentation) -> np.ndarray:
    """
    Connected components of each cluster in the dual graph.

    Returns:
        np.ndarray: Entry c - 1 counts the pieces of cluster c.
    """
    labels = np.asarray(seg.labels)
    if labels.size != graph.n:
        raise ConfigError(f"segmentation has {labels.size} labels for a graph of {graph.n} faces")
    pairs = graph.pairs
    same = labels[pairs[:, 0]] == labels[pairs[:, 1]]
    kept = pairs[same]
    adjacency = coo_matrix((np.ones(len(kept)), (kept[:, 0], kept[:, 1])), shape=(graph.n, graph.n))
    n_pieces, piece = connected_components(adjacency, directed=False)
    piece_label = np.zeros(n_pieces, dtype=np.int64)
    piece_label[piece] = labels
    return np.bincount(piece_label, minlength=seg.n_c + 1)[1:]
