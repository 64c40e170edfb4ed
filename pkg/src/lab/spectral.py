"""
Nyström spectral segmentation, the baseline FSS is compared against.

The leading eigenvectors of Q = M^-1/2 W M^-1/2 (M the degree matrix) are
approximated from the sampled blocks A (k x k) and B (k x (n - k)) with a
one-shot orthogonalization, then clustered like FSS rows.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from src.affinity.kernel import build_wk, unit_rows
from src.clustering.kmeans import DEFAULT_MAX_ITER, DEFAULT_REPLICATES, Segmentation, kmeans_cosine
from src.clustering.pipeline import SegmentationResult, cluster_components
from src.core.errors import LabError
from src.core.logger import get_logger
from src.evaluation.indices import seg_distance

logger = get_logger(__name__)


def _inverse_sqrt(S: np.ndarray) -> np.ndarray:
    lam, U = linalg.eigh(0.5 * (S + S.T))
    tol = S.shape[0] * np.finfo(np.float64).eps * np.abs(lam).max(initial=0.0)
    keep = lam > tol
    if not keep.any():
        raise LabError("sample block has no positive eigenvalues")
    return (U[:, keep] / np.sqrt(lam[keep])) @ U[:, keep].T


def nystrom_embedding(Wk: np.ndarray, sample_indices: Sequence[int], n_eig: int) -> np.ndarray:
    """
    Approximate leading eigenvectors of the normalized affinity from the
    sampled columns W^k (column l belongs to face ``sample_indices[l]``).

    Returns:
        np.ndarray: (n, n_eig) embedding, rows in face order.

    Raises:
        LabError: nonpositive estimated degrees or fewer than ``n_eig`` usable eigenvalues.
    """
    Wk = np.asarray(Wk, dtype=np.float64)
    n, k = Wk.shape
    s = np.asarray(sample_indices, dtype=np.int64)
    if s.size != k:
        raise LabError(f"{s.size} sample indices for {k} columns")
    if not 1 <= n_eig <= k:
        raise LabError(f"need 1 <= n_eig={n_eig} <= k={k}")
    rest = np.setdiff1d(np.arange(n), s)
    A = Wk[s]
    B = Wk[rest].T

    # degrees of the completed matrix [A B; B^t B^t A^-1 B]
    A_pinv = linalg.pinv(0.5 * (A + A.T))
    row_b = B.sum(axis=1)
    d_sample = A.sum(axis=1) + row_b
    d_rest = B.sum(axis=0) + B.T @ (A_pinv @ row_b)
    if np.any(d_sample <= 0) or np.any(d_rest <= 0):
        raise LabError("Nyström degree estimate is not positive; the sample is too small")
    scale_s = 1.0 / np.sqrt(d_sample)
    scale_r = 1.0 / np.sqrt(d_rest)
    A = A * np.outer(scale_s, scale_s)
    B = B * np.outer(scale_s, scale_r)

    A_isqrt = _inverse_sqrt(A)
    S = A + A_isqrt @ B @ B.T @ A_isqrt
    lam, U = linalg.eigh(0.5 * (S + S.T))
    order = np.argsort(-lam, kind="stable")[:n_eig]
    lam, U = lam[order], U[:, order]
    if np.any(lam <= 0):
        raise LabError(f"fewer than {n_eig} positive eigenvalues in the orthogonalized block")

    V_perm = np.vstack([A, B.T]) @ A_isqrt @ (U / np.sqrt(lam))
    V = np.empty_like(V_perm)
    V[np.concatenate([s, rest])] = V_perm
    return V


def nystrom_spectral_segment(Wk: np.ndarray, sample_indices: Sequence[int], n_c: int, seed: int = 0,
                             replicates: int = DEFAULT_REPLICATES, max_iter: int = DEFAULT_MAX_ITER,
                             threads: Optional[int] = None) -> Segmentation:
    """
    Clusters the row-normalized n_c leading approximate eigenvectors.

    Uses as many eigenvectors as clusters.
    """
    V = nystrom_embedding(Wk, sample_indices, n_c)
    return kmeans_cosine(unit_rows(V), n_c, seed, replicates, max_iter, threads)


@dataclass(frozen=True, eq=False)
class SpectralComparison:
    """
    FSS against Nyström spectral segmentation on the same sample.

    Attributes:
        d_rand (float): Rand distance between the two segmentations.
        d_jaccard (float): Jaccard distance between them.
        fss_components (np.ndarray): Dual-graph pieces per FSS cluster.
        nystrom_components (np.ndarray): Dual-graph pieces per Nyström cluster.
    """
    fss: Segmentation
    nystrom: Segmentation
    d_rand: float
    d_jaccard: float
    fss_components: np.ndarray
    nystrom_components: np.ndarray


def compare_with_spectral(result: SegmentationResult, n_c: Optional[int] = None, seed: int = 0,
                          replicates: int = DEFAULT_REPLICATES, kernel: str = "distance",
                          threads: Optional[int] = None) -> SpectralComparison:
    """Runs the Nyström baseline on the sample of an FSS run and compares the two."""
    n_c = n_c or result.segmentation.n_c
    aff = build_wk(result.sample, kernel)
    nystrom = nystrom_spectral_segment(aff.Wk, result.sample.indices, n_c, seed, replicates, threads=threads)
    comparison = SpectralComparison(
        fss=result.segmentation,
        nystrom=nystrom,
        d_rand=seg_distance(result.segmentation, nystrom, "rand"),
        d_jaccard=seg_distance(result.segmentation, nystrom, "jaccard"),
        fss_components=cluster_components(result.graph, result.segmentation),
        nystrom_components=cluster_components(result.graph, nystrom),
    )
    logger.info(f"FSS vs Nyström spectral: d_R={comparison.d_rand:.4f}, d_J={comparison.d_jaccard:.4f}")
    return comparison
