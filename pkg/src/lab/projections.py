"""
Rank-k approximations of a full affinity matrix W.

* E^k: truncated eigendecomposition (the Frobenius optimum).
* F^k: projection of W on the Nyström eigenvector estimates N^k.
* G^k: projection on the k columns with the largest leverage scores.
* H^k: projection on the sampled columns W^k.

Every projection ``C C^+ W`` is computed as ``Q Q^t W`` with Q an orthonormal
basis of range(C), so no n x n projector is formed.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from src.core.errors import LabError

BEST_MODES = ("magnitude", "psd")


def _square(W) -> np.ndarray:
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise LabError(f"expected a square matrix, got shape {W.shape}")
    return W


def _indices(sample_indices: Sequence[int], n: int) -> np.ndarray:
    s = np.asarray(sample_indices, dtype=np.int64).ravel()
    if s.size == 0 or s.min() < 0 or s.max() >= n:
        raise LabError(f"sample indices must be a nonempty subset of [0, {n})")
    if np.unique(s).size != s.size:
        raise LabError("sample indices must be distinct")
    return s


def orthonormal_basis(C: np.ndarray) -> np.ndarray:
    """
    Orthonormal basis of range(C).

    Singular values at or below ``max(rows, cols) * eps * s_max`` count as zero.
    """
    C = np.atleast_2d(np.asarray(C, dtype=np.float64))
    if C.size == 0:
        return np.zeros((C.shape[0], 0))
    U, s, _ = linalg.svd(C, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((C.shape[0], 0))
    tol = max(C.shape) * np.finfo(np.float64).eps * s[0]
    return U[:, s > tol]


def pseudo_inverse(C: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudoinverse with the same numerical-rank cutoff as :func:`orthonormal_basis`."""
    C = np.atleast_2d(np.asarray(C, dtype=np.float64))
    U, s, Vt = linalg.svd(C, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(C.T.shape)
    tol = max(C.shape) * np.finfo(np.float64).eps * s[0]
    keep = s > tol
    return (Vt[keep].T / s[keep]) @ U[:, keep].T


def projector(C: np.ndarray) -> np.ndarray:
    """The orthogonal projector C C^+ onto range(C)."""
    return np.asarray(C, dtype=np.float64) @ pseudo_inverse(C)


def project_onto(C: np.ndarray, W: np.ndarray) -> np.ndarray:
    """C C^+ W."""
    Q = orthonormal_basis(C)
    return Q @ (Q.T @ W)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """
    Eigendecomposition of a symmetric matrix, ordered by decreasing |lambda|.

    For symmetric W the singular values are |lambda| and the eigenvectors are
    singular vectors, so one decomposition serves E^k, leverage scores and gamma_k.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def of(cls, W) -> "Spectrum":
        W = _square(W)
        if not np.allclose(W, W.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(W).max())):
            raise LabError("matrix is not symmetric")
        try:
            lam, U = linalg.eigh(0.5 * (W + W.T))
        except linalg.LinAlgError as e:
            raise LabError(f"eigensolver failed: {e}")
        order = np.argsort(-np.abs(lam), kind="stable")
        return cls(lam[order], U[:, order])

    @property
    def singular_values(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    @property
    def negative_count(self) -> int:
        scale = self.singular_values.max(initial=0.0)
        return int(np.sum(self.eigenvalues < -1e-12 * scale))

    def best_rank_k(self, k: int, mode: str = "magnitude") -> np.ndarray:
        n = self.eigenvalues.size
        if not 0 <= k <= n:
            raise LabError(f"k={k} outside [0, {n}]")
        if mode == "magnitude":
            lam, U = self.eigenvalues[:k], self.eigenvectors[:, :k]
        elif mode == "psd":
            top = np.argsort(-self.eigenvalues, kind="stable")[:k]
            lam, U = np.maximum(self.eigenvalues[top], 0.0), self.eigenvectors[:, top]
        else:
            raise LabError(f"unknown mode {mode!r}; expected one of {BEST_MODES}")
        return (U * lam) @ U.T


def best_rank_k(W, k: int, mode: str = "magnitude") -> np.ndarray:
    """
    E^k, the rank-k truncation of the eigendecomposition of W.

    ``magnitude`` keeps the k eigenvalues largest in absolute value, the
    Frobenius-optimal rank-k matrix for any symmetric W. ``psd`` keeps the k
    largest eigenvalues clamped at zero, the optimum among X X^t factorizations.
    """
    return Spectrum.of(W).best_rank_k(k, mode)


@dataclass(frozen=True, eq=False)
class NystromApproximation:
    """
    Attributes:
        F (np.ndarray): Projection of W on range(P^t N^k).
        N (np.ndarray): (n, k) eigenvector estimates, rows in original face order.
        W_tilde (np.ndarray): Nyström completion [A B; B^t B^t A^-1 B], original order.
        eigenvalues (np.ndarray): Eigenvalues of the sample block A.
    """
    F: np.ndarray
    N: np.ndarray
    W_tilde: np.ndarray
    eigenvalues: np.ndarray


def nystrom_projection(W, sample_indices: Sequence[int]) -> NystromApproximation:
    """
    Nyström extension of the eigenvectors of the sample block A.

    Raises:
        LabError: A is singular to working precision; a different sample is needed.
    """
    W = _square(W)
    n = W.shape[0]
    s = _indices(sample_indices, n)
    rest = np.setdiff1d(np.arange(n), s)
    order = np.concatenate([s, rest])

    A = W[np.ix_(s, s)]
    B = W[np.ix_(s, rest)]
    lam, U = linalg.eigh(0.5 * (A + A.T))
    scale = np.abs(lam).max(initial=0.0)
    if scale == 0.0 or np.abs(lam).min() <= s.size * np.finfo(np.float64).eps * scale:
        raise LabError(f"sample block A ({s.size}x{s.size}) is singular; choose a different sample")

    N_perm = np.vstack([U, (B.T @ U) / lam])
    N = np.empty_like(N_perm)
    N[order] = N_perm

    try:
        corner = B.T @ linalg.solve(A, B, assume_a="sym") if rest.size else np.zeros((0, 0))
        completion = np.block([[A, B], [B.T, corner]])
    except linalg.LinAlgError as e:
        raise LabError(f"sample block A is singular: {e}")
    W_tilde = np.empty_like(completion)
    W_tilde[np.ix_(order, order)] = completion

    return NystromApproximation(project_onto(N, W), N, W_tilde, lam)


def fss_projection(W, sample_indices: Sequence[int]) -> np.ndarray:
    """H^k = W^k (W^k)^+ W for the sampled columns W^k."""
    W = _square(W)
    s = _indices(sample_indices, W.shape[0])
    if not np.any(W[:, s]):
        raise LabError("sampled columns are all zero")
    return project_onto(W[:, s], W)


def leverage_scores(W, k: int, right_vectors: Optional[np.ndarray] = None) -> np.ndarray:
    """
    pi_j = (1/k) sum_{i<=k} (v_i^j)^2 over the top-k right singular vectors.

    Args:
        right_vectors: (n, >=k) right singular vectors ordered by singular value,
                       reused instead of a fresh SVD.
    """
    W = np.asarray(W, dtype=np.float64)
    n = W.shape[1]
    if not 1 <= k <= n:
        raise LabError(f"k={k} outside [1, {n}]")
    if right_vectors is None:
        try:
            _, _, Vt = linalg.svd(W)
        except linalg.LinAlgError as e:
            raise LabError(f"SVD failed: {e}")
        right_vectors = Vt.T
    V = right_vectors[:, :k]
    return np.sum(V * V, axis=1) / k


def leverage_projection(W, k: int, right_vectors: Optional[np.ndarray] = None
                        ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    G^k = C^k (C^k)^+ W with C^k the k columns of largest leverage (ties by index).

    Returns:
        (G^k, pi, column indices of C^k)
    """
    W = _square(W)
    pi = leverage_scores(W, k, right_vectors)
    columns = np.sort(np.argsort(-pi, kind="stable")[:k])
    return project_onto(W[:, columns], W), pi, columns


def frobenius_error(W: np.ndarray, approximation: np.ndarray) -> float:
    return float(np.linalg.norm(W - approximation, "fro"))
