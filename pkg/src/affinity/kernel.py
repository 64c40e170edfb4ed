"""
Gaussian affinities from face distances.

The exponent follows the distance literally: ``w = exp(-d / (2 sigma^2))``
with sigma the mean distance. ``kernel="squared"`` switches to
``exp(-d^2 / (2 sigma^2))`` for experiments.
"""

import struct
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np

from src.core.errors import AffinityError, ConfigError, SizeGuardError
from src.core.logger import get_logger
from src.graph.dual_graph import DualGraph
from src.graph.shortest_path import all_pairs_distances
from src.sampling.farthest import FarthestSample

logger = get_logger(__name__)

KERNELS = ("distance", "squared")
DEFAULT_FULL_GUARD = 20000
_MAGIC = b"FSSW"


def kernel_exponent(distances: np.ndarray, sigma: float, kernel: str = "distance") -> np.ndarray:
    """The (non-positive) exponent of the Gaussian kernel."""
    if kernel not in KERNELS:
        raise ConfigError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")
    d = distances if kernel == "distance" else distances ** 2
    return -d / (2.0 * sigma ** 2)


@dataclass(frozen=True, eq=False)
class AffinitySample:
    """
    The n x k affinity block W^k between all faces and the sampled faces.

    Attributes:
        Wk (np.ndarray): (n, k) affinities.
        sigma_k (float): Mean of the sampled distance block X.
        sample (FarthestSample): Where the distances came from.
        row_normalized (bool): Whether every row has unit Euclidean norm.
        exponents (np.ndarray): Kernel exponents; rows are normalized from these
                                so far faces whose affinities underflow keep a direction.
        kernel (str): Exponent form, see :data:`KERNELS`.
    """
    Wk: np.ndarray
    sigma_k: float
    sample: FarthestSample
    row_normalized: bool = False
    exponents: Optional[np.ndarray] = None
    kernel: str = "distance"


@dataclass(frozen=True, eq=False)
class FullAffinity:
    """
    Full symmetric affinity W with unit diagonal.

    Attributes:
        W (np.ndarray): (n, n) affinities.
        sigma (float): Mean of the full distance matrix.
        D (np.ndarray): The distance matrix W was built from.
    """
    W: np.ndarray
    sigma: float
    D: np.ndarray
    kernel: str = "distance"

    @property
    def n(self) -> int:
        return int(self.W.shape[0])


def build_wk(sample: FarthestSample, kernel: str = "distance") -> AffinitySample:
    """
    Applies the kernel to the sampled distances with sigma_k = mean(X).

    Raises:
        AffinityError: non-finite distances or sigma_k = 0.
    """
    X = sample.X
    if not np.all(np.isfinite(X)):
        raise AffinityError("sampled distance block has non-finite entries")
    sigma_k = float(X.sum() / X.size)
    if sigma_k <= 0.0:
        raise AffinityError("sigma_k is 0: every sampled distance is zero (degenerate mesh)")
    exponents = kernel_exponent(X, sigma_k, kernel)
    Wk = np.exp(exponents)
    logger.info(f"W^k: {Wk.shape[0]}x{Wk.shape[1]}, sigma_k={sigma_k:.6g}")
    return AffinitySample(Wk, sigma_k, sample, False, exponents, kernel)


def normalize_rows(aff: AffinitySample) -> AffinitySample:
    """
    Scales every row of W^k to unit Euclidean norm.

    Rows are rescaled from their exponents (shifted by the row maximum), which
    equals ``w_i / ||w_i||`` exactly and stays defined when affinities underflow.
    """
    if aff.row_normalized:
        return aff
    exponents = aff.exponents if aff.exponents is not None else np.log(aff.Wk)
    return replace(aff, Wk=rows_from_exponents(exponents), row_normalized=True)


def rows_from_exponents(exponents: np.ndarray) -> np.ndarray:
    """Unit rows of exp(exponents), computed after shifting each row by its maximum."""
    shifted = np.exp(exponents - exponents.max(axis=1, keepdims=True))
    norms = np.linalg.norm(shifted, axis=1, keepdims=True)
    if np.any(norms == 0) or not np.all(np.isfinite(norms)):
        raise AffinityError("affinity matrix has a zero or non-finite row")
    return shifted / norms


def unit_rows(M: np.ndarray) -> np.ndarray:
    """Row-normalizes a plain matrix."""
    norms = np.linalg.norm(M, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise AffinityError("matrix has a zero row")
    return M / norms


def full_affinity_from_distances(D: np.ndarray, kernel: str = "distance") -> FullAffinity:
    """W from a full distance matrix, with sigma = mean(D)."""
    D = np.asarray(D, dtype=np.float64)
    # independent single-source solves may differ in the last bit
    D = 0.5 * (D + D.T)
    n = D.shape[0]
    sigma = float(D.sum() / D.size)
    if sigma == 0.0:
        if n == 1:
            return FullAffinity(np.ones((1, 1)), 0.0, D, kernel)
        raise AffinityError("sigma is 0: every face distance is zero")
    W = np.exp(kernel_exponent(D, sigma, kernel))
    np.fill_diagonal(W, 1.0)
    return FullAffinity(W, sigma, D, kernel)


def build_full_w(graph: DualGraph, guard: int = DEFAULT_FULL_GUARD, kernel: str = "distance") -> FullAffinity:
    """
    The full n x n affinity matrix; n shortest-path solves.

    Raises:
        SizeGuardError: n above ``guard``.
    """
    if graph.n > guard:
        raise SizeGuardError(graph.n, guard)
    D = all_pairs_distances(graph)
    full = full_affinity_from_distances(D, kernel)
    logger.info(f"Full W: {graph.n}x{graph.n}, sigma={full.sigma:.6g}")
    return full


def dump_wk(aff: AffinitySample, path: Union[str, Path]) -> Path:
    """Binary dump: magic, int64 n, int64 k, float64 sigma_k, then row-major float64 W^k."""
    path = Path(path)
    n, k = aff.Wk.shape
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<qqd", n, k, aff.sigma_k))
        f.write(np.ascontiguousarray(aff.Wk, dtype="<f8").tobytes())
    return path


def load_wk(path: Union[str, Path]):
    """Returns (W^k, sigma_k) from a :func:`dump_wk` file."""
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise AffinityError(f"{path}: not a W^k dump")
        n, k, sigma_k = struct.unpack("<qqd", f.read(24))
        data = np.frombuffer(f.read(), dtype="<f8")
    if data.size != n * k:
        raise AffinityError(f"{path}: expected {n * k} values, found {data.size}")
    return data.reshape(n, k).copy(), sigma_k
