"""
Error curves of the four rank-k approximations over a grid of k.
"""

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from src.affinity.kernel import full_affinity_from_distances, kernel_exponent
from src.clustering.pipeline import prepare_graph
from src.core.errors import LabError, SizeGuardError
from src.core.logger import get_logger
from src.core.parallel import thread_map
from src.graph.dual_graph import DualGraph
from src.graph.shortest_path import all_pairs_distances
from src.lab.projections import (Spectrum, frobenius_error, fss_projection, leverage_projection,
                                 nystrom_projection)
from src.mesh.trimesh import TriMesh
from src.sampling.farthest import sample_from_distances

logger = get_logger(__name__)

DEFAULT_LAB_GUARD = 5000
CSV_COLUMNS = ("k", "err_best", "err_best_psd", "err_nystrom", "err_leverage", "err_fss", "projection_residual",
               "beta_k", "gamma_k", "log1p_beta", "log1p_gamma", "sigma_k", "wk_sigma_gap")


@dataclass(frozen=True)
class ProjectionReport:
    """
    Frobenius errors ||W - A^k||_F of the four approximations at one k.

    ``err_best`` keeps the k eigenvalues largest in magnitude; ``err_best_psd``
    keeps the k algebraically largest, clamped at zero. ``projection_residual``
    is ||H^k - F^k||_F; the projections coincide, so it measures round-off only.
    ``wk_sigma_gap`` is the relative difference between the sampled columns of
    W and the same columns kerneled with sigma_k.
    Nyström entries are NaN when the sample block is singular.
    """
    k: int
    err_best: float
    err_best_psd: float
    err_nystrom: float
    err_leverage: float
    err_fss: float
    projection_residual: float
    beta_k: float
    gamma_k: float
    sigma_k: float = float("nan")
    wk_sigma_gap: float = float("nan")

    @property
    def log1p_beta(self) -> float:
        return float(np.log1p(self.beta_k))

    @property
    def log1p_gamma(self) -> float:
        return float(np.log1p(self.gamma_k))

    def row(self) -> list:
        values = asdict(self)
        values["log1p_beta"] = self.log1p_beta
        values["log1p_gamma"] = self.log1p_gamma
        return [values[c] for c in CSV_COLUMNS]


@dataclass(frozen=True, eq=False)
class LabResult:
    reports: List[ProjectionReport]
    n: int
    sigma: float
    negative_eigenvalues: int
    sample_indices: np.ndarray


def parse_k_grid(text: str) -> List[int]:
    """``"a:b"``, ``"a:b:step"`` or a comma list."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError(text)
            step = parts[2] if len(parts) == 3 else 1
            if step < 1:
                raise ValueError(text)
            return list(range(parts[0], parts[1] + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise LabError(f"cannot parse k grid {text!r}; use a:b, a:b:step or a,b,c")


def matrix_error_curves(W: np.ndarray, D: np.ndarray, k_grid: Sequence[int], first_face: Optional[int] = None,
                        seed: int = 0, kernel: str = "distance", threads: Optional[int] = None) -> LabResult:
    """
    Error curves for a full affinity W built from distances D.

    The farthest sample is drawn once from D for the largest k; every smaller
    k uses its prefix, so all methods share one sample per k.
    """
    n = W.shape[0]
    k_grid = sorted(set(int(k) for k in k_grid))
    if not k_grid or k_grid[0] < 1 or k_grid[-1] > n:
        raise LabError(f"k grid must lie in [1, {n}]")

    spectrum = Spectrum.of(W)
    sample = sample_from_distances(D, k=k_grid[-1], first_face=first_face, seed=seed)
    gammas = spectrum.singular_values
    W_norm = float(np.linalg.norm(W, "fro"))

    def at(k: int) -> ProjectionReport:
        s = sample.indices[:k]
        X = sample.X[:, :k]
        E = spectrum.best_rank_k(k)
        H = fss_projection(W, s)
        G, _, _ = leverage_projection(W, k, spectrum.eigenvectors)
        try:
            F = nystrom_projection(W, s).F
            err_nystrom = frobenius_error(W, F)
            residual = frobenius_error(H, F)
        except LabError as e:
            logger.warning(f"k={k}: {e}")
            err_nystrom = residual = float("nan")
        sigma_k = float(X.mean())
        gap = float("nan")
        if sigma_k > 0:
            Wk = np.exp(kernel_exponent(X, sigma_k, kernel))
            gap = float(np.linalg.norm(W[:, s] - Wk) / np.linalg.norm(W[:, s]))
        report = ProjectionReport(
            k=k,
            err_best=frobenius_error(W, E),
            err_best_psd=frobenius_error(W, spectrum.best_rank_k(k, "psd")),
            err_nystrom=err_nystrom,
            err_leverage=frobenius_error(W, G),
            err_fss=frobenius_error(W, H),
            projection_residual=residual,
            beta_k=float(sample.betas[k - 1]),
            gamma_k=float(gammas[k - 1]),
            sigma_k=sigma_k,
            wk_sigma_gap=gap,
        )
        logger.debug(f"k={k}: best={report.err_best:.4g} fss={report.err_fss:.4g} "
                     f"leverage={report.err_leverage:.4g} nystrom={report.err_nystrom:.4g}")
        return report

    reports = thread_map(at, k_grid, threads)
    logger.info(f"Lab: n={n}, {len(reports)} grid points, ||W||_F={W_norm:.6g}, "
                f"{spectrum.negative_count} negative eigenvalues")
    return LabResult(reports, n, float(D.mean()), spectrum.negative_count, sample.indices)


def error_curves(mesh: Optional[TriMesh], metric, k_grid: Sequence[int], *, graph: Optional[DualGraph] = None,
                 first_face: Optional[int] = None, seed: int = 0, kernel: str = "distance",
                 guard: int = DEFAULT_LAB_GUARD, sdf_values: Optional[np.ndarray] = None,
                 threads: Optional[int] = None) -> LabResult:
    """
    Builds the full W of a mesh (kerneled with sigma) and reports the four
    approximation errors at every k of the grid.

    Raises:
        SizeGuardError: more than ``guard`` faces.
    """
    if graph is None:
        graph = prepare_graph(mesh, metric, sdf_values)
    if graph.n > guard:
        raise SizeGuardError(graph.n, guard, "lab full matrix", stage="lab")
    full = full_affinity_from_distances(all_pairs_distances(graph), kernel)
    result = matrix_error_curves(full.W, full.D, k_grid, first_face, seed, kernel, threads)
    logger.info(f"Lab sigma={full.sigma:.6g} ({graph.metric} metric)")
    return result


def write_error_csv(result: LabResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w") as f:
        f.write(",".join(CSV_COLUMNS) + "\n")
        for report in result.reports:
            f.write(",".join(str(v) if isinstance(v, int) else repr(float(v)) for v in report.row()) + "\n")
    return path
