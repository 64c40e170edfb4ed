from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from src.core.errors import ConfigError, SdfError
from src.core.logger import get_logger
from src.core.parallel import thread_map
from src.mesh.trimesh import FaceGeometry, TriMesh, face_geometry, is_watertight
from src.sdf.raycast import RayCaster

logger = get_logger(__name__)

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
FACE_CHUNK = 256


@dataclass(frozen=True)
class SdfConfig:
    """
    Ray-casting parameters of the shape diameter function.

    Attributes:
        cone_half_angle (float): Degrees, in (0, 90).
        rays_per_face (int): Rays cast per face, at least 1.
        seed (int): Master seed; each face derives its own stream from it.
        outlier_sigma (float): Ray lengths farther than this many standard
                               deviations from the median are dropped.
        bvh_threshold (int): Face count above which the box hierarchy is used.
        threads (Optional[int]): Worker cap for per-face work.
    """
    cone_half_angle: float = 60.0
    rays_per_face: int = 30
    seed: int = 0
    outlier_sigma: float = 1.0
    bvh_threshold: int = 20000
    threads: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.cone_half_angle < 90.0:
            raise ConfigError(f"cone_half_angle must lie in (0, 90) degrees, got {self.cone_half_angle}")
        if self.rays_per_face < 1:
            raise ConfigError(f"rays_per_face must be >= 1, got {self.rays_per_face}")
        if self.outlier_sigma < 0:
            raise ConfigError(f"outlier_sigma must be >= 0, got {self.outlier_sigma}")

    def cone_angles(self) -> np.ndarray:
        """Polar angles of the spiral rays, equal-area spaced over the cap."""
        r = self.rays_per_face
        cos_alpha = np.cos(np.radians(self.cone_half_angle))
        return np.arccos(1.0 - (1.0 - cos_alpha) * (np.arange(r) + 0.5) / r)


def cone_directions(axis: np.ndarray, tangent: np.ndarray, theta: np.ndarray, jitter: float) -> np.ndarray:
    """Unit directions at polar angles ``theta`` around ``axis`` on a golden-angle spiral."""
    bitangent = np.cross(axis, tangent)
    phi = GOLDEN_ANGLE * np.arange(theta.size) + jitter
    radial = np.cos(phi)[:, None] * tangent[None, :] + np.sin(phi)[:, None] * bitangent[None, :]
    return np.cos(theta)[:, None] * axis[None, :] + np.sin(theta)[:, None] * radial


def robust_weighted_length(lengths: np.ndarray, weights: np.ndarray, outlier_sigma: float) -> float:
    """Weighted mean of the lengths within ``outlier_sigma`` std of the median."""
    median = np.median(lengths)
    keep = np.abs(lengths - median) <= outlier_sigma * np.std(lengths)
    if not keep.any():
        keep = lengths == median
    if not keep.any():
        return float(median)
    return float(np.average(lengths[keep], weights=weights[keep]))


def compute_sdf(mesh: TriMesh, geom: Optional[FaceGeometry] = None, cfg: Optional[SdfConfig] = None) -> np.ndarray:
    """
    Shape diameter per face, in model units.

    Rays leave each barycenter inside a cone around the inward normal. The
    first hit of each ray, other than the face itself, gives a length; the SDF
    is the inverse-angle weighted mean of the lengths that survive the
    median/std outlier filter.

    Raises:
        SdfError: the mesh is open, or every ray of some face misses.
    """
    cfg = cfg or SdfConfig()
    geom = geom if geom is not None else face_geometry(mesh)
    if not is_watertight(mesh):
        raise SdfError(f"{mesh.name}: SDF needs a closed mesh (some edge is not shared by exactly two faces)")

    caster = RayCaster(mesh.vertices, mesh.faces, cfg.bvh_threshold)
    theta = cfg.cone_angles()
    weights = 1.0 / theta
    v = mesh.vertices
    tangents = v[mesh.faces[:, 1]] - v[mesh.faces[:, 0]]
    tangents /= np.linalg.norm(tangents, axis=1)[:, None]

    def face_sdf(i: int) -> float:
        rng = np.random.default_rng([cfg.seed, i])
        directions = cone_directions(-geom.normals[i], tangents[i], theta, rng.uniform(0.0, 2.0 * np.pi))
        lengths = caster.first_hits(geom.barycenters[i], directions, exclude=i)
        hit = np.isfinite(lengths)
        if not hit.any():
            raise SdfError(f"face {i}: all {cfg.rays_per_face} rays missed the mesh")
        return robust_weighted_length(lengths[hit], weights[hit], cfg.outlier_sigma)

    def chunk_sdf(start: int) -> np.ndarray:
        return np.array([face_sdf(i) for i in range(start, min(start + FACE_CHUNK, mesh.n))])

    values = np.concatenate(thread_map(chunk_sdf, range(0, mesh.n, FACE_CHUNK), cfg.threads))
    logger.info(f"SDF for {mesh.n} faces: min={values.min():.4g} median={np.median(values):.4g} max={values.max():.4g}")
    return values


def save_sdf(values, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w") as f:
        for value in np.asarray(values, dtype=np.float64).tolist():
            f.write(f"{value!r}\n")
    return path


def load_sdf(path: Union[str, Path], n: Optional[int] = None) -> np.ndarray:
    """
    Reads one SDF value per line, face order.

    Raises:
        SdfError: non-numeric or non-finite line, or a length different from ``n``.
    """
    path = Path(path)
    values = []
    with open(path, "r") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                value = float(line)
            except ValueError:
                raise SdfError(f"{path}:{lineno}: not a number: {line!r}")
            if not np.isfinite(value):
                raise SdfError(f"{path}:{lineno}: non-finite SDF value {line!r}")
            values.append(value)
    if n is not None and len(values) != n:
        raise SdfError(f"{path}: {len(values)} SDF values for {n} faces")
    return np.asarray(values, dtype=np.float64)
