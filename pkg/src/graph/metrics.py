from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from src.core.errors import ConfigError, NotAdjacentError
from src.mesh.trimesh import FaceGeometry, TriMesh

DEFAULT_ETA_CONVEX = 0.1


class MetricKind(Enum):
    """
    Face distances available for the dual graph.
    PRODUCT multiplies geodesic and angular distances edge by edge.
    """
    ANGULAR = "angular"
    GEODESIC = "geodesic"
    SDF = "sdf"
    PRODUCT = "product"


@dataclass(frozen=True)
class MetricSpec:
    """
    A metric kind with its parameters.

    Attributes:
        kind (MetricKind): Which per-edge distance to use.
        eta_convex (float): Weight of convex dihedral angles in (0, 1]; concave ones weigh 1.
    """
    kind: MetricKind = MetricKind.GEODESIC
    eta_convex: float = DEFAULT_ETA_CONVEX

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", MetricKind(self.kind))
        if not 0.0 < self.eta_convex <= 1.0:
            raise ConfigError(f"eta_convex must lie in (0, 1], got {self.eta_convex}")

    @classmethod
    def parse(cls, value, eta_convex: float = DEFAULT_ETA_CONVEX) -> "MetricSpec":
        if isinstance(value, MetricSpec):
            return value
        try:
            return cls(MetricKind(str(value).lower()), eta_convex)
        except ValueError:
            choices = ", ".join(k.value for k in MetricKind)
            raise ConfigError(f"unknown metric {value!r}; expected one of {choices}")


class EdgeMetric(ABC):
    """
    Distance between edge-adjacent faces, evaluated for many pairs at once.
    """

    @abstractmethod
    def edge_weights(self, pairs: np.ndarray, shared_edges: np.ndarray) -> np.ndarray:
        """
        Args:
            pairs: (m, 2) adjacent face indices.
            shared_edges: (m, 2) vertex indices of the edge each pair shares.

        Returns:
            (m,) non-negative distances, before any flooring.
        """
        pass


class AngularMetric(EdgeMetric):
    def __init__(self, geom: FaceGeometry, eta_convex: float = DEFAULT_ETA_CONVEX):
        self.geom = geom
        self.eta_convex = eta_convex

    def edge_weights(self, pairs, shared_edges=None):
        n = self.geom.normals
        b = self.geom.barycenters
        i, j = pairs[:, 0], pairs[:, 1]
        base = np.maximum(1.0 - np.einsum("ij,ij->i", n[i], n[j]), 0.0)
        # concave when face j rises above face i's plane
        concave = np.einsum("ij,ij->i", b[j] - b[i], n[i]) > 0
        eta = np.where(concave, 1.0, self.eta_convex)
        return eta * base


class GeodesicMetric(EdgeMetric):
    """Barycenter distance after unfolding face j about the shared edge into face i's plane."""

    def __init__(self, mesh: TriMesh, geom: FaceGeometry):
        self.mesh = mesh
        self.geom = geom

    def edge_weights(self, pairs, shared_edges):
        p = self.mesh.vertices[shared_edges[:, 0]]
        q = self.mesh.vertices[shared_edges[:, 1]]
        axis = q - p
        axis /= np.linalg.norm(axis, axis=1)[:, None]

        def split(b):
            r = b - p
            along = np.einsum("ij,ij->i", r, axis)
            perp = np.linalg.norm(r - along[:, None] * axis, axis=1)
            return along, perp

        along_i, perp_i = split(self.geom.barycenters[pairs[:, 0]])
        along_j, perp_j = split(self.geom.barycenters[pairs[:, 1]])
        return np.hypot(along_i - along_j, perp_i + perp_j)


class SdfMetric(EdgeMetric):
    def __init__(self, sdf_values: np.ndarray):
        self.sdf_values = np.asarray(sdf_values, dtype=np.float64)

    def edge_weights(self, pairs, shared_edges=None):
        return np.abs(self.sdf_values[pairs[:, 0]] - self.sdf_values[pairs[:, 1]])


class ProductMetric(EdgeMetric):
    def __init__(self, mesh: TriMesh, geom: FaceGeometry, eta_convex: float = DEFAULT_ETA_CONVEX):
        self.geodesic = GeodesicMetric(mesh, geom)
        self.angular = AngularMetric(geom, eta_convex)

    def edge_weights(self, pairs, shared_edges):
        return self.geodesic.edge_weights(pairs, shared_edges) * self.angular.edge_weights(pairs, shared_edges)


def make_edge_metric(spec: MetricSpec, mesh: TriMesh, geom: FaceGeometry,
                     sdf_values: Optional[np.ndarray] = None) -> EdgeMetric:
    if spec.kind is not MetricKind.SDF and sdf_values is not None:
        raise ConfigError(f"SDF values are only used by the sdf metric, not {spec.kind.value}")
    if spec.kind is MetricKind.ANGULAR:
        return AngularMetric(geom, spec.eta_convex)
    if spec.kind is MetricKind.GEODESIC:
        return GeodesicMetric(mesh, geom)
    if spec.kind is MetricKind.PRODUCT:
        return ProductMetric(mesh, geom, spec.eta_convex)
    if sdf_values is None:
        raise ConfigError("the sdf metric needs per-face SDF values")
    if len(sdf_values) != mesh.n:
        raise ConfigError(f"{len(sdf_values)} SDF values for {mesh.n} faces")
    return SdfMetric(sdf_values)


def shared_edge(mesh: TriMesh, i: int, j: int) -> np.ndarray:
    """
    The two vertex indices faces i and j have in common.

    Raises:
        NotAdjacentError: the faces share fewer or more than two vertices.
    """
    common = [v for v in mesh.faces[i].tolist() if v in set(mesh.faces[j].tolist())]
    if i == j or len(common) != 2:
        raise NotAdjacentError(i, j)
    return np.asarray(common, dtype=np.int64)


def angular_edge_distance(mesh: TriMesh, geom: FaceGeometry, i: int, j: int,
                          eta_convex: float = DEFAULT_ETA_CONVEX) -> float:
    """``eta * (1 - <n_i, n_j>)``, eta = 1 on concave folds and ``eta_convex`` otherwise."""
    edge = shared_edge(mesh, i, j)
    return float(AngularMetric(geom, eta_convex).edge_weights(np.array([[i, j]]), edge[None, :])[0])


def geodesic_edge_distance(mesh: TriMesh, geom: FaceGeometry, i: int, j: int) -> float:
    """Length of the shortest path between the barycenters across the shared edge."""
    if i == j:
        return 0.0
    edge = shared_edge(mesh, i, j)
    return float(GeodesicMetric(mesh, geom).edge_weights(np.array([[i, j]]), edge[None, :])[0])


def sdf_edge_distance(sdf_values, i: int, j: int) -> float:
    return float(abs(float(sdf_values[i]) - float(sdf_values[j])))
