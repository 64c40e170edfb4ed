from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from src.core.errors import DisconnectedGraphError
from src.core.logger import get_logger
from src.graph.metrics import MetricSpec, make_edge_metric
from src.mesh.trimesh import FaceAdjacency, FaceGeometry, TriMesh, face_adjacency, face_geometry

logger = get_logger(__name__)

FLOOR_SCALE = 1e-8
ZERO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DualGraph:
    """
    Weighted face-adjacency graph, one node per face.

    Attributes:
        n (int): Node count (mesh faces).
        pairs (np.ndarray): (m, 2) arcs, i < j.
        weights (np.ndarray): (m,) strictly positive arc weights.
        eps_floor (float): Value that replaced zero distances.
        metric (str): Name of the metric that produced the weights.
    """
    n: int
    pairs: np.ndarray
    weights: np.ndarray
    eps_floor: float = 0.0
    metric: str = "custom"
    adjacency: List[List[Tuple[int, float]]] = field(init=False, repr=False, compare=False)
    matrix: sparse.csr_matrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = np.ascontiguousarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        weights = np.ascontiguousarray(self.weights, dtype=np.float64).reshape(-1)
        pairs.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "weights", weights)

        adjacency: List[List[Tuple[int, float]]] = [[] for _ in range(self.n)]
        for (i, j), w in zip(pairs.tolist(), weights.tolist()):
            adjacency[i].append((j, w))
            adjacency[j].append((i, w))
        object.__setattr__(self, "adjacency", adjacency)

        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        matrix = sparse.csr_matrix((np.concatenate([weights, weights]), (rows, cols)), shape=(self.n, self.n))
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_edges(cls, n: int, edges, weights, metric: str = "custom") -> "DualGraph":
        """Graph over arbitrary weighted edges; edges are stored with i < j."""
        edges = np.sort(np.asarray(edges, dtype=np.int64).reshape(-1, 2), axis=1)
        return cls(n, edges, np.asarray(weights, dtype=np.float64), 0.0, metric)

    @property
    def n_edges(self) -> int:
        return int(self.pairs.shape[0])

    def weight(self, i: int, j: int) -> float:
        """Arc weight between i and j; 0.0 when they are not adjacent."""
        return float(self.matrix[i, j])

    def component_count(self) -> int:
        return int(connected_components(self.matrix, directed=False)[0])

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Dumps the arcs as ``i,j,weight`` rows."""
        path = Path(path)
        with open(path, "w") as f:
            f.write("i,j,weight\n")
            for (i, j), w in zip(self.pairs.tolist(), self.weights.tolist()):
                f.write(f"{i},{j},{w!r}\n")
        return path


def floor_weights(raw: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Replaces zero distances by a floor relative to the mean positive weight.

    Weights at or below ``ZERO_TOL * max(raw)`` count as zero, which absorbs
    round-off on coplanar neighbors. The floor is ``FLOOR_SCALE`` times the mean
    of the remaining weights, or ``FLOOR_SCALE`` if none remain.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.size == 0:
        return raw.copy(), FLOOR_SCALE
    zero = raw <= ZERO_TOL * max(float(raw.max()), 0.0)
    positive = raw[~zero]
    eps_floor = FLOOR_SCALE * float(positive.mean()) if positive.size else FLOOR_SCALE
    weights = np.where(zero, eps_floor, raw)
    return weights, eps_floor


def build_dual_graph(mesh: TriMesh, geom: Optional[FaceGeometry], metric, sdf_values: Optional[np.ndarray] = None,
                     adjacency: Optional[FaceAdjacency] = None, allow_nonmanifold: bool = False,
                     require_connected: bool = True) -> DualGraph:
    """
    Assembles the weighted dual graph for one metric.

    Args:
        mesh: The surface.
        geom: Face geometry, computed when omitted.
        metric: A :class:`MetricSpec` or a metric name.
        sdf_values: Per-face SDF, required for the sdf metric.
        adjacency: Precomputed face adjacency.
        allow_nonmanifold: Forwarded to :func:`face_adjacency`.
        require_connected: Reject graphs with more than one component.

    Raises:
        DisconnectedGraphError: the dual graph is not connected.
    """
    spec = MetricSpec.parse(metric)
    geom = geom if geom is not None else face_geometry(mesh)
    adjacency = adjacency if adjacency is not None else face_adjacency(mesh, allow_nonmanifold)

    edge_metric = make_edge_metric(spec, mesh, geom, sdf_values)
    raw = edge_metric.edge_weights(adjacency.pairs, adjacency.shared_edges)
    weights, eps_floor = floor_weights(raw)
    graph = DualGraph(mesh.n, adjacency.pairs, weights, eps_floor, spec.kind.value)

    components = graph.component_count()
    if components > 1 and require_connected:
        raise DisconnectedGraphError(components)
    if not adjacency.is_closed:
        logger.warning(f"{mesh.name}: {adjacency.boundary_edges} boundary edges; processing the open surface as-is")
    logger.info(
        f"Dual graph ({spec.kind.value}): {graph.n} nodes, {graph.n_edges} arcs, "
        f"eps_floor={eps_floor:.3g}, {int(np.sum(raw <= ZERO_TOL * max(raw.max(initial=0.0), 0.0)))} floored"
    )
    return graph
