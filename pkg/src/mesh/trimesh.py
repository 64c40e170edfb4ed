from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.core.errors import MeshValidationError, NonManifoldEdgeError


def _frozen(array: np.ndarray, dtype) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TriMesh:
    """
    Indexed triangle mesh.

    Face order is the file order and is never changed: a segmentation vector
    indexes faces exactly as an external ground-truth file does.

    Attributes:
        vertices (np.ndarray): (V, 3) float coordinates in model units.
        faces (np.ndarray): (n, 3) vertex indices per face.
        name (str): Free-form label, usually the source file stem.
    """
    vertices: np.ndarray
    faces: np.ndarray
    name: str = "mesh"

    def __post_init__(self):
        object.__setattr__(self, "vertices", _frozen(self.vertices, np.float64).reshape(-1, 3))
        object.__setattr__(self, "faces", _frozen(self.faces, np.int64).reshape(-1, 3))

    @property
    def n(self) -> int:
        return int(self.faces.shape[0])

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @classmethod
    def from_arrays(cls, vertices, faces, name: str = "mesh") -> "TriMesh":
        """Builds a mesh and runs :func:`validate_mesh` on it."""
        mesh = cls(np.asarray(vertices, dtype=np.float64), np.asarray(faces, dtype=np.int64), name)
        validate_mesh(mesh)
        return mesh

    def transformed(self, rotation: Optional[np.ndarray] = None, translation=None, scale: float = 1.0) -> "TriMesh":
        """Returns a rigidly moved and uniformly scaled copy with identical face order."""
        v = self.vertices * scale
        if rotation is not None:
            v = v @ np.asarray(rotation, dtype=np.float64).T
        if translation is not None:
            v = v + np.asarray(translation, dtype=np.float64)
        return TriMesh(v, self.faces, self.name)


@dataclass(frozen=True, eq=False)
class FaceGeometry:
    """
    Per-face derived quantities.

    Attributes:
        normals (np.ndarray): (n, 3) unit normals, right-hand rule on stored vertex order.
        barycenters (np.ndarray): (n, 3) mean of each face's three vertices.
        areas (np.ndarray): (n,) triangle areas.
    """
    normals: np.ndarray
    barycenters: np.ndarray
    areas: np.ndarray


@dataclass(frozen=True, eq=False)
class FaceAdjacency:
    """
    Edge-adjacency between faces.

    Attributes:
        pairs (np.ndarray): (m, 2) face pairs, i < j, one row per interior edge.
        shared_edges (np.ndarray): (m, 2) vertex indices of the edge each pair shares.
        neighbors (list): neighbors[i] is the sorted list of faces adjacent to face i.
        boundary_edges (int): number of edges used by a single face.
    """
    pairs: np.ndarray
    shared_edges: np.ndarray
    neighbors: List[List[int]] = field(repr=False)
    boundary_edges: int = 0

    @property
    def is_closed(self) -> bool:
        return self.boundary_edges == 0


def _cross(mesh: TriMesh) -> np.ndarray:
    tri = mesh.vertices[mesh.faces]
    return np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])


def validate_mesh(mesh: TriMesh) -> None:
    """
    Checks index range, distinct corners and non-zero area for every face.

    Raises:
        MeshValidationError: naming the first offending face.
    """
    faces = mesh.faces
    if mesh.n == 0:
        raise MeshValidationError("mesh has no faces")
    bad = np.flatnonzero((faces < 0).any(axis=1) | (faces >= mesh.n_vertices).any(axis=1))
    if bad.size:
        i = int(bad[0])
        raise MeshValidationError(
            f"face {i} references vertex outside [0, {mesh.n_vertices}): {faces[i].tolist()}"
        )
    repeated = (faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])
    bad = np.flatnonzero(repeated)
    if bad.size:
        i = int(bad[0])
        raise MeshValidationError(f"face {i} repeats a vertex: {faces[i].tolist()}")
    _degenerate_faces_check(mesh, _cross(mesh))


def _degenerate_faces_check(mesh: TriMesh, cross: np.ndarray) -> None:
    twice_area = np.linalg.norm(cross, axis=1)
    extent = np.ptp(mesh.vertices, axis=0).max() if mesh.n_vertices else 0.0
    tol = 1e-14 * max(extent, np.finfo(float).tiny) ** 2
    bad = np.flatnonzero(twice_area <= tol)
    if bad.size:
        i = int(bad[0])
        raise MeshValidationError(f"face {i} is degenerate (zero area): {mesh.faces[i].tolist()}")


def face_geometry(mesh: TriMesh) -> FaceGeometry:
    """
    Computes unit normals, barycenters and areas.

    Raises:
        MeshValidationError: if a face has a zero cross product.
    """
    cross = _cross(mesh)
    _degenerate_faces_check(mesh, cross)
    twice_area = np.linalg.norm(cross, axis=1)
    normals = cross / twice_area[:, None]
    barycenters = mesh.vertices[mesh.faces].mean(axis=1)
    return FaceGeometry(
        normals=_frozen(normals, np.float64),
        barycenters=_frozen(barycenters, np.float64),
        areas=_frozen(0.5 * twice_area, np.float64),
    )


def _edge_runs(mesh: TriMesh) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Sorted undirected edges with their owning faces, grouped into runs."""
    edges = np.sort(mesh.faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
    owner = np.repeat(np.arange(mesh.n), 3)
    order = np.lexsort((owner, edges[:, 1], edges[:, 0]))
    edges, owner = edges[order], owner[order]
    change = np.any(edges[1:] != edges[:-1], axis=1)
    starts = np.flatnonzero(np.r_[True, change])
    counts = np.diff(np.r_[starts, len(edges)])
    return edges, owner, starts, counts


def edge_face_counts(mesh: TriMesh) -> np.ndarray:
    """Number of faces using each distinct undirected edge."""
    return _edge_runs(mesh)[3]


def is_watertight(mesh: TriMesh) -> bool:
    """True when every edge is shared by exactly two faces."""
    return bool(np.all(edge_face_counts(mesh) == 2))


def face_adjacency(mesh: TriMesh, allow_nonmanifold: bool = False) -> FaceAdjacency:
    """
    Derives the dual adjacency: faces are adjacent iff they share an edge.

    Args:
        allow_nonmanifold: Keep the first two faces (file order) of an edge
                           shared by more than two faces instead of failing.

    Raises:
        NonManifoldEdgeError: identifying the first edge used by more than two faces.
    """
    edges, owner, starts, counts = _edge_runs(mesh)
    over = np.flatnonzero(counts > 2)
    if over.size and not allow_nonmanifold:
        s, c = starts[over[0]], counts[over[0]]
        raise NonManifoldEdgeError(tuple(int(v) for v in edges[s]), owner[s:s + c].tolist())

    interior = counts >= 2
    first = starts[interior]
    pairs = np.stack([owner[first], owner[first + 1]], axis=1)
    shared = edges[first]
    if pairs.size:
        # two faces sharing two edges are duplicates; keep one arc
        pairs, keep = np.unique(pairs, axis=0, return_index=True)
        shared = shared[keep]

    neighbors: List[List[int]] = [[] for _ in range(mesh.n)]
    for i, j in pairs.tolist():
        neighbors[i].append(j)
        neighbors[j].append(i)
    for lst in neighbors:
        lst.sort()

    return FaceAdjacency(
        pairs=_frozen(pairs.reshape(-1, 2), np.int64),
        shared_edges=_frozen(shared.reshape(-1, 2), np.int64),
        neighbors=neighbors,
        boundary_edges=int(np.sum(counts == 1)),
    )
