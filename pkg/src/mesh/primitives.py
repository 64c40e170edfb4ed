"""
Closed test surfaces with outward orientation.
"""

from typing import Dict, Sequence, Tuple

import numpy as np

from src.mesh.trimesh import TriMesh, face_geometry


def make_box(size: Sequence[float] = (1.0, 1.0, 1.0), divisions: Sequence[int] = (1, 1, 1),
             name: str = "box") -> TriMesh:
    """
    Watertight axis-aligned box ``[0, sx] x [0, sy] x [0, sz]``.

    Each side is a grid of ``divisions`` cells along its two in-plane axes, two
    triangles per cell. Vertices on shared cube edges are shared, so every
    edge is used by exactly two faces.
    """
    divisions = tuple(int(d) for d in divisions)
    if any(d < 1 for d in divisions):
        raise ValueError(f"divisions must be positive, got {divisions}")
    size = np.asarray(size, dtype=np.float64)

    index: Dict[Tuple[int, int, int], int] = {}
    vertices = []

    def vid(key: Tuple[int, int, int]) -> int:
        if key not in index:
            index[key] = len(vertices)
            vertices.append([key[a] * size[a] / divisions[a] for a in range(3)])
        return index[key]

    faces = []
    for a in range(3):
        u, v = (a + 1) % 3, (a + 2) % 3
        for outward in (False, True):
            c = divisions[a] if outward else 0
            for i in range(divisions[u]):
                for j in range(divisions[v]):
                    corners = []
                    for di, dj in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        key = [0, 0, 0]
                        key[a], key[u], key[v] = c, i + di, j + dj
                        corners.append(vid(tuple(key)))
                    p00, p10, p11, p01 = corners
                    if outward:
                        faces += [[p00, p10, p11], [p00, p11, p01]]
                    else:
                        faces += [[p00, p11, p10], [p00, p01, p11]]
    return TriMesh.from_arrays(np.asarray(vertices), np.asarray(faces), name)


def make_test_cube(subdivision: int) -> TriMesh:
    """
    Unit cube with each side split into ``subdivision**2`` cells.

    The face count is ``12 * subdivision**2``; subdivision 30 gives 10 800 faces.
    """
    if subdivision < 1:
        raise ValueError(f"subdivision must be >= 1, got {subdivision}")
    return make_box((1.0, 1.0, 1.0), (subdivision,) * 3, name=f"cube{subdivision}")


def box_side_labels(mesh: TriMesh) -> np.ndarray:
    """
    Analytic segmentation of an axis-aligned box into its six sides.

    Labels 1..6 follow (-x, +x, -y, +y, -z, +z).
    """
    normals = face_geometry(mesh).normals
    axis = np.argmax(np.abs(normals), axis=1)
    positive = normals[np.arange(mesh.n), axis] > 0
    return (2 * axis + positive + 1).astype(np.int64)


def make_icosphere(subdivisions: int = 2, radius: float = 1.0) -> TriMesh:
    """Geodesic sphere with ``20 * 4**subdivisions`` faces."""
    t = (1.0 + 5 ** 0.5) / 2.0
    vertices = [
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ]
    faces = [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ]
    vertices = [list(np.asarray(v, dtype=np.float64) / np.linalg.norm(v)) for v in vertices]

    for _ in range(subdivisions):
        midpoint: Dict[Tuple[int, int], int] = {}

        def mid(a: int, b: int) -> int:
            key = (min(a, b), max(a, b))
            if key not in midpoint:
                m = (np.asarray(vertices[a]) + np.asarray(vertices[b])) / 2.0
                vertices.append(list(m / np.linalg.norm(m)))
                midpoint[key] = len(vertices) - 1
            return midpoint[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            refined += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        faces = refined

    return TriMesh.from_arrays(np.asarray(vertices) * radius, np.asarray(faces), f"icosphere{subdivisions}")


def make_torus(major_radius: float = 2.0, minor_radius: float = 0.6,
               major_segments: int = 40, minor_segments: int = 20) -> TriMesh:
    """Ring torus around the z axis with ``2 * major_segments * minor_segments`` faces."""
    u = 2 * np.pi * np.arange(major_segments) / major_segments
    v = 2 * np.pi * np.arange(minor_segments) / minor_segments
    uu, vv = np.meshgrid(u, v, indexing="ij")
    ring = major_radius + minor_radius * np.cos(vv)
    vertices = np.stack([ring * np.cos(uu), ring * np.sin(uu), minor_radius * np.sin(vv)], axis=-1).reshape(-1, 3)

    def vid(i: int, j: int) -> int:
        return (i % major_segments) * minor_segments + (j % minor_segments)

    faces = []
    for i in range(major_segments):
        for j in range(minor_segments):
            p00, p10, p11, p01 = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            faces += [[p00, p10, p11], [p00, p11, p01]]
    return TriMesh.from_arrays(vertices, np.asarray(faces), "torus")
