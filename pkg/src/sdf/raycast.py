"""
Ray/triangle queries for the shape diameter function.

Rays are tested against triangles with a vectorized Moller-Trumbore kernel.
Large meshes go through a flat box hierarchy: triangles are split by median
into leaves, rays are slab-tested against the leaf boxes, and only triangles
of hit leaves are tested exactly.
"""

from typing import List, Optional

import numpy as np

GRAZING_COS = 1e-6
PARALLEL_TOL = 1e-12
CHUNK = 4096


class TriangleSet:
    """Precomputed triangle data for intersection queries."""

    def __init__(self, vertices: np.ndarray, faces: np.ndarray):
        tri = vertices[faces]
        self.v0 = tri[:, 0]
        self.e1 = tri[:, 1] - tri[:, 0]
        self.e2 = tri[:, 2] - tri[:, 0]
        cross = np.cross(self.e1, self.e2)
        self.unit_normals = cross / np.linalg.norm(cross, axis=1)[:, None]
        self.scale = np.linalg.norm(self.e1, axis=1) * np.linalg.norm(self.e2, axis=1)
        self.lo = tri.min(axis=1)
        self.hi = tri.max(axis=1)
        extent = float(np.linalg.norm(vertices.max(axis=0) - vertices.min(axis=0)))
        self.t_min = 1e-9 * extent
        self.n = faces.shape[0]

    def nearest_hits(self, origin: np.ndarray, directions: np.ndarray, candidates: np.ndarray,
                     exclude: int = -1) -> np.ndarray:
        """
        Distance along each ray to the first candidate triangle hit.

        Hits on ``exclude`` and grazing hits are ignored; misses are ``inf``.
        """
        best = np.full(directions.shape[0], np.inf)
        candidates = candidates[candidates != exclude]
        for start in range(0, candidates.size, CHUNK):
            idx = candidates[start:start + CHUNK]
            e1, e2, v0 = self.e1[idx], self.e2[idx], self.v0[idx]
            d = directions[:, None, :]
            h = np.cross(d, e2[None, :, :])
            a = np.einsum("tk,rtk->rt", e1, h)
            ok = np.abs(a) > PARALLEL_TOL * self.scale[idx][None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                f = np.where(ok, 1.0 / a, 0.0)
                s = origin[None, :] - v0
                u = f * np.einsum("tk,rtk->rt", s, h)
                q = np.cross(s, e1)
                v = f * np.einsum("rk,tk->rt", directions, q)
                t = f * np.einsum("tk,tk->t", e2, q)[None, :]
            facing = np.abs(directions @ self.unit_normals[idx].T) > GRAZING_COS
            hit = ok & facing & (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0) & (t > self.t_min)
            t = np.where(hit, t, np.inf)
            if t.size:
                best = np.minimum(best, t.min(axis=1))
        return best


class BoxHierarchy:
    """Median-split leaves with axis-aligned bounds."""

    def __init__(self, triangles: TriangleSet, leaf_size: int = 32):
        self.triangles = triangles
        centers = (triangles.lo + triangles.hi) / 2.0
        leaves: List[np.ndarray] = []
        stack = [np.arange(triangles.n)]
        while stack:
            idx = stack.pop()
            if idx.size <= leaf_size:
                leaves.append(idx)
                continue
            spread = np.ptp(centers[idx], axis=0)
            axis = int(np.argmax(spread))
            order = idx[np.argsort(centers[idx, axis], kind="stable")]
            half = order.size // 2
            stack += [order[half:], order[:half]]
        self.leaves = leaves
        pad = 1e-9 * max(float(np.ptp(triangles.lo, axis=0).max()), 1.0)
        self.lo = np.array([triangles.lo[l].min(axis=0) for l in leaves]) - pad
        self.hi = np.array([triangles.hi[l].max(axis=0) for l in leaves]) + pad

    def candidates(self, origin: np.ndarray, directions: np.ndarray) -> np.ndarray:
        d = np.where(np.abs(directions) < 1e-300, 1e-300, directions)
        inv = 1.0 / d
        t1 = (self.lo[None, :, :] - origin[None, None, :]) * inv[:, None, :]
        t2 = (self.hi[None, :, :] - origin[None, None, :]) * inv[:, None, :]
        t_near = np.minimum(t1, t2).max(axis=2)
        t_far = np.maximum(t1, t2).min(axis=2)
        hit = (t_far >= np.maximum(t_near, 0.0)).any(axis=0)
        if not hit.any():
            return np.empty(0, dtype=np.int64)
        return np.concatenate([self.leaves[k] for k in np.flatnonzero(hit)])


class RayCaster:
    """
    First-hit queries over a mesh; brute force up to ``bvh_threshold`` faces.
    """

    def __init__(self, vertices: np.ndarray, faces: np.ndarray, bvh_threshold: int = 20000):
        self.triangles = TriangleSet(vertices, faces)
        self.hierarchy: Optional[BoxHierarchy] = None
        if self.triangles.n > bvh_threshold:
            self.hierarchy = BoxHierarchy(self.triangles)
        self._all = np.arange(self.triangles.n)

    def first_hits(self, origin: np.ndarray, directions: np.ndarray, exclude: int = -1) -> np.ndarray:
        if self.hierarchy is None:
            candidates = self._all
        else:
            candidates = self.hierarchy.candidates(origin, directions)
        return self.triangles.nearest_hits(origin, directions, candidates, exclude)
