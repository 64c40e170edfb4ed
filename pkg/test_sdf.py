#!/usr/bin/env python3
"""
Shape diameter function validation
"""

import os
import sys
import tempfile
from pathlib import Path

import numpy as np
from colorama import init
from scipy.spatial.transform import Rotation

init(autoreset=True)

sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

from src.core.console import check, header, run_tests
from src.core.errors import ConfigError, SdfError
from src.mesh.primitives import make_box, make_icosphere, make_torus
from src.mesh.trimesh import TriMesh, face_geometry
from src.sdf.raycast import RayCaster
from src.sdf.shape_diameter import SdfConfig, compute_sdf, load_sdf, robust_weighted_length, save_sdf


def _central_top_faces(slab: TriMesh, center=(5.0, 5.0)) -> np.ndarray:
    geom = face_geometry(slab)
    top = geom.normals[:, 2] > 0.9
    near = np.linalg.norm(geom.barycenters[:, :2] - np.asarray(center), axis=1) < 1.5
    return np.flatnonzero(top & near)


def test_cone_sampling():
    header("Testing Cone Sampling")
    cfg = SdfConfig(cone_half_angle=60.0, rays_per_face=30)
    theta = cfg.cone_angles()
    check(theta.size == 30, "one polar angle per ray")
    check(np.all(np.diff(theta) > 0) and theta.max() < np.radians(60.0), "angles increase inside the cone")
    for bad in (dict(cone_half_angle=0.0), dict(cone_half_angle=90.0), dict(rays_per_face=0)):
        try:
            SdfConfig(**bad)
            raised = False
        except ConfigError:
            raised = True
        check(raised, f"invalid config {bad} rejected")


def test_robust_length():
    header("Testing Outlier-filtered Mean")
    lengths = np.array([1.0, 1.0, 1.0, 1.0, 10.0])
    value = robust_weighted_length(lengths, np.ones(5), 1.0)
    check(value == 1.0, "far outlier dropped")
    value = robust_weighted_length(np.array([1.0, 2.0]), np.array([3.0, 1.0]), 1.0)
    check(np.isclose(value, 1.25), "weights applied to the kept lengths")


def test_slab_thickness():
    header("Testing Slab Thickness")
    slab = make_box((10.0, 10.0, 1.0), (10, 10, 1), name="slab")
    faces = _central_top_faces(slab)
    cfg = SdfConfig(seed=3)
    sdf = compute_sdf(slab, cfg=cfg)
    theta = cfg.cone_angles()
    expected = robust_weighted_length(1.0 / np.cos(theta), 1.0 / theta, cfg.outlier_sigma)
    check(np.allclose(sdf[faces], expected, rtol=1e-6), f"central faces match the plane-hit reference {expected:.4f}")

    narrow = compute_sdf(slab, cfg=SdfConfig(cone_half_angle=1.0, rays_per_face=8))
    check(np.allclose(narrow[faces], 1.0, rtol=1e-3), "narrow cone measures the thickness itself")


def test_sphere_uniformity():
    header("Testing Sphere Uniformity")
    sphere = make_icosphere(3)
    sdf = compute_sdf(sphere, cfg=SdfConfig(seed=1))
    cv = sdf.std() / sdf.mean()
    check(cv < 0.05, f"coefficient of variation {cv:.4f} below 0.05")
    check(1.0 < sdf.mean() < 2.0, "values lie between the cone chord and the diameter")


def test_rigid_invariance():
    header("Testing Rigid Motion and Scale")
    torus = make_torus(major_segments=24, minor_segments=12)
    cfg = SdfConfig(seed=5)
    base = compute_sdf(torus, cfg=cfg)
    rotation = Rotation.from_euler("xyz", [0.3, -1.1, 2.0]).as_matrix()
    moved = compute_sdf(torus.transformed(rotation, translation=[3.0, -2.0, 7.5]), cfg=cfg)
    check(np.allclose(moved, base, rtol=1e-6), "rotation and translation leave the SDF unchanged")
    scaled = compute_sdf(torus.transformed(scale=2.0), cfg=cfg)
    check(np.allclose(scaled, 2.0 * base, rtol=1e-6), "scaling by 2 doubles the SDF")
    again = compute_sdf(torus, cfg=SdfConfig(seed=5, threads=4))
    check(np.array_equal(again, base), "thread count does not change the values")


def test_hierarchy_matches_brute_force():
    header("Testing Box Hierarchy Against Brute Force")
    sphere = make_icosphere(2)
    brute = RayCaster(sphere.vertices, sphere.faces)
    tree = RayCaster(sphere.vertices, sphere.faces, bvh_threshold=0)
    check(tree.hierarchy is not None and brute.hierarchy is None, "threshold selects the query path")
    rng = np.random.default_rng(2)
    directions = rng.normal(size=(64, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    for origin in (np.zeros(3), np.array([0.2, -0.1, 0.3])):
        a = brute.first_hits(origin, directions)
        b = tree.first_hits(origin, directions)
        assert np.allclose(a, b, rtol=1e-12, atol=0.0), "hierarchy changed a hit distance"
    check(True, "identical first hits from inside the sphere")
    geom = face_geometry(sphere)
    inward = -geom.normals[:5]
    for i in range(5):
        t = brute.first_hits(geom.barycenters[i], inward[i:i + 1], exclude=i)
        check(np.isfinite(t[0]) and 1.8 < t[0] < 2.0, f"face {i}: inward ray crosses the sphere")


def test_errors_and_files():
    header("Testing SDF Errors and Files")
    open_mesh = TriMesh.from_arrays(np.eye(3), np.array([[0, 1, 2]]))
    try:
        compute_sdf(open_mesh)
        raised = False
    except SdfError:
        raised = True
    check(raised, "open mesh rejected")

    with tempfile.TemporaryDirectory() as tmp:
        path = save_sdf([0.5, 1.25, 2.0], Path(tmp) / "m.sdf")
        check(np.array_equal(load_sdf(path, 3), [0.5, 1.25, 2.0]), "SDF file round-trip")
        for text, n in (("0.5\nabc\n", None), ("0.5\nnan\n", None), ("0.5\n1.0\n", 3)):
            bad = Path(tmp) / "bad.sdf"
            bad.write_text(text)
            try:
                load_sdf(bad, n)
                raised = False
            except SdfError:
                raised = True
            check(raised, f"bad SDF file {text!r} rejected")


def run_all_tests():
    return run_tests("SDF Validation", {
        "ConeSampling": test_cone_sampling,
        "RobustLength": test_robust_length,
        "SlabThickness": test_slab_thickness,
        "SphereUniformity": test_sphere_uniformity,
        "RigidInvariance": test_rigid_invariance,
        "HierarchyMatchesBruteForce": test_hierarchy_matches_brute_force,
        "ErrorsAndFiles": test_errors_and_files,
    })


if __name__ == "__main__":
    results = run_all_tests()
    sys.exit(0 if all(results.values()) else 1)
