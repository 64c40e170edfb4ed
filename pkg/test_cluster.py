#!/usr/bin/env python3
"""
Cosine k-means++ and segmentation pipeline validation
"""

import os
import sys

import numpy as np
from colorama import init

init(autoreset=True)

sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

import src.sampling.farthest as farthest_module
from src.clustering.kmeans import Segmentation, _repair_empty, canonical_labels, kmeans_cosine
from src.clustering.pipeline import cluster_components, k_from_fraction, resolve_sample_size, segment
from src.core.console import check, header, run_tests
from src.core.errors import ClusteringError, ConfigError
from src.graph.dual_graph import build_dual_graph
from src.mesh.primitives import box_side_labels, make_icosphere, make_test_cube


def two_cones(rng: np.random.Generator, per_group: int = 6, spread: float = 0.15) -> np.ndarray:
    angles = np.concatenate([rng.uniform(-spread, spread, per_group),
                             np.pi + rng.uniform(-spread, spread, per_group)])
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def exhaustive_inertia(points: np.ndarray) -> float:
    """Best two-cluster inertia over every split; point 0 pinned to the first cluster."""
    n = points.shape[0]
    best = np.inf
    for mask in range(1, 2 ** (n - 1)):
        second = np.array([(mask >> b) & 1 for b in range(n - 1)], dtype=bool)
        member = np.concatenate([[False], second])
        if not member.any():
            continue
        s1 = points[~member].sum(axis=0)
        s2 = points[member].sum(axis=0)
        best = min(best, n - np.linalg.norm(s1) - np.linalg.norm(s2))
    return best


def random_rows(rng: np.random.Generator, n: int = 200, k: int = 5) -> np.ndarray:
    rows = rng.uniform(0.0, 1.0, size=(n, k)) ** 3
    return rows / np.linalg.norm(rows, axis=1)[:, None]


def _raises(exc_type, fn) -> bool:
    try:
        fn()
    except exc_type:
        return True
    return False


def test_trivial_cases():
    header("Testing Trivial Cluster Counts")
    rows = random_rows(np.random.default_rng(0), n=20)
    seg = kmeans_cosine(rows, 1)
    check(np.all(seg.labels == 1) and seg.n_c == 1, "n_c = 1 gives a single label")
    seg = kmeans_cosine(rows, 20, seed=4)
    check(sorted(seg.labels.tolist()) == list(range(1, 21)), "n_c = n puts every point alone")
    check(seg.inertia < 1e-12, "n_c = n has zero inertia")


def test_two_groups():
    header("Testing Two Antipodal Groups")
    rng = np.random.default_rng(8)
    points = two_cones(rng)
    seg = kmeans_cosine(points, 2, seed=1)
    truth = np.array([1] * 6 + [2] * 6)
    check(np.array_equal(seg.labels, truth), "groups recovered exactly")
    best = exhaustive_inertia(points)
    check(np.isclose(seg.inertia, best, rtol=1e-9, atol=1e-12), f"inertia equals the exhaustive optimum {best:.6f}")


def test_determinism_and_monotonicity():
    header("Testing Determinism and Lloyd Monotonicity")
    rows = random_rows(np.random.default_rng(5))
    a = kmeans_cosine(rows, 4, seed=7)
    b = kmeans_cosine(rows, 4, seed=7)
    c = kmeans_cosine(rows, 4, seed=7, threads=4)
    check(np.array_equal(a.labels, b.labels) and a.inertia == b.inertia, "same seed, identical result")
    check(np.array_equal(a.labels, c.labels) and a.replicate == c.replicate, "thread count does not matter")
    history = np.array(a.inertia_history)
    check(np.all(np.diff(history) <= 1e-12), "inertia non-increasing across iterations")
    check(np.all(np.bincount(a.labels)[1:] > 0), "every cluster nonempty")
    check(np.array_equal(canonical_labels(a.labels), a.labels), "labels numbered by first appearance")
    single = kmeans_cosine(rows, 4, seed=7, replicates=1)
    check(a.inertia <= single.inertia, "more replicates never lose inertia")


def test_repair_and_labels():
    header("Testing Empty-cluster Repair and Canonical Labels")
    labels = _repair_empty(np.array([0, 0, 0, 1]), np.array([0.1, 0.5, 0.2, 0.0]), 3)
    check(labels.tolist() == [0, 2, 0, 1], "farthest movable point reseeds the empty cluster")
    check(canonical_labels(np.array([3, 3, 1, 2, 1])).tolist() == [1, 1, 2, 3, 2], "first-appearance numbering")


def test_errors():
    header("Testing Clustering Errors")
    rows = random_rows(np.random.default_rng(1), n=5)
    check(_raises(ClusteringError, lambda: kmeans_cosine(rows, 6)), "n_c > n rejected")
    check(_raises(ClusteringError, lambda: kmeans_cosine(np.tile([[1.0, 0.0]], (5, 1)), 2)),
          "identical rows with n_c > 1 rejected")
    check(_raises(ClusteringError, lambda: kmeans_cosine(2.0 * rows, 2)), "rows that are not unit-norm rejected")


def test_components():
    header("Testing Cluster Connectivity")
    cube = make_test_cube(3)
    graph = build_dual_graph(cube, None, "angular")
    labels = box_side_labels(cube)
    seg = Segmentation(labels, 6)
    check(cluster_components(graph, seg).tolist() == [1] * 6, "each cube side is one piece")
    merged = np.where(labels == 2, 1, labels)
    merged = np.where(merged > 2, merged - 1, merged)
    pieces = cluster_components(graph, Segmentation(merged, 5))
    check(pieces.tolist() == [2, 1, 1, 1, 1], "opposite sides sharing a label form two pieces")


def test_pipeline():
    header("Testing Segmentation Pipeline")
    check(k_from_fraction(10800, 0.01) == 108 and k_from_fraction(10, 0.05) == 2, "fraction-based k")
    check(_raises(ConfigError, lambda: resolve_sample_size(100, k=5, frac=0.1)), "two sampling modes rejected")
    check(_raises(ConfigError, lambda: resolve_sample_size(100)), "no sampling mode rejected")

    sphere = make_icosphere(2)
    result = segment(sphere, "geodesic", 1, k=10, first_face=0)
    check(np.all(result.labels == 1), "n_c = 1 gives one segment")

    calls = []
    original = farthest_module.sssp

    def counting(graph, source, engine="heap"):
        calls.append(source)
        return original(graph, source, engine)

    farthest_module.sssp = counting
    try:
        result = segment(sphere, "geodesic", 4, frac=0.05, first_face=0, cluster_seed=2)
    finally:
        farthest_module.sssp = original
    check(len(calls) == result.k == 16 and result.sample.sssp_calls == 16, "exactly k shortest-path solves")
    check(calls == result.sample.indices.tolist(), "one solve per sampled face, in order")
    check(result.segmentation.n_c == 4 and not result.full_path, "sampled path used")

    eps = segment(sphere, "geodesic", 3, epsilon=0.2, first_face=0)
    check(eps.sample.betas[-1] < 0.2 * eps.sample.betas[0] <= eps.sample.betas[-2], "epsilon rule chooses k")

    full = segment(make_icosphere(1), "angular", 3, frac=1.0, first_face=0)
    check(full.full_path and full.k == 80, "frac = 1 takes the full-matrix path")
    check(np.isclose(full.sigma, full.full.D.mean()), "full path kernels with sigma")


def run_all_tests():
    return run_tests("Clustering Validation", {
        "TrivialCases": test_trivial_cases,
        "TwoGroups": test_two_groups,
        "DeterminismAndMonotonicity": test_determinism_and_monotonicity,
        "RepairAndLabels": test_repair_and_labels,
        "Errors": test_errors,
        "Components": test_components,
        "Pipeline": test_pipeline,
    })


if __name__ == "__main__":
    results = run_all_tests()
    sys.exit(0 if all(results.values()) else 1)
