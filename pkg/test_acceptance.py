#!/usr/bin/env python3
"""
End-to-end acceptance runs: cube recovery, full-matrix agreement, sample
consistency and approximation ordering
"""

import os
import sys
import time

import numpy as np
from colorama import Fore, init

init(autoreset=True)

sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

from src.clustering.pipeline import prepare_graph, segment
from src.core.console import check, header, info, run_tests
from src.evaluation.consistency import consistency_histogram
from src.evaluation.indices import seg_distance
from src.lab.report import error_curves
from src.mesh.primitives import box_side_labels, make_box, make_icosphere, make_test_cube


def test_cube_recovery():
    header("Testing Cube Recovery (10 800 faces, 1% of the columns)")
    cube = make_test_cube(30)
    sides = box_side_labels(cube)
    graph = prepare_graph(cube, "angular")
    start = time.time()
    exact = 0
    for seed in range(10):
        result = segment(cube, "angular", 6, frac=0.01, sample_seed=seed, cluster_seed=seed, engine="scipy",
                         graph=graph)
        d = seg_distance(result.segmentation, sides, "rand")
        exact += d == 0.0
        info(f"  seed {seed}: k={result.k}, d_R={d:.3g}")
    elapsed = time.time() - start
    check(exact >= 9, f"{exact}/10 seeds recover the six sides exactly")
    print(f"{Fore.BLUE}  {elapsed:.1f}s for 10 runs")


def test_full_matrix_agreement():
    header("Testing Sampled vs Full-matrix Cube Segmentation")
    cube = make_test_cube(10)
    graph = prepare_graph(cube, "angular")
    sampled = segment(cube, "angular", 6, frac=0.01, first_face=0, graph=graph)
    full = segment(cube, "angular", 6, frac=1.0, first_face=0, graph=graph)
    check(full.full_path and not sampled.full_path and sampled.k == 12, "both paths taken")
    check(seg_distance(sampled.segmentation, full.segmentation) == 0.0, "same partition up to labels")
    check(seg_distance(full.segmentation, box_side_labels(cube)) == 0.0, "full path recovers the sides")


def test_sample_consistency():
    header("Testing 10% Samples Against the Full Matrix")
    boxes = [
        make_box((3.0, 1.0, 1.0), (9, 3, 3), name="bar"),
        make_box((1.0, 2.0, 4.0), (2, 4, 8), name="slab"),
        make_box((5.0, 1.0, 1.5), (10, 2, 3), name="beam"),
    ]
    for metric, n_c in (("geodesic", 2), ("angular", 6)):
        for mesh in boxes:
            hist = consistency_histogram(mesh, metric, fracs=(0.1,), trials=10, n_c=n_c, seed=0)
            median = float(np.median(hist.distances[0.1]))
            check(median < 0.1, f"{mesh.name}/{metric}: median d_R {median:.3g} over 10 seeds")


def test_approximation_ordering():
    header("Testing Best Rank-k Ordering on a Mesh")
    sphere = make_icosphere(2)
    grid = np.unique(np.linspace(1, sphere.n, 20).astype(int))
    result = error_curves(sphere, "geodesic", grid, first_face=0)
    violations = 0
    for r in result.reports:
        others = [r.err_fss, r.err_leverage] + ([r.err_nystrom] if np.isfinite(r.err_nystrom) else [])
        violations += r.err_best > min(others) + 1e-9
    check(len(result.reports) == 20 and violations == 0, "best error never exceeds the other methods")
    betas = np.array([r.beta_k for r in result.reports])
    check(np.all(np.diff(betas) <= 0.0) and betas[-1] == 0.0, "beta non-increasing, zero at k = n")


def test_cost_model():
    header("Testing Cost Counters")
    for subdivision in (4, 6, 8):
        cube = make_test_cube(subdivision)
        result = segment(cube, "geodesic", 3, frac=0.05, first_face=0)
        sample = result.sample
        check(sample.sssp_calls == result.k and sample.distance_evaluations == result.k * cube.n,
              f"n={cube.n}: {result.k} solves, k*n distances")


def run_all_tests():
    return run_tests("Acceptance Runs", {
        "CubeRecovery": test_cube_recovery,
        "FullMatrixAgreement": test_full_matrix_agreement,
        "SampleConsistency": test_sample_consistency,
        "ApproximationOrdering": test_approximation_ordering,
        "CostModel": test_cost_model,
    })


if __name__ == "__main__":
    results = run_all_tests()
    sys.exit(0 if all(results.values()) else 1)
