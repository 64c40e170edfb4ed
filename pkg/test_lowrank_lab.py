#!/usr/bin/env python3
"""
Low-rank approximation lab validation
"""

import os
import sys
import tempfile

import numpy as np
from colorama import init

init(autoreset=True)

sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

from src.clustering.pipeline import segment
from src.core.console import check, header, run_tests
from src.core.errors import LabError, SizeGuardError
from src.lab.projections import (Spectrum, best_rank_k, frobenius_error, fss_projection, leverage_projection,
                                 leverage_scores, nystrom_projection, project_onto, projector)
from src.lab.report import CSV_COLUMNS, error_curves, matrix_error_curves, parse_k_grid, write_error_csv
from src.lab.spectral import compare_with_spectral, nystrom_embedding, nystrom_spectral_segment
from src.mesh.primitives import make_icosphere


def random_symmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    M = rng.normal(size=(n, n))
    return 0.5 * (M + M.T)


def positive_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    R = rng.uniform(0.0, 1.0, size=(n, n))
    return R @ R.T + np.eye(n)


def _raises(exc_type, fn) -> bool:
    try:
        fn()
    except exc_type:
        return True
    return False


def test_best_rank_k():
    header("Testing Best Rank-k Approximation")
    W = np.diag([3.0, -5.0, 1.0])
    check(np.allclose(best_rank_k(W, 1), np.diag([0.0, -5.0, 0.0])), "magnitude mode keeps the largest |lambda|")
    check(np.allclose(best_rank_k(W, 1, mode="psd"), np.diag([3.0, 0.0, 0.0])), "psd mode keeps the largest lambda")
    check(np.isclose(frobenius_error(W, best_rank_k(W, 1)), np.sqrt(10.0)), "error of the diagonal example")
    check(np.allclose(best_rank_k(W, 3), W) and np.allclose(best_rank_k(W, 0), 0.0), "k = n and k = 0")
    check(Spectrum.of(W).negative_count == 1, "negative eigenvalue counted")

    rng = np.random.default_rng(3)
    S = random_symmetric(rng, 12)
    spectrum = Spectrum.of(S)
    for k in (1, 4, 9):
        tail = np.sqrt(np.sum(spectrum.eigenvalues[k:] ** 2))
        check(np.isclose(frobenius_error(S, spectrum.best_rank_k(k)), tail, rtol=1e-10),
              f"k={k}: error equals the eigenvalue tail")
    check(_raises(LabError, lambda: Spectrum.of(np.triu(np.ones((3, 3))))), "asymmetric matrix rejected")
    check(_raises(LabError, lambda: best_rank_k(W, 1, mode="other")), "unknown mode rejected")


def test_projectors():
    header("Testing Column-space Projectors")
    rng = np.random.default_rng(11)
    full_rank = rng.normal(size=(10, 4))
    deficient = np.column_stack([full_rank[:, 0], full_rank[:, 1], full_rank[:, 0] + 2.0 * full_rank[:, 1]])
    for name, C in (("full rank", full_rank), ("rank deficient", deficient)):
        P = projector(C)
        check(np.allclose(P @ P, P, atol=1e-12) and np.allclose(P, P.T, atol=1e-12), f"{name}: idempotent, symmetric")
        W = rng.normal(size=(10, 10))
        check(np.allclose(project_onto(C, W), P @ W, atol=1e-12), f"{name}: basis projection matches C C^+ W")
    check(np.isclose(np.trace(projector(deficient)), 2.0), "projector rank follows numerical rank")


def test_nystrom():
    header("Testing Nyström Extension")
    W = np.array([[1.0, 0.5], [0.5, 1.0]])
    approx = nystrom_projection(W, [0])
    check(np.allclose(approx.W_tilde, [[1.0, 0.5], [0.5, 0.25]]), "completion of the 2x2 example")
    check(np.allclose(approx.N / approx.N[0, 0], [[1.0], [0.5]]), "extended eigenvector")
    q = np.array([1.0, 0.5]) / np.linalg.norm([1.0, 0.5])
    check(np.allclose(approx.F, np.outer(q, q) @ W), "F^k projects on the extended vector")

    W = np.array([[1.0, 0.2, 0.3], [0.2, 1.0, 0.4], [0.3, 0.4, 1.0]])
    reordered = nystrom_projection(W, [2, 0])
    check(np.allclose(reordered.W_tilde[np.ix_([0, 2], [0, 2])], W[np.ix_([0, 2], [0, 2])]),
          "sample block kept in original face order")
    check(np.allclose(nystrom_projection(W, [0, 1, 2]).W_tilde, W), "full sample reproduces W")
    check(_raises(LabError, lambda: nystrom_projection(np.ones((3, 3)), [0, 1])), "singular sample block rejected")
    check(_raises(LabError, lambda: nystrom_projection(W, [0, 0])), "repeated sample indices rejected")


def test_sampled_projection_identity():
    header("Testing Sampled Projection Identity")
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(8, 30))
        k = int(rng.integers(1, n))
        W = positive_spd(rng, n)
        s = rng.choice(n, size=k, replace=False)
        H = fss_projection(W, s)
        F = nystrom_projection(W, s).F
        worst = max(worst, frobenius_error(H, F) / np.linalg.norm(W))
    check(worst < 1e-8, f"H^k equals F^k on 50 random matrices (worst relative residual {worst:.2e})")


def test_leverage():
    header("Testing Leverage Scores")
    pi = leverage_scores(np.eye(4), 4)
    check(np.allclose(pi, 0.25), "identity with k = n gives uniform scores")
    e1 = np.zeros((3, 3))
    e1[0, 0] = 1.0
    G, pi, columns = leverage_projection(e1, 1)
    check(np.allclose(pi, [1.0, 0.0, 0.0]) and columns.tolist() == [0], "rank-one matrix picks its column")
    check(np.allclose(G, e1), "G^k reproduces a rank-one matrix")

    rng = np.random.default_rng(5)
    W = positive_spd(rng, 15)
    G, pi, columns = leverage_projection(W, 5)
    C = W[:, columns]
    oracle = C @ np.linalg.lstsq(C, W, rcond=None)[0]
    check(np.allclose(G, oracle, atol=1e-10), "G^k matches a least-squares oracle")
    check(np.isclose(pi.sum(), 1.0) and columns.size == 5, "scores sum to one over k vectors")
    check(np.all(np.diff(columns) > 0), "selected columns returned in index order")
    check(_raises(LabError, lambda: leverage_scores(W, 0)), "k = 0 rejected")


def test_k_grid():
    header("Testing k Grid Parsing")
    check(parse_k_grid("2:10:4") == [2, 6, 10], "a:b:step")
    check(parse_k_grid("1:3") == [1, 2, 3], "a:b")
    check(parse_k_grid("5,10") == [5, 10], "comma list")
    check(_raises(LabError, lambda: parse_k_grid("a:b")), "non-integer grid rejected")
    check(_raises(LabError, lambda: parse_k_grid("1:2:0")), "zero step rejected")


def test_error_curves():
    header("Testing Error Curves on a Small Mesh")
    sphere = make_icosphere(1)
    result = error_curves(sphere, "geodesic", [1, 5, 10, 20, 40, 80], first_face=0)
    scale = np.sqrt(result.n) * 1e-9
    reports = result.reports
    check([r.k for r in reports] == [1, 5, 10, 20, 40, 80], "one report per k")
    for r in reports:
        floor = r.err_best - scale
        ok = floor <= r.err_fss and floor <= r.err_leverage
        if np.isfinite(r.err_nystrom):
            ok = ok and floor <= r.err_nystrom
        check(ok, f"k={r.k}: best rank-k error is the smallest")
    best = [r.err_best for r in reports]
    check(all(b <= a + scale for a, b in zip(best, best[1:])), "best error non-increasing in k")
    check(all(r.err_best <= r.err_best_psd + scale for r in reports),
          "magnitude ordering is never worse than the clamped algebraic ordering")
    betas = [r.beta_k for r in reports]
    check(all(b <= a for a, b in zip(betas, betas[1:])), "beta_k non-increasing in k")
    last = reports[-1]
    check(last.err_best < 1e-8 and last.err_fss < 1e-8 and last.err_leverage < 1e-8, "k = n errors vanish")
    check(result.sample_indices[0] == 0 and result.sample_indices.size == 80, "one sample shared across k")

    with tempfile.TemporaryDirectory() as tmp:
        path = write_error_csv(result, os.path.join(tmp, "errors.csv"))
        with open(path) as f:
            lines = f.read().splitlines()
    check(lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 7, "CSV header and rows")
    check("err_best_psd" in lines[0].split(","), "clamped algebraic ordering reported as its own column")

    check(_raises(SizeGuardError, lambda: error_curves(sphere, "geodesic", [1, 2], guard=50)), "size guard enforced")
    W = np.eye(3)
    check(_raises(LabError, lambda: matrix_error_curves(W, 1.0 - W, [4])), "k above n rejected")


def two_groups(per_group: int = 20):
    x = np.concatenate([0.1 * np.arange(per_group), 100.0 + 0.1 * np.arange(per_group)])
    s = np.array([0, per_group, per_group - 1, 2 * per_group - 1, per_group // 2, per_group + per_group // 2])
    Wk = np.exp(-np.abs(x[:, None] - x[s][None, :]) ** 2 / 2.0)
    return Wk, s


def test_spectral_baseline():
    header("Testing Nyström Spectral Segmentation")
    Wk, s = two_groups()
    V = nystrom_embedding(Wk, s, 2)
    check(V.shape == (40, 2) and np.all(np.linalg.norm(V, axis=1) > 0), "embedding has a nonzero row per face")
    seg = nystrom_spectral_segment(Wk, s, 2, seed=0)
    check(np.array_equal(seg.labels, [1] * 20 + [2] * 20), "separated groups recovered")
    check(_raises(LabError, lambda: nystrom_embedding(Wk, s, 7)), "more eigenvectors than samples rejected")

    result = segment(make_icosphere(2), "geodesic", 2, k=32, first_face=0)
    comparison = compare_with_spectral(result, seed=1)
    check(0.0 <= comparison.d_rand <= 1.0 and 0.0 <= comparison.d_jaccard <= 1.0, "distances in [0, 1]")
    check(comparison.fss_components.size == 2 and np.all(comparison.nystrom_components >= 1),
          "components reported per cluster")


def run_all_tests():
    return run_tests("Low-rank Lab Validation", {
        "BestRankK": test_best_rank_k,
        "Projectors": test_projectors,
        "Nystrom": test_nystrom,
        "SampledProjectionIdentity": test_sampled_projection_identity,
        "Leverage": test_leverage,
        "KGrid": test_k_grid,
        "ErrorCurves": test_error_curves,
        "SpectralBaseline": test_spectral_baseline,
    })


if __name__ == "__main__":
    results = run_all_tests()
    sys.exit(0 if all(results.values()) else 1)
