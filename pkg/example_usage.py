#!/usr/bin/env python3
"""
Example usage of the farthest sampling segmentation toolkit
Demonstrates practical implementation patterns
"""

import os
import tempfile

import numpy as np
from colorama import init, Fore

# Initialize colorama
init(autoreset=True)

def example_cube_segmentation():
    """
    Example: segment a subdivided cube into its six sides
    Use case: the basic pipeline from mesh to colored PLY
    """
    print(f"\n{Fore.CYAN}{'='*60}")
    print(f"{Fore.CYAN}Example: Cube Segmentation")
    print(f"{Fore.CYAN}{'='*60}")
    
    try:
        from src.clustering import segment
        from src.evaluation import seg_distance
        from src.mesh import box_side_labels, export_colored_mesh, make_test_cube
        
        cube = make_test_cube(10)
        result = segment(cube, "angular", 6, frac=0.01, sample_seed=7, cluster_seed=7)
        
        print(f"Faces: {cube.n}, sampled columns: {result.k}, sigma_k: {result.sigma:.4g}")
        print(f"Cluster sizes: {result.segmentation.cluster_sizes().tolist()}")
        print(f"Rand distance to the analytic sides: {seg_distance(result.segmentation, box_side_labels(cube)):.4f}")
        
        with tempfile.TemporaryDirectory() as tmp:
            path = export_colored_mesh(cube, result.labels, os.path.join(tmp, "cube.ply"))
            print(f"{Fore.GREEN}✅ Colored PLY written ({os.path.getsize(path)} bytes)")
        
        return True
        
    except Exception as e:
        print(f"{Fore.RED}❌ Cube segmentation example failed: {e}")
        import traceback
        traceback.print_exc()
        return False

def example_beta_curve():
    """
    Example: choose k from the beta curve
    Use case: deciding how many columns a mesh needs before segmenting
    """
    print(f"\n{Fore.CYAN}{'='*60}")
    print(f"{Fore.CYAN}Example: Beta Curve and the Epsilon Rule")
    print(f"{Fore.CYAN}{'='*60}")
    
    try:
        from src.graph import build_dual_graph
        from src.mesh import make_icosphere
        from src.sampling import beta_curve, sample_epsilon, sample_fixed_k, suggest_k_star
        
        sphere = make_icosphere(3)
        graph = build_dual_graph(sphere, None, "geodesic")
        
        sample = sample_fixed_k(graph, 60, first_face=0)
        for l, ratio in beta_curve(sample)[::10]:
            print(f"  l={l:3d}  beta_l/beta_1={ratio:.4f}")
        print(f"Suggested k*: {suggest_k_star(sample, slope_tol=5e-3)}")
        
        rule = sample_epsilon(graph, 0.2, first_face=0)
        print(f"{Fore.GREEN}✅ Epsilon 0.2 stops at k={rule.k}")
        
        return True
        
    except Exception as e:
        print(f"{Fore.RED}❌ Beta curve example failed: {e}")
        import traceback
        traceback.print_exc()
        return False

def example_low_rank_lab():
    """
    Example: compare rank-k approximations of the full affinity matrix
    Use case: checking how far the sampled columns are from the optimum
    """
    print(f"\n{Fore.CYAN}{'='*60}")
    print(f"{Fore.CYAN}Example: Low-rank Approximation Lab")
    print(f"{Fore.CYAN}{'='*60}")
    
    try:
        from tabulate import tabulate
        from src.lab import error_curves
        from src.mesh import make_icosphere
        
        sphere = make_icosphere(2)
        result = error_curves(sphere, "geodesic", [4, 16, 64], first_face=0)
        rows = [[r.k, r.err_best, r.err_fss, r.err_leverage, r.err_nystrom] for r in result.reports]
        print(tabulate(rows, headers=["k", "best", "fss", "leverage", "nystrom"], floatfmt=".4g", tablefmt="grid"))
        print(f"{Fore.GREEN}✅ {result.negative_eigenvalues} negative eigenvalues in W (n={result.n})")
        
        return True
        
    except Exception as e:
        print(f"{Fore.RED}❌ Low-rank lab example failed: {e}")
        import traceback
        traceback.print_exc()
        return False

def example_spectral_comparison():
    """
    Example: FSS against Nyström spectral segmentation on one sample
    Use case: checking cluster connectivity of both methods
    """
    print(f"\n{Fore.CYAN}{'='*60}")
    print(f"{Fore.CYAN}Example: Spectral Baseline")
    print(f"{Fore.CYAN}{'='*60}")
    
    try:
        from src.clustering import segment
        from src.lab import compare_with_spectral
        from src.mesh import make_box
        
        bar = make_box((3.0, 1.0, 1.0), (12, 4, 4), name="bar")
        result = segment(bar, "geodesic", 3, frac=0.05, first_face=0)
        comparison = compare_with_spectral(result)
        
        print(f"FSS pieces per cluster:     {comparison.fss_components.tolist()}")
        print(f"Nyström pieces per cluster: {comparison.nystrom_components.tolist()}")
        print(f"{Fore.GREEN}✅ d_R={comparison.d_rand:.4f}, d_J={comparison.d_jaccard:.4f}")
        
        return True
        
    except Exception as e:
        print(f"{Fore.RED}❌ Spectral comparison example failed: {e}")
        import traceback
        traceback.print_exc()
        return False

def main():
    """Run all examples"""
    print(f"{Fore.MAGENTA}{'='*60}")
    print(f"{Fore.MAGENTA}Farthest Sampling Segmentation - Example Usage")
    print(f"{Fore.MAGENTA}{'='*60}")
    
    np.set_printoptions(precision=4, suppress=True)
    
    examples = [
        ("Cube Segmentation", example_cube_segmentation),
        ("Beta Curve", example_beta_curve),
        ("Low-rank Lab", example_low_rank_lab),
        ("Spectral Baseline", example_spectral_comparison)
    ]
    
    results = {}
    
    for name, example_func in examples:
        print(f"\n{Fore.YELLOW}Running: {name}")
        success = example_func()
        results[name] = success
    
    # Summary
    print(f"\n{Fore.MAGENTA}{'='*60}")
    print(f"{Fore.MAGENTA}Example Summary")
    print(f"{Fore.MAGENTA}{'='*60}")
    
    for name, success in results.items():
        status = f"{Fore.GREEN}✅ SUCCESS" if success else f"{Fore.RED}❌ FAILED"
        print(f"{name}: {status}")
    
    if all(results.values()):
        print(f"\n{Fore.GREEN}All examples completed successfully!")
    else:
        print(f"\n{Fore.YELLOW}Some examples failed. Check implementation.")

if __name__ == "__main__":
    main()
