"""
Command-line entry point: segment, beta, sdf, eval, histogram, lab, benchmark.

Every command reads a :class:`RunConfig` (``--config`` file, then flags),
logs stage progress on stderr and prints results on stdout. Failures inside
the toolkit exit with code 2 and a ``[stage] message`` line.
"""

import argparse
import sys
import traceback
from dataclasses import fields
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from colorama import Fore

from src.affinity.kernel import build_wk, dump_wk
from src.cli.manifest import write_manifest
from src.clustering.pipeline import prepare_graph, resolve_sample_size, segment
from src.core import __version__, console
from src.core.config import METRICS, RunConfig
from src.core.errors import ConfigError, FSSError
from src.core.logger import get_logger, set_level
from src.evaluation.consistency import DEFAULT_FRACTIONS, compare_with_ground_truth, consistency_histogram
from src.evaluation.indices import jaccard_index, rand_index
from src.graph.dual_graph import DualGraph
from src.graph.metrics import MetricSpec
from src.lab.report import error_curves, parse_k_grid, write_error_csv
from src.lab.spectral import compare_with_spectral
from src.mesh.io import MESH_SUFFIXES, export_colored_mesh, load_labels, load_mesh, save_indices, save_labels
from src.mesh.trimesh import TriMesh
from src.sampling.farthest import sample_epsilon, sample_fixed_k, suggest_k_star, write_beta_csv
from src.sdf.shape_diameter import SdfConfig, compute_sdf, load_sdf, save_sdf

logger = get_logger(__name__)

_CONFIG_FIELDS = {f.name for f in fields(RunConfig)}


def _common_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", help="key = value run configuration file")
    parser.add_argument("--threads", type=int, help="worker cap (env FSS_THREADS)")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return parser


def _mesh_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--mesh", help="OFF, OBJ or PLY triangle mesh")
    parser.add_argument("--metric", choices=METRICS)
    parser.add_argument("--eta-convex", type=float, help="convex dihedral weight of the angular metric")
    parser.add_argument("--sdf-file", help="precomputed SDF, one value per face")
    parser.add_argument("--sdf-cone-angle", type=float)
    parser.add_argument("--sdf-rays", type=int)
    parser.add_argument("--sdf-outlier-sigma", type=float)
    parser.add_argument("--kernel", choices=("distance", "squared"))
    parser.add_argument("--engine", choices=("heap", "scipy"))
    parser.add_argument("--allow-nonmanifold", action="store_true", default=None)
    return parser


def _sampling_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--frac", type=float, help="sample fraction of the faces, in (0, 1]")
    mode.add_argument("--k", type=int, help="sample size")
    mode.add_argument("--epsilon", type=float, help="stop when beta_k / beta_1 < epsilon")
    parser.add_argument("--first-face", type=int)
    parser.add_argument("--seed", type=int, help="sampling seed")
    return parser


def _cluster_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--clusters", type=int, help="number of clusters n_c")
    parser.add_argument("--cluster-seed", type=int)
    parser.add_argument("--replicates", type=int)
    parser.add_argument("--max-iter", type=int)
    return parser


def build_parser() -> argparse.ArgumentParser:
    common, mesh, sampling, cluster = _common_options(), _mesh_options(), _sampling_options(), _cluster_options()
    parser = argparse.ArgumentParser(prog="fss", description="Farthest sampling mesh segmentation toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", parents=[common, mesh, sampling, cluster], help="segment a mesh")
    p.add_argument("--output", help="segmentation file (default <mesh>.seg)")
    p.add_argument("--ply", help="also write a per-face colored PLY")
    p.add_argument("--indices", help="write the sampled face indices")
    p.add_argument("--wk-dump", help="write W^k as a binary dump")
    p.add_argument("--graph-csv", help="write the dual graph arcs as CSV")
    p.set_defaults(handler=cmd_segment)

    p = sub.add_parser("beta", parents=[common, mesh, sampling], help="farthest sample and beta curve")
    p.add_argument("--output", help="CSV (default <mesh>.beta.csv)")
    p.set_defaults(handler=cmd_beta)

    p = sub.add_parser("sdf", parents=[common, mesh], help="shape diameter function per face")
    p.add_argument("--seed", type=int)
    p.add_argument("--output", help="one value per line (default <mesh>.sdf)")
    p.set_defaults(handler=cmd_sdf)

    p = sub.add_parser("eval", parents=[common], help="compare two segmentation files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("histogram", parents=[common, mesh, cluster], help="sampled vs full consistency")
    p.add_argument("--fracs", default=",".join(str(f) for f in DEFAULT_FRACTIONS))
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", help="CSV (default <mesh>.hist.csv)")
    p.set_defaults(handler=cmd_histogram)

    lab = sub.add_parser("lab", help="low-rank approximation laboratory")
    lab_sub = lab.add_subparsers(dest="lab_command", required=True)
    p = lab_sub.add_parser("errors", parents=[common, mesh], help="rank-k error curves")
    p.add_argument("--kgrid", required=True, help="a:b, a:b:step or a,b,c")
    p.add_argument("--first-face", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", help="CSV (default <mesh>.lab.csv)")
    p.set_defaults(handler=cmd_lab_errors)
    p = lab_sub.add_parser("compare", parents=[common, mesh, sampling, cluster],
                           help="FSS against Nyström spectral segmentation")
    p.set_defaults(handler=cmd_lab_compare)

    p = sub.add_parser("benchmark", parents=[common, mesh, sampling, cluster],
                       help="distances to ground-truth labels")
    p.add_argument("--truth", help="ground-truth labels for --mesh")
    p.add_argument("--dir", help="directory of meshes with <name>.seg ground truth")
    p.set_defaults(handler=cmd_benchmark)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    if getattr(args, "verbose", False):
        set_level("DEBUG")
    overrides = {name: value for name, value in vars(args).items() if name in _CONFIG_FIELDS}
    # n_c from the ground truth unless given
    if getattr(args, "command", None) == "benchmark":
        overrides.pop("clusters", None)
    return RunConfig.load(args.config, **overrides)


def _sdf_config(cfg: RunConfig) -> SdfConfig:
    return SdfConfig(cone_half_angle=cfg.sdf_cone_angle, rays_per_face=cfg.sdf_rays, seed=cfg.seed,
                     outlier_sigma=cfg.sdf_outlier_sigma, threads=cfg.threads)


def _load(cfg: RunConfig, path: Optional[str] = None) -> TriMesh:
    path = path or cfg.mesh
    if path is None:
        raise ConfigError("no mesh given; use --mesh or set mesh in the config file")
    return load_mesh(path)


def _graph(cfg: RunConfig, mesh: TriMesh) -> DualGraph:
    sdf_values = load_sdf(cfg.sdf_file, mesh.n) if cfg.sdf_file else None
    spec = MetricSpec.parse(cfg.metric, cfg.eta_convex)
    return prepare_graph(mesh, spec, sdf_values, _sdf_config(cfg), cfg.allow_nonmanifold)


def _default_output(cfg: RunConfig, output: Optional[str], suffix: str) -> Path:
    if output:
        return Path(output)
    return Path(cfg.mesh).with_suffix(suffix)


def _segment(cfg: RunConfig, mesh: TriMesh, graph: DualGraph):
    return segment(mesh, graph.metric, cfg.clusters, k=cfg.k, frac=cfg.frac, epsilon=cfg.epsilon,
                   first_face=cfg.first_face, sample_seed=cfg.seed, cluster_seed=cfg.cluster_seed,
                   replicates=cfg.replicates, max_iter=cfg.max_iter, kernel=cfg.kernel, engine=cfg.engine,
                   full_guard=cfg.full_guard, threads=cfg.threads, graph=graph)


def cmd_segment(args: argparse.Namespace) -> int:
    cfg = _config(args)
    mesh = _load(cfg)
    graph = _graph(cfg, mesh)
    result = _segment(cfg, mesh, graph)

    output = save_labels(result.labels, _default_output(cfg, args.output, ".seg"))
    written = [output, write_manifest(output, cfg, result)]
    if args.ply:
        written.append(export_colored_mesh(mesh, result.labels, args.ply))
    if args.indices:
        written.append(save_indices(result.sample.indices, args.indices))
    if args.wk_dump:
        written.append(dump_wk(build_wk(result.sample, cfg.kernel), args.wk_dump))
    if args.graph_csv:
        written.append(graph.to_csv(args.graph_csv))
    if cfg.epsilon is not None:
        logger.info(f"epsilon={cfg.epsilon} chose k={result.k}")

    sizes = result.segmentation.cluster_sizes()
    print(console.table([[c + 1, int(size)] for c, size in enumerate(sizes)], ["Cluster", "Faces"]))
    console.success(f"{mesh.n} faces, k={result.k}, sigma={result.sigma:.6g}, {result.segmentation.n_c} clusters")
    for path in written:
        console.info(f"  wrote {path}")
    return 0


def cmd_beta(args: argparse.Namespace) -> int:
    cfg = _config(args)
    mesh = _load(cfg)
    graph = _graph(cfg, mesh)
    k = resolve_sample_size(graph.n, cfg.k, cfg.frac, cfg.epsilon)
    if k is None:
        sample = sample_epsilon(graph, cfg.epsilon, cfg.first_face, cfg.seed, cfg.engine)
    else:
        sample = sample_fixed_k(graph, k, cfg.first_face, cfg.seed, cfg.engine)
    output = write_beta_csv(sample, _default_output(cfg, args.output, ".beta.csv"))
    k_star = suggest_k_star(sample)
    write_manifest(output, cfg, extra={"k": sample.k, "beta_1": float(sample.betas[0]),
                                       "beta_k": float(sample.betas[-1]), "k_star": k_star})
    console.success(f"{sample.k} beta rows written to {output}")
    console.info(f"  suggested k* = {k_star if k_star is not None else 'none (curve not flat yet)'}")
    return 0


def cmd_sdf(args: argparse.Namespace) -> int:
    cfg = _config(args)
    mesh = _load(cfg)
    values = compute_sdf(mesh, cfg=_sdf_config(cfg))
    output = save_sdf(values, _default_output(cfg, args.output, ".sdf"))
    console.success(f"SDF for {mesh.n} faces written to {output} "
                    f"(min {values.min():.4g}, median {float(np.median(values)):.4g}, "
                    f"max {values.max():.4g})")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    _config(args)
    a = load_labels(args.a)
    b = load_labels(args.b, a.size)
    ri, ji = rand_index(a, b), jaccard_index(a, b)
    print(f"RI {ri!r}")
    print(f"JI {ji!r}")
    print(f"d_R {1.0 - ri!r}")
    print(f"d_J {1.0 - ji!r}")
    return 0


def _parse_fracs(text: str) -> List[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse fractions {text!r}")


def cmd_histogram(args: argparse.Namespace) -> int:
    cfg = _config(args)
    mesh = _load(cfg)
    graph = _graph(cfg, mesh)
    hist = consistency_histogram(mesh, graph.metric, _parse_fracs(args.fracs), args.trials, cfg.clusters,
                                 graph=graph, bins=args.bins, seed=cfg.seed, replicates=cfg.replicates,
                                 kernel=cfg.kernel, full_guard=cfg.full_guard, threads=cfg.threads)
    output = hist.write_csv(_default_output(cfg, args.output, ".hist.csv"))
    rows = [[frac, hist.sample_sizes[frac], float(d.min()), float(np.median(d)), float(d.max())]
            for frac, d in hist.distances.items()]
    print(console.table(rows, ["Fraction", "k", "min d_R", "median d_R", "max d_R"]))
    console.success(f"histogram written to {output}")
    return 0


def cmd_lab_errors(args: argparse.Namespace) -> int:
    cfg = _config(args)
    mesh = _load(cfg)
    graph = _graph(cfg, mesh)
    result = error_curves(mesh, graph.metric, parse_k_grid(args.kgrid), graph=graph, first_face=cfg.first_face,
                          seed=cfg.seed, kernel=cfg.kernel, guard=cfg.lab_guard, threads=cfg.threads)
    output = write_error_csv(result, _default_output(cfg, args.output, ".lab.csv"))
    write_manifest(output, cfg, extra={"n": result.n, "sigma": result.sigma,
                                       "negative_eigenvalues": result.negative_eigenvalues})
    if result.negative_eigenvalues:
        console.warning(f"W has {result.negative_eigenvalues} negative eigenvalues")
    last = result.reports[-1]
    console.success(f"{len(result.reports)} grid points written to {output}")
    rows = [["best", last.err_best], ["best (psd)", last.err_best_psd], ["nystrom", last.err_nystrom],
            ["leverage", last.err_leverage], ["fss", last.err_fss]]
    print(console.table(rows, [f"Method (k={last.k})", "||W - A^k||_F"]))
    return 0


def cmd_lab_compare(args: argparse.Namespace) -> int:
    cfg = _config(args)
    mesh = _load(cfg)
    graph = _graph(cfg, mesh)
    result = _segment(cfg, mesh, graph)
    comparison = compare_with_spectral(result, cfg.clusters, cfg.cluster_seed, cfg.replicates, cfg.kernel,
                                       cfg.threads)
    rows = [[c + 1, int(f), int(s)] for c, (f, s) in
            enumerate(zip(comparison.fss_components, comparison.nystrom_components))]
    print(console.table(rows, ["Cluster", "FSS pieces", "Nyström pieces"]))
    print(f"d_R {comparison.d_rand!r}")
    print(f"d_J {comparison.d_jaccard!r}")
    return 0


def _benchmark_pairs(args: argparse.Namespace, cfg: RunConfig) -> List[Tuple[Path, Path]]:
    if args.dir:
        folder = Path(args.dir)
        if not folder.is_dir():
            raise ConfigError(f"not a directory: {folder}")
        pairs = [(m, m.with_suffix(".seg")) for m in sorted(folder.iterdir())
                 if m.suffix.lower() in MESH_SUFFIXES and m.with_suffix(".seg").is_file()]
        if not pairs:
            raise ConfigError(f"{folder}: no mesh with a matching .seg file")
        return pairs
    if not args.truth or not cfg.mesh:
        raise ConfigError("benchmark needs --mesh with --truth, or --dir")
    return [(Path(cfg.mesh), Path(args.truth))]


def cmd_benchmark(args: argparse.Namespace) -> int:
    cfg = _config(args)
    rows = []
    for mesh_path, truth_path in _benchmark_pairs(args, cfg):
        mesh = _load(cfg, str(mesh_path))
        truth = load_labels(truth_path, mesh.n)
        graph = _graph(cfg, mesh)
        cmp = compare_with_ground_truth(
            mesh, truth, graph.metric, args.clusters, k=cfg.k, frac=cfg.frac, epsilon=cfg.epsilon,
            first_face=cfg.first_face, sample_seed=cfg.seed, cluster_seed=cfg.cluster_seed,
            replicates=cfg.replicates, max_iter=cfg.max_iter, kernel=cfg.kernel, engine=cfg.engine,
            threads=cfg.threads, graph=graph)
        ref_r, ref_j = cmp.reference if cmp.reference else ("-", "-")
        rows.append([cmp.model, cmp.metric, cmp.k, f"{cmp.d_rand:.3f}", f"{cmp.d_jaccard:.3f}", ref_r, ref_j])
    print(console.table(rows, ["Model", "Metric", "k", "d_R", "d_J", "published d_R", "published d_J"]))
    console.warning("published values used other parameters and index variants; expect differences")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except FSSError as e:
        print(f"{Fore.RED}{e}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1
