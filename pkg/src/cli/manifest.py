import json
import platform
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import scipy

from src.clustering.pipeline import SegmentationResult
from src.core import __version__
from src.core.config import RunConfig


def manifest_path(output: Union[str, Path]) -> Path:
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")


def versions() -> Dict[str, str]:
    return {
        "fss": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def build_manifest(cfg: RunConfig, result: Optional[SegmentationResult] = None,
                   extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Config, library versions and the quantities derived during the run."""
    manifest: Dict[str, Any] = {"config": cfg.to_dict(), "versions": versions()}
    if result is not None:
        sample = result.sample
        manifest["derived"] = {
            "n": result.graph.n,
            "k": sample.k,
            "first_face": sample.first_face,
            "sigma": result.sigma,
            "beta_1": float(sample.betas[0]),
            "beta_k": float(sample.betas[-1]),
            "sssp_calls": sample.sssp_calls,
            "full_path": result.full_path,
            "eps_floor": result.graph.eps_floor,
            "inertia": result.segmentation.inertia,
            "cluster_sizes": result.segmentation.cluster_sizes().tolist(),
        }
    if extra:
        manifest.setdefault("derived", {}).update(extra)
    return manifest


def write_manifest(output: Union[str, Path], cfg: RunConfig, result: Optional[SegmentationResult] = None,
                   extra: Optional[Dict[str, Any]] = None) -> Path:
    path = manifest_path(output)
    with open(path, "w") as f:
        json.dump(build_manifest(cfg, result, extra), f, indent=2, sort_keys=True)
    return path
