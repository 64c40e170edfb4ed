"""
Declarative run configuration.

Values come from, lowest priority first: dataclass defaults, environment
(``FSS_THREADS``), a ``key = value`` file read with python-dotenv, and
explicit overrides (command-line flags).
"""

import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Union

from dotenv import dotenv_values

from src.core.errors import ConfigError
from src.core.parallel import default_threads

METRICS = ("angular", "geodesic", "sdf", "product")
DEFAULT_FRACTION = 0.01


@dataclass
class RunConfig:
    """
    Everything a segmentation or lab run depends on.

    Attributes:
        mesh (Optional[str]): Input mesh path (OFF, OBJ or PLY).
        metric (str): One of :data:`METRICS`.
        eta_convex (float): Convex dihedral weight of the angular metric.
        sdf_file (Optional[str]): Precomputed per-face SDF; computed when absent.
        clusters (int): n_c.
        k / frac / epsilon: Sampling mode; exactly one is set after :meth:`validate`.
        first_face (Optional[int]): j_1; drawn from ``seed`` when absent.
        seed (int): Sampling seed.
        cluster_seed (int): k-means seed.
        output (Optional[str]): Segmentation file; a manifest is written beside it.
    """
    mesh: Optional[str] = None
    metric: str = "geodesic"
    eta_convex: float = 0.1
    sdf_file: Optional[str] = None
    sdf_cone_angle: float = 60.0
    sdf_rays: int = 30
    sdf_outlier_sigma: float = 1.0
    clusters: int = 2
    k: Optional[int] = None
    frac: Optional[float] = None
    epsilon: Optional[float] = None
    first_face: Optional[int] = None
    seed: int = 0
    cluster_seed: int = 0
    replicates: int = 10
    max_iter: int = 100
    kernel: str = "distance"
    engine: str = "heap"
    allow_nonmanifold: bool = False
    threads: int = field(default_factory=default_threads)
    full_guard: int = 20000
    lab_guard: int = 5000
    output: Optional[str] = None
    ply: Optional[str] = None

    @classmethod
    def load(cls, path: Optional[Union[str, Path]] = None, **overrides) -> "RunConfig":
        """
        Defaults, then the config file, then non-None ``overrides``; validated.

        Raises:
            ConfigError: unknown keys, unparsable values or failed validation.
        """
        cfg = cls()
        if path is not None:
            if not Path(path).is_file():
                raise ConfigError(f"config file not found: {path}")
            cfg = cfg.merged(_parse_file(path))
        cfg = cfg.merged({key: value for key, value in overrides.items() if value is not None})
        if cfg.k is None and cfg.frac is None and cfg.epsilon is None:
            cfg.frac = DEFAULT_FRACTION
        cfg.validate()
        return cfg

    def merged(self, values: Dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(self)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        sampling = {"k", "frac", "epsilon"} & set(values)
        cleared = {name: None for name in ("k", "frac", "epsilon")} if sampling else {}
        return dataclasses.replace(self, **{**cleared, **values})

    def validate(self) -> None:
        modes = [name for name in ("k", "frac", "epsilon") if getattr(self, name) is not None]
        if len(modes) != 1:
            raise ConfigError(f"exactly one sampling mode (k, frac, epsilon) must be set, got {modes or 'none'}")
        if self.frac is not None and not 0.0 < self.frac <= 1.0:
            raise ConfigError(f"frac must lie in (0, 1], got {self.frac}")
        if self.epsilon is not None and not 0.0 < self.epsilon < 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.k is not None and self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.clusters < 1:
            raise ConfigError(f"clusters must be >= 1, got {self.clusters}")
        if not 0.0 < self.eta_convex <= 1.0:
            raise ConfigError(f"eta_convex must lie in (0, 1], got {self.eta_convex}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.replicates < 1 or self.max_iter < 1:
            raise ConfigError("replicates and max_iter must be >= 1")
        if self.metric not in METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}; expected one of {METRICS}")
        if self.sdf_file is not None and self.metric != "sdf":
            raise ConfigError(f"sdf_file is only used by the sdf metric, not {self.metric!r}")
        if self.kernel not in ("distance", "squared"):
            raise ConfigError(f"unknown kernel {self.kernel!r}")
        if self.engine not in ("heap", "scipy"):
            raise ConfigError(f"unknown engine {self.engine!r}")

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


def _convert(name: str, raw: Optional[str], annotation) -> Any:
    if raw is None or raw.strip().lower() in ("", "none", "null"):
        return None
    raw = raw.strip()
    target = annotation
    if isinstance(annotation, str):
        target = annotation.replace("Optional[", "").rstrip("]")
    else:
        args = getattr(annotation, "__args__", None)
        if args:
            target = next(a for a in args if a is not type(None))
    target_name = target if isinstance(target, str) else target.__name__
    try:
        if target_name == "bool":
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if target_name == "int":
            return int(raw)
        if target_name == "float":
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r} as {target_name}")


def _parse_file(path: Union[str, Path]) -> Dict[str, Any]:
    annotations = {f.name: f.type for f in fields(RunConfig)}
    values = {}
    for key, raw in dotenv_values(path).items():
        name = key.strip().lower().replace("-", "_")
        if name not in annotations:
            raise ConfigError(f"{path}: unknown configuration key {key!r}")
        values[name] = _convert(name, raw, annotations[name])
    return values
