from typing import Optional


class FSSError(Exception):
    """
    Base class for every failure raised by the segmentation toolkit.

    Attributes:
        stage (str): The pipeline stage that failed, printed by the CLI as a
                     ``[stage]`` prefix.
    """
    stage = "fss"

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage

    def __str__(self) -> str:
        return f"[{self.stage}] {super().__str__()}"


class ConfigError(FSSError):
    stage = "config"


class MeshParseError(FSSError):
    stage = "mesh"


class MeshValidationError(FSSError):
    stage = "mesh"


class NonManifoldEdgeError(MeshValidationError):
    """An edge is shared by more than two faces."""

    def __init__(self, edge: tuple, faces: list):
        self.edge = edge
        self.faces = faces
        super().__init__(
            f"non-manifold edge {edge} shared by {len(faces)} faces {faces}; "
            "rerun with --allow-nonmanifold to keep the first two"
        )


class DisconnectedGraphError(FSSError):
    stage = "graph"

    def __init__(self, n_components: int):
        self.n_components = n_components
        super().__init__(
            f"dual graph has {n_components} connected components; "
            "face distances would be infinite"
        )


class NotAdjacentError(FSSError):
    stage = "graph"

    def __init__(self, i: int, j: int):
        super().__init__(f"faces {i} and {j} do not share an edge")


class SdfError(FSSError):
    stage = "sdf"


class SamplingError(FSSError):
    stage = "sampling"


class AffinityError(FSSError):
    stage = "affinity"


class SizeGuardError(FSSError):
    stage = "affinity"

    def __init__(self, n: int, limit: int, what: str = "full affinity matrix", stage: Optional[str] = None):
        self.n = n
        self.limit = limit
        super().__init__(f"{what} needs n={n} <= {limit}; raise the guard to override", stage)


class ClusteringError(FSSError):
    stage = "cluster"


class LabError(FSSError):
    stage = "lab"


class EvaluationError(FSSError):
    stage = "eval"
