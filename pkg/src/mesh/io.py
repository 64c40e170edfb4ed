"""
Mesh and per-face label files.

Readers keep face order exactly as stored so label vectors line up with
external ground-truth files. The PLY writer stores one RGB color per face.
"""

import colorsys
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.errors import EvaluationError, MeshParseError, MeshValidationError
from src.core.logger import get_logger
from src.mesh.trimesh import TriMesh, validate_mesh

logger = get_logger(__name__)

PathLike = Union[str, Path]
SUPPORTED_FORMATS = ("off", "obj", "ply")
MESH_SUFFIXES = tuple("." + fmt for fmt in SUPPORTED_FORMATS)


def _content_lines(path: Path) -> Iterator[Tuple[int, List[str]]]:
    """Yields (line number, tokens) for non-empty, non-comment lines."""
    with open(path, "r") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line.split()


def _read_off(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    lines = _content_lines(path)
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise MeshParseError(f"{path}: empty file")
    if tokens[0] != "OFF":
        raise MeshParseError(f"{path}:{lineno}: expected 'OFF' header, got {tokens[0]!r}")
    counts = tokens[1:]
    if not counts:
        try:
            lineno, counts = next(lines)
        except StopIteration:
            raise MeshParseError(f"{path}: missing counts line")
    try:
        n_verts, n_faces = int(counts[0]), int(counts[1])
    except (ValueError, IndexError):
        raise MeshParseError(f"{path}:{lineno}: bad counts line {' '.join(counts)!r}")

    vertices = np.empty((n_verts, 3))
    for v in range(n_verts):
        try:
            lineno, tokens = next(lines)
            vertices[v] = [float(x) for x in tokens[:3]]
        except StopIteration:
            raise MeshParseError(f"{path}: expected {n_verts} vertices, file ended after {v}")
        except ValueError:
            raise MeshParseError(f"{path}:{lineno}: bad vertex line {' '.join(tokens)!r}")

    faces = np.empty((n_faces, 3), dtype=np.int64)
    for i in range(n_faces):
        try:
            lineno, tokens = next(lines)
            if int(tokens[0]) != 3:
                raise MeshParseError(f"{path}:{lineno}: face {i} has {tokens[0]} corners, only triangles are supported")
            faces[i] = [int(x) for x in tokens[1:4]]
        except StopIteration:
            raise MeshParseError(f"{path}: expected {n_faces} faces, file ended after {i}")
        except (ValueError, IndexError):
            raise MeshParseError(f"{path}:{lineno}: bad face line {' '.join(tokens)!r}")
    return vertices, faces


def _read_obj(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    vertices: List[List[float]] = []
    faces: List[List[int]] = []
    for lineno, tokens in _content_lines(path):
        tag = tokens[0]
        if tag == "v":
            try:
                vertices.append([float(x) for x in tokens[1:4]])
            except ValueError:
                raise MeshParseError(f"{path}:{lineno}: bad vertex record")
        elif tag == "f":
            corners = tokens[1:]
            if len(corners) != 3:
                raise MeshParseError(f"{path}:{lineno}: face with {len(corners)} corners, only triangles are supported")
            try:
                # texture/normal slots after '/' are ignored
                idx = [int(c.split("/")[0]) for c in corners]
            except ValueError:
                raise MeshParseError(f"{path}:{lineno}: bad face record")
            faces.append([i - 1 if i > 0 else len(vertices) + i for i in idx])
    return np.asarray(vertices, dtype=np.float64).reshape(-1, 3), np.asarray(faces, dtype=np.int64).reshape(-1, 3)


def _read_ply(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    """ASCII PLY with x y z vertices and a vertex_indices face list."""
    with open(path, "r") as f:
        lines = f.read().splitlines()
    if not lines or lines[0].strip() != "ply":
        raise MeshParseError(f"{path}:1: expected 'ply' magic")
    n_verts = n_faces = 0
    vertex_props: List[str] = []
    current = None
    body = None
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if not tokens:
            continue
        if tokens[0] == "format" and tokens[1] != "ascii":
            raise MeshParseError(f"{path}:{lineno}: only ASCII PLY is supported")
        if tokens[0] == "element":
            current = tokens[1]
            if current == "vertex":
                n_verts = int(tokens[2])
            elif current == "face":
                n_faces = int(tokens[2])
        elif tokens[0] == "property" and current == "vertex":
            vertex_props.append(tokens[-1])
        elif tokens[0] == "end_header":
            body = lineno
            break
    if body is None:
        raise MeshParseError(f"{path}: missing end_header")
    try:
        xyz = [vertex_props.index(c) for c in ("x", "y", "z")]
    except ValueError:
        raise MeshParseError(f"{path}: vertex element lacks x/y/z")

    data = lines[body:body + n_verts + n_faces]
    if len(data) < n_verts + n_faces:
        raise MeshParseError(f"{path}: body shorter than header counts")
    try:
        vertices = np.array([[float(line.split()[c]) for c in xyz] for line in data[:n_verts]])
        faces = []
        for offset, line in enumerate(data[n_verts:]):
            tokens = line.split()
            if int(tokens[0]) != 3:
                raise MeshParseError(f"{path}:{body + n_verts + offset + 1}: only triangles are supported")
            faces.append([int(x) for x in tokens[1:4]])
    except (ValueError, IndexError):
        raise MeshParseError(f"{path}: malformed PLY body")
    return vertices.reshape(-1, 3), np.asarray(faces, dtype=np.int64).reshape(-1, 3)


_READERS = {"off": _read_off, "obj": _read_obj, "ply": _read_ply}


def load_mesh(path: PathLike, format: Optional[str] = None) -> TriMesh:
    """
    Loads a triangle mesh, preserving the face order of the file.

    Args:
        path: Mesh file.
        format: One of ``off``, ``obj``, ``ply``; inferred from the suffix when omitted.

    Raises:
        MeshParseError: malformed file.
        MeshValidationError: out-of-range index or degenerate face.
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt not in _READERS:
        raise MeshParseError(f"{path}: unsupported format {fmt!r}; expected one of {SUPPORTED_FORMATS}")
    if not path.exists():
        raise MeshParseError(f"{path}: no such file")
    vertices, faces = _READERS[fmt](path)
    mesh = TriMesh(vertices, faces, path.stem)
    validate_mesh(mesh)
    logger.info(f"Loaded {path.name}: {mesh.n_vertices} vertices, {mesh.n} faces")
    return mesh


def save_off(mesh: TriMesh, path: PathLike) -> Path:
    path = Path(path)
    with open(path, "w") as f:
        f.write("OFF\n")
        f.write(f"{mesh.n_vertices} {mesh.n} 0\n")
        for x, y, z in mesh.vertices.tolist():
            f.write(f"{x!r} {y!r} {z!r}\n")
        for a, b, c in mesh.faces.tolist():
            f.write(f"3 {a} {b} {c}\n")
    return path


def palette(n_colors: int) -> np.ndarray:
    """Evenly spaced hues at full saturation, as (n_colors, 3) uint8."""
    colors = [colorsys.hsv_to_rgb(h / max(n_colors, 1), 0.85, 0.95) for h in range(n_colors)]
    return np.clip(np.round(np.asarray(colors).reshape(-1, 3) * 255), 0, 255).astype(np.uint8)


def export_colored_mesh(mesh: TriMesh, labels: Sequence[int], path: PathLike,
                        colors: Optional[np.ndarray] = None) -> Path:
    """
    Writes an ASCII PLY with a ``uchar red green blue`` color per face.

    Distinct labels get distinct palette entries, assigned in sorted label order.

    Raises:
        MeshValidationError: label vector length differs from the face count.
    """
    labels = np.asarray(labels)
    if labels.shape != (mesh.n,):
        raise MeshValidationError(f"segmentation has {labels.size} labels for {mesh.n} faces")
    uniq, index = np.unique(labels, return_inverse=True)
    colors = palette(len(uniq)) if colors is None else np.asarray(colors, dtype=np.uint8)
    if len(colors) < len(uniq):
        raise MeshValidationError(f"palette has {len(colors)} colors for {len(uniq)} clusters")
    face_rgb = colors[index]

    path = Path(path)
    with open(path, "w") as f:
        f.write("ply\nformat ascii 1.0\n")
        f.write(f"comment segments {len(uniq)}\n")
        f.write(f"element vertex {mesh.n_vertices}\n")
        f.write("property double x\nproperty double y\nproperty double z\n")
        f.write(f"element face {mesh.n}\n")
        f.write("property list uchar int vertex_indices\n")
        f.write("property uchar red\nproperty uchar green\nproperty uchar blue\n")
        f.write("end_header\n")
        for x, y, z in mesh.vertices.tolist():
            f.write(f"{x!r} {y!r} {z!r}\n")
        for (a, b, c), (r, g, bl) in zip(mesh.faces.tolist(), face_rgb.tolist()):
            f.write(f"3 {a} {b} {c} {r} {g} {bl}\n")
    logger.info(f"Wrote {path} with {len(uniq)} colored segments")
    return path


def read_face_colors(path: PathLike) -> np.ndarray:
    """Per-face RGB triples from a PLY written by :func:`export_colored_mesh`."""
    path = Path(path)
    with open(path, "r") as f:
        lines = f.read().splitlines()
    n_verts = n_faces = 0
    body = 0
    for lineno, line in enumerate(lines):
        tokens = line.split()
        if tokens[:2] == ["element", "vertex"]:
            n_verts = int(tokens[2])
        elif tokens[:2] == ["element", "face"]:
            n_faces = int(tokens[2])
        elif tokens[:1] == ["end_header"]:
            body = lineno + 1
            break
    rows = lines[body + n_verts: body + n_verts + n_faces]
    return np.array([[int(t) for t in row.split()[4:7]] for row in rows], dtype=np.uint8).reshape(-1, 3)


def save_labels(labels: Sequence[int], path: PathLike) -> Path:
    """One integer label per line, face order."""
    path = Path(path)
    with open(path, "w") as f:
        for label in np.asarray(labels).tolist():
            f.write(f"{int(label)}\n")
    return path


def load_labels(path: PathLike, n: Optional[int] = None) -> np.ndarray:
    """
    Reads a per-face label file (ours or a benchmark ground truth).

    Raises:
        EvaluationError: non-integer line, or a length different from ``n``.
    """
    path = Path(path)
    if not path.is_file():
        raise EvaluationError(f"{path}: no such label file")
    labels = []
    with open(path, "r") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                value = float(line) if "." in line else int(line)
            except ValueError:
                value = None
            if value is None or (isinstance(value, float) and not value.is_integer()):
                raise EvaluationError(f"{path}:{lineno}: not an integer label: {line!r}")
            labels.append(int(value))
    labels = np.asarray(labels, dtype=np.int64)
    if n is not None and labels.size != n:
        raise EvaluationError(f"{path}: {labels.size} labels for {n} faces")
    return labels


def save_indices(indices: Sequence[int], path: PathLike) -> Path:
    path = Path(path)
    np.savetxt(path, np.asarray(indices, dtype=np.int64), fmt="%d")
    return path
