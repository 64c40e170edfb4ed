#!/usr/bin/env python3
"""
Mesh loading, validation and adjacency checks
"""

import os
import sys
import tempfile
from pathlib import Path

import numpy as np
from colorama import init

init(autoreset=True)

sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

from src.core.console import check, header, run_tests
from src.core.errors import MeshParseError, MeshValidationError, NonManifoldEdgeError, EvaluationError
from src.mesh.io import (export_colored_mesh, load_labels, load_mesh, read_face_colors, save_indices, save_labels,
                         save_off)
from src.mesh.primitives import box_side_labels, make_icosphere, make_test_cube, make_torus
from src.mesh.trimesh import TriMesh, face_adjacency, face_geometry, is_watertight

TETRA_OFF = """OFF
# regular-ish tetrahedron
4 4 0
0 0 0
1 0 0
0 1 0
0 0 1
3 0 2 1
3 0 1 3
3 0 3 2
3 1 2 3
"""


def _write(folder: str, name: str, text: str) -> Path:
    path = Path(folder) / name
    path.write_text(text)
    return path


def _raises(exc_type, fn) -> bool:
    try:
        fn()
    except exc_type:
        return True
    return False


def test_off_loading():
    header("Testing OFF Loading")
    with tempfile.TemporaryDirectory() as tmp:
        mesh = load_mesh(_write(tmp, "tetra.off", TETRA_OFF))
        check(mesh.n == 4 and mesh.n_vertices == 4, "tetrahedron has 4 faces and 4 vertices")
        check(mesh.faces[0].tolist() == [0, 2, 1], "face order and corner order preserved")
        check(mesh.name == "tetra", "mesh named after the file stem")
        check(is_watertight(mesh), "tetrahedron is closed")

        adj = face_adjacency(mesh)
        check(len(adj.pairs) == 6, "six face pairs, one per edge")
        check(all(len(nb) == 3 for nb in adj.neighbors), "every face has three neighbors")

        roundtrip = load_mesh(save_off(mesh, Path(tmp) / "copy.off"))
        check(np.array_equal(roundtrip.faces, mesh.faces), "save_off keeps faces")


def test_obj_and_ply_loading():
    header("Testing OBJ and PLY Loading")
    obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nvn 0 0 1\nf 1/1/1 3/1/1 2/1/1\nf -4 -3 -1\n"
    ply = ("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
           "element face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
    with tempfile.TemporaryDirectory() as tmp:
        mesh = load_mesh(_write(tmp, "m.obj", obj))
        check(mesh.faces.tolist() == [[0, 2, 1], [0, 1, 3]], "OBJ slashes and negative indices resolved")
        mesh = load_mesh(_write(tmp, "m.ply", ply))
        check(mesh.n == 1 and mesh.faces[0].tolist() == [0, 1, 2], "ASCII PLY face read")
        check(not is_watertight(mesh), "single triangle is open")


def test_parse_errors():
    header("Testing Parse Errors")
    with tempfile.TemporaryDirectory() as tmp:
        quad = TETRA_OFF.replace("3 1 2 3", "4 0 1 2 3")
        check(_raises(MeshParseError, lambda: load_mesh(_write(tmp, "quad.off", quad))), "quad face rejected")
        check(_raises(MeshParseError, lambda: load_mesh(_write(tmp, "bad.off", "OFF\n1 1 0\n0 0 x\n3 0 0 0\n"))),
              "non-numeric coordinate rejected")
        check(_raises(MeshParseError, lambda: load_mesh(Path(tmp) / "missing.off")), "missing file rejected")
        check(_raises(MeshParseError, lambda: load_mesh(_write(tmp, "m.stl", "solid"))), "unknown format rejected")
        out_of_range = TETRA_OFF.replace("3 1 2 3", "3 1 2 7")
        check(_raises(MeshValidationError, lambda: load_mesh(_write(tmp, "oor.off", out_of_range))),
              "vertex index out of range rejected")
        repeated = TETRA_OFF.replace("3 1 2 3", "3 1 1 3")
        check(_raises(MeshValidationError, lambda: load_mesh(_write(tmp, "rep.off", repeated))),
              "repeated corner rejected")


def test_degenerate_and_nonmanifold():
    header("Testing Degenerate and Non-manifold Meshes")
    collinear = TriMesh(np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]]), np.array([[0, 1, 2]]))
    check(_raises(MeshValidationError, lambda: TriMesh.from_arrays(collinear.vertices, collinear.faces)),
          "zero-area face rejected")

    # three triangles hinged on edge (0, 1)
    vertices = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1]], dtype=float)
    faces = np.array([[0, 1, 2], [1, 0, 3], [0, 1, 4]])
    fan = TriMesh.from_arrays(vertices, faces)
    try:
        face_adjacency(fan)
        raised = None
    except NonManifoldEdgeError as e:
        raised = e
    check(raised is not None and raised.edge == (0, 1), "non-manifold edge (0, 1) reported")
    check(raised is not None and "--allow-nonmanifold" in str(raised), "error suggests the override flag")
    adj = face_adjacency(fan, allow_nonmanifold=True)
    check(adj.pairs.tolist() == [[0, 1]], "override keeps the first two faces of the edge")


def test_geometry_and_primitives():
    header("Testing Face Geometry and Primitives")
    cube = make_test_cube(3)
    check(cube.n == 12 * 9, "cube subdivision 3 has 108 faces")
    check(is_watertight(cube), "cube is closed")
    geom = face_geometry(cube)
    check(np.allclose(np.linalg.norm(geom.normals, axis=1), 1.0), "unit normals")
    outward = np.einsum("ij,ij->i", geom.normals, geom.barycenters - 0.5) > 0
    check(outward.all(), "cube normals point outward")
    check(np.isclose(geom.areas.sum(), 6.0), "cube area is 6")

    labels = box_side_labels(cube)
    check(sorted(np.unique(labels).tolist()) == [1, 2, 3, 4, 5, 6], "six side labels")
    check(np.all(np.bincount(labels)[1:] == 18), "18 faces per side")

    sphere = make_icosphere(2)
    check(sphere.n == 320 and is_watertight(sphere), "icosphere(2) has 320 faces and is closed")
    torus = make_torus(major_segments=12, minor_segments=6)
    check(torus.n == 144 and is_watertight(torus), "torus 12x6 has 144 faces and is closed")
    tgeom = face_geometry(torus)
    radial = tgeom.barycenters.copy()
    radial[:, 2] = 0
    tube = tgeom.barycenters - 2.0 * radial / np.linalg.norm(radial, axis=1)[:, None]
    check(np.all(np.einsum("ij,ij->i", tgeom.normals, tube) > 0), "torus normals point out of the tube")

    moved = cube.transformed(np.eye(3), translation=[1, 2, 3], scale=2.0)
    check(np.array_equal(moved.faces, cube.faces), "transformed copy keeps face order")
    check(np.allclose(face_geometry(moved).areas, 4 * geom.areas), "scale 2 quadruples areas")


def test_labels_and_colors():
    header("Testing Label Files and Colored Export")
    cube = make_test_cube(2)
    labels = box_side_labels(cube)
    with tempfile.TemporaryDirectory() as tmp:
        path = save_labels(labels, Path(tmp) / "cube.seg")
        check(np.array_equal(load_labels(path, cube.n), labels), "labels round-trip")
        check(_raises(EvaluationError, lambda: load_labels(path, cube.n + 1)), "length mismatch rejected")
        check(_raises(EvaluationError, lambda: load_labels(_write(tmp, "x.seg", "1\nfoo\n"))),
              "non-integer label rejected")
        check(_raises(EvaluationError, lambda: load_labels(_write(tmp, "frac.seg", "1\n1.7\n2\n"))),
              "fractional label rejected instead of truncated")
        check(load_labels(_write(tmp, "float.seg", "1.0\n2\n3.0\n")).tolist() == [1, 2, 3],
              "integral decimal labels accepted")

        ply = export_colored_mesh(cube, labels, Path(tmp) / "cube.ply")
        colors = read_face_colors(ply)
        check(colors.shape == (cube.n, 3), "one color per face")
        distinct = {tuple(c) for c in colors.tolist()}
        check(len(distinct) == 6, "six distinct colors for six segments")
        same = all(len({tuple(colors[i]) for i in np.flatnonzero(labels == c)}) == 1 for c in range(1, 7))
        check(same, "faces of one segment share a color")
        check(load_mesh(ply).n == cube.n, "colored PLY loads back as a mesh")
        check(_raises(MeshValidationError, lambda: export_colored_mesh(cube, labels[:-1], Path(tmp) / "x.ply")),
              "short label vector rejected")

        idx = save_indices([5, 1, 9], Path(tmp) / "idx.txt")
        check(idx.read_text().split() == ["5", "1", "9"], "sample indices written in order")


def run_all_tests():
    return run_tests("Mesh I/O Validation", {
        "OFFLoading": test_off_loading,
        "OBJAndPLYLoading": test_obj_and_ply_loading,
        "ParseErrors": test_parse_errors,
        "DegenerateAndNonManifold": test_degenerate_and_nonmanifold,
        "GeometryAndPrimitives": test_geometry_and_primitives,
        "LabelsAndColors": test_labels_and_colors,
    })


if __name__ == "__main__":
    results = run_all_tests()
    sys.exit(0 if all(results.values()) else 1)
