from .trimesh import TriMesh, FaceGeometry, FaceAdjacency, face_geometry, face_adjacency, is_watertight
from .io import load_mesh, export_colored_mesh, save_labels, load_labels
from .primitives import make_test_cube, make_box, make_icosphere, make_torus, box_side_labels
