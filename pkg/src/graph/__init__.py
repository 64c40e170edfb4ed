from .metrics import (MetricKind, MetricSpec, angular_edge_distance, geodesic_edge_distance,
                      sdf_edge_distance)
from .dual_graph import DualGraph, build_dual_graph
from .shortest_path import sssp, all_pairs_distances
