from heapq import heappop, heappush
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import dijkstra

from src.core.errors import FSSError
from src.graph.dual_graph import DualGraph

ENGINES = ("heap", "scipy")


def _heap_dijkstra(graph: DualGraph, source: int) -> np.ndarray:
    # lazy deletion: stale heap entries are skipped when popped
    dist = [float("inf")] * graph.n
    done = [False] * graph.n
    dist[source] = 0.0
    heap = [(0.0, source)]
    adjacency = graph.adjacency
    while heap:
        d, u = heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in adjacency[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heappush(heap, (nd, v))
    return np.asarray(dist)


def sssp(graph: DualGraph, source: int, engine: str = "heap") -> np.ndarray:
    """
    Shortest-path lengths from ``source`` to every face.

    Args:
        graph: Connected dual graph.
        source: Face index.
        engine: ``heap`` (binary-heap Dijkstra) or ``scipy`` (csgraph Dijkstra).

    Raises:
        FSSError: a node is unreachable, meaning the graph is disconnected.
    """
    if not 0 <= source < graph.n:
        raise FSSError(f"source face {source} outside [0, {graph.n})", stage="graph")
    if engine == "heap":
        dist = _heap_dijkstra(graph, source)
    elif engine == "scipy":
        dist = dijkstra(graph.matrix, directed=False, indices=source)
    else:
        raise FSSError(f"unknown shortest-path engine {engine!r}; expected one of {ENGINES}", stage="graph")
    unreachable = np.flatnonzero(~np.isfinite(dist))
    if unreachable.size:
        raise FSSError(f"face {int(unreachable[0])} unreachable from face {source}; graph is disconnected",
                       stage="graph")
    return dist


def all_pairs_distances(graph: DualGraph, indices: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Rows of the full distance matrix D (all rows when ``indices`` is None).
    """
    dist = dijkstra(graph.matrix, directed=False, indices=indices)
    if not np.all(np.isfinite(dist)):
        raise FSSError("distance matrix has infinite entries; graph is disconnected", stage="graph")
    return np.atleast_2d(dist)
