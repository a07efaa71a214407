"""Weighted undirected graphs in compressed-adjacency form, plus partition metrics.

Graphs are immutable after construction and safe to share between threads.
Vertex and edge weights are positive integers so that all balance arithmetic
stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import FileFormatError

__all__ = [
    "Graph",
    "Partition",
    "BalanceStats",
    "PartMetrics",
    "build_graph",
    "extract_subgraph",
    "edge_cut",
    "per_rank_metrics",
    "balance_stats",
    "read_graph",
    "write_graph",
    "read_partition",
    "write_partition",
]


@dataclass(eq=False)
class Graph:
    """Undirected graph stored as symmetric compressed adjacency.

    ``adjacency_offsets`` has ``num_vertices + 1`` entries; the neighbors of
    vertex ``v`` occupy ``adjacency_list[offsets[v]:offsets[v+1]]`` with edge
    weights in the parallel ``edge_weights`` slice. Every undirected edge is
    stored once per direction with equal weight.
    """

    adjacency_offsets: np.ndarray
    adjacency_list: np.ndarray
    edge_weights: np.ndarray
    vertex_weights: np.ndarray

    def __post_init__(self):
        self.adjacency_offsets = np.asarray(self.adjacency_offsets, dtype=np.int64)
        self.adjacency_list = np.asarray(self.adjacency_list, dtype=np.int64)
        self.edge_weights = np.asarray(self.edge_weights, dtype=np.int64)
        self.vertex_weights = np.asarray(self.vertex_weights, dtype=np.int64)
        nv = len(self.vertex_weights)
        if len(self.adjacency_offsets) != nv + 1:
            raise ValueError("adjacency_offsets must have num_vertices + 1 entries")
        if self.adjacency_offsets[0] != 0 or self.adjacency_offsets[-1] != len(self.adjacency_list):
            raise ValueError("adjacency_offsets must start at 0 and end at len(adjacency_list)")
        if np.any(np.diff(self.adjacency_offsets) < 0):
            raise ValueError("adjacency_offsets must be non-decreasing")
        if len(self.edge_weights) != len(self.adjacency_list):
            raise ValueError("edge_weights must parallel adjacency_list")

    @property
    def num_vertices(self) -> int:
        return len(self.vertex_weights)

    @property
    def num_edges(self) -> int:
        return len(self.adjacency_list) // 2

    @property
    def total_vertex_weight(self) -> int:
        return int(self.vertex_weights.sum())

    def neighbors(self, v: int) -> np.ndarray:
        return self.adjacency_list[self.adjacency_offsets[v]:self.adjacency_offsets[v + 1]]

    def neighbor_weights(self, v: int) -> np.ndarray:
        return self.edge_weights[self.adjacency_offsets[v]:self.adjacency_offsets[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.adjacency_offsets[v + 1] - self.adjacency_offsets[v])

    def validate(self) -> None:
        """Full structural check: symmetry, no self-loops, no duplicate neighbors.

        O(E log E); intended for tests and file ingestion, not hot paths.
        """
        if np.any(self.vertex_weights < 1) or np.any(self.edge_weights < 1):
            raise ValueError("weights must be positive integers")
        src = np.repeat(np.arange(self.num_vertices), np.diff(self.adjacency_offsets))
        if np.any(src == self.adjacency_list):
            raise ValueError("self-loop present")
        if len(self.adjacency_list) and (
            self.adjacency_list.min() < 0 or self.adjacency_list.max() >= self.num_vertices
        ):
            raise ValueError("neighbor id out of range")
        fwd = {}
        for u, v, w in zip(src, self.adjacency_list, self.edge_weights):
            key = (int(u), int(v))
            if key in fwd:
                raise ValueError(f"duplicate neighbor {v} of vertex {u}")
            fwd[key] = int(w)
        for (u, v), w in fwd.items():
            if fwd.get((v, u)) != w:
                raise ValueError(f"asymmetric adjacency between {u} and {v}")


@dataclass(eq=False)
class Partition:
    """Per-vertex part assignment; part ids lie in ``[0, num_parts)``."""

    parts: np.ndarray
    num_parts: int

    def __post_init__(self):
        self.parts = np.asarray(self.parts, dtype=np.int64)
        if self.num_parts < 1:
            raise ValueError("num_parts must be >= 1")
        if len(self.parts) and (self.parts.min() < 0 or self.parts.max() >= self.num_parts):
            raise ValueError("part id out of range")

    def part_sizes(self) -> np.ndarray:
        return np.bincount(self.parts, minlength=self.num_parts)

    def __len__(self) -> int:
        return len(self.parts)


@dataclass
class BalanceStats:
    max: int
    min: int
    max_over_min: float
    max_over_avg: float


@dataclass
class PartMetrics:
    vertex_count: int
    boundary_edge_count: int


def build_graph(
    edge_list: Iterable[tuple[int, int, int]],
    num_vertices: int,
    vertex_weights: Sequence[int] | None = None,
) -> Graph:
    """Build a symmetric compressed-adjacency graph from an undirected edge list.

    Each entry is ``(u, v, weight)`` with ``u != v``. Duplicate edges (in either
    orientation), self-loops, out-of-range ids, and non-positive weights are
    rejected with ValueError.
    """
    if num_vertices < 0:
        raise ValueError("num_vertices must be non-negative")
    if vertex_weights is None:
        vwgt = np.ones(num_vertices, dtype=np.int64)
    else:
        vwgt = np.asarray(vertex_weights, dtype=np.int64)
        if len(vwgt) != num_vertices:
            raise ValueError("vertex_weights length must equal num_vertices")
        if num_vertices and vwgt.min() < 1:
            raise ValueError("vertex weights must be >= 1")

    seen: set[tuple[int, int]] = set()
    pairs: list[tuple[int, int, int]] = []
    for u, v, w in edge_list:
        u, v, w = int(u), int(v), int(w)
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if not (0 <= u < num_vertices and 0 <= v < num_vertices):
            raise ValueError(f"edge ({u}, {v}) references vertex out of range")
        if w < 1:
            raise ValueError(f"edge ({u}, {v}) has non-positive weight {w}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise ValueError(f"duplicate edge ({u}, {v})")
        seen.add(key)
        pairs.append((u, v, w))

    degrees = np.zeros(num_vertices, dtype=np.int64)
    for u, v, _ in pairs:
        degrees[u] += 1
        degrees[v] += 1
    offsets = np.zeros(num_vertices + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    adj = np.zeros(offsets[-1], dtype=np.int64)
    wgt = np.zeros(offsets[-1], dtype=np.int64)
    cursor = offsets[:-1].copy()
    for u, v, w in pairs:
        adj[cursor[u]], wgt[cursor[u]] = v, w
        cursor[u] += 1
        adj[cursor[v]], wgt[cursor[v]] = u, w
        cursor[v] += 1
    # Sort each adjacency run by neighbor id so traversal order is canonical.
    for v in range(num_vertices):
        lo, hi = offsets[v], offsets[v + 1]
        order = np.argsort(adj[lo:hi], kind="stable")
        adj[lo:hi] = adj[lo:hi][order]
        wgt[lo:hi] = wgt[lo:hi][order]
    return Graph(offsets, adj, wgt, vwgt)


def extract_subgraph(graph: Graph, vertex_set: Sequence[int]) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on ``vertex_set``; local ids follow the given order.

    Returns the subgraph and the local-to-global id map.
    """
    local_to_global = np.asarray(vertex_set, dtype=np.int64)
    n_local = len(local_to_global)
    if n_local and (local_to_global.min() < 0 or local_to_global.max() >= graph.num_vertices):
        raise ValueError("vertex id out of range")
    if len(np.unique(local_to_global)) != n_local:
        raise ValueError("duplicate vertex id in vertex_set")

    global_to_local = np.full(graph.num_vertices, -1, dtype=np.int64)
    global_to_local[local_to_global] = np.arange(n_local)

    offsets = np.zeros(n_local + 1, dtype=np.int64)
    adj_parts = []
    wgt_parts = []
    for local, g in enumerate(local_to_global):
        nbrs = graph.neighbors(g)
        mapped = global_to_local[nbrs]
        keep = mapped >= 0
        adj_parts.append(mapped[keep])
        wgt_parts.append(graph.neighbor_weights(g)[keep])
        offsets[local + 1] = offsets[local] + keep.sum()
    adj = np.concatenate(adj_parts) if adj_parts else np.zeros(0, dtype=np.int64)
    wgt = np.concatenate(wgt_parts) if wgt_parts else np.zeros(0, dtype=np.int64)
    sub = Graph(offsets, adj, wgt, graph.vertex_weights[local_to_global])
    return sub, local_to_global


def _check_partition(graph: Graph, partition: Partition) -> None:
    if len(partition.parts) != graph.num_vertices:
        raise ValueError(
            f"partition length {len(partition.parts)} != num_vertices {graph.num_vertices}"
        )


def edge_cut(graph: Graph, partition: Partition) -> int:
    """Total weight of edges whose endpoints lie in different parts (each edge once)."""
    _check_partition(graph, partition)
    src = np.repeat(np.arange(graph.num_vertices), np.diff(graph.adjacency_offsets))
    cut_mask = partition.parts[src] != partition.parts[graph.adjacency_list]
    # Symmetric storage counts every cut edge twice with equal weight.
    return int(graph.edge_weights[cut_mask].sum()) // 2


def per_rank_metrics(graph: Graph, partition: Partition) -> list[PartMetrics]:
    """Per-part vertex counts and boundary-edge tallies.

    A cut edge is tallied once for each of its two incident parts, so the
    tallies sum to twice the number of cut edges.
    """
    _check_partition(graph, partition)
    sizes = partition.part_sizes()
    src = np.repeat(np.arange(graph.num_vertices), np.diff(graph.adjacency_offsets))
    cut_mask = partition.parts[src] != partition.parts[graph.adjacency_list]
    boundary = np.bincount(partition.parts[src[cut_mask]], minlength=partition.num_parts)
    return [PartMetrics(int(s), int(b)) for s, b in zip(sizes, boundary)]


def balance_stats(sizes: Sequence[int]) -> BalanceStats:
    """Max, min, max/min, and max/average of a vector of positive totals."""
    arr = np.asarray(sizes, dtype=np.int64)
    if arr.size == 0:
        raise ValueError("empty size vector")
    if arr.min() <= 0:
        raise ValueError("sizes must be positive (ratio undefined otherwise)")
    hi, lo = int(arr.max()), int(arr.min())
    return BalanceStats(hi, lo, hi / lo, hi / (arr.sum() / arr.size))


# ---------------------------------------------------------------------------
# File formats.
#
# Graph file (classic adjacency format): first line "nv ne", then nv lines;
# line i holds the neighbors of vertex i as 1-indexed ids. Partition file:
# one 0-indexed part id per line.
# ---------------------------------------------------------------------------


def write_graph(graph: Graph, path: str) -> None:
    lines = [f"{graph.num_vertices} {graph.num_edges}"]
    for v in range(graph.num_vertices):
        lines.append(" ".join(str(int(u) + 1) for u in graph.neighbors(v)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_graph(path: str) -> Graph:
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise FileFormatError(path, 1, "empty graph file")
    head = raw[0].split()
    if len(head) != 2:
        raise FileFormatError(path, 1, "expected 'num_vertices num_edges'")
    try:
        nv, ne = int(head[0]), int(head[1])
    except ValueError:
        raise FileFormatError(path, 1, "expected 'num_vertices num_edges'") from None
    if len(raw) < nv + 1:
        raise FileFormatError(path, len(raw), f"expected {nv} adjacency lines")

    pair_count: dict[tuple[int, int], int] = {}
    for v in range(nv):
        lineno = v + 2
        for token in raw[v + 1].split():
            try:
                u = int(token) - 1
            except ValueError:
                raise FileFormatError(path, lineno, f"bad neighbor id {token!r}") from None
            if not (0 <= u < nv):
                raise FileFormatError(path, lineno, f"neighbor id {u + 1} out of range")
            if u == v:
                raise FileFormatError(path, lineno, f"self-loop at vertex {v}")
            key = (v, u) if v < u else (u, v)
            pair_count[key] = pair_count.get(key, 0) + 1
    for (a, b), count in pair_count.items():
        if count != 2:
            raise FileFormatError(path, a + 2, f"edge ({a}, {b}) not listed symmetrically")
    if len(pair_count) != ne:
        raise FileFormatError(path, 1, f"header says {ne} edges, file lists {len(pair_count)}")
    return build_graph([(a, b, 1) for a, b in sorted(pair_count)], nv)


def write_partition(partition: Partition, path: str) -> None:
    with open(path, "w") as fh:
        fh.writelines(f"{int(p)}\n" for p in partition.parts)


def read_partition(path: str) -> Partition:
    parts = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            token = line.strip()
            if not token:
                continue
            try:
                value = int(token)
            except ValueError:
                raise FileFormatError(path, lineno, f"bad part id {token!r}") from None
            if value < 0:
                raise FileFormatError(path, lineno, f"negative part id {value}")
            parts.append(value)
    if not parts:
        raise FileFormatError(path, 1, "empty partition file")
    arr = np.asarray(parts, dtype=np.int64)
    return Partition(arr, int(arr.max()) + 1)
