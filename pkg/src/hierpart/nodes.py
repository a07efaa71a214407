"""Mesh-node ownership strategies and the node-balance ratio.

Once elements are partitioned, every node on an inter-rank interface must be
owned by exactly one of the ranks touching it. Three strategies are provided:
take the lowest touching rank, split by node-id parity, or bisect each
pairwise interface with the graph partitioner so both ranks get half.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import FileFormatError
from .graph import Partition, build_graph
from .kway import TargetWeights, derive_seed, partition_kway
from .mesh import Mesh, interface_node_sets, node_to_parts, _element_sides

__all__ = [
    "NodeOwnership",
    "assign_lowest_rank",
    "assign_parity",
    "assign_interface_partition",
    "node_ratio",
    "read_ownership",
    "write_ownership",
]


@dataclass(eq=False)
class NodeOwnership:
    """Owning rank per mesh node, with per-rank owned-node totals."""

    owner: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        self.owner = np.asarray(self.owner, dtype=np.int64)
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if int(self.counts.sum()) != len(self.owner):
            raise ValueError("counts must sum to the node count")

    @classmethod
    def from_owner(cls, owner: np.ndarray, num_ranks: int) -> "NodeOwnership":
        owner = np.asarray(owner, dtype=np.int64)
        return cls(owner, np.bincount(owner, minlength=num_ranks))

    @property
    def num_ranks(self) -> int:
        return len(self.counts)


def _interior_owner(mesh: Mesh, elem_partition: Partition) -> tuple[np.ndarray, list[set[int]]]:
    """Owner array with single-rank nodes filled in, -1 elsewhere."""
    attached = node_to_parts(mesh, elem_partition)
    owner = np.full(mesh.num_nodes, -1, dtype=np.int64)
    for n, parts in enumerate(attached):
        if len(parts) == 1:
            owner[n] = next(iter(parts))
    return owner, attached


def _assign_multi_rank_greedy(
    owner: np.ndarray,
    multi_rank: list[int],
    attached: list[set[int]],
    num_ranks: int,
) -> None:
    """Give each many-rank node to its currently least-loaded incident rank.

    Nodes are processed in id order; ties go to the lower rank. Mutates
    ``owner`` in place.
    """
    counts = np.bincount(owner[owner >= 0], minlength=num_ranks)
    for n in multi_rank:
        ranks = sorted(attached[n])
        pick = min(ranks, key=lambda r: (counts[r], r))
        owner[n] = pick
        counts[pick] += 1


def assign_lowest_rank(mesh: Mesh, elem_partition: Partition) -> NodeOwnership:
    """Every node goes to the minimum rank among its attached elements."""
    attached = node_to_parts(mesh, elem_partition)
    owner = np.fromiter((min(parts) for parts in attached), dtype=np.int64, count=mesh.num_nodes)
    return NodeOwnership.from_owner(owner, elem_partition.num_parts)


def assign_parity(mesh: Mesh, elem_partition: Partition) -> NodeOwnership:
    """Split each pairwise interface by node-id parity: odd low, even high."""
    owner, attached = _interior_owner(mesh, elem_partition)
    pair_sets, multi_rank = interface_node_sets(mesh, elem_partition)
    for (a, b), nodes in pair_sets.items():
        for n in nodes:
            owner[n] = a if n % 2 == 1 else b
    _assign_multi_rank_greedy(owner, multi_rank, attached, elem_partition.num_parts)
    return NodeOwnership.from_owner(owner, elem_partition.num_parts)


def _interface_edges(
    mesh: Mesh, elem_partition: Partition
) -> dict[tuple[int, int], set[tuple[int, int]]]:
    """Node pairs co-occurring on an element side shared across each rank pair."""
    side_map: dict[tuple[int, ...], int] = {}
    edges: dict[tuple[int, int], set[tuple[int, int]]] = {}
    for e in range(mesh.num_elements):
        for key in _element_sides(mesh, e):
            other = side_map.pop(key, None)
            if other is None:
                side_map[key] = e
                continue
            pa, pb = int(elem_partition.parts[other]), int(elem_partition.parts[e])
            if pa == pb:
                continue
            pair = (pa, pb) if pa < pb else (pb, pa)
            bucket = edges.setdefault(pair, set())
            for i, n1 in enumerate(key):
                for n2 in key[i + 1:]:
                    bucket.add((n1, n2))
    return edges


def assign_interface_partition(mesh: Mesh, elem_partition: Partition, seed: int) -> NodeOwnership:
    """Bisect each pairwise interface graph so both ranks own about half.

    The interface graph of a rank pair has the pair's shared nodes as vertices
    and an edge wherever two of them lie on a common element side on the
    interface. It is split into two equal-target parts; the half containing
    the smallest node id goes to the lower rank. A single-node interface goes
    to the lower rank outright.
    """
    owner, attached = _interior_owner(mesh, elem_partition)
    pair_sets, multi_rank = interface_node_sets(mesh, elem_partition)
    all_edges = _interface_edges(mesh, elem_partition)
    for (a, b), nodes in sorted(pair_sets.items()):
        members = sorted(nodes)
        if len(members) == 1:
            owner[members[0]] = a
            continue
        local = {n: i for i, n in enumerate(members)}
        edges = [
            (local[n1], local[n2], 1)
            for n1, n2 in all_edges.get((a, b), ())
            if n1 in local and n2 in local  # multi-rank nodes sit outside the pair set
        ]
        halves = partition_kway(
            build_graph(edges, len(members)),
            2,
            TargetWeights.uniform(2),
            derive_seed(seed, a, b),
        )
        low_half = int(halves.parts[0])  # members[0] is the smallest node id
        for n, i in local.items():
            owner[n] = a if int(halves.parts[i]) == low_half else b
    _assign_multi_rank_greedy(owner, multi_rank, attached, elem_partition.num_parts)
    return NodeOwnership.from_owner(owner, elem_partition.num_parts)


def node_ratio(ownership: NodeOwnership) -> float:
    """Balance ratio max(counts)/min(counts); 1.0 means perfectly balanced.

    A rank owning zero nodes makes the ratio infinite; that is reported with a
    warning rather than raised, since it is a quality verdict, not an error.
    """
    counts = ownership.counts
    if counts.size == 0:
        raise ValueError("ownership has no ranks")
    lo = int(counts.min())
    if lo == 0:
        empty = np.flatnonzero(counts == 0).tolist()
        warnings.warn(f"rank(s) {empty} own zero nodes; node ratio is infinite", stacklevel=2)
        return float("inf")
    return int(counts.max()) / lo


# One 0-indexed owning rank per line, one line per node.


def write_ownership(ownership: NodeOwnership, path: str) -> None:
    with open(path, "w") as fh:
        fh.writelines(f"{int(r)}\n" for r in ownership.owner)


def read_ownership(path: str, num_ranks: int | None = None) -> NodeOwnership:
    owner = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            token = line.strip()
            if not token:
                continue
            try:
                value = int(token)
            except ValueError:
                raise FileFormatError(path, lineno, f"bad rank id {token!r}") from None
            if value < 0:
                raise FileFormatError(path, lineno, f"negative rank id {value}")
            owner.append(value)
    if not owner:
        raise FileFormatError(path, 1, "empty ownership file")
    arr = np.asarray(owner, dtype=np.int64)
    return NodeOwnership.from_owner(arr, num_ranks if num_ranks is not None else int(arr.max()) + 1)
