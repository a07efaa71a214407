"""Multilevel k-way graph partitioner with non-uniform target part weights.

The pipeline is the classic V-cycle: heavy-edge matching coarsens the graph
until it is small, a greedy graph-growing pass bisects the coarsest level, and
the bisection is projected back up with a Fiduccia–Mattheyses boundary
refinement at every level. k-way output comes from recursive bisection over a
split of the target-weight vector.

Everything here is deterministic for a fixed seed.
"""

from __future__ import annotations

import math
import random
import warnings
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InfeasibleError
from .graph import Graph, Partition, build_graph, edge_cut, extract_subgraph

__all__ = [
    "TargetWeights",
    "CoarseningLevel",
    "BalanceWindowWarning",
    "derive_seed",
    "heavy_edge_match",
    "coarsen",
    "initial_bisection",
    "fm_refine",
    "partition_kway",
]

_MASK64 = (1 << 64) - 1

# Coarsening stops once the graph is this small, or when a level shrinks it by
# less than 10%.
_COARSEST_SIZE = 40
_MIN_SHRINK = 0.10

# Number of distinct growing starts tried at the coarsest level.
_NUM_STARTS = 4


class BalanceWindowWarning(UserWarning):
    """Refinement was asked for a balance window its input already violates."""


def derive_seed(seed: int, *salts: int) -> int:
    """Mix extra integers into a seed (splitmix64 steps); deterministic."""
    x = seed & _MASK64
    for s in salts:
        x = (x + 0x9E3779B97F4A7C15 + (s & _MASK64)) & _MASK64
        z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        x = z ^ (z >> 31)
    return x


@dataclass(eq=False)
class TargetWeights:
    """Per-part target weight fractions; positive and summing to 1."""

    fractions: np.ndarray

    def __post_init__(self):
        self.fractions = np.asarray(self.fractions, dtype=np.float64)
        if self.fractions.ndim != 1 or len(self.fractions) == 0:
            raise ValueError("fractions must be a non-empty vector")
        if self.fractions.min() <= 0:
            raise ValueError("all target fractions must be positive")
        if abs(float(self.fractions.sum()) - 1.0) > 1e-12:
            raise ValueError("target fractions must sum to 1")

    @classmethod
    def uniform(cls, k: int) -> "TargetWeights":
        if k < 1:
            raise ValueError("k must be >= 1")
        return cls(np.full(k, 1.0 / k))

    def __len__(self) -> int:
        return len(self.fractions)


@dataclass(eq=False)
class CoarseningLevel:
    """One coarsening step: the coarse graph plus the fine-to-coarse map."""

    graph: Graph
    projection: np.ndarray  # per-fine-vertex coarse vertex id

    def __post_init__(self):
        self.projection = np.asarray(self.projection, dtype=np.int64)


def heavy_edge_match(g: Graph, seed: int, order: Sequence[int] | None = None) -> np.ndarray:
    """Greedy heavy-edge matching; returns per-vertex mate (self if unmatched).

    Vertices are visited in a seeded random order (or the explicit ``order``);
    each still-unmatched vertex pairs with its unmatched neighbor of maximum
    edge weight, ties going to the lowest neighbor id.
    """
    nv = g.num_vertices
    if order is None:
        visit = list(range(nv))
        random.Random(seed).shuffle(visit)
    else:
        visit = [int(v) for v in order]
    mates = np.arange(nv, dtype=np.int64)
    for v in visit:
        if mates[v] != v:
            continue
        best = -1
        best_w = 0
        for u, w in zip(g.neighbors(v), g.neighbor_weights(v)):
            u, w = int(u), int(w)
            if mates[u] != u or u == v:
                continue
            if w > best_w or (w == best_w and (best == -1 or u < best)):
                best, best_w = u, w
        if best >= 0:
            mates[v] = best
            mates[best] = v
    return mates


def coarsen(g: Graph, mates: Sequence[int]) -> CoarseningLevel:
    """Contract matched pairs into single vertices, aggregating weights.

    Coarse vertex ids follow fine id order of each pair's representative (the
    smaller endpoint), so an empty matching reproduces the input graph.
    """
    mates = np.asarray(mates, dtype=np.int64)
    nv = g.num_vertices
    if len(mates) != nv:
        raise ValueError("mates length must equal num_vertices")
    if nv and (mates.min() < 0 or mates.max() >= nv):
        raise ValueError("mate id out of range")
    if np.any(mates[mates] != np.arange(nv)):
        raise ValueError("matching is not symmetric")

    projection = np.full(nv, -1, dtype=np.int64)
    next_id = 0
    for v in range(nv):
        if v <= mates[v]:
            projection[v] = next_id
            projection[mates[v]] = next_id
            next_id += 1

    coarse_vwgt = np.bincount(projection, weights=g.vertex_weights, minlength=next_id).astype(
        np.int64
    )
    merged: dict[tuple[int, int], int] = {}
    src = np.repeat(np.arange(nv), np.diff(g.adjacency_offsets))
    for cu, cv, w in zip(projection[src], projection[g.adjacency_list], g.edge_weights):
        if cu < cv:  # each undirected fine edge contributes once
            key = (int(cu), int(cv))
            merged[key] = merged.get(key, 0) + int(w)
    edges = [(a, b, w) for (a, b), w in merged.items()]
    return CoarseningLevel(build_graph(edges, next_id, coarse_vwgt), projection)


def initial_bisection(
    g: Graph, target_fraction: float, seed: int, start: int | None = None
) -> Partition:
    """Bisect by growing a breadth-first region until it holds the target weight.

    Growth begins at a seeded random vertex (or ``start``), absorbs vertices in
    BFS order (neighbors by ascending id), jumps to the lowest-id unreached
    vertex when a component is exhausted, and stops as soon as the accumulated
    vertex weight reaches ``target_fraction`` of the total. The grown region is
    part 0.
    """
    nv = g.num_vertices
    if nv == 0:
        raise ValueError("cannot bisect an empty graph")
    if not (0.0 < target_fraction < 1.0):
        raise ValueError("target_fraction must lie in (0, 1)")
    if start is None:
        start = random.Random(seed).randrange(nv)
    threshold = target_fraction * g.total_vertex_weight

    parts = np.ones(nv, dtype=np.int64)
    in_region = np.zeros(nv, dtype=bool)
    queue: deque[int] = deque()
    acc = 0
    next_unvisited = 0

    def absorb(v: int) -> int:
        nonlocal acc
        in_region[v] = True
        parts[v] = 0
        queue.append(v)
        acc += int(g.vertex_weights[v])
        return acc

    if absorb(int(start)) >= threshold:
        return Partition(parts, 2)
    while True:
        if not queue:
            while next_unvisited < nv and in_region[next_unvisited]:
                next_unvisited += 1
            if next_unvisited >= nv:
                break
            if absorb(next_unvisited) >= threshold:
                break
            continue
        v = queue.popleft()
        done = False
        for u in g.neighbors(v):
            if not in_region[u]:
                if absorb(int(u)) >= threshold:
                    done = True
                    break
        if done:
            break
    return Partition(parts, 2)


def _compute_gains(g: Graph, parts: np.ndarray) -> np.ndarray:
    """Cut reduction achieved by moving each vertex to the other side."""
    src = np.repeat(np.arange(g.num_vertices), np.diff(g.adjacency_offsets))
    signed = np.where(parts[src] != parts[g.adjacency_list], g.edge_weights, -g.edge_weights)
    return np.bincount(src, weights=signed, minlength=g.num_vertices).astype(np.int64)


def _apply_move_gains(g: Graph, parts: np.ndarray, gains: np.ndarray, v: int) -> None:
    """Update neighbor gains after flipping vertex v (parts already flipped)."""
    nbrs = g.neighbors(v)
    wgts = g.neighbor_weights(v)
    # An edge to v flips internal<->external: neighbors now beside v lose the
    # incentive to move (edge would re-cut), the ones left behind gain it.
    same = parts[nbrs] == parts[v]
    gains[nbrs] += np.where(same, -2 * wgts, 2 * wgts)
    gains[v] = -gains[v]


def fm_refine(
    g: Graph,
    p: Partition,
    target_fraction: float,
    imbalance_tol: float,
    max_passes: int = 10,
) -> Partition:
    """Fiduccia–Mattheyses boundary refinement of a 2-part partition.

    Each pass builds a sequence of single-vertex moves (every vertex at most
    once; each move keeps part 0's weight within ``imbalance_tol`` of target)
    choosing the highest-gain feasible move each step (tie: lower vertex id),
    then rolls back to the best prefix — lowest cut, then smallest weight
    deviation, then shortest. Passes repeat until the cut stops improving or
    ``max_passes`` is reached. The returned cut never exceeds the input cut.

    If the input itself sits outside the balance window, it is returned
    unchanged and a :class:`BalanceWindowWarning` is emitted.
    """
    if p.num_parts != 2:
        raise ValueError("fm_refine expects a 2-part partition")
    if len(p.parts) != g.num_vertices:
        raise ValueError("partition length mismatch")
    nv = g.num_vertices
    vw = g.vertex_weights
    total = g.total_vertex_weight
    target = target_fraction * total
    window = imbalance_tol * total
    eps = 1e-9 * max(1.0, total)

    parts = p.parts.copy()
    w0 = int(vw[parts == 0].sum())
    if abs(w0 - target) > window + eps:
        warnings.warn(
            f"balance window ±{window:.3g} around {target:.3g} excludes the input "
            f"(part 0 weight {w0}); returning it unchanged",
            BalanceWindowWarning,
            stacklevel=2,
        )
        return Partition(parts, 2)

    ids = np.arange(nv, dtype=np.int64)
    cut = edge_cut(g, Partition(parts, 2))
    for _ in range(max_passes):
        pass_start_cut = cut
        gains = _compute_gains(g, parts)
        moved = np.zeros(nv, dtype=bool)
        trail: list[int] = []
        cur_cut, cur_w0 = cut, w0
        best = (cut, abs(w0 - target), 0)  # (cut, deviation, prefix length)
        while True:
            # Moving v off side 0 shifts w0 by -vw[v]; off side 1 by +vw[v].
            # Feasibility therefore restricts vw[v] to an interval per side.
            movable = ~moved & (
                np.where(parts == 0, np.abs((cur_w0 - vw) - target), np.abs((cur_w0 + vw) - target))
                <= window + eps
            )
            cand = np.flatnonzero(movable)
            if cand.size == 0:
                break
            v = int(cand[np.argmax(gains[cand] * (nv + 1) - ids[cand])])
            cur_cut -= int(gains[v])
            cur_w0 += int(vw[v]) if parts[v] == 1 else -int(vw[v])
            parts[v] ^= 1
            moved[v] = True
            _apply_move_gains(g, parts, gains, v)
            trail.append(v)
            state = (cur_cut, abs(cur_w0 - target), len(trail))
            if state[:2] < best[:2]:
                best = state
        for v in reversed(trail[best[2]:]):  # roll back past the best prefix
            parts[v] ^= 1
        cut = best[0]
        w0 = int(vw[parts == 0].sum())
        if cut >= pass_start_cut:
            break
    return Partition(parts, 2)


def _rebalance(
    g: Graph, parts: np.ndarray, target_fraction: float
) -> np.ndarray:
    """Greedily move vertices from the heavy side while deviation strictly drops.

    Among moves that strictly reduce |part0 weight − target|, the highest-gain
    one wins (tie: lower id). Used after projecting a coarse bisection to a
    finer level, where weight granularity can leave the window overshot.
    """
    vw = g.vertex_weights
    total = g.total_vertex_weight
    target = target_fraction * total
    gains = _compute_gains(g, parts)
    ids = np.arange(g.num_vertices, dtype=np.int64)
    w0 = int(vw[parts == 0].sum())
    while True:
        dev = abs(w0 - target)
        heavy = 0 if w0 > target else 1
        improves = (parts == heavy) & (vw < 2 * dev)
        cand = np.flatnonzero(improves)
        if cand.size == 0:
            return parts
        v = int(cand[np.argmax(gains[cand] * (g.num_vertices + 1) - ids[cand])])
        w0 += int(vw[v]) if heavy == 1 else -int(vw[v])
        parts[v] ^= 1
        _apply_move_gains(g, parts, gains, v)


def _repair_counts(
    g: Graph, parts: np.ndarray, min_counts: tuple[int, int]
) -> np.ndarray:
    """Move best-gain vertices into whichever side falls short of its minimum."""
    counts = [int((parts == 0).sum()), int((parts == 1).sum())]
    gains = _compute_gains(g, parts)
    ids = np.arange(g.num_vertices, dtype=np.int64)
    for side in (0, 1):
        other = 1 - side
        while counts[side] < min_counts[side]:
            cand = np.flatnonzero(parts == other)
            v = int(cand[np.argmax(gains[cand] * (g.num_vertices + 1) - ids[cand])])
            parts[v] = side
            counts[side] += 1
            counts[other] -= 1
            _apply_move_gains(g, parts, gains, v)
    return parts


def _coarsening_chain(g: Graph, seed: int) -> list[CoarseningLevel]:
    """Repeated heavy-edge contraction until small or shrinking stalls."""
    chain: list[CoarseningLevel] = []
    current = g
    level = 0
    while current.num_vertices > _COARSEST_SIZE:
        mates = heavy_edge_match(current, derive_seed(seed, 1, level))
        step = coarsen(current, mates)
        if step.graph.num_vertices > (1.0 - _MIN_SHRINK) * current.num_vertices:
            break
        chain.append(step)
        current = step.graph
        level += 1
    return chain


def _fm_safe(g: Graph, parts: np.ndarray, target_fraction: float, tol: float) -> np.ndarray:
    """fm_refine with the window widened to admit the input (never warns)."""
    vw = g.vertex_weights
    total = g.total_vertex_weight
    dev = abs(int(vw[parts == 0].sum()) - target_fraction * total)
    effective = max(tol, dev / total + 1e-12)
    refined = fm_refine(g, Partition(parts, 2), target_fraction, effective)
    return refined.parts


def _multilevel_bisect(
    g: Graph,
    target_fraction: float,
    tol: float,
    seed: int,
    min_counts: tuple[int, int] = (1, 1),
) -> Partition:
    """Full V-cycle bisection honoring per-side minimum vertex counts."""
    chain = _coarsening_chain(g, seed)
    coarsest = chain[-1].graph if chain else g

    best_parts: np.ndarray | None = None
    best_key: tuple[int, float] | None = None
    total = coarsest.total_vertex_weight
    nvc = coarsest.num_vertices
    # One seeded start plus fixed spread starts: cheap insurance against a
    # growth front that strands the small side of a lopsided target.
    starts: list[int] = []
    for s in (random.Random(derive_seed(seed, 2)).randrange(nvc), 0, nvc - 1, nvc // 2):
        if s not in starts:
            starts.append(int(s))
    for t, start in enumerate(starts[:_NUM_STARTS]):
        init = initial_bisection(coarsest, target_fraction, derive_seed(seed, 2, t), start=start)
        cand = init.parts.copy()
        if cand.min() == cand.max():  # growth swallowed everything; peel one back
            cand[np.argmax(coarsest.vertex_weights == coarsest.vertex_weights.min())] = 1
            cand = _rebalance(coarsest, cand, target_fraction)
        cand = _rebalance(coarsest, cand, target_fraction)
        cand = _fm_safe(coarsest, cand, target_fraction, tol)
        key = (
            edge_cut(coarsest, Partition(cand, 2)),
            abs(float(coarsest.vertex_weights[cand == 0].sum()) - target_fraction * total),
        )
        if best_key is None or key < best_key:
            best_key, best_parts = key, cand
    parts = best_parts
    assert parts is not None

    for idx in range(len(chain) - 1, -1, -1):
        parts = parts[chain[idx].projection]
        fine = g if idx == 0 else chain[idx - 1].graph
        parts = _rebalance(fine, parts, target_fraction)
        parts = _fm_safe(fine, parts, target_fraction, tol)
    parts = _repair_counts(g, parts, min_counts)
    return Partition(parts, 2)


def partition_kway(
    g: Graph,
    k: int,
    w: TargetWeights,
    seed: int,
    imbalance_tol: float = 0.03,
    min_part_counts: Sequence[int] | None = None,
) -> Partition:
    """Partition into k parts with target weight fractions ``w``.

    Recursive bisection: the first ⌈k/2⌉ target fractions go to the left
    branch, so part ids follow the weight-vector order. Every part is
    guaranteed nonempty (``min_part_counts`` raises the floor per part when a
    caller needs more than one vertex in specific parts).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(w) != k:
        raise ValueError(f"expected {k} target fractions, got {len(w)}")
    if k > g.num_vertices:
        raise InfeasibleError(f"cannot cut {g.num_vertices} vertices into {k} nonempty parts")
    if min_part_counts is None:
        mins = np.ones(k, dtype=np.int64)
    else:
        mins = np.asarray(min_part_counts, dtype=np.int64)
        if len(mins) != k or mins.min() < 1:
            raise ValueError("min_part_counts must give a positive count per part")
    if int(mins.sum()) > g.num_vertices:
        raise InfeasibleError("minimum part counts exceed the vertex count")
    depth = max(1, math.ceil(math.log2(k)))
    parts = np.zeros(g.num_vertices, dtype=np.int64)
    _recurse(g, np.arange(g.num_vertices), w.fractions, mins, seed, imbalance_tol / depth, parts, 0)
    return Partition(parts, k)


def _recurse(
    g: Graph,
    global_ids: np.ndarray,
    fractions: np.ndarray,
    mins: np.ndarray,
    seed: int,
    tol: float,
    out: np.ndarray,
    part_offset: int,
) -> None:
    k = len(fractions)
    if k == 1:
        out[global_ids] = part_offset
        return
    mid = (k + 1) // 2
    left_fraction = float(fractions[:mid].sum() / fractions.sum())
    local = _multilevel_bisect(
        g,
        left_fraction,
        tol,
        seed,
        (int(mins[:mid].sum()), int(mins[mid:].sum())),
    )
    left_ids = np.flatnonzero(local.parts == 0)
    right_ids = np.flatnonzero(local.parts == 1)
    left_g, _ = extract_subgraph(g, left_ids)
    right_g, _ = extract_subgraph(g, right_ids)
    _recurse(
        left_g, global_ids[left_ids], fractions[:mid], mins[:mid],
        derive_seed(seed, 3), tol, out, part_offset,
    )
    _recurse(
        right_g, global_ids[right_ids], fractions[mid:], mins[mid:],
        derive_seed(seed, 4), tol, out, part_offset + mid,
    )
