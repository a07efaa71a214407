"""Structured quad/hex test meshes, element dual graphs, interface node sets.

Numbering is row-major with x fastest (then y, then z), for both nodes and
elements, so every small example can be enumerated by hand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FileFormatError
from .graph import Graph, Partition, build_graph

__all__ = [
    "Mesh",
    "generate_structured_quad",
    "generate_structured_hex",
    "dual_graph",
    "interface_node_sets",
    "node_to_parts",
    "read_mesh",
    "write_mesh",
]

# Local node indices of the sides of one element, in canonical order.
_QUAD_SIDES = ((0, 1), (1, 2), (2, 3), (3, 0))
_HEX_SIDES = (
    (0, 1, 2, 3),  # bottom
    (4, 5, 6, 7),  # top
    (0, 1, 5, 4),
    (1, 2, 6, 5),
    (2, 3, 7, 6),
    (3, 0, 4, 7),
)


@dataclass(eq=False)
class Mesh:
    """Finite-element mesh: per-element node ids plus node coordinates.

    ``element_nodes`` is ``(num_elements, 4)`` for quads and ``(num_elements, 8)``
    for hexes; ``node_coords`` is ``(num_nodes, dim)`` in unitless grid units.
    """

    dim: int
    element_nodes: np.ndarray
    node_coords: np.ndarray

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        self.element_nodes = np.asarray(self.element_nodes, dtype=np.int64)
        self.node_coords = np.asarray(self.node_coords, dtype=np.float64)
        expect = 4 if self.dim == 2 else 8
        if self.element_nodes.ndim != 2 or self.element_nodes.shape[1] != expect:
            raise ValueError(f"{self.dim}D elements must list {expect} node ids")
        if self.node_coords.ndim != 2 or self.node_coords.shape[1] != self.dim:
            raise ValueError("node_coords must be (num_nodes, dim)")
        if self.element_nodes.size:
            if self.element_nodes.min() < 0 or self.element_nodes.max() >= self.num_nodes:
                raise ValueError("element references node id out of range")
            for e, nodes in enumerate(self.element_nodes):
                if len(set(nodes.tolist())) != len(nodes):
                    raise ValueError(f"element {e} repeats a node id")

    @property
    def num_nodes(self) -> int:
        return len(self.node_coords)

    @property
    def num_elements(self) -> int:
        return len(self.element_nodes)


def generate_structured_quad(nx: int, ny: int) -> Mesh:
    """Quad mesh with nx*ny elements on an (nx+1)*(ny+1) node grid.

    Element j*nx+i has nodes (j(nx+1)+i, j(nx+1)+i+1, (j+1)(nx+1)+i+1,
    (j+1)(nx+1)+i), i.e. counterclockwise from its lower-left corner.
    """
    if nx < 1 or ny < 1:
        raise ValueError("mesh dimensions must be >= 1")
    xs, ys = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1))
    coords = np.column_stack([xs.ravel(), ys.ravel()]).astype(np.float64)
    elems = np.empty((nx * ny, 4), dtype=np.int64)
    for j in range(ny):
        for i in range(nx):
            base = j * (nx + 1) + i
            elems[j * nx + i] = (base, base + 1, base + nx + 2, base + nx + 1)
    return Mesh(2, elems, coords)


def generate_structured_hex(nx: int, ny: int, nz: int) -> Mesh:
    """Hex mesh with nx*ny*nz elements; bottom quad then top quad per element."""
    if nx < 1 or ny < 1 or nz < 1:
        raise ValueError("mesh dimensions must be >= 1")
    nxp, nyp = nx + 1, ny + 1
    zs, ys, xs = np.meshgrid(np.arange(nz + 1), np.arange(ny + 1), np.arange(nx + 1), indexing="ij")
    coords = np.column_stack([xs.ravel(), ys.ravel(), zs.ravel()]).astype(np.float64)
    layer = nxp * nyp
    elems = np.empty((nx * ny * nz, 8), dtype=np.int64)
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                base = k * layer + j * nxp + i
                bottom = (base, base + 1, base + nxp + 1, base + nxp)
                elems[(k * ny + j) * nx + i] = bottom + tuple(n + layer for n in bottom)
    return Mesh(3, elems, coords)


def _element_sides(mesh: Mesh, e: int) -> list[tuple[int, ...]]:
    nodes = mesh.element_nodes[e]
    locals_ = _QUAD_SIDES if mesh.dim == 2 else _HEX_SIDES
    return [tuple(sorted(int(nodes[i]) for i in side)) for side in locals_]


def dual_graph(mesh: Mesh) -> Graph:
    """Element adjacency graph: an edge wherever two elements share a full side.

    A side is an element edge in 2D (2 nodes) or a face in 3D (4 nodes); sides
    are matched by their sorted node-id tuples. All weights are 1.
    """
    side_map: dict[tuple[int, ...], int] = {}
    edges: list[tuple[int, int, int]] = []
    for e in range(mesh.num_elements):
        for key in _element_sides(mesh, e):
            other = side_map.pop(key, None)
            if other is None:
                side_map[key] = e
            else:
                edges.append((other, e, 1))
    return build_graph(edges, mesh.num_elements)


def node_to_parts(mesh: Mesh, elem_partition: Partition) -> list[set[int]]:
    """Per-node set of part ids over the elements attached to that node."""
    if len(elem_partition.parts) != mesh.num_elements:
        raise ValueError(
            f"partition length {len(elem_partition.parts)} != num_elements {mesh.num_elements}"
        )
    attached: list[set[int]] = [set() for _ in range(mesh.num_nodes)]
    for e, nodes in enumerate(mesh.element_nodes):
        p = int(elem_partition.parts[e])
        for n in nodes:
            attached[int(n)].add(p)
    return attached


def interface_node_sets(
    mesh: Mesh, elem_partition: Partition
) -> tuple[dict[tuple[int, int], set[int]], list[int]]:
    """Group shared nodes by the unordered pair of parts that touch them.

    Returns ``(pair_sets, multi_rank)``: ``pair_sets[(a, b)]`` (a < b) holds the
    nodes attached to elements of exactly parts a and b; nodes attached to three
    or more parts are excluded from every pair and returned in ``multi_rank``
    (sorted by node id) for separate handling.
    """
    attached = node_to_parts(mesh, elem_partition)
    pair_sets: dict[tuple[int, int], set[int]] = {}
    multi_rank: list[int] = []
    for n, parts in enumerate(attached):
        if len(parts) == 2:
            a, b = sorted(parts)
            pair_sets.setdefault((a, b), set()).add(n)
        elif len(parts) > 2:
            multi_rank.append(n)
    return pair_sets, multi_rank


# ---------------------------------------------------------------------------
# Mesh text format: line 1 "dim num_nodes num_elements"; then num_nodes
# coordinate lines; then num_elements lines of space-separated 0-indexed
# node ids.
# ---------------------------------------------------------------------------


def write_mesh(mesh: Mesh, path: str) -> None:
    lines = [f"{mesh.dim} {mesh.num_nodes} {mesh.num_elements}"]
    for coord in mesh.node_coords:
        lines.append(" ".join(repr(float(c)) for c in coord))
    for nodes in mesh.element_nodes:
        lines.append(" ".join(str(int(n)) for n in nodes))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path: str) -> Mesh:
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise FileFormatError(path, 1, "empty mesh file")
    head = raw[0].split()
    if len(head) != 3:
        raise FileFormatError(path, 1, "expected 'dim num_nodes num_elements'")
    try:
        dim, nn, ne = (int(t) for t in head)
    except ValueError:
        raise FileFormatError(path, 1, "expected 'dim num_nodes num_elements'") from None
    if dim not in (2, 3):
        raise FileFormatError(path, 1, f"dim must be 2 or 3, got {dim}")
    if len(raw) < 1 + nn + ne:
        raise FileFormatError(path, len(raw), f"expected {nn} coordinate and {ne} element lines")

    coords = np.empty((nn, dim), dtype=np.float64)
    for i in range(nn):
        lineno = i + 2
        tokens = raw[i + 1].split()
        if len(tokens) != dim:
            raise FileFormatError(path, lineno, f"expected {dim} coordinates")
        try:
            coords[i] = [float(t) for t in tokens]
        except ValueError:
            raise FileFormatError(path, lineno, "bad coordinate value") from None

    nodes_per_elem = 4 if dim == 2 else 8
    elems = np.empty((ne, nodes_per_elem), dtype=np.int64)
    for e in range(ne):
        lineno = 1 + nn + e + 1
        tokens = raw[1 + nn + e].split()
        if len(tokens) != nodes_per_elem:
            raise FileFormatError(path, lineno, f"expected {nodes_per_elem} node ids")
        try:
            ids = [int(t) for t in tokens]
        except ValueError:
            raise FileFormatError(path, lineno, "bad node id") from None
        if any(not (0 <= n < nn) for n in ids):
            raise FileFormatError(path, lineno, "node id out of range")
        elems[e] = ids
    try:
        return Mesh(dim, elems, coords)
    except ValueError as exc:
        raise FileFormatError(path, 1, str(exc)) from None
