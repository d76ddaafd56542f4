"""
Finite multigraphs with symmetric arcs.

Every unoriented edge ``i = (u, v)`` yields two arcs: arc ``2i`` runs from
``u`` to ``v`` and arc ``2i + 1`` from ``v`` to ``u``. Self-loops therefore
contribute two distinct arcs paired by the inversion map. Vertex and arc
indices follow construction order, which is the basis order of every matrix
built downstream.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .exceptions import GraphError, ShiftError

__all__ = [
    "Graph",
    "ArcPermutation",
    "build_graph",
    "standard_graph",
    "cycle",
    "complete",
    "bouquet",
    "hypercubic_torus",
    "torus_coordinates",
    "random_connected_graph",
    "validate_shift_permutation",
    "flipflop_permutation",
    "random_shift_permutation",
    "load_graph",
    "graph_to_json",
]


@dataclass(frozen=True)
class Graph:
    """
    Immutable symmetric-arc multigraph.

    Attributes
    ----------
    n_vertices : int
    edges : tuple of (u, v)
        Unoriented edges in construction order.
    origin, terminus : ndarray of int
        ``o(a)`` and ``t(a)`` for every arc index ``a``.
    inv : ndarray of int
        The involution ``a -> a-bar``.
    incoming : tuple of ndarray
        ``incoming[u]`` lists the arcs with ``t(a) = u`` in ascending arc
        index; this is the canonical local order of the coin at ``u``.
    """

    n_vertices: int
    edges: tuple
    origin: np.ndarray = field(repr=False)
    terminus: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)
    incoming: tuple = field(repr=False)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_arcs(self) -> int:
        return 2 * len(self.edges)

    @property
    def arcs(self):
        return list(zip(self.origin.tolist(), self.terminus.tolist()))

    def degree(self, u: int) -> int:
        return len(self.incoming[u])

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.incoming], dtype=int)

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n_vertices else 0

    def local_index(self) -> np.ndarray:
        """Position of each arc inside ``incoming[t(a)]``."""
        pos = np.empty(self.n_arcs, dtype=int)
        for arcs in self.incoming:
            pos[arcs] = np.arange(len(arcs))
        return pos

    def outgoing(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.origin == u)

    def is_connected(self) -> bool:
        if self.n_vertices == 0:
            return True
        seen = np.zeros(self.n_vertices, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for a in self.outgoing(u):
                v = int(self.terminus[a])
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        return bool(seen.all())

    def check(self) -> None:
        """Assert the structural invariants exhaustively."""
        a = np.arange(self.n_arcs)
        if not np.array_equal(self.inv[self.inv], a):
            raise GraphError("inversion map is not an involution")
        if np.any(self.inv == a):
            raise GraphError("inversion map has a fixed point")
        if not np.array_equal(self.origin[self.inv], self.terminus):
            raise GraphError("o(inv(a)) != t(a)")
        if not np.array_equal(self.terminus[self.inv], self.origin):
            raise GraphError("t(inv(a)) != o(a)")
        if sum(len(x) for x in self.incoming) != self.n_arcs:
            raise GraphError("incoming arc sets do not partition the arcs")
        if self.n_vertices and self.min_degree < 1:
            raise GraphError("isolated vertex")


@dataclass(frozen=True)
class ArcPermutation:
    """A permutation of arc indices, ``perm[a] = pi(a)``."""

    perm: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "perm", np.asarray(self.perm, dtype=int))

    def __len__(self):
        return len(self.perm)


def build_graph(edge_list, n_vertices: int) -> Graph:
    """
    Build a graph from an edge list.

    Self-loops and parallel edges are allowed. Raises :class:`GraphError`
    for out-of-range vertex indices.
    """
    n_vertices = int(n_vertices)
    if n_vertices < 0:
        raise GraphError(f"n_vertices must be non-negative, got {n_vertices}")
    edges = tuple((int(u), int(v)) for u, v in edge_list)
    for i, (u, v) in enumerate(edges):
        if not (0 <= u < n_vertices and 0 <= v < n_vertices):
            raise GraphError(
                f"edge {i} = ({u}, {v}) out of range for {n_vertices} vertices"
            )
    m = len(edges)
    origin = np.empty(2 * m, dtype=int)
    terminus = np.empty(2 * m, dtype=int)
    for i, (u, v) in enumerate(edges):
        origin[2 * i], terminus[2 * i] = u, v
        origin[2 * i + 1], terminus[2 * i + 1] = v, u
    inv = np.arange(2 * m) ^ 1
    incoming = tuple(np.flatnonzero(terminus == u) for u in range(n_vertices))
    g = Graph(n_vertices, edges, origin, terminus, inv, incoming)
    g.check()
    return g


def cycle(n: int) -> Graph:
    if n < 1:
        raise GraphError(f"cycle needs n >= 1, got {n}")
    return build_graph([(i, (i + 1) % n) for i in range(n)], n)


def complete(n: int) -> Graph:
    if n < 2:
        raise GraphError(f"complete graph needs n >= 2, got {n}")
    return build_graph(list(combinations(range(n), 2)), n)


def bouquet(d: int) -> Graph:
    """One vertex with ``d`` self-loops; loop ``j`` carries arcs ``+j, -j``."""
    if d < 1:
        raise GraphError(f"bouquet needs d >= 1, got {d}")
    return build_graph([(0, 0)] * d, 1)


def torus_coordinates(x: int, d: int, N: int) -> tuple:
    """Mixed-radix digits of vertex ``x``; coordinate 0 varies fastest."""
    return tuple((x // N**j) % N for j in range(d))


def _torus_index(coords, N: int) -> int:
    return int(sum((c % N) * N**j for j, c in enumerate(coords)))


def hypercubic_torus(d: int, N: int) -> Graph:
    """
    The torus Z^d / N Z^d.

    Edges are emitted for each vertex ``x`` (ascending) and axis ``j``
    (ascending) as ``(x, x + e_j)``. ``N < 3`` is rejected because the two
    arcs ``+e_j`` and ``-e_j`` would join the same pair of vertices.
    """
    if d < 1:
        raise GraphError(f"torus needs d >= 1, got {d}")
    if N < 3:
        raise GraphError(f"torus side N must be >= 3, got {N}")
    n = N**d
    edges = []
    for x in range(n):
        c = torus_coordinates(x, d, N)
        for j in range(d):
            step = list(c)
            step[j] += 1
            edges.append((x, _torus_index(step, N)))
    return build_graph(edges, n)


def standard_graph(kind: str, *params: int) -> Graph:
    """Dispatch on ``kind`` in {cycle, complete, bouquet, hypercubic_torus}."""
    builders = {
        "cycle": cycle,
        "complete": complete,
        "bouquet": bouquet,
        "hypercubic_torus": hypercubic_torus,
    }
    try:
        builder = builders[kind]
    except KeyError:
        raise GraphError(f"unknown graph kind {kind!r}") from None
    if any(int(p) < 1 for p in params):
        raise GraphError(f"parameters must be positive, got {params}")
    return builder(*params)


def random_connected_graph(n: int, extra_edges: int, rng) -> Graph:
    """Random spanning tree on ``n`` vertices plus ``extra_edges`` random edges."""
    if n < 2:
        raise GraphError("random connected graph needs n >= 2")
    perm = rng.permutation(n)
    edges = []
    for i in range(1, n):
        edges.append((int(perm[i]), int(perm[rng.integers(i)])))
    pool = [e for e in combinations(range(n), 2)
            if e not in edges and e[::-1] not in edges]
    take = min(extra_edges, len(pool))
    for idx in rng.choice(len(pool), size=take, replace=False):
        edges.append(pool[int(idx)])
    return build_graph(edges, n)


def flipflop_permutation(g: Graph) -> ArcPermutation:
    return ArcPermutation(g.inv.copy())


def validate_shift_permutation(g: Graph, pi: ArcPermutation) -> None:
    """
    Check that ``pi`` is a bijection with ``o(pi(a)) = t(a)``.

    Raises :class:`ShiftError` carrying the first offending arc.
    """
    perm = np.asarray(pi.perm)
    if perm.shape != (g.n_arcs,):
        raise ShiftError(
            f"permutation has length {perm.size}, graph has {g.n_arcs} arcs"
        )
    seen = np.full(g.n_arcs, -1)
    for a in range(g.n_arcs):
        b = int(perm[a])
        if not 0 <= b < g.n_arcs:
            raise ShiftError(f"pi({a}) = {b} is not an arc index", arc=a)
        if seen[b] >= 0:
            raise ShiftError(
                f"pi is not injective: pi({seen[b]}) = pi({a}) = {b}", arc=a
            )
        seen[b] = a
        if g.origin[b] != g.terminus[a]:
            raise ShiftError(
                f"o(pi({a})) = {g.origin[b]} differs from t({a}) = {g.terminus[a]}",
                arc=a,
            )


def random_shift_permutation(g: Graph, rng) -> ArcPermutation:
    """Uniformly random shift-compatible permutation (local bijections A_u -> O_u)."""
    perm = np.empty(g.n_arcs, dtype=int)
    for u in range(g.n_vertices):
        inc = g.incoming[u]
        out = g.outgoing(u)
        perm[inc] = rng.permutation(out)
    return ArcPermutation(perm)


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n_vertices, "edges": [list(e) for e in g.edges]}


def load_graph(path) -> Graph:
    """Read ``{"n": int, "edges": [[u, v], ...]}``."""
    data = json.loads(Path(path).read_text())
    try:
        return build_graph(data["edges"], data["n"])
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph file {path}: {exc}") from exc

