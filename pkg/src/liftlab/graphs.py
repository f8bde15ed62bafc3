"""Graph families and the factor-graph objects built on top of them.

Every operator in liftlab is indexed by two sets: the vertices of the base
graph and the extended edge set, whose elements are (edge, endpoint) pairs.
This module fixes a canonical, deterministic ordering for both:

* edges are sorted lexicographically as ``(i, j)`` with ``i < j``;
* within the extended set, ``(e, i)`` precedes ``(e, j)``, so the two copies
  belonging to edge ``k`` sit at positions ``2k`` and ``2k + 1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import InvalidInput, InvalidParameter, InvalidSize

__all__ = [
    "Graph",
    "FactorGraph",
    "build_cycle",
    "build_torus",
    "build_barbell",
    "build_complete_minus_edge",
    "build_complete",
    "factor_graph",
    "is_connected",
    "laplacian",
    "relabel",
    "write_edge_list",
    "read_edge_list",
    "parse_graph_spec",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Undirected, connected, simple graph with positive edge weights.

    Parameters
    ----------
    n : int
        Number of vertices, labeled ``0 .. n-1``.
    edges : tuple of (int, int)
        Edge list with ``i < j``, sorted lexicographically.
    q : tuple of float
        One positive curvature weight per edge, aligned with ``edges``.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    q: tuple[float, ...]

    def __post_init__(self):
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        q = tuple(float(w) for w in self.q)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "q", q)
        if self.n < 2:
            raise InvalidSize(f"graph needs at least 2 vertices, got {self.n}")
        if len(q) != len(edges):
            raise InvalidInput("one weight per edge is required")
        for i, j in edges:
            if i == j:
                raise InvalidInput(f"self-loop at vertex {i}")
            if not (0 <= i < j < self.n):
                raise InvalidInput(f"edge {(i, j)} is not of the form 0 <= i < j < n")
        if len(set(edges)) != len(edges):
            raise InvalidInput("duplicate edges")
        if list(edges) != sorted(edges):
            raise InvalidInput("edges must be sorted lexicographically")
        if any(not np.isfinite(w) or w <= 0 for w in q):
            raise InvalidParameter("edge weights must be finite and strictly positive")
        if not is_connected(self.n, edges):
            raise InvalidInput("graph is not connected")

    @classmethod
    def from_edges(cls, n, edges, q=None) -> Graph:
        """Build a graph from an unordered edge collection (normalizes orientation/order)."""
        pairs = [tuple(sorted((int(a), int(b)))) for a, b in edges]
        weights = [1.0] * len(pairs) if q is None else [float(w) for w in q]
        if len(weights) != len(pairs):
            raise InvalidInput("one weight per edge is required")
        order = sorted(range(len(pairs)), key=pairs.__getitem__)
        return cls(n, tuple(pairs[k] for k in order), tuple(weights[k] for k in order))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self.q, dtype=float)

    @property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def with_weights(self, q) -> Graph:
        return Graph(self.n, self.edges, tuple(q))


@dataclass(frozen=True)
class FactorGraph:
    """Extended edge set and selection matrix of a base graph.

    Attributes
    ----------
    base : Graph
    ehat : tuple of (int, int)
        ``(edge_index, vertex)`` pairs, length ``2 * base.m``.
    S : ndarray, shape (2m, n)
        0/1 selection matrix with ``S[(e, i), i] = 1``; read-only.
    deg : ndarray, shape (n,)
        Vertex degrees (column sums of ``S``); read-only.
    """

    base: Graph
    ehat: tuple[tuple[int, int], ...]
    S: np.ndarray = field(repr=False)
    deg: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def size(self) -> int:
        """Number of extended edges, ``|Ê| = 2|E|``."""
        return len(self.ehat)

    @property
    def vertex_of(self) -> np.ndarray:
        """Vertex index carried by each extended edge."""
        return np.array([v for _, v in self.ehat], dtype=int)

    def copies(self, b: int) -> list[int]:
        """Extended-edge positions holding a copy of vertex ``b``."""
        return [k for k, (_, v) in enumerate(self.ehat) if v == b]


def is_connected(n: int, edges) -> bool:
    adj = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == n


def build_cycle(n: int) -> Graph:
    """Cycle graph C_n with unit weights."""
    if n < 3:
        raise InvalidSize(f"cycle needs n >= 3, got {n}")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def build_torus(k: int) -> Graph:
    """Periodic k-by-k grid C_k x C_k (4-regular, 2k^2 edges)."""
    if k < 3:
        raise InvalidSize(f"torus needs k >= 3, got {k}")
    edges = []
    for r in range(k):
        for c in range(k):
            v = r * k + c
            edges.append((v, r * k + (c + 1) % k))
            edges.append((v, ((r + 1) % k) * k + c))
    return Graph.from_edges(k * k, edges)


def build_barbell(k: int) -> Graph:
    """Two copies of K_k joined by a bridge between vertex 0 and vertex k."""
    if k < 3:
        raise InvalidSize(f"barbell needs clique size k >= 3, got {k}")
    edges = list(combinations(range(k), 2))
    edges += [(k + i, k + j) for i, j in combinations(range(k), 2)]
    edges.append((0, k))
    return Graph.from_edges(2 * k, edges)


def build_complete(n: int) -> Graph:
    if n < 2:
        raise InvalidSize(f"complete graph needs n >= 2, got {n}")
    return Graph.from_edges(n, combinations(range(n), 2))


def build_complete_minus_edge(n: int = 4) -> Graph:
    """K_n with its lexicographically last edge ``(n-2, n-1)`` removed."""
    if n < 4:
        raise InvalidSize(f"complete-minus-edge needs n >= 4, got {n}")
    edges = list(combinations(range(n), 2))[:-1]
    return Graph.from_edges(n, edges)


def factor_graph(g: Graph) -> FactorGraph:
    ehat = []
    for k, (i, j) in enumerate(g.edges):
        ehat.append((k, i))
        ehat.append((k, j))
    S = np.zeros((len(ehat), g.n))
    for row, (_, v) in enumerate(ehat):
        S[row, v] = 1.0
    return FactorGraph(g, tuple(ehat), _frozen(S), _frozen(g.degrees))


def laplacian(g: Graph) -> np.ndarray:
    """Weighted graph Laplacian assembled from the adjacency matrix."""
    W = np.zeros((g.n, g.n))
    for (i, j), w in zip(g.edges, g.q):
        W[i, j] = W[j, i] = w
    return np.diag(W.sum(axis=1)) - W


def relabel(g: Graph, perm) -> Graph:
    """Return the isomorphic graph with vertex ``v`` renamed to ``perm[v]``."""
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(g.n)):
        raise InvalidInput("perm must be a permutation of range(n)")
    return Graph.from_edges(g.n, [(perm[i], perm[j]) for i, j in g.edges], g.q)


# -- edge-list text format: "n m" header, then "i j q" per edge ---------------


def write_edge_list(g: Graph, path) -> None:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{i} {j} {w!r}" for (i, j), w in zip(g.edges, g.q)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_edge_list(path) -> Graph:
    rows = [ln.split() for ln in Path(path).read_text(encoding="ascii").splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise InvalidInput(f"{path}: missing 'n m' header")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise InvalidInput(f"{path}: header announces {m} edges, found {len(body)}")
    edges, q = [], []
    for r in body:
        if len(r) != 3:
            raise InvalidInput(f"{path}: malformed edge line {' '.join(r)!r}")
        edges.append((int(r[0]), int(r[1])))
        q.append(float(r[2]))
    return Graph.from_edges(n, edges, q)


_FAMILIES = {
    "cycle": build_cycle,
    "torus": build_torus,
    "barbell": build_barbell,
}


def parse_graph_spec(spec: str) -> Graph:
    """Parse ``cycle:N``, ``torus:K``, ``barbell:K``, ``k4minus`` or ``file:PATH``."""
    spec = spec.strip()
    if spec == "k4minus":
        return build_complete_minus_edge(4)
    name, sep, arg = spec.partition(":")
    if not sep:
        raise InvalidInput(f"unrecognized graph spec {spec!r}")
    if name == "file":
        return read_edge_list(arg)
    if name not in _FAMILIES:
        raise InvalidInput(f"unknown graph family {name!r}")
    try:
        size = int(arg)
    except ValueError:
        raise InvalidInput(f"graph size must be an integer, got {arg!r}") from None
    return _FAMILIES[name](size)
