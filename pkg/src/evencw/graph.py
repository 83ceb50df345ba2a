"""Finite simple graphs, walks, vertex maps and the standard families.

Vertices are always the dense integers ``0..vertex_count-1``.  Everything in
this module is immutable once built.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from evencw.errors import InputError


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: frozenset = frozenset()
    _adj: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.vertex_count < 0:
            raise InputError("vertex_count must be nonnegative")
        norm = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise InputError(f"loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise InputError(f"edge {(u, v)} has an endpoint outside 0..{self.vertex_count - 1}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))
        adj = [[] for _ in range(self.vertex_count)]
        for u, v in norm:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return cls(vertex_count, frozenset(tuple(e) for e in edges))

    def neighbors(self, v: int) -> tuple:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(self.vertex_count)

    def components(self) -> list:
        """Connected components as sorted vertex lists, ordered by least vertex."""
        seen = [False] * self.vertex_count
        comps = []
        for s in range(self.vertex_count):
            if seen[s]:
                continue
            seen[s] = True
            comp, queue = [s], deque([s])
            while queue:
                u = queue.popleft()
                for w in self._adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.vertex_count <= 1 or len(self.components()) == 1

    def distances_from(self, source: int) -> list:
        """Breadth-first distances; unreachable vertices get ``None``."""
        dist = [None] * self.vertex_count
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in self._adj[u]:
                if dist[w] is None:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``v`` renamed ``perm[v]``."""
        return Graph(self.vertex_count, frozenset((perm[u], perm[v]) for u, v in self.edges))


@dataclass(frozen=True)
class Walk:
    """A vertex sequence; adjacency is checked against a carrier via :meth:`on`."""

    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))
        if not self.vertices:
            raise InputError("a walk has at least one vertex")

    @classmethod
    def on(cls, graph: Graph, vertices: Sequence[int]) -> "Walk":
        w = cls(tuple(vertices))
        w.check(graph)
        return w

    def check(self, graph: Graph) -> None:
        for v in self.vertices:
            if not 0 <= v < graph.vertex_count:
                raise InputError(f"vertex {v} not in graph")
        for i, (a, b) in enumerate(zip(self.vertices, self.vertices[1:])):
            if not graph.has_edge(a, b):
                raise InputError(f"step {i}: {a}-{b} is not an edge")

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def is_closed(self) -> bool:
        return self.vertices[0] == self.vertices[-1]

    def reversed(self) -> "Walk":
        return Walk(self.vertices[::-1])

    def concat(self, other: "Walk") -> "Walk":
        if self.end != other.start:
            raise InputError(f"cannot concatenate: {self.end} != {other.start}")
        return Walk(self.vertices + other.vertices[1:])

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i]


def as_walk(w) -> Walk:
    return w if isinstance(w, Walk) else Walk(tuple(w))


@dataclass(frozen=True)
class VertexMap:
    image: tuple

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(c) for c in self.image))

    @property
    def domain_size(self) -> int:
        return len(self.image)

    def __call__(self, v: int) -> int:
        return self.image[v]

    def compose(self, after: "VertexMap") -> "VertexMap":
        """``after ∘ self``."""
        return VertexMap(tuple(after.image[c] for c in self.image))


def as_map(f) -> VertexMap:
    return f if isinstance(f, VertexMap) else VertexMap(tuple(f))


def is_homomorphism(f, g: Graph, h: Graph) -> bool:
    f = as_map(f)
    if f.domain_size != g.vertex_count:
        raise InputError(f"map has {f.domain_size} entries but the source has {g.vertex_count} vertices")
    if any(not 0 <= c < h.vertex_count for c in f.image):
        raise InputError("map sends a vertex outside the target")
    return all(h.has_edge(f.image[u], f.image[v]) for u, v in g.edges)


def find_odd_closed_walk(g: Graph, base: int):
    """Shortest-layer odd closed walk at ``base``, or ``None`` if its component is bipartite.

    Layers are built breadth-first with neighbors scanned in increasing order,
    so each vertex's parent is its least-numbered predecessor; the closing
    edge is the least ``(depth, u, w)`` with ``u < w`` in the same layer.
    """
    if not 0 <= base < g.vertex_count:
        raise InputError(f"base {base} not in graph")
    dist = [None] * g.vertex_count
    parent = [None] * g.vertex_count
    dist[base] = 0
    queue = deque([base])
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for w in g.neighbors(u):
            if dist[w] is None:
                dist[w] = dist[u] + 1
                parent[w] = u
                queue.append(w)
    best = None
    for u in order:
        for w in g.neighbors(u):
            if u < w and dist[u] == dist[w]:
                key = (dist[u], u, w)
                if best is None or key < best:
                    best = key
    if best is None:
        return None
    _, u, w = best

    def path_to_base(x):
        out = [x]
        while out[-1] != base:
            out.append(parent[out[-1]])
        return out

    up = path_to_base(u)[::-1]
    down = path_to_base(w)
    return Walk(tuple(up + down))


class Bipartition(NamedTuple):
    coloring: VertexMap | None
    odd_walk: Walk | None

    @property
    def is_bipartite(self) -> bool:
        return self.coloring is not None


def bipartition(g: Graph) -> Bipartition:
    """Proper 2-coloring (least vertex of each component gets 0) or an odd closed walk."""
    color = [0] * g.vertex_count
    for comp in g.components():
        root = comp[0]
        dist = g.distances_from(root)
        for v in comp:
            color[v] = dist[v] % 2
        for v in comp:
            if any(color[w] == color[v] for w in g.neighbors(v)):
                return Bipartition(None, find_odd_closed_walk(g, root))
    return Bipartition(VertexMap(tuple(color)), None)


def neighborhood(g: Graph, v: int, j: int) -> frozenset:
    """Vertices joined to ``v`` by a walk of length exactly ``j``."""
    if j < 1:
        raise InputError("j must be positive")
    if not 0 <= v < g.vertex_count:
        raise InputError(f"vertex {v} not in graph")
    layer = set(g.neighbors(v))
    for _ in range(j - 1):
        layer = {w for u in layer for w in g.neighbors(u)}
    return frozenset(layer)


# -- standard families -----------------------------------------------------

def complete_graph(n: int) -> Graph:
    if n < 1:
        raise InputError("K_n needs n >= 1")
    return Graph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InputError("C_n needs n >= 3")
    return Graph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    """P_n: the path with n steps, hence n + 1 vertices."""
    if n < 0:
        raise InputError("P_n needs n >= 0")
    return Graph(n + 1, frozenset((i, i + 1) for i in range(n)))


def circular_distance(x: int, y: int, n: int) -> int:
    d = (x - y) % n
    return min(d, n - d)


def circular_complete_graph(n: int, m: int) -> Graph:
    """K_{n/m}: vertices Z/n, x ~ y iff their circular distance is at least m."""
    if n < 1 or m < 1:
        raise InputError("K_{n/m} needs n, m >= 1")
    if n < 2 * m:
        warnings.warn(f"K_{{{n}/{m}}} with n < 2m has no edges", stacklevel=2)
    return Graph(n, frozenset(
        (x, y) for x in range(n) for y in range(x + 1, n) if circular_distance(x, y, n) >= m
    ))


def build_family(name: str, *params: int) -> Graph:
    """``complete n``, ``cycle n``, ``path n`` or ``circular n m``."""
    builders = {
        "complete": (complete_graph, 1),
        "cycle": (cycle_graph, 1),
        "path": (path_graph, 1),
        "circular": (circular_complete_graph, 2),
    }
    if name not in builders:
        raise InputError(f"unknown graph family {name!r}; choose from {sorted(builders)}")
    fn, arity = builders[name]
    if len(params) != arity:
        raise InputError(f"family {name!r} takes {arity} parameter(s)")
    if any(p == 0 for p in params) and name != "path":
        raise InputError(f"nonsensical parameters {params} for {name!r}")
    return fn(*params)

