"""CW complexes with even 2-skeleton.

A complex is a simple graph (the 1-skeleton) plus 2-cells, each attached
along a closed walk of even length >= 4.  Attaching walks are stored as
based closed walks but compared up to rotation and reversal
(:func:`canonical_cell`).
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from evencw.errors import GenerationError, InputError, ResourceError
from evencw.graph import Graph, Walk

DEFAULT_CELL_BUDGET = 250_000


def canonical_cell(cycle: Sequence[int]) -> tuple:
    """Least rotation/reversal of a cyclic vertex sequence (no repeated endpoint)."""
    cyc = tuple(cycle)
    low = min(cyc)
    best = None
    for i, v in enumerate(cyc):
        if v != low:
            continue
        rot = cyc[i:] + cyc[:i]
        rev = (rot[0],) + rot[:0:-1]
        cand = min(rot, rev)
        if best is None or cand < best:
            best = cand
    return best


def _cycle_of(cell) -> tuple:
    vs = tuple(cell)
    return vs[:-1] if len(vs) > 1 and vs[0] == vs[-1] else vs


def close(cycle: Sequence[int]) -> tuple:
    cyc = tuple(cycle)
    return cyc + (cyc[0],)


@dataclass(frozen=True)
class EvenComplex:
    skeleton: Graph
    cells: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(Walk(tuple(c)) for c in self.cells))

    @property
    def vertex_count(self) -> int:
        return self.skeleton.vertex_count

    @property
    def edge_count(self) -> int:
        return self.skeleton.edge_count

    @property
    def cell_count(self) -> int:
        return len(self.cells)

    @property
    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count + self.cell_count

    @property
    def max_half_length(self) -> int:
        """Largest r over attaching maps C_{2r} -> X^1 (0 without cells)."""
        return max((c.length // 2 for c in self.cells), default=0)

    @property
    def is_quadrangulated(self) -> bool:
        return all(c.length == 4 for c in self.cells)

    def cell_classes(self) -> list:
        return [canonical_cell(_cycle_of(c)) for c in self.cells]

    def canonical(self) -> "EvenComplex":
        """Same complex with every cell in canonical form and cells sorted."""
        cells = sorted(close(cc) for cc in self.cell_classes())
        return EvenComplex(self.skeleton, tuple(cells))

    def deduplicated(self) -> "EvenComplex":
        """Keep one cell per class; homology is unchanged."""
        seen = sorted({close(cc) for cc in self.cell_classes()})
        return EvenComplex(self.skeleton, tuple(seen))


def validate(x: EvenComplex) -> list:
    """Violations of the even-complex invariants, as human-readable strings."""
    problems = []
    g = x.skeleton
    for idx, cell in enumerate(x.cells):
        vs = cell.vertices
        label = f"cell {idx} {list(vs)}"
        if not cell.is_closed:
            problems.append(f"{label}: not closed")
        if cell.length % 2:
            problems.append(f"{label}: odd cell length {cell.length}")
        elif cell.length < 4:
            problems.append(f"{label}: length {cell.length} < 4")
        for v in vs:
            if not 0 <= v < g.vertex_count:
                problems.append(f"{label}: vertex {v} outside skeleton")
                break
        else:
            for a, b in zip(vs, vs[1:]):
                if not g.has_edge(a, b):
                    problems.append(f"{label}: step {a}-{b} is not an edge")
    return problems


def check_valid(x: EvenComplex) -> None:
    problems = validate(x)
    if problems:
        raise InputError("invalid complex: " + "; ".join(problems[:5]))


def from_faces(vertex_count: int, faces: Iterable[Sequence[int]], extra_edges=()) -> EvenComplex:
    """Complex whose edges are exactly the consecutive pairs of the given faces."""
    edges = set()
    cells = []
    for face in faces:
        cyc = tuple(face)
        if len(cyc) < 4 or len(cyc) % 2:
            raise InputError(f"face {list(cyc)} must have even length >= 4")
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if a == b:
                raise InputError(f"face {list(cyc)} repeats vertex {a} consecutively (needs a loop)")
            edges.add((min(a, b), max(a, b)))
        cells.append(close(cyc))
    edges.update((min(a, b), max(a, b)) for a, b in extra_edges)
    return EvenComplex(Graph(vertex_count, frozenset(edges)), tuple(cells))


# -- quotient construction for generators ----------------------------------

class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _quotient(faces, vertex_key, edge_key, family) -> EvenComplex:
    """Build a complex from square faces on abstract points.

    ``vertex_key`` and ``edge_key`` give the identification classes; two
    distinct edge classes with the same endpoints, or an edge class whose
    endpoints coincide, abort the construction.
    """
    vclasses = sorted({vertex_key(p) for f in faces for p in f})
    vid = {c: i for i, c in enumerate(vclasses)}
    edge_owner = {}
    pair_owner = {}
    for fi, f in enumerate(faces):
        for a, b in zip(f, f[1:] + f[:1]):
            ek = edge_key(a, b)
            edge_owner.setdefault(ek, fi)
            u, v = vid[vertex_key(a)], vid[vertex_key(b)]
            if u == v:
                raise GenerationError(f"{family}: face {fi} gets a loop at vertex {u}")
            pair = (min(u, v), max(u, v))
            other = pair_owner.setdefault(pair, ek)
            if other != ek:
                raise GenerationError(
                    f"{family}: faces {edge_owner[other]} and {fi} create a double edge {pair}"
                )
    cells = [close(tuple(vid[vertex_key(p)] for p in f)) for f in faces]
    edges = frozenset(pair_owner)
    return EvenComplex(Graph(len(vclasses), edges), tuple(cells)).canonical()


def _grid_faces(m, n, tag=None):
    faces = []
    for x in range(m):
        for y in range(n):
            sq = [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]
            faces.append(tuple(sq if tag is None else [(tag,) + p for p in sq]))
    return faces


def _glued_square(m, n, pairings, family, faces=None):
    faces = faces if faces is not None else _grid_faces(m, n)
    points = _UnionFind()
    edges = _UnionFind()
    for side_a, side_b in pairings:
        for p, q in zip(side_a, side_b):
            points.union(p, q)
        for i in range(len(side_a) - 1):
            ea = frozenset((side_a[i], side_a[i + 1]))
            eb = frozenset((side_b[i], side_b[i + 1]))
            edges.union(tuple(sorted(ea)), tuple(sorted(eb)))
    return _quotient(
        faces,
        points.find,
        lambda a, b: edges.find(tuple(sorted((a, b)))),
        family,
    )


def _require(cond, msg):
    if not cond:
        raise InputError(msg)


def sphere_grid(m: int, n: int) -> EvenComplex:
    """Two m-by-n grids glued along their boundary (a pillowcase)."""
    _require(m >= 1 and n >= 1, "sphere_grid needs m, n >= 1")
    faces = _grid_faces(m, n, "a") + _grid_faces(m, n, "b")
    rim = [(x, 0) for x in range(m)] + [(m, y) for y in range(n)] \
        + [(x, n) for x in range(m, 0, -1)] + [(0, y) for y in range(n, -1, -1)]
    pairing = ([("a",) + p for p in rim], [("b",) + p for p in rim])
    return _glued_square(m, n, [pairing], f"sphere_grid({m},{n})", faces)


def torus_grid(m: int, n: int) -> EvenComplex:
    _require(m >= 3 and n >= 3, "torus_grid needs m, n >= 3")
    pairings = [
        ([(x, 0) for x in range(m + 1)], [(x, n) for x in range(m + 1)]),
        ([(0, y) for y in range(n + 1)], [(m, y) for y in range(n + 1)]),
    ]
    return _glued_square(m, n, pairings, f"torus_grid({m},{n})")


def klein_grid(m: int, n: int) -> EvenComplex:
    _require(m >= 3 and n >= 3, "klein_grid needs m, n >= 3")
    pairings = [
        ([(x, 0) for x in range(m + 1)], [(x, n) for x in range(m + 1)]),
        ([(0, y) for y in range(n + 1)], [(m, n - y) for y in range(n + 1)]),
    ]
    return _glued_square(m, n, pairings, f"klein_grid({m},{n})")


def projective_grid(m: int, n: int) -> EvenComplex:
    """m-by-n grid with antipodal boundary identification.

    mn + 1 vertices; the skeleton is bipartite iff m + n is even.  Simple
    when m, n >= 3, or when one side is 2 and the other is odd.
    """
    _require(m >= 1 and n >= 1, "projective_grid needs m, n >= 1")
    pairings = [
        ([(x, 0) for x in range(m + 1)], [(m - x, n) for x in range(m + 1)]),
        ([(0, y) for y in range(n + 1)], [(m, n - y) for y in range(n + 1)]),
    ]
    return _glued_square(m, n, pairings, f"projective_grid({m},{n})")


def k4_projective() -> EvenComplex:
    """K_4 embedded in RP^2 with its three 4-cycles as faces."""
    return from_faces(4, [(0, 1, 2, 3), (0, 1, 3, 2), (0, 2, 1, 3)]).canonical()


def cube_boundary(d: int) -> EvenComplex:
    """Vertices {0,1}^d, hypercube edges and all square faces (d >= 3)."""
    _require(d >= 2, "cube_boundary needs d >= 2")
    faces = []
    if d >= 3:
        for i, j in itertools.combinations(range(d), 2):
            for b in range(1 << d):
                if b & (1 << i) or b & (1 << j):
                    continue
                faces.append((b, b | 1 << i, b | 1 << i | 1 << j, b | 1 << j))
    edges = [(b, b | 1 << i) for b in range(1 << d) for i in range(d) if not b & (1 << i)]
    return from_faces(1 << d, faces, extra_edges=edges).canonical()


def cubical_rp(d: int, scale: int | None = None) -> EvenComplex:
    """2-skeleton of RP^d: the antipodal quotient of the unit-cube subdivision of
    the boundary of [-s, s]^(d+1).  Tries s = 1 then s = 2 unless ``scale`` is given.
    """
    _require(d >= 2, "cubical_rp needs d >= 2")
    if scale is None:
        last = None
        for s in (1, 2):
            try:
                x = cubical_rp(d, s)
            except GenerationError as exc:
                last = exc
                continue
            if not validate(x):
                return x
        raise GenerationError(f"cubical_rp({d}): no admissible subdivision ({last})")
    s = scale
    dim = d + 1

    def neg(p):
        return tuple(-c for c in p)

    def vkey(p):
        return min(p, neg(p))

    def ekey(a, b):
        e = tuple(sorted((a, b)))
        f = tuple(sorted((neg(a), neg(b))))
        return min(e, f)

    faces = []
    for i, j in itertools.combinations(range(dim), 2):
        others = [k for k in range(dim) if k not in (i, j)]
        for fixed in itertools.product(range(-s, s + 1), repeat=len(others)):
            if not any(abs(c) == s for c in fixed):
                continue
            for a in range(-s, s):
                for b in range(-s, s):
                    base = [0] * dim
                    for k, c in zip(others, fixed):
                        base[k] = c
                    center2 = [2 * c for c in base]
                    center2[i], center2[j] = 2 * a + 1, 2 * b + 1
                    if tuple(center2) < neg(center2):
                        continue
                    pts = []
                    for di, dj in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        p = list(base)
                        p[i], p[j] = a + di, b + dj
                        pts.append(tuple(p))
                    faces.append(tuple(pts))
    return _quotient(faces, vkey, ekey, f"cubical_rp({d}, scale={s})")


def _random_closed_walk(g: Graph, rng: random.Random, length: int, tries: int = 30):
    starts = [v for v in g.vertices() if g.degree(v)]
    for _ in range(tries if starts else 0):
        walk = [rng.choice(starts)]
        for _ in range(length - 1):
            walk.append(rng.choice(g.neighbors(walk[-1])))
        if g.has_edge(walk[-1], walk[0]):
            return Walk(tuple(walk) + (walk[0],))
    return None


def random_complex(seed: int, vertices: int = 10, max_half: int = 3, quadrangulated: bool = False) -> EvenComplex:
    """Random G(n, p) skeleton with 3..``vertices`` vertices and random even cells.

    Cells are random closed walks of length 4..2*max_half (only 4 when
    ``quadrangulated``).  Fully determined by ``seed``.
    """
    _require(vertices >= 3, "random complexes need at least 3 vertices")
    rng = random.Random(seed)
    n = rng.randint(3, vertices)
    p = rng.uniform(0.3, 0.8)
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    g = Graph(n, frozenset(edges))
    cells = []
    for _ in range(rng.randint(0, 2 * n)):
        half = 2 if quadrangulated else rng.randint(2, max_half)
        w = _random_closed_walk(g, rng, 2 * half)
        if w is not None:
            cells.append(w)
    return EvenComplex(g, tuple(cells))


FAMILIES = {
    "sphere_grid": (sphere_grid, ("m", "n")),
    "torus_grid": (torus_grid, ("m", "n")),
    "klein_grid": (klein_grid, ("m", "n")),
    "projective_grid": (projective_grid, ("m", "n")),
    "k4_projective": (k4_projective, ()),
    "cube_boundary": (cube_boundary, ("d",)),
    "cubical_rp": (cubical_rp, ("d",)),
    "random": (random_complex, ("seed", "vertices")),
}


def generate(family: str, **params) -> EvenComplex:
    family = family.replace("-", "_")
    if family not in FAMILIES:
        raise InputError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    fn, names = FAMILIES[family]
    missing = [p for p in names if p not in params]
    extra = [p for p in params if p not in names]
    if missing or extra:
        raise InputError(f"{family} takes parameters {names}")
    x = fn(**{k: int(params[k]) for k in names})
    problems = validate(x)
    if problems:
        raise GenerationError(f"{family}{params}: " + "; ".join(problems[:3]))
    return x


# -- X_k(G) ----------------------------------------------------------------

def _induced_distances(g: Graph, base: int) -> list:
    """BFS distances from ``base`` inside the subgraph on vertices >= base."""
    inf = g.vertex_count + 1
    dist = [inf] * g.vertex_count
    dist[base] = 0
    frontier = [base]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                if w >= base and dist[w] == inf:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def _classes_at_base(g: Graph, base: int, k: int, budget: int) -> set:
    """Canonical classes of closed walks of length 4..2k whose least vertex is ``base``."""
    max_len = 2 * k
    dist = _induced_distances(g, base)
    nbrs = [tuple(w for w in g.neighbors(v) if w >= base) for v in range(g.vertex_count)]
    found = set()
    path = [base]

    def extend(depth):
        v = path[-1]
        if v == base and depth >= 4 and depth % 2 == 0:
            found.add(canonical_cell(path[:-1]))
            if len(found) > budget:
                raise ResourceError(f"more than {budget} cell classes", {"cells": len(found)})
        if depth == max_len:
            return
        remaining = max_len - depth - 1
        for w in nbrs[v]:
            if dist[w] <= remaining:
                path.append(w)
                extend(depth + 1)
                path.pop()

    extend(0)
    return found


def _classes_at_base_job(args):
    g, base, k, budget = args
    return _classes_at_base(g, base, k, budget)


def closed_walk_classes(g: Graph, k: int, budget: int = DEFAULT_CELL_BUDGET, jobs: int = 1) -> list:
    """All closed-walk classes of length 2i, 2 <= i <= k, as sorted canonical cycles."""
    if k < 2:
        raise InputError("k must be at least 2")
    if jobs > 1 and g.vertex_count > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_classes_at_base_job, [(g, b, k, budget) for b in g.vertices()]))
    else:
        parts = [_classes_at_base(g, b, k, budget) for b in g.vertices()]
    merged = set()
    for part in parts:
        merged |= part
        if len(merged) > budget:
            raise ResourceError(f"more than {budget} cell classes", {"cells": len(merged)})
    return sorted(merged, key=lambda c: (len(c), c))


def build_x_k(g: Graph, k: int, budget: int = DEFAULT_CELL_BUDGET, jobs: int = 1) -> EvenComplex:
    """G with one 2-cell per class of closed walks C_{2i} -> G, 2 <= i <= k."""
    cells = closed_walk_classes(g, k, budget=budget, jobs=jobs)
    return EvenComplex(g, tuple(close(c) for c in cells))
