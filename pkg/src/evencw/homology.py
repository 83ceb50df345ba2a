"""Cellular chains, H_1 over Z and Z/2, and homology tests for closed walks.

Edges are indexed in sorted order and oriented from the lower to the higher
vertex id.  Over Z the boundary of a cell is its signed traversal count; over
Z/2 it is the traversal parity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from evencw.complex import EvenComplex, check_valid
from evencw.errors import InputError
from evencw.graph import Graph, Walk, as_walk, neighborhood
from evencw.linalg import (
    IntMatrix,
    gf2_in_span,
    gf2_rank,
    pack_mod2,
    rational_rank,
    smith_normal_form,
)

RINGS = ("Z", "Z2")


def _ring(ring: str) -> str:
    if ring not in RINGS:
        raise InputError(f"ring must be one of {RINGS}, got {ring!r}")
    return ring


@dataclass(frozen=True)
class H1Summary:
    free_rank: int
    torsion: tuple = ()
    ring: str = "Z"

    def __str__(self):
        if self.ring == "Z2":
            return "0" if not self.free_rank else ("Z/2" if self.free_rank == 1 else f"(Z/2)^{self.free_rank}")
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " ⊕ ".join(parts) if parts else "0"

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_torsion_group(self) -> bool:
        return self.free_rank == 0


def edge_index(g: Graph) -> dict:
    return {e: i for i, e in enumerate(g.sorted_edges())}


def walk_chain(g: Graph, w, ring: str = "Z", index: dict | None = None) -> list:
    """Signed (Z) or parity (Z2) edge-traversal vector of a walk."""
    _ring(ring)
    w = as_walk(w)
    w.check(g)
    index = index if index is not None else edge_index(g)
    vec = [0] * len(index)
    for a, b in zip(w.vertices, w.vertices[1:]):
        if a < b:
            vec[index[(a, b)]] += 1
        else:
            vec[index[(b, a)]] -= 1
    if ring == "Z2":
        vec = [x % 2 for x in vec]
    return vec


def boundary_1(g: Graph, ring: str = "Z") -> IntMatrix:
    rows = [[0] * g.edge_count for _ in range(g.vertex_count)]
    for j, (u, v) in enumerate(g.sorted_edges()):
        rows[v][j] = 1
        rows[u][j] = -1 if ring == "Z" else 1
    return IntMatrix(g.vertex_count, g.edge_count, rows)


def boundary_matrices(x: EvenComplex, ring: str = "Z") -> tuple:
    """(d1, d2) for the cellular chain complex; d2 has one column per cell."""
    _ring(ring)
    check_valid(x)
    g = x.skeleton
    index = edge_index(g)
    d1 = boundary_1(g, ring)
    cols = [walk_chain(g, c, ring, index) for c in x.cells]
    d2 = IntMatrix.from_columns(g.edge_count, cols)
    _assert_chain_complex(d1, d2, ring)
    return d1, d2


def _assert_chain_complex(d1: IntMatrix, d2: IntMatrix, ring: str) -> None:
    if not d2.cols or not d1.rows:
        return
    prod = d1 @ d2
    bad = any(x % 2 if ring == "Z2" else x for r in prod.entries for x in r)
    if bad:
        raise AssertionError("d1 d2 != 0")


def _h1_from_columns(d1: IntMatrix, cols: list, n_edges: int, ring: str) -> H1Summary:
    if ring == "Z2":
        r1 = gf2_rank([pack_mod2(c) for c in d1.columns()]) if n_edges else 0
        r2 = gf2_rank([pack_mod2(c) for c in cols])
        return H1Summary(n_edges - r1 - r2, (), "Z2")
    r1 = rational_rank(d1.entries) if n_edges else 0
    cols = _distinct_nonzero(cols)
    if not cols:
        return H1Summary(n_edges - r1, (), "Z")
    snf = smith_normal_form(IntMatrix.from_columns(n_edges, cols))
    factors = snf.invariant_factors
    return H1Summary(n_edges - r1 - len(factors), tuple(d for d in factors if d > 1), "Z")


def _distinct_nonzero(cols):
    seen = set()
    out = []
    for c in cols:
        key = tuple(c)
        if any(key) and key not in seen:
            seen.add(key)
            out.append(list(c))
    return out


def h1(x: EvenComplex, ring: str = "Z") -> H1Summary:
    """H_1(X; R) as free rank plus invariant factors (via Smith normal form over Z)."""
    d1, d2 = boundary_matrices(x, ring)
    return _h1_from_columns(d1, d2.columns(), x.edge_count, ring)


def _closed_walk(x: EvenComplex, gamma) -> Walk:
    w = as_walk(gamma)
    if not w.is_closed:
        raise InputError("expected a closed walk")
    w.check(x.skeleton)
    return w


def is_torsion_class(x: EvenComplex, gamma) -> bool:
    """True iff some positive multiple of [gamma] vanishes in H_1(X; Z).

    Decided by rank: the chain lies in the rational span of the cell boundaries.
    """
    w = _closed_walk(x, gamma)
    _, d2 = boundary_matrices(x, "Z")
    chain = walk_chain(x.skeleton, w, "Z")
    if not any(chain):
        return True
    cols = _distinct_nonzero(d2.columns())
    if not cols:
        return False
    base = rational_rank(cols)
    return rational_rank(cols + [chain]) == base


def is_torsion_class_snf(x: EvenComplex, gamma) -> bool:
    """Same question answered through the Smith form of d2 (independent route).

    With U d2 V = D of rank r, the rational image of d2 is spanned by the
    first r columns of U^{-1}; a chain c lies in it iff (U c)_i = 0 for i >= r.
    """
    w = _closed_walk(x, gamma)
    _, d2 = boundary_matrices(x, "Z")
    chain = walk_chain(x.skeleton, w, "Z")
    snf = smith_normal_form(d2)
    y = snf.u @ chain
    return all(v == 0 for v in y[snf.rank:])


def homology_class_is_zero(x: EvenComplex, gamma) -> bool:
    """True iff [gamma] = 0 in H_1(X; Z) (integer membership in the image of d2)."""
    w = _closed_walk(x, gamma)
    _, d2 = boundary_matrices(x, "Z")
    chain = walk_chain(x.skeleton, w, "Z")
    snf = smith_normal_form(d2)
    y = snf.u @ chain
    for i, v in enumerate(y):
        d = snf.diagonal[i] if i < len(snf.diagonal) else 0
        if (d == 0 and v != 0) or (d and v % d):
            return False
    return True


def z2_class_nonzero(x: EvenComplex, gamma) -> bool:
    """True iff [gamma] is nonzero in H_1(X; Z/2)."""
    w = _closed_walk(x, gamma)
    _, d2 = boundary_matrices(x, "Z2")
    chain = walk_chain(x.skeleton, w, "Z2")
    return not gf2_in_span([pack_mod2(c) for c in d2.columns()], pack_mod2(chain))


def torsion_lattice_basis(x: EvenComplex) -> list:
    """Z-basis of the integer 1-cycles whose class in H_1(X; Z) is torsion.

    This is the saturation of the image of d2: the first r columns of U^{-1}
    from the Smith form U d2 V = D.
    """
    _, d2 = boundary_matrices(x, "Z")
    if not d2.cols:
        return []
    snf = smith_normal_form(d2)
    return [snf.u_inv.column(i) for i in range(snf.rank)]


# -- simplicial neighborhood complexes --------------------------------------

@dataclass(frozen=True)
class SimplicialComplex2:
    """A 2-dimensional simplicial complex: vertices 0..n-1, edges and triangles as sorted tuples."""

    vertex_count: int
    edges: tuple
    triangles: tuple

    def boundary_matrices(self) -> tuple:
        eidx = {e: i for i, e in enumerate(self.edges)}
        d1 = IntMatrix(self.vertex_count, len(self.edges))
        for j, (u, v) in enumerate(self.edges):
            d1.entries[u][j] = -1
            d1.entries[v][j] = 1
        cols = []
        for a, b, c in self.triangles:
            col = [0] * len(self.edges)
            col[eidx[(b, c)]] += 1
            col[eidx[(a, c)]] -= 1
            col[eidx[(a, b)]] += 1
            cols.append(col)
        d2 = IntMatrix.from_columns(len(self.edges), cols)
        _assert_chain_complex(d1, d2, "Z")
        return d1, d2

    def h1(self, ring: str = "Z") -> H1Summary:
        _ring(ring)
        d1, d2 = self.boundary_matrices()
        return _h1_from_columns(d1, d2.columns(), len(self.edges), ring)


def neighborhood_complex(g: Graph, j: int) -> SimplicialComplex2:
    """2-skeleton of the complex whose simplices lie inside some N^j(x)."""
    if j < 1:
        raise InputError("j must be positive")
    isolated = [v for v in g.vertices() if g.degree(v) == 0]
    if isolated:
        raise InputError(f"isolated vertices {isolated}")
    edges, tris = set(), set()
    for x in g.vertices():
        nb = sorted(neighborhood(g, x, j))
        edges.update(itertools.combinations(nb, 2))
        tris.update(itertools.combinations(nb, 3))
    return SimplicialComplex2(g.vertex_count, tuple(sorted(edges)), tuple(sorted(tris)))


def integer_cycle_to_walk(g: Graph, chain: Sequence[int], base: int | None = None) -> Walk:
    """A closed walk whose Z-chain equals ``chain`` (an integer 1-cycle on one component).

    Each edge is used |c_e| times in the direction of its sign, the pieces are
    joined by an Euler circuit; components of the support are linked to the
    base by there-and-back paths, which contribute nothing to the chain.
    """
    edges = g.sorted_edges()
    arcs = {}
    for (u, v), c in zip(edges, chain):
        a, b = (u, v) if c > 0 else (v, u)
        for _ in range(abs(c)):
            arcs.setdefault(a, []).append(b)
    if not arcs:
        return Walk((base if base is not None else 0,))
    for a in arcs:
        arcs[a].sort(reverse=True)
    out_deg = {a: len(bs) for a, bs in arcs.items()}
    in_deg = {}
    for bs in arcs.values():
        for b in bs:
            in_deg[b] = in_deg.get(b, 0) + 1
    if any(out_deg.get(v, 0) != in_deg.get(v, 0) for v in set(out_deg) | set(in_deg)):
        raise InputError("chain is not a cycle")

    def circuit(start):
        # Hierholzer on the remaining arcs
        stack, route = [start], []
        while stack:
            v = stack[-1]
            if arcs.get(v):
                stack.append(arcs[v].pop())
            else:
                route.append(stack.pop())
        return route[::-1]

    start = base if base is not None else min(arcs)
    dist = g.distances_from(start)
    walk = [start]
    while any(arcs.values()):
        v = min((a for a, bs in arcs.items() if bs), key=lambda a: (dist[a] is None, dist[a], a))
        if dist[v] is None:
            raise InputError("chain support is not in the base component")
        path = _shortest_path(g, start, v)
        loop = circuit(v)
        walk.extend(path[1:])
        walk.extend(loop[1:])
        walk.extend(path[::-1][1:])
    return Walk(tuple(walk))


def _shortest_path(g: Graph, s: int, t: int) -> list:
    if s == t:
        return [s]
    dist = g.distances_from(t)
    path = [s]
    while path[-1] != t:
        v = path[-1]
        path.append(min(w for w in g.neighbors(v) if dist[w] is not None and dist[w] == dist[v] - 1))
    return path
