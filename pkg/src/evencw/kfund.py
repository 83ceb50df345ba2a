"""k-homotopy of walks, k-fundamental group abelianizations, k-coverings,
and lifting/winding on the unrolled cover of a circular complete graph.

Moves on walks (all keep both endpoints fixed):

* ``A+ j y``  -- insert the backtrack ``x_j, y, x_j`` at position ``j``;
* ``A- j``    -- delete it again (needs ``x_j == x_{j+2}``);
* ``B j v..`` -- overwrite positions ``j, j+1, ...`` keeping the length, with
  fewer than ``k`` positions actually changing.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import ceil
from typing import Sequence

from evencw.complex import EvenComplex, build_x_k, closed_walk_classes, close, DEFAULT_CELL_BUDGET
from evencw.errors import InputError, InternalConsistencyError, ResourceError
from evencw.graph import (
    Graph,
    VertexMap,
    Walk,
    as_map,
    as_walk,
    circular_complete_graph,
    is_homomorphism,
    neighborhood,
)
from evencw.homology import H1Summary, h1, walk_chain, edge_index, boundary_matrices
from evencw.linalg import gf2_in_span, pack_mod2


@dataclass(frozen=True)
class KHomotopyMove:
    kind: str  # "A+", "A-" or "B"
    position: int
    vertices: tuple = ()

    def __str__(self):
        return " ".join([self.kind, str(self.position), *map(str, self.vertices)])

    @classmethod
    def parse(cls, line: str) -> "KHomotopyMove":
        parts = line.split()
        if not parts or parts[0] not in ("A+", "A-", "B"):
            raise InputError(f"bad move line {line!r}")
        kind, pos, rest = parts[0], int(parts[1]), tuple(int(v) for v in parts[2:])
        if kind == "A+" and len(rest) != 1 or kind == "A-" and rest or kind == "B" and not rest:
            raise InputError(f"bad move line {line!r}")
        return cls(kind, pos, rest)


def moves_to_text(moves) -> str:
    return "".join(f"{mv}\n" for mv in moves)


def parse_moves(text: str) -> list:
    return [KHomotopyMove.parse(ln) for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


def parity(w) -> int:
    w = as_walk(w)
    if not w.is_closed:
        raise InputError("parity is defined on closed walks")
    return w.length % 2


def apply_move(g: Graph, w, mv: KHomotopyMove, k: int) -> Walk:
    """Apply one move, checking every clause of its definition."""
    xs = list(as_walk(w).vertices)
    n = len(xs) - 1
    j = mv.position
    if mv.kind == "A+":
        (y,) = mv.vertices
        if not 0 <= j <= n:
            raise InputError(f"A+ position {j} outside 0..{n}")
        if not g.has_edge(xs[j], y):
            raise InputError(f"A+: {y} is not adjacent to {xs[j]}")
        out = xs[: j + 1] + [y] + xs[j:]
    elif mv.kind == "A-":
        if not 0 <= j <= n - 2:
            raise InputError(f"A- position {j} outside 0..{n - 2}")
        if xs[j] != xs[j + 2]:
            raise InputError(f"A-: positions {j} and {j + 2} differ, no backtrack to remove")
        out = xs[: j + 1] + xs[j + 3:]
    elif mv.kind == "B":
        new = list(mv.vertices)
        if j < 1 or j + len(new) > n:
            raise InputError("B must keep both endpoints fixed")
        changed = sum(1 for a, b in zip(xs[j: j + len(new)], new) if a != b)
        if changed >= k:
            raise InputError(f"B changes {changed} positions, needs fewer than k={k}")
        out = xs[:j] + new + xs[j + len(new):]
    else:
        raise InputError(f"unknown move kind {mv.kind!r}")
    result = Walk(tuple(out))
    result.check(g)
    return result


def replay(g: Graph, w, moves, k: int) -> Walk:
    cur = as_walk(w)
    for mv in moves:
        cur = apply_move(g, cur, mv, k)
    return cur


def invert_moves(g: Graph, w, moves, k: int) -> list:
    """Moves taking ``replay(g, w, moves, k)`` back to ``w``."""
    cur = as_walk(w)
    inverse = []
    for mv in moves:
        xs = cur.vertices
        if mv.kind == "A+":
            inverse.append(KHomotopyMove("A-", mv.position))
        elif mv.kind == "A-":
            inverse.append(KHomotopyMove("A+", mv.position, (xs[mv.position + 1],)))
        else:
            old = xs[mv.position: mv.position + len(mv.vertices)]
            inverse.append(KHomotopyMove("B", mv.position, tuple(old)))
        cur = apply_move(g, cur, mv, k)
    return inverse[::-1]


def free_reduce(w) -> tuple:
    """Delete backtracks until none is left; returns (reduced walk, moves)."""
    xs = list(as_walk(w).vertices)
    moves = []
    j = 0
    while j + 2 < len(xs):
        if xs[j] == xs[j + 2]:
            moves.append(KHomotopyMove("A-", j))
            del xs[j + 1: j + 3]
            j = max(j - 1, 0)
        else:
            j += 1
    return Walk(tuple(xs)), moves


def short_walk_moves(w, k: int) -> list:
    """Moves contracting a closed walk of length 2i <= 2k to the trivial walk.

    The second half is overwritten by the mirror of the first (i - 1 < k
    positions change) and the resulting palindrome is folded by deletions.
    """
    w = as_walk(w)
    if not w.is_closed or w.length % 2 or w.length > 2 * k:
        raise InputError("needs a closed walk of even length at most 2k")
    i = w.length // 2
    xs = w.vertices
    moves = []
    mirror = tuple(xs[2 * i - x] for x in range(i + 1, 2 * i))
    if mirror != xs[i + 1: 2 * i]:
        moves.append(KHomotopyMove("B", i + 1, mirror))
    for j in range(i - 1, -1, -1):
        moves.append(KHomotopyMove("A-", j))
    return moves


@dataclass
class KHomotopyVerdict:
    answer: str  # "yes", "no" or "unknown"
    moves: list = field(default_factory=list)
    invariant: str | None = None
    values: tuple | None = None

    def __bool__(self):
        return self.answer == "yes"


def _replacements(g: Graph, a: int, b: int, steps: int):
    """Vertex tuples (v_1..v_{steps-1}) of walks a -> b of the given length."""
    dist_b = g.distances_from(b)
    out = []
    path = []

    def rec(v, left):
        if left == 0:
            if v == b:
                out.append(tuple(path[:-1]) if path else ())
            return
        for w in g.neighbors(v):
            if dist_b[w] is not None and dist_b[w] <= left - 1:
                path.append(w)
                rec(w, left - 1)
                path.pop()

    rec(a, steps)
    return out


def _neighbors(g: Graph, xs: tuple, k: int, max_len: int):
    n = len(xs) - 1
    for j in range(n - 1):
        if xs[j] == xs[j + 2]:
            yield KHomotopyMove("A-", j), xs[: j + 1] + xs[j + 3:]
    if n + 2 <= max_len:
        for j in range(n + 1):
            for y in g.neighbors(xs[j]):
                yield KHomotopyMove("A+", j, (y,)), xs[: j + 1] + (y,) + xs[j:]
    for width in range(1, k):
        for j in range(1, n - width + 1):
            old = xs[j: j + width]
            for new in _replacements(g, xs[j - 1], xs[j + width], width + 1):
                if new != old:
                    yield KHomotopyMove("B", j, new), xs[:j] + new + xs[j + width:]


def _bfs(g, src: tuple, dst: tuple, k: int, max_len: int, max_states: int):
    if src == dst:
        return []
    parent = {src: None}
    queue = deque([src])
    while queue:
        cur = queue.popleft()
        for mv, nxt in _neighbors(g, cur, k, max_len):
            if nxt in parent:
                continue
            parent[nxt] = (cur, mv)
            if nxt == dst:
                path = []
                node = nxt
                while parent[node] is not None:
                    prev, m = parent[node]
                    path.append(m)
                    node = prev
                return path[::-1]
            if len(parent) > max_states:
                return None
            queue.append(nxt)
    return None


def k_homotopic(
    g: Graph,
    w1,
    w2,
    k: int,
    budget: int = 2,
    cover: "CoverLine | None" = None,
    invariants: Sequence[str] = ("parity", "winding", "z2"),
    max_states: int = 200_000,
    cell_budget: int = 20_000,
) -> KHomotopyVerdict:
    """Three-valued decision of w1 ~_k w2.

    "no" is only answered with an invariant that separates the walks:
    ``parity`` (closed walks), ``winding`` (when ``cover`` is the unrolled
    cover of ``g`` = K_{n/m} and k is within its covering order), ``z2`` (the
    Z/2 class of w1 followed by reversed w2 in X_k(g)) or, on request,
    ``homology`` (the same class over Z).  "yes" comes with a move list
    that :func:`replay` turns w1 into w2 with.  Otherwise the search over
    walks of length <= max(len) + 2 * budget gives up with "unknown".
    """
    if k < 1:
        raise InputError("k must be positive")
    w1, w2 = as_walk(w1), as_walk(w2)
    w1.check(g)
    w2.check(g)
    if (w1.start, w1.end) != (w2.start, w2.end):
        raise InputError("walks must share both endpoints")

    if "parity" in invariants and w1.length % 2 != w2.length % 2:
        return KHomotopyVerdict("no", invariant="parity", values=(w1.length % 2, w2.length % 2))
    if "winding" in invariants and cover is not None and k <= cover.covering_order:
        if g != cover.base_graph():
            raise InputError("cover does not belong to this graph")
        start = cover.base_lift(w1.start)
        e1, e2 = cover.lift_walk(w1, start)[-1], cover.lift_walk(w2, start)[-1]
        if e1 != e2:
            return KHomotopyVerdict("no", invariant="winding", values=(e1, e2))
    if {"z2", "homology"} & set(invariants):
        loop = w1.concat(w2.reversed())
        try:
            xk = build_x_k(g, k, budget=cell_budget) if k >= 2 else EvenComplex(g, ())
        except ResourceError:
            xk = None
        if xk is not None:
            if "z2" in invariants:
                _, d2 = boundary_matrices(xk, "Z2")
                chain = pack_mod2(walk_chain(g, loop, "Z2"))
                if not gf2_in_span([pack_mod2(c) for c in d2.columns()], chain):
                    return KHomotopyVerdict("no", invariant="z2", values=(1, 0))
            if "homology" in invariants:
                from evencw.homology import homology_class_is_zero
                if not homology_class_is_zero(xk, loop):
                    return KHomotopyVerdict("no", invariant="homology", values=("nonzero", "zero"))

    r1, m1 = free_reduce(w1)
    r2, m2 = free_reduce(w2)
    back2 = invert_moves(g, w2, m2, k)
    if r1 == r2:
        return KHomotopyVerdict("yes", m1 + back2)
    if r2.length == 0 and r1.is_closed and r1.length % 2 == 0 and r1.length <= 2 * k:
        return KHomotopyVerdict("yes", m1 + short_walk_moves(r1, k) + back2)
    max_len = max(w1.length, w2.length) + 2 * budget
    path = _bfs(g, r1.vertices, r2.vertices, k, max_len, max_states)
    if path is None:
        return KHomotopyVerdict("unknown")
    return KHomotopyVerdict("yes", m1 + path + back2)


# -- k-fundamental group abelianization --------------------------------------

def _require_connected(g: Graph):
    if not g.is_connected():
        raise InputError("graph must be connected")


def _h1_of_cells(g: Graph, cells) -> H1Summary:
    # cells with equal boundary chains are redundant for H_1, drop them first
    index = edge_index(g)
    seen, kept = set(), []
    for c in cells:
        key = tuple(walk_chain(g, close(c), "Z", index))
        if any(key) and key not in seen:
            seen.add(key)
            kept.append(close(c))
    return h1(EvenComplex(g, tuple(kept)), "Z")


def pi1k_abelianization(g: Graph, k: int, basepoint: int = 0,
                        budget: int = DEFAULT_CELL_BUDGET, jobs: int = 1) -> H1Summary:
    """Invariant factors of the abelianized k-fundamental group, as H_1(X_k(G))."""
    if k < 2:
        raise InputError("k must be at least 2")
    if not 0 <= basepoint < max(g.vertex_count, 1):
        raise InputError(f"basepoint {basepoint} not in graph")
    _require_connected(g)
    return _h1_of_cells(g, closed_walk_classes(g, k, budget=budget, jobs=jobs))


def pi1k_table(g: Graph, ks: Sequence[int], budget: int = DEFAULT_CELL_BUDGET, jobs: int = 1) -> dict:
    """{k: abelianization} for several k, enumerating closed walks once."""
    ks = sorted(set(ks))
    if not ks or ks[0] < 2:
        raise InputError("every k must be at least 2")
    _require_connected(g)
    cells = closed_walk_classes(g, ks[-1], budget=budget, jobs=jobs)
    return {k: _h1_of_cells(g, [c for c in cells if len(c) <= 2 * k]) for k in ks}


# -- k-coverings ---------------------------------------------------------------

@dataclass
class CoveringCheck:
    ok: bool
    vertex: int | None = None
    reason: str | None = None
    detail: tuple = ()

    def __bool__(self):
        return self.ok


def is_k_covering(p, g: Graph, h: Graph, k: int, vertices=None) -> CoveringCheck:
    """Check that p: g -> h is a k-covering via the neighborhood criterion.

    For each tested x: p maps N(x) onto N(p(x)) and is injective on N^k(x).
    ``vertices`` restricts the test (e.g. to the interior of a finite window
    of an infinite cover).  Failures name the vertex and the offending pair.
    """
    p = as_map(p)
    if not is_homomorphism(p, g, h):
        raise InputError("p is not a graph homomorphism")
    if k < 1:
        raise InputError("k must be positive")
    for x in (g.vertices() if vertices is None else vertices):
        image = {p(y) for y in g.neighbors(x)}
        missing = set(h.neighbors(p(x))) - image
        if missing:
            return CoveringCheck(False, x, "not surjective on N(x)", (min(missing),))
        seen = {}
        for y in sorted(neighborhood(g, x, k)):
            other = seen.setdefault(p(y), y)
            if other != y:
                return CoveringCheck(False, x, f"not injective on N^{k}(x)", (other, y))
    return CoveringCheck(True)


# -- the unrolled cover of K_{n/m} --------------------------------------------

@dataclass(frozen=True)
class CoverLine:
    """Rational surrogate of the universal cover of K_{n/m}.

    A vertex is ``(q, eps)``: position q/(2n) on the real line and a sign.
    (q, e) ~ (q', -e) iff |q - q'| <= n - 2m.  The projection sends (q, +1)
    to q/2 mod n and (q, -1) to (q + n)/2 mod n, so q must be even for
    eps = +1 and have the parity of n for eps = -1.  The deck shift adds n
    to q and flips eps.
    """

    n: int
    m: int

    def __post_init__(self):
        if self.m < 1 or self.n <= 2 * self.m:
            raise InputError("the cover needs n > 2m >= 2")

    @property
    def step(self) -> int:
        return self.n - 2 * self.m

    @property
    def covering_order(self) -> int:
        """Largest k with p a k-covering: ceil(2m / (n - 2m))."""
        return ceil(2 * self.m / self.step)

    def base_graph(self) -> Graph:
        return circular_complete_graph(self.n, self.m)

    def is_vertex(self, v) -> bool:
        q, eps = v
        return eps in (1, -1) and (q - (0 if eps == 1 else self.n)) % 2 == 0

    def adjacent(self, a, b) -> bool:
        return a[1] == -b[1] and abs(a[0] - b[0]) <= self.step

    def project(self, v) -> int:
        q, eps = v
        if not self.is_vertex(v):
            raise InputError(f"{v} is not a cover vertex")
        return ((q + (0 if eps == 1 else self.n)) // 2) % self.n

    def deck(self, v, times: int = 1):
        q, eps = v
        return (q + times * self.n, eps * (-1) ** (times % 2))

    def base_lift(self, b: int):
        return (2 * b, 1)

    def lift_walk(self, base_walk, start=None) -> list:
        """The unique lift of a walk in K_{n/m} starting at ``start``."""
        w = as_walk(base_walk)
        start = self.base_lift(w.start) if start is None else tuple(start)
        if self.project(start) != w.start % self.n:
            raise InputError(f"start {start} does not project to {w.start}")
        two_n = 2 * self.n
        out = [start]
        for b in w.vertices[1:]:
            q, eps = out[-1]
            ne = -eps
            residue = (2 * b - (0 if ne == 1 else self.n)) % two_n
            lo = q - self.step
            first = lo + (residue - lo) % two_n
            if first > q + self.step:
                raise InternalConsistencyError(f"no lift of the step {self.project(out[-1])} -> {b}")
            if first + two_n <= q + self.step:
                raise InternalConsistencyError("two lifts of one step")
            out.append((first, ne))
        return out

    def winding(self, gamma, start=None) -> int:
        """The integer t with lift terminal = deck^t(start)."""
        w = as_walk(gamma)
        if not w.is_closed:
            raise InputError("winding is defined on closed walks")
        lift = self.lift_walk(w, start)
        shift = lift[-1][0] - lift[0][0]
        if shift % self.n:
            raise InternalConsistencyError(f"lift displacement {shift} is not a multiple of {self.n}")
        t = shift // self.n
        if self.deck(lift[0], t) != lift[-1]:
            raise InternalConsistencyError("lift terminal is not a deck translate of the start")
        return t

    def window(self, radius: int) -> "CoverWindow":
        verts = sorted(
            (q, eps) for q in range(-radius, radius + 1) for eps in (1, -1) if self.is_vertex((q, eps))
        )
        index = {v: i for i, v in enumerate(verts)}
        edges = set()
        for v in verts:
            q, eps = v
            for dq in range(-self.step, self.step + 1):
                u = (q + dq, -eps)
                if u in index:
                    a, b = index[v], index[u]
                    edges.add((min(a, b), max(a, b)))
        graph = Graph(len(verts), frozenset(edges))
        proj = VertexMap(tuple(self.project(v) for v in verts))
        return CoverWindow(self, radius, tuple(verts), index, graph, proj)


@dataclass(frozen=True)
class CoverWindow:
    cover: CoverLine
    radius: int
    vertices: tuple
    index: dict
    graph: Graph
    projection: VertexMap

    def interior(self, depth: int) -> list:
        """Ids whose depth-step neighborhoods lie entirely inside the window."""
        margin = self.radius - depth * self.cover.step
        return [i for i, (q, _) in enumerate(self.vertices) if abs(q) <= margin]


def check_cover_order(n: int, m: int) -> dict:
    """Confirm the k-covering at k = covering order and find the collision at k + 1."""
    cover = CoverLine(n, m)
    k = cover.covering_order
    win = cover.window(2 * n + (k + 2) * cover.step)
    base = cover.base_graph()
    inner = win.interior(k + 1)
    at_k = is_k_covering(win.projection, win.graph, base, k, inner)
    at_k1 = is_k_covering(win.projection, win.graph, base, k + 1, inner)
    witness = None
    if not at_k1:
        a, b = at_k1.detail
        witness = (win.vertices[at_k1.vertex], win.vertices[a], win.vertices[b])
    return {"k": k, "k_covering": at_k.ok, "k_plus_1_covering": at_k1.ok, "witness": witness}
