"""Chromatic number, homomorphism search, circular chromatic number and rainbow squares.

All searches are exact and deterministic: variables are chosen smallest
domain first (ties to the lowest vertex id) and values are tried in
increasing order.  A search that runs out of budget raises
:class:`SearchBudgetExceeded` instead of answering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterator

from evencw.complex import EvenComplex, check_valid
from evencw.errors import InputError, ResourceError
from evencw.graph import (
    Graph,
    VertexMap,
    as_map,
    bipartition,
    circular_complete_graph,
    is_homomorphism,
)
from evencw.homology import (
    integer_cycle_to_walk,
    is_torsion_class,
    torsion_lattice_basis,
)

DEFAULT_BUDGET = 5_000_000


class SearchBudgetExceeded(ResourceError):
    pass


@dataclass(frozen=True)
class ColoringCertificate:
    coloring: VertexMap
    n: int

    def is_proper(self, g: Graph) -> bool:
        return all(0 <= c < self.n for c in self.coloring.image) and \
            all(self.coloring(u) != self.coloring(v) for u, v in g.edges)


@dataclass(frozen=True)
class RationalBound:
    value: Fraction
    kind: str  # "lower" | "upper" | "exact"

    def __post_init__(self):
        if self.kind not in ("lower", "upper", "exact"):
            raise InputError(f"bad bound kind {self.kind!r}")
        object.__setattr__(self, "value", Fraction(self.value))

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    def __str__(self):
        return f"{self.value} ({self.kind})"


# -- bounds ------------------------------------------------------------------

def greedy_clique(g: Graph) -> list:
    """Largest clique found by greedy growth from every vertex."""
    best = []
    for s in g.vertices():
        clique = [s]
        cand = set(g.neighbors(s))
        while cand:
            v = max(sorted(cand), key=lambda w: len(cand.intersection(g.neighbors(w))))
            clique.append(v)
            cand &= set(g.neighbors(v))
        if len(clique) > len(best):
            best = sorted(clique)
    return best


def dsatur_coloring(g: Graph) -> VertexMap:
    n = g.vertex_count
    color = [-1] * n
    for _ in range(n):
        def key(v):
            sat = len({color[w] for w in g.neighbors(v) if color[w] >= 0})
            return (-sat, -g.degree(v), v)
        v = min((v for v in range(n) if color[v] < 0), key=key)
        used = {color[w] for w in g.neighbors(v)}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    return VertexMap(tuple(color))


# -- exact k-colorability with a replayable trace ----------------------------

@dataclass
class Refutation:
    """Record of an exhaustive search proving that ``colors`` colors do not suffice."""

    colors: int
    nodes: int
    trace: list = field(default_factory=list)

    def trace_text(self) -> str:
        return "".join(line + "\n" for line in self.trace)


def _admissible(g, color, v, n, top=None):
    """Colors v may take: used ones plus the next new one, minus its neighbors' colors."""
    if top is None:
        top = max(color, default=-1)
    used = {color[w] for w in g.neighbors(v)}
    return [c for c in range(min(top + 2, n)) if c not in used]


def color_search(g: Graph, n: int, budget: int = DEFAULT_BUDGET, trace: list | None = None):
    """Exhaustive n-colorability search.  Returns (coloring or None, nodes).

    Colors obey first-use symmetry breaking: a vertex may take any color
    already in use or the single next unused one.  When ``trace`` is given the
    search appends ``branch v`` / ``assign v c`` / ``back`` / ``dead v`` lines
    that :func:`verify_refutation` can replay.
    """
    V = g.vertex_count
    color = [-1] * V
    nodes = 0
    emit = trace.append if trace is not None else (lambda line: None)

    def pick():
        best = None
        top = max(color)
        for v in range(V):
            if color[v] >= 0:
                continue
            dom = _admissible(g, color, v, n, top)
            if best is None or len(dom) < len(best[1]):
                best = (v, dom)
                if not dom:
                    break
        return best

    def rec():
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(f"coloring search exceeded {budget} nodes", {"nodes": nodes})
        choice = pick()
        if choice is None:
            return True
        v, dom = choice
        if not dom:
            emit(f"dead {v}")
            return False
        emit(f"branch {v}")
        for c in dom:
            emit(f"assign {v} {c}")
            color[v] = c
            if rec():
                return True
            color[v] = -1
            emit("back")
        return False

    found = rec()
    return (VertexMap(tuple(color)) if found else None), nodes


def verify_refutation(g: Graph, n: int, lines) -> bool:
    """Replay a refutation trace and check it covers every admissible branch."""
    toks = [ln.split() for ln in lines if ln.strip() and not ln.startswith("#")]
    pos = 0
    color = [-1] * g.vertex_count

    def take():
        nonlocal pos
        if pos >= len(toks):
            raise InputError("trace ended early")
        pos += 1
        return toks[pos - 1]

    def subtree():
        tok = take()
        if tok[0] == "dead":
            v = int(tok[1])
            if color[v] >= 0 or _admissible(g, color, v, n):
                raise InputError(f"vertex {v} is not dead here")
            return
        if tok[0] != "branch":
            raise InputError(f"expected branch/dead, got {' '.join(tok)}")
        v = int(tok[1])
        if color[v] >= 0:
            raise InputError(f"vertex {v} branched twice")
        for c in _admissible(g, color, v, n):
            if take() != ["assign", str(v), str(c)]:
                raise InputError(f"missing branch {v}={c}")
            color[v] = c
            subtree()
            color[v] = -1
            if take() != ["back"]:
                raise InputError("expected back")

    if g.vertex_count == 0:
        return False
    try:
        subtree()
    except (InputError, ValueError, IndexError):
        return False
    return pos == len(toks)


@dataclass
class ChromaticResult:
    number: int
    certificate: ColoringCertificate
    refutation: Refutation | None
    clique: list


def chromatic_number(g: Graph, limit: int = DEFAULT_BUDGET) -> ChromaticResult:
    """Exact chromatic number with a coloring and a refutation of one color fewer."""
    if g.vertex_count == 0:
        return ChromaticResult(0, ColoringCertificate(VertexMap(()), 0), None, [])
    clique = greedy_clique(g)
    greedy = dsatur_coloring(g)
    lb, ub = len(clique), max(greedy.image) + 1
    chi, best = ub, greedy
    refutation = None
    for c in range(lb, ub):
        trace = []
        try:
            found, nodes = color_search(g, c, budget=limit, trace=trace)
        except SearchBudgetExceeded as exc:
            raise SearchBudgetExceeded(str(exc), {"lower": c, "upper": ub}) from exc
        if found is not None:
            chi, best = c, found
            break
        refutation = Refutation(c, nodes, trace)
    if refutation is None or refutation.colors != chi - 1:
        trace = []
        found, nodes = color_search(g, chi - 1, budget=limit, trace=trace)
        if found is not None:
            raise AssertionError("coloring found below the chromatic number")
        refutation = Refutation(chi - 1, nodes, trace)
    return ChromaticResult(chi, ColoringCertificate(best, chi), refutation, clique)


def is_colorable(g: Graph, n: int, budget: int = DEFAULT_BUDGET) -> bool:
    found, _ = color_search(g, n, budget=budget)
    return found is not None


def enumerate_colorings(g: Graph, n: int, budget: int = DEFAULT_BUDGET) -> Iterator[VertexMap]:
    """Every proper coloring with at most n colors, once per relabeling class.

    Vertices are visited in breadth-first order; each vertex may reuse a
    color or open exactly the next new one, which picks the representative
    whose colors first appear in increasing order.
    """
    order = [v for comp in g.components() for v in _bfs_order(g, comp[0])]
    color = [-1] * g.vertex_count
    nodes = 0

    def rec(i, top):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(
                f"enumeration exceeded {budget} nodes",
                {"nodes": nodes, "prefix": [color[v] for v in order[:i]]},
            )
        if i == len(order):
            yield VertexMap(tuple(color))
            return
        v = order[i]
        used = {color[w] for w in g.neighbors(v)}
        for c in range(min(top + 2, n)):
            if c in used:
                continue
            color[v] = c
            yield from rec(i + 1, max(top, c))
            color[v] = -1

    yield from rec(0, -1)


def _bfs_order(g, root):
    order, seen = [root], {root}
    i = 0
    while i < len(order):
        for w in g.neighbors(order[i]):
            if w not in seen:
                seen.add(w)
                order.append(w)
        i += 1
    return order


# -- homomorphisms -----------------------------------------------------------

def find_homomorphism(g: Graph, h: Graph, budget: int = DEFAULT_BUDGET):
    """A homomorphism g -> h, or ``None`` when the exhaustive search finds none."""
    V, W = g.vertex_count, h.vertex_count
    if V == 0:
        return VertexMap(())
    if W == 0:
        return None
    adj = [0] * W
    for u, v in h.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    full = (1 << W) - 1
    non_isolated = sum(1 << c for c in range(W) if adj[c])
    dom = [non_isolated if g.degree(v) else full for v in g.vertices()]
    image = [-1] * V
    nodes = 0

    def rec(dom):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(f"homomorphism search exceeded {budget} nodes", {"nodes": nodes})
        best, best_size = None, None
        for v in range(V):
            if image[v] < 0:
                size = bin(dom[v]).count("1")
                if best is None or size < best_size:
                    best, best_size = v, size
                    if size == 0:
                        return False
        if best is None:
            return True
        v = best
        d = dom[v]
        while d:
            low = d & -d
            c = low.bit_length() - 1
            d ^= low
            nd = dom[:]
            ok = True
            for u in g.neighbors(v):
                if image[u] < 0:
                    nd[u] &= adj[c]
                    if not nd[u]:
                        ok = False
                        break
                elif not adj[c] >> image[u] & 1:
                    ok = False
                    break
            if not ok:
                continue
            image[v] = c
            nd[v] = low
            if rec(nd):
                return True
            image[v] = -1
        return False

    if rec(dom):
        f = VertexMap(tuple(image))
        if not is_homomorphism(f, g, h):
            raise AssertionError("search returned a non-homomorphism")
        return f
    return None


# -- circular chromatic number ---------------------------------------------

@dataclass
class CircularChromatic:
    lower: RationalBound
    upper: RationalBound
    exact: bool
    witness: VertexMap | None = None
    refuted: list = field(default_factory=list)
    undecided: list = field(default_factory=list)

    @property
    def value(self) -> Fraction | None:
        return self.upper.value if self.exact else None

    def __str__(self):
        if self.exact:
            return f"{self.upper.value} (exact)"
        return f"[{self.lower.value}, {self.upper.value}]"


def _candidate_fractions(upper: int, max_den: int) -> list:
    out = {Fraction(p, q) for q in range(1, max_den + 1) for p in range(2 * q + 1, upper * q + 1)
           if gcd(p, q) == 1}
    return sorted(out)


def circular_chromatic(g: Graph, max_den: int | None = None, budget: int = DEFAULT_BUDGET) -> CircularChromatic:
    """Bracket or determine chi_c(g) by homomorphisms into K_{p/q}.

    Fractions in (2, chi] with denominator <= ``max_den`` are tried in
    increasing order.  The value is exact only if a homomorphism to p/q
    exists and every fraction below it with numerator <= |V(g)| was
    exhaustively refuted.
    """
    V = g.vertex_count
    if not g.edges:
        one = RationalBound(Fraction(1 if V else 0), "exact")
        return CircularChromatic(one, one, True, VertexMap((0,) * V))
    bip = bipartition(g)
    if bip.is_bipartite:
        two = RationalBound(Fraction(2), "exact")
        return CircularChromatic(two, two, True, bip.coloring)
    refuted, undecided = [], []
    try:
        chi = chromatic_number(g, limit=budget)
        top, witness = chi.number, chi.certificate.coloring
    except SearchBudgetExceeded:
        # chi unknown: scan up to the greedy bound; the result stays a bracket
        witness = dsatur_coloring(g)
        top = max(witness.image) + 1
        undecided.append(Fraction(top))
    if max_den is None:
        max_den = max(1, V // 2)
    lower = Fraction(2)
    upper = Fraction(top)
    for r in _candidate_fractions(top, max_den):
        target = circular_complete_graph(r.numerator, r.denominator)
        try:
            f = find_homomorphism(g, target, budget=budget)
        except SearchBudgetExceeded:
            undecided.append(r)
            continue
        if f is None:
            refuted.append(r)
            lower = max(lower, r)
        else:
            upper, witness = r, f
            break
    needed = [Fraction(p, q) for p in range(3, V + 1) for q in range(1, p)
              if gcd(p, q) == 1 and 2 < Fraction(p, q) < upper]
    exact = not undecided and all(r in set(refuted) for r in needed)
    if exact:
        ex = RationalBound(upper, "exact")
        return CircularChromatic(ex, ex, True, witness, refuted)
    return CircularChromatic(RationalBound(lower, "lower"), RationalBound(upper, "upper"), False,
                             witness, refuted, undecided)


# -- theorem-driven checks on complexes ------------------------------------

@dataclass
class TheoremABound:
    bound: RationalBound
    k: int
    witness: object  # Walk


def find_torsion_odd_walk(x: EvenComplex):
    """An odd closed walk whose Z-homology class is torsion, or ``None``.

    Such a walk exists iff some vector of a Z-basis of the saturated image of
    d2 has odd coordinate sum; that vector is realized as a closed walk.
    """
    basis = torsion_lattice_basis(x)
    edges = x.skeleton.sorted_edges()
    comp_of = {}
    for ci, comp in enumerate(x.skeleton.components()):
        for v in comp:
            comp_of[v] = ci
    for b in basis:
        parts = {}
        for (u, _), c in zip(edges, b):
            if c:
                parts.setdefault(comp_of[u], [0] * len(b))
        for i, ((u, _), c) in enumerate(zip(edges, b)):
            if c:
                parts[comp_of[u]][i] = c
        for ci in sorted(parts):
            part = parts[ci]
            if sum(part) % 2:
                base = min(v for (u, w), c in zip(edges, part) if c for v in (u, w))
                walk = integer_cycle_to_walk(x.skeleton, part, base)
                if walk.length % 2 == 0 or not is_torsion_class(x, walk):
                    raise AssertionError("torsion lattice vector did not give an odd torsion walk")
                return walk
    return None


def theorem_a_bound(x: EvenComplex):
    """Lower bound 2 + 2/(k-1) on chi_c of the skeleton, with its odd torsion witness.

    ``k`` is the largest half-length of an attaching walk.  Returns ``None``
    when no odd closed walk has torsion class (the bound does not apply).
    """
    check_valid(x)
    k = x.max_half_length
    if k < 2:
        return None
    walk = find_torsion_odd_walk(x)
    if walk is None:
        return None
    return TheoremABound(RationalBound(Fraction(2 * k, k - 1), "lower"), k, walk)


def rainbow_faces(x: EvenComplex, c) -> list:
    """Cells whose four corners receive four distinct colors."""
    if not x.is_quadrangulated:
        raise InputError("rainbow squares need a quadrangulated complex")
    coloring = c.coloring if isinstance(c, ColoringCertificate) else as_map(c)
    if coloring.domain_size != x.vertex_count:
        raise InputError("coloring size does not match the complex")
    if any(coloring(u) == coloring(v) for u, v in x.skeleton.edges):
        raise InputError("coloring is not proper")
    return [cell for cell in x.cells if len({coloring(v) for v in cell.vertices[:4]}) == 4]
