import itertools
import random

import pytest

from evencw import InputError, Walk
from evencw.graph import circular_complete_graph, complete_graph, cycle_graph, path_graph
from evencw.kfund import (
    CoverLine,
    KHomotopyMove,
    apply_move,
    check_cover_order,
    free_reduce,
    invert_moves,
    is_k_covering,
    k_homotopic,
    moves_to_text,
    parity,
    parse_moves,
    pi1k_abelianization,
    pi1k_table,
    replay,
    short_walk_moves,
)
from evencw.graph import Graph, VertexMap


C5 = (0, 2, 4, 1, 3, 0)  # the 5-cycle inside K_{5/2}


def test_move_text_round_trip():
    moves = [KHomotopyMove("A+", 2, (4,)), KHomotopyMove("A-", 0), KHomotopyMove("B", 1, (3, 5))]
    text = moves_to_text(moves)
    assert text == "A+ 2 4\nA- 0\nB 1 3 5\n"
    assert parse_moves(text) == moves
    with pytest.raises(InputError):
        parse_moves("C 1 2\n")
    with pytest.raises(InputError):
        parse_moves("A- 1 2\n")


def test_move_legality():
    g = cycle_graph(6)
    w = Walk((0, 1, 2))
    assert apply_move(g, w, KHomotopyMove("A+", 1, (0,)), 2).vertices == (0, 1, 0, 1, 2)
    assert apply_move(g, Walk((0, 1, 0, 1, 2)), KHomotopyMove("A-", 0), 2).vertices == (0, 1, 2)
    with pytest.raises(InputError):
        apply_move(g, w, KHomotopyMove("A-", 0), 2)
    with pytest.raises(InputError):
        apply_move(g, w, KHomotopyMove("A+", 1, (3,)), 2)
    # B may not touch endpoints and must change fewer than k positions
    sq = Walk((0, 1, 2, 3, 4))
    g4 = complete_graph(5)
    assert apply_move(g4, sq, KHomotopyMove("B", 1, (2, 1)), 3).vertices == (0, 2, 1, 3, 4)
    with pytest.raises(InputError):
        apply_move(g4, sq, KHomotopyMove("B", 1, (2, 1)), 2)
    with pytest.raises(InputError):
        apply_move(g4, sq, KHomotopyMove("B", 0, (1,)), 3)
    with pytest.raises(InputError):
        apply_move(g4, sq, KHomotopyMove("B", 4, (3,)), 3)


def test_invert_moves():
    g = complete_graph(4)
    w = Walk((0, 1, 2, 3))
    moves = [KHomotopyMove("A+", 1, (3,)), KHomotopyMove("B", 2, (2,)), KHomotopyMove("A-", 1)]
    end = replay(g, w, moves, 2)
    assert replay(g, end, invert_moves(g, w, moves, 2), 2) == w


def test_free_reduce():
    w, moves = free_reduce((0, 1, 2, 1, 0, 1, 2))
    assert w.vertices == (0, 1, 2)
    assert replay(path_graph(3), (0, 1, 2, 1, 0, 1, 2), moves, 1) == w


def test_parity():
    assert parity(C5) == 1
    assert parity((0, 1, 0)) == 0
    with pytest.raises(InputError):
        parity((0, 1))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_short_walk_certificate(k):
    g = complete_graph(5)
    rnd = random.Random(k)
    for _ in range(40):
        i = rnd.randint(1, k)
        w = [0]
        for _ in range(2 * i - 1):
            w.append(rnd.choice([v for v in g.neighbors(w[-1])]))
        if not g.has_edge(w[-1], 0):
            continue
        w.append(0)
        moves = short_walk_moves(w, k)
        assert replay(g, w, moves, k) == Walk((0,))


def test_square_reduces_in_few_moves():
    g = cycle_graph(4)
    v = k_homotopic(g, (0, 1, 2, 3, 0), (0,), 2)
    assert v.answer == "yes" and len(v.moves) <= 4
    assert replay(g, (0, 1, 2, 3, 0), v.moves, 2) == Walk((0,))


def test_parity_separates():
    g = circular_complete_graph(5, 2)
    v = k_homotopic(g, C5, (0,), 6)
    assert v.answer == "no" and v.invariant == "parity"


def test_winding_separates_double_loop():
    g = circular_complete_graph(5, 2)
    double = Walk(C5).concat(Walk(C5))
    v = k_homotopic(g, double, (0,), 4, cover=CoverLine(5, 2), invariants=("parity", "winding"))
    assert v.answer == "no" and v.invariant == "winding"
    # above the covering order winding no longer applies
    v = k_homotopic(g, double, (0,), 5, cover=CoverLine(5, 2), invariants=("parity", "winding"))
    assert v.answer == "yes"
    assert replay(g, double, v.moves, 5) == Walk((0,))


def test_z2_separates_even_cycle():
    g = cycle_graph(8)
    v = k_homotopic(g, (0, 1, 2, 3, 4, 5, 6, 7, 0), (0,), 3)
    assert v.answer == "no" and v.invariant == "z2"


def test_integer_class_separates_double_loop():
    g = cycle_graph(7)
    w = (0, 1, 2, 3, 4, 5, 6, 0, 1, 2, 3, 4, 5, 6, 0)
    # twice around is invisible mod 2
    assert k_homotopic(g, w, (0,), 3, invariants=("parity", "z2"), max_states=2000).answer == "unknown"
    v = k_homotopic(g, w, (0,), 3, invariants=("parity", "z2", "homology"))
    assert v.answer == "no" and v.invariant == "homology"


def test_unknown_when_budget_too_small():
    g = cycle_graph(7)
    double = Walk((0, 1, 2, 3, 4, 5, 6, 0)).concat(Walk((0, 1, 2, 3, 4, 5, 6, 0)))
    v = k_homotopic(g, double, (0,), 6, invariants=(), budget=0, max_states=50)
    assert v.answer == "unknown"


def test_endpoints_must_match():
    with pytest.raises(InputError):
        k_homotopic(cycle_graph(5), (0, 1), (0,), 2)


def test_bfs_finds_same_length_homotopy():
    g = complete_graph(4)
    v = k_homotopic(g, (0, 1, 2), (0, 3, 2), 2)
    assert v.answer == "yes"
    assert replay(g, (0, 1, 2), v.moves, 2) == Walk((0, 3, 2))


def test_pi1k_tables():
    t = pi1k_table(circular_complete_graph(5, 2), range(2, 7))
    assert [str(t[k]) for k in range(2, 7)] == ["Z", "Z", "Z", "Z/2", "Z/2"]
    # the three 4-cycles of K_4 fill it to a projective plane
    assert str(pi1k_abelianization(complete_graph(4), 2)) == "Z/2"
    assert str(pi1k_abelianization(path_graph(4), 3)) == "0"
    with pytest.raises(InputError):
        pi1k_abelianization(Graph.from_edges(4, [(0, 1), (2, 3)]), 2)
    with pytest.raises(InputError):
        pi1k_abelianization(cycle_graph(5), 1)


def test_cover_line_basics():
    c = CoverLine(5, 2)
    assert c.step == 1 and c.covering_order == 4
    assert c.is_vertex((0, 1)) and not c.is_vertex((1, 1)) and c.is_vertex((1, -1))
    assert c.project((0, 1)) == 0 and c.project((-1, -1)) == 2
    assert c.deck((0, 1)) == (5, -1) and c.project(c.deck((3, -1))) == c.project((3, -1))
    lift = c.lift_walk(C5)
    assert [q for q, _ in lift] == [0, -1, -2, -3, -4, -5]
    assert c.winding(C5) == -1
    assert c.winding(Walk(C5).concat(Walk(C5))) == -2
    assert CoverLine(7, 3).covering_order == 6 and CoverLine(8, 3).covering_order == 3
    with pytest.raises(InputError):
        CoverLine(4, 2)


def test_lift_is_a_walk_in_the_cover_projecting_back():
    rnd = random.Random(11)
    for n, m in ((5, 2), (7, 3), (8, 3), (7, 2)):
        c = CoverLine(n, m)
        g = c.base_graph()
        for _ in range(20):
            w = [rnd.randrange(n)]
            for _ in range(rnd.randint(1, 12)):
                w.append(rnd.choice(g.neighbors(w[-1])))
            lift = c.lift_walk(w)
            assert [c.project(v) for v in lift] == w
            assert all(c.adjacent(a, b) for a, b in zip(lift, lift[1:]))


def test_window_projection_is_a_homomorphism():
    c = CoverLine(7, 3)
    win = c.window(30)
    from evencw.graph import is_homomorphism
    assert is_homomorphism(win.projection, win.graph, c.base_graph())


@pytest.mark.parametrize("n, m, k", [(5, 2, 4), (7, 3, 6), (8, 3, 3)])
def test_cover_order(n, m, k):
    res = check_cover_order(n, m)
    assert res["k"] == k and res["k_covering"] and not res["k_plus_1_covering"]
    centre, a, b = res["witness"]
    c = CoverLine(n, m)
    assert a != b and c.project(a) == c.project(b)


def _bijective_on_neighborhoods(p, g, h, k):
    """Direct definition: p maps N^i(x) bijectively onto N^i(p(x)) for 1 <= i <= k."""
    def nb(graph, x, i):
        layer = {x}
        for _ in range(i):
            layer = {w for u in layer for w in graph.neighbors(u)}
        return layer
    for x in g.vertices():
        for i in range(1, k + 1):
            src, dst = nb(g, x, i), nb(h, p(x), i)
            image = [p(y) for y in src]
            if len(set(image)) != len(image) or set(image) != dst:
                return False
    return True


@pytest.mark.parametrize("n, a", [(5, 2), (5, 3), (4, 3), (6, 2), (7, 2)])
def test_is_k_covering_matches_definition_on_cycle_covers(n, a):
    g, h = cycle_graph(a * n), cycle_graph(n)
    p = VertexMap(tuple(i % n for i in range(a * n)))
    for k in range(1, 2 * n + 2):
        assert bool(is_k_covering(p, g, h, k)) == _bijective_on_neighborhoods(p, g, h, k), k


def test_is_k_covering_witness():
    g, h = cycle_graph(15), cycle_graph(5)
    p = VertexMap(tuple(i % 5 for i in range(15)))
    bad = next(r for r in (is_k_covering(p, g, h, k) for k in range(1, 20)) if not r)
    a, b = bad.detail
    assert a != b and p(a) == p(b) and "injective" in bad.reason
    ident = VertexMap(tuple(range(5)))
    assert is_k_covering(ident, cycle_graph(5), cycle_graph(5), 7)
    # folding P_2 onto K_2 identifies the two neighbors of the middle vertex
    fold = is_k_covering(VertexMap((0, 1, 0)), path_graph(2), complete_graph(2), 1)
    assert not fold and fold.vertex == 1 and fold.detail == (0, 2)
    with pytest.raises(InputError):
        is_k_covering(VertexMap((0, 0, 0)), path_graph(2), complete_graph(2), 1)
