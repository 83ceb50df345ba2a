import itertools
import random

import pytest
from sympy import Matrix

from evencw import InputError, Walk
from evencw.complex import (
    EvenComplex,
    build_x_k,
    cube_boundary,
    cubical_rp,
    k4_projective,
    klein_grid,
    projective_grid,
    random_complex,
    sphere_grid,
    torus_grid,
)
from evencw.graph import bipartition, cycle_graph, complete_graph
from evencw.homology import (
    H1Summary,
    boundary_matrices,
    h1,
    homology_class_is_zero,
    integer_cycle_to_walk,
    is_torsion_class,
    is_torsion_class_snf,
    neighborhood_complex,
    torsion_lattice_basis,
    walk_chain,
    z2_class_nonzero,
)
from oracles import oracle_h1, rank_mod2


def test_summary_rendering():
    assert str(H1Summary(0)) == "0"
    assert str(H1Summary(2)) == "Z^2"
    assert str(H1Summary(1, (2,))) == "Z ⊕ Z/2"
    assert str(H1Summary(0, (2, 6))) == "Z/2 ⊕ Z/6"
    assert str(H1Summary(3, (), "Z2")) == "(Z/2)^3"


@pytest.mark.parametrize(
    "x, expected",
    [
        (sphere_grid(2, 3), "0"),
        (torus_grid(3, 3), "Z^2"),
        (klein_grid(3, 3), "Z ⊕ Z/2"),
        (klein_grid(4, 3), "Z ⊕ Z/2"),
        (projective_grid(3, 4), "Z/2"),
        (k4_projective(), "Z/2"),
        (cube_boundary(4), "0"),
        (cubical_rp(2), "Z/2"),
    ],
)
def test_surface_homology(x, expected):
    got = h1(x)
    assert str(got) == expected
    free, tors, z2 = oracle_h1(x)
    assert (got.free_rank, got.torsion) == (free, tors)
    assert h1(x, "Z2").free_rank == z2


def test_random_complexes_match_oracle():
    for seed in range(60):
        x = random_complex(seed, vertices=8)
        got, got2 = h1(x), h1(x, "Z2")
        free, tors, z2 = oracle_h1(x)
        assert (got.free_rank, got.torsion, got2.free_rank) == (free, tors, z2), seed


def test_chain_complex_identity():
    for x in (k4_projective(), klein_grid(3, 4), random_complex(5)):
        d1, d2 = boundary_matrices(x)
        assert (d1 @ d2).is_zero()


def test_walk_chain_signs():
    g = cycle_graph(4)
    assert walk_chain(g, (0, 1, 2)) == [1, 0, 1, 0]  # edges (0,1),(0,3),(1,2),(2,3)
    assert walk_chain(g, (1, 0)) == [-1, 0, 0, 0]
    assert walk_chain(g, (0, 1, 0), "Z2") == [0, 0, 0, 0]


def test_doubled_triangle_torsion():
    g = complete_graph(3)
    x = EvenComplex(g, ((0, 1, 2, 0, 1, 2, 0),))
    tri = Walk((0, 1, 2, 0))
    assert is_torsion_class(x, tri) and is_torsion_class_snf(x, tri)
    assert not homology_class_is_zero(x, tri)
    assert homology_class_is_zero(x, tri.concat(tri))
    assert str(h1(x)) == "Z/2"


def test_k4_projective_classes():
    x = k4_projective()
    tri = Walk((0, 1, 2, 0))
    assert is_torsion_class(x, tri) and is_torsion_class_snf(x, tri)
    assert not homology_class_is_zero(x, tri)
    assert z2_class_nonzero(x, tri)


def test_torus_meridian_is_not_torsion():
    x = torus_grid(4, 4)
    meridian = Walk.on(x.skeleton, (0, 1, 2, 3, 0))
    assert not is_torsion_class(x, meridian)
    assert not is_torsion_class_snf(x, meridian)


def test_torsion_routes_agree_on_random_walks():
    rnd = random.Random(7)
    checked = 0
    for seed in range(80):
        x = random_complex(seed, vertices=8)
        g = x.skeleton
        starts = [v for v in g.vertices() if g.degree(v)]
        for _ in range(5):
            if not starts:
                break
            w = [rnd.choice(starts)]
            for _ in range(rnd.randint(2, 7)):
                w.append(rnd.choice(g.neighbors(w[-1])))
            if not g.has_edge(w[-1], w[0]) and w[-1] != w[0]:
                continue
            if w[-1] != w[0]:
                w.append(w[0])
            assert is_torsion_class(x, w) == is_torsion_class_snf(x, w)
            if homology_class_is_zero(x, w):
                assert is_torsion_class(x, w)
            checked += 1
    assert checked > 50


def test_torsion_lattice_basis_is_saturated():
    for x in (k4_projective(), klein_grid(3, 3), projective_grid(2, 3)):
        d1, d2 = boundary_matrices(x)
        basis = torsion_lattice_basis(x)
        span = Matrix(d2.entries)
        b = Matrix.hstack(*[Matrix(v) for v in basis])
        # same rational span, and every basis vector is a cycle
        assert b.rank() == span.rank() == Matrix.hstack(span, b).rank()
        assert all(not any(d1 @ v) for v in basis)


def test_integer_cycle_to_walk_round_trip():
    x = klein_grid(3, 3)
    g = x.skeleton
    for v in torsion_lattice_basis(x):
        w = integer_cycle_to_walk(g, v, 0)
        assert w.is_closed and w.start == 0
        assert walk_chain(g, w) == list(v)


def _oracle_nbhd_h1(g, j):
    nbs = []
    for x in g.vertices():
        layer = set(g.neighbors(x))
        for _ in range(j - 1):
            layer = {w for u in layer for w in g.neighbors(u)}
        nbs.append(layer)
    edges = sorted({e for s in nbs for e in itertools.combinations(sorted(s), 2)})
    tris = sorted({t for s in nbs for t in itertools.combinations(sorted(s), 3)})
    eidx = {e: i for i, e in enumerate(edges)}
    d1 = Matrix.zeros(g.vertex_count, len(edges))
    for i, (a, b) in enumerate(edges):
        d1[a, i], d1[b, i] = -1, 1
    d2 = Matrix.zeros(len(edges), max(len(tris), 1))
    for i, (a, b, c) in enumerate(tris):
        d2[eidx[(b, c)], i] += 1
        d2[eidx[(a, c)], i] -= 1
        d2[eidx[(a, b)], i] += 1
    return len(edges) - (d1.rank() if edges else 0) - (d2.rank() if edges else 0)


@pytest.mark.parametrize("n", [5, 6, 7])
@pytest.mark.parametrize("j", [1, 2, 3])
def test_neighborhood_complex_betti(n, j):
    g = cycle_graph(n)
    assert neighborhood_complex(g, j).h1().free_rank == _oracle_nbhd_h1(g, j)


def test_neighborhood_complex_examples():
    g = cycle_graph(5)
    assert [str(neighborhood_complex(g, j).h1()) for j in (1, 2, 3)] == ["Z", "Z", "0"]
    assert str(neighborhood_complex(complete_graph(4), 1).h1()) == "0"
    with pytest.raises(InputError):
        neighborhood_complex(cycle_graph(5), 0)
    with pytest.raises(InputError):
        neighborhood_complex(complete_graph(1), 1)


def test_x_k_of_cycle():
    # X_k(C_5): the 5-cycle is filled once 2k >= 10
    g = cycle_graph(5)
    assert str(h1(build_x_k(g, 4))) == "Z"
    assert str(h1(build_x_k(g, 5))) == "Z/2"
    assert bipartition(g).odd_walk is not None


def test_torus_3x3_meridian():
    x = torus_grid(3, 3)
    meridian = Walk.on(x.skeleton, (0, 1, 2, 0))
    assert not is_torsion_class(x, meridian)
    assert not is_torsion_class_snf(x, meridian)
    assert z2_class_nonzero(x, meridian)
