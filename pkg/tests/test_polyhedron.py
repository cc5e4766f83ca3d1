from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polysum.errors import ContractError, EnumerationCapError, NoVerticesError, PerturbationError
from polysum.harness.fixtures import fix1, hypercube, pyramid, pyramid_slice
from polysum.harness.generate import GeneratorConfig, generate
from polysum.harness.oracle import Oracle
from polysum.polyhedron import (INFINITY, StandardFormSystem, Vertex, Walk, adjacency_graph,
                                are_adjacent, block_diagonal, diameter, distance,
                                enumerate_vertices, is_simple, perturb_to_simple, restrict_face,
                                set_enumeration_cap)
from polysum.ratmat import RationalMatrix


def system(A, b, name=""):
    return StandardFormSystem(RationalMatrix(A), tuple(F(v) for v in b), name)


SIMPLEX = system([[1, 1, 1]], [1], "simplex")


def coords(S):
    return [v.coords for v in enumerate_vertices(S)]


def test_simplex_vertices_and_diameter():
    assert coords(SIMPLEX) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert diameter(SIMPLEX) == 1
    assert is_simple(SIMPLEX)


def test_cube_vertices_and_diameter():
    assert len(coords(hypercube(2))) == 4
    assert diameter(hypercube(3)) == 3
    v = enumerate_vertices(hypercube(3))
    antipodes = [(a, b) for a, b in combinations(v, 2)
                 if all(p != q for p, q in zip(a.coords[:3], b.coords[:3]))]
    assert antipodes and all(not are_adjacent(hypercube(3), a, b) for a, b in antipodes)


def test_fix1_P_A_block_is_a_segment():
    assert coords(fix1().P_A) == [(0, 1), (1, 0)]


def test_simplex_unit_vectors_adjacent():
    e = enumerate_vertices(SIMPLEX)
    assert are_adjacent(SIMPLEX, e[0], e[1])
    with pytest.raises(ContractError):
        are_adjacent(SIMPLEX, e[0], e[0])


def test_pyramid_apex_adjacent_to_every_base_vertex():
    P = pyramid()
    verts = enumerate_vertices(P)
    apex = next(v for v in verts if v.coords[2] == 2)
    base = [v for v in verts if v.coords[2] == 0]
    assert len(base) == 8
    assert all(are_adjacent(P, apex, b) for b in base)


def test_pyramid_diameters():
    # pyramid over an 8-gon: diameter 2; its mid-height slice is the 8-gon, diameter 4
    assert diameter(pyramid()) == 2
    assert diameter(pyramid_slice()) == 4


def test_simplicity():
    assert not is_simple(pyramid())  # apex is degenerate
    # FIX-1 has a vertex with support of size 2 < rank 3
    assert not is_simple(fix1().system)


def test_perturbation():
    S, eps = perturb_to_simple(SIMPLEX, seed=1)
    assert eps == 0 and S == SIMPLEX
    S, eps = perturb_to_simple(pyramid(), seed=1)
    assert eps > 0 and is_simple(S) and len(enumerate_vertices(S)) >= 8
    assert S.A == pyramid().A
    with pytest.raises(PerturbationError) as err:
        perturb_to_simple(system([[1, 1]], [-1]), seed=1)
    assert len(err.value.schedule) == 6


def test_perturbation_is_deterministic():
    assert perturb_to_simple(pyramid(), seed=5) == perturb_to_simple(pyramid(), seed=5)


def test_restrict_face():
    assert restrict_face(SIMPLEX, []) == SIMPLEX
    seg = restrict_face(SIMPLEX, [2])
    assert seg.A == RationalMatrix([[1, 1]])
    assert coords(seg) == [(0, 1), (1, 0)]
    assert coords(restrict_face(SIMPLEX, [0, 1])) == [(1,)]
    with pytest.raises(ContractError):
        restrict_face(SIMPLEX, [7])


def test_errors():
    with pytest.raises(NoVerticesError):
        diameter(system([[1, 1]], [-1]))
    assert enumerate_vertices(system([[1, 1]], [-1])) == []
    big = system([[1] * 20], [1])
    with pytest.raises(EnumerationCapError) as err:
        enumerate_vertices(big)
    assert err.value.cap == 18
    set_enumeration_cap(25)
    try:
        assert len(enumerate_vertices(big)) == 20
    finally:
        set_enumeration_cap(18)


def test_disconnected_marker():
    # two disjoint unit vectors in an unbounded direction set: {x1 - x2 = 0} has only the origin
    S = system([[1, -1, 0]], [0])
    assert diameter(S) == 0
    assert INFINITY == float("inf")


def test_walk_bookkeeping():
    w = Walk.start((0, 1))
    w.push((1, 0), "lift", "band_step")
    w.push((1, 0), "lift", "band_step")  # duplicate is ignored
    assert w.length == 1
    tail = Walk.start((1, 0))
    tail.push((2, 0), "jump", "same_x")
    w.extend(tail)
    assert [r["step"] for r in w.budget_log] == [1, 2]
    r = w.reversed()
    assert r.steps[0] == w.last and r.budget_log[0]["rule"] == "jump"
    with pytest.raises(ContractError):
        w.extend(Walk.start((9, 9)))


def test_vertex_order_and_support():
    v = Vertex.of((0, F(1, 2), 3))
    assert v.support == (1, 2)
    assert Vertex.of((0, 1)) < Vertex.of((1, 0))


# ---------------------------------------------------------------- properties

def _random_system(seed):
    return generate(GeneratorConfig(seed=seed, kind="product", require_simple=False)).P


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_vertices_feasible_and_match_oracle(seed):
    S = _random_system(seed)
    verts = enumerate_vertices(S)
    assert all(S.contains(v.coords) for v in verts)
    assert [v.coords for v in verts] == Oracle.of(S).vertices


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_adjacency_symmetric_irreflexive_and_triangle(seed):
    S = _random_system(seed)
    g = adjacency_graph(S)
    for i, j in g.edges:
        assert i != j and j in g.neighbors[i] and i in g.neighbors[j]
    n = len(g.vertices)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                assert g.distance(a, c) <= g.distance(a, b) + g.distance(b, c)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_simple_systems_have_full_supports(seed):
    inst = generate(GeneratorConfig(seed=seed, kind="product"))
    S = inst.system
    g = adjacency_graph(S)
    for i, v in enumerate(g.vertices):
        assert len(v.support) == S.rank
        assert len(g.neighbors[i]) >= 1 or len(g.vertices) == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_product_diameter_is_sum(seed):
    # diameters add under products
    inst = generate(GeneratorConfig(seed=seed, kind="product", require_simple=False))
    assert diameter(block_diagonal(inst.P, inst.Q)) == diameter(inst.P) + diameter(inst.Q)


def test_distance_between_vertices():
    v = enumerate_vertices(hypercube(3))
    assert distance(hypercube(3), v[0], v[-1]) == 3
