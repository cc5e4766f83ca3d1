from collections import Counter
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polysum.errors import ContractError
from polysum.harness.fixtures import FIX3_SEED, fix3, has_mixed_vertex
from polysum.harness.generate import GeneratorConfig, generate
from polysum.harness.oracle import Oracle
from polysum.polyhedron import adjacency_graph, enumerate_vertices, is_simple, is_vertex
from polysum.ratmat import RationalMatrix, dot, rank
from polysum.threesum import (MIXED, BandPolygon, ThreeSumInstance, band_project, band_x3,
                              classify3, connect_same_x3, convex_hull, lift_step3,
                              matrix_three_sum, projection_check, restricted_face_points)
from polysum.twosum import X_VERTEX, Y_VERTEX, band_x, classify


def test_matrix_three_sum_small():
    M = matrix_three_sum([[2]], [3], [5], [7], [11], [[13]])
    assert M == RationalMatrix([[2, 21], [55, 13]])


def test_matrix_three_sum_shapes():
    M = matrix_three_sum([[1, 0], [0, 1]], [1, 2], [1, 1], [1, 0, 1], [1], [[1, 1, 1]])
    assert (M.rows, M.cols) == (3, 5)
    assert rank(M) <= 2 + 1 + 2
    with pytest.raises(ContractError):
        matrix_three_sum([[1]], [1, 2], [1], [1], [1], [[1]])


def test_convex_hull_drops_interior_and_collinear_points():
    pts = [(0, 0), (2, 0), (1, 0), (2, 2), (0, 2), (1, 1)]
    assert convex_hull([(F(a), F(b)) for a, b in pts]) == [(0, 0), (2, 0), (2, 2), (0, 2)]


def test_polygon_membership_is_closed():
    sq = BandPolygon(((F(0), F(0)), (F(2), F(0)), (F(2), F(2)), (F(0), F(2))), ())
    assert sq.contains((1, 1)) and sq.contains((2, 1)) and sq.contains((0, 0))
    assert not sq.contains((3, 1)) and not sq.contains((F(-1, 10), 0))
    seg = BandPolygon(((F(0), F(0)), (F(2), F(2))), ())
    assert seg.contains((1, 1)) and not seg.contains((1, 0)) and not seg.contains((3, 3))
    pt = BandPolygon(((F(1), F(1)),), ())
    assert pt.contains((1, 1)) and not pt.contains((1, 2))


def test_shared_rows_must_be_independent():
    with pytest.raises(ContractError):
        ThreeSumInstance([[1, 1]], [1, 0], [2, 0], [1], [2], [[1]], [1], 1, 2, [1])


# ---------------------------------------------------------------- FIX-3

def test_fix3_vertices_and_categories():
    inst = fix3()
    # oracle enumeration and classification, frozen
    verts = Oracle.of(inst.system).vertices
    assert [v.coords for v in enumerate_vertices(inst.system)] == verts
    assert len(verts) == 4 and is_simple(inst.system)
    cats = Counter(classify3(inst, v) for v in verts)
    assert cats == {X_VERTEX: 1, MIXED: 2, Y_VERTEX: 1}
    assert has_mixed_vertex(inst) and FIX3_SEED == 3


def test_fix3_band_polygon_matches_projected_face():
    inst = fix3()
    for v in enumerate_vertices(inst.system):
        _, y = inst.split_point(v)
        poly = band_x3(inst, y)
        pts, _, _ = restricted_face_points(inst, y)
        proj = {band_project(inst, z) for z in pts}
        assert set(poly.vertices_2d) <= proj
        assert all(poly.contains(p) for p in proj)


def test_connect_same_x3_trivial():
    inst = fix3()
    v = enumerate_vertices(inst.system)[0].coords
    assert connect_same_x3(inst, v, v).length == 0


# ---------------------------------------------------------------- properties

seeds = st.integers(0, 2**32)


def three_sum(seed):
    return generate(GeneratorConfig(seed=seed, kind="three_sum"))


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_band3_criterion_iff_oracle(seed):
    inst = three_sum(seed)
    o = Oracle.of(inst.system)
    g = adjacency_graph(inst.P_A)
    nx = len(inst.a1_row)
    for vert in o.vertices:
        if classify3(inst, vert) != X_VERTEX:
            continue
        x, y = inst.split_point(vert)
        supp = {j for j, v in enumerate(y) if v}
        for k in g.neighbors[g.index_of(x)]:
            xt = g.vertices[k].coords
            out = lift_step3(inst, vert, xt)
            oracle = any(o.adjacent(vert, w) and w[:nx] == xt
                         and {j for j, v in enumerate(w[nx:]) if v} <= supp
                         for w in o.vertices)
            assert out.lifted == oracle
            assert out.lifted == out.polygon.contains((dot(inst.a1_row, xt), dot(inst.a2_row, xt)))


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_band_polygon_is_hull_of_projected_face(seed):
    inst = three_sum(seed)
    for vert in enumerate_vertices(inst.system):
        _, y = inst.split_point(vert)
        poly = band_x3(inst, y)
        pts, _, _ = restricted_face_points(inst, y)
        proj = {band_project(inst, z) for z in pts}
        assert set(poly.vertices_2d) <= proj
        assert all(poly.contains(p) for p in proj)
        # every stored vertex is extreme: not inside the hull of the others
        for p in poly.vertices_2d:
            rest = proj - {p}
            if rest:
                assert not BandPolygon(tuple(convex_hull(rest)), ()).contains(p)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_categories_partition(seed):
    inst = three_sum(seed)
    for vert in enumerate_vertices(inst.system):
        x, y = inst.split_point(vert)
        cat = classify3(inst, vert.coords)
        if cat == X_VERTEX:
            assert is_vertex(inst.P_A, x)
        elif cat == Y_VERTEX:
            assert not is_vertex(inst.P_A, x) and is_vertex(inst.Q_B, y)
        else:
            assert not is_vertex(inst.P_A, x) and not is_vertex(inst.Q_B, y)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_same_x3_within_face_diameter(seed):
    inst = three_sum(seed)
    o = Oracle.of(inst.system)
    nx = len(inst.a1_row)
    xs = [v for v in o.vertices if classify3(inst, v) == X_VERTEX]
    for u in xs:
        for v in xs:
            if u[:nx] == v[:nx]:
                w = connect_same_x3(inst, u, v)
                assert o.check_walk(w.steps) is None
                assert w.length <= Oracle.of(inst.Q_of(u[:nx])).diameter()


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_degenerate_three_sum_reduces_to_two_sum(seed):
    # second shared row = (0, row k of B): dropping it leaves the 2-sum, and
    # the polygon's first-coordinate extent is the 2-sum band interval
    two = generate(GeneratorConfig(seed=seed, kind="two_sum"))
    k = 0
    zeros = (0,) * two.nx
    three = ThreeSumInstance(two.A, two.a_row, zeros, two.b_row, two.B.row(k), two.B,
                             two.c_A, two.c_shared, two.c_B[k], two.c_B)
    for vert in enumerate_vertices(two.system):
        if classify(two, vert) != X_VERTEX:
            continue
        _, y = two.split_point(vert)
        band = band_x(two, y)
        if band.lo is None or band.hi is None:
            continue
        (lo, _), (hi, _) = band_x3(three, y).bounding_box()
        assert (lo, hi) == (band.lo, band.hi)


def test_projection_records_have_both_flags():
    inst = fix3()
    recs = projection_check(inst)
    assert len(recs) == 4
    assert all(set(r) >= {"P_vertex", "Q_vertex"} for r in recs)
