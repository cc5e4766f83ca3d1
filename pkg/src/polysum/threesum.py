"""3-sums of standard-form polyhedra.

Reduced block form::

    [ A   0  ] [x]   [ c_A ]
    [ a1  b1 ] [y] = [ c1  ]
    [ a2  b2 ]       [ c2  ]
    [ 0   B  ]       [ c_B ]

The x-band of a vertex is now a convex polygon in the plane, obtained by
projecting the support-restricted face of ``Q_B`` through
``z -> (c1 - b1 z, c2 - b2 z)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import ContractError, IntegrityError
from .polyhedron import (StandardFormSystem, Vertex, Walk, adjacency_graph, are_adjacent,
                         embed, enumerate_vertices, is_vertex, minimal_face_dimension,
                         restrict_face, support)
from .ratmat import RationalMatrix, as_vector, dot, rank
from .twosum import SAME_X, X_VERTEX, Y_VERTEX

MIXED = "Mixed"


@dataclass(frozen=True)
class ThreeSumInstance:
    A: RationalMatrix
    a1_row: tuple
    a2_row: tuple
    b1_row: tuple
    b2_row: tuple
    B: RationalMatrix
    c_A: tuple
    c1_shared: Fraction
    c2_shared: Fraction
    c_B: tuple
    splits: tuple = None
    name: str = field(default="", compare=False)
    # summands the instance was built from, for the projection check
    sources: tuple = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        set_ = object.__setattr__
        rows = {k: as_vector(getattr(self, k)) for k in ("a1_row", "a2_row", "b1_row", "b2_row")}
        for k, v in rows.items():
            set_(self, k, v)
        nx, ny = len(rows["a1_row"]), len(rows["b1_row"])
        A = self.A if isinstance(self.A, RationalMatrix) else RationalMatrix(self.A, cols=nx)
        B = self.B if isinstance(self.B, RationalMatrix) else RationalMatrix(self.B, cols=ny)
        set_(self, "A", A)
        set_(self, "B", B)
        set_(self, "c_A", as_vector(self.c_A))
        set_(self, "c_B", as_vector(self.c_B))
        c1, c2 = Fraction(self.c1_shared), Fraction(self.c2_shared)
        set_(self, "c1_shared", c1)
        set_(self, "c2_shared", c2)
        splits = self.splits or ((c1, Fraction(0)), (c2, Fraction(0)))
        splits = tuple(tuple(Fraction(v) for v in s) for s in splits)
        set_(self, "splits", splits)
        if len(rows["a2_row"]) != nx or len(rows["b2_row"]) != ny or A.cols != nx or B.cols != ny:
            raise ContractError("shared rows do not match block widths")
        if A.rows != len(self.c_A) or B.rows != len(self.c_B):
            raise ContractError("right-hand side lengths do not match block heights")
        if sum(splits[0]) != c1 or sum(splits[1]) != c2:
            raise ContractError("splits do not add up to the shared right-hand sides")
        shared = RationalMatrix([rows["a1_row"] + rows["b1_row"], rows["a2_row"] + rows["b2_row"]])
        if rank(shared) < 2:
            raise ContractError("the two shared rows must be linearly independent")

    @property
    def nx(self) -> int:
        return len(self.a1_row)

    @property
    def ny(self) -> int:
        return len(self.b1_row)

    @cached_property
    def system(self) -> StandardFormSystem:
        top = self.A.hstack(RationalMatrix.zeros(self.A.rows, self.ny))
        mid = RationalMatrix([self.a1_row + self.b1_row, self.a2_row + self.b2_row])
        bottom = RationalMatrix.zeros(self.B.rows, self.nx).hstack(self.B)
        return StandardFormSystem(top.vstack(mid).vstack(bottom),
                                  self.c_A + (self.c1_shared, self.c2_shared) + self.c_B, self.name)

    @cached_property
    def P_A(self) -> StandardFormSystem:
        return StandardFormSystem(self.A, self.c_A, "P_A")

    @cached_property
    def Q_B(self) -> StandardFormSystem:
        return StandardFormSystem(self.B, self.c_B, "Q_B")

    def Q_of(self, x: Sequence) -> StandardFormSystem:
        """Slice with both shared rows fixed by ``x``."""
        M = RationalMatrix([self.b1_row, self.b2_row]).vstack(self.B)
        rhs = (self.c1_shared - dot(self.a1_row, x), self.c2_shared - dot(self.a2_row, x)) + self.c_B
        return StandardFormSystem(M, rhs, "Q(x)")

    def P_of(self, y: Sequence) -> StandardFormSystem:
        M = self.A.vstack(RationalMatrix([self.a1_row, self.a2_row]))
        rhs = self.c_A + (self.c1_shared - dot(self.b1_row, y), self.c2_shared - dot(self.b2_row, y))
        return StandardFormSystem(M, rhs, "P(y)")

    def split_point(self, point) -> tuple[tuple, tuple]:
        coords = point.coords if isinstance(point, Vertex) else tuple(point)
        if len(coords) != self.nx + self.ny:
            raise ContractError(f"point of length {len(coords)} for a 3-sum with {self.nx}+{self.ny} columns")
        return tuple(coords[:self.nx]), tuple(coords[self.nx:])

    def join(self, x, y) -> tuple:
        return tuple(Fraction(v) for v in x) + tuple(Fraction(v) for v in y)


# ---------------------------------------------------------------- construction

def matrix_three_sum(A, a, c, b, d, B) -> RationalMatrix:
    """``[[A, a b], [d c, B]]`` from the blocks of the two summand matrices."""
    A = A if isinstance(A, RationalMatrix) else RationalMatrix(A)
    B = B if isinstance(B, RationalMatrix) else RationalMatrix(B)
    a, b, c, d = (as_vector(v) for v in (a, b, c, d))
    if len(a) != A.rows or len(c) != A.cols or len(b) != B.cols or len(d) != B.rows:
        raise ContractError("block shapes do not fit together")
    ab = RationalMatrix([[ai * bj for bj in b] for ai in a], cols=len(b))
    dc = RationalMatrix([[di * cj for cj in c] for di in d], cols=len(c))
    return A.hstack(ab).vstack(dc.hstack(B))


def parse_left(M: RationalMatrix):
    """``[[A, a, a], [c, 0, 1]]`` -> ``(A, a, c)``."""
    if M.rows < 1 or M.cols < 2:
        raise ContractError("left summand needs two distinguished columns and a bottom row")
    n = M.cols - 2
    A = M.select_rows(range(M.rows - 1)).select_columns(range(n))
    a1, a2 = M.column(n)[:-1], M.column(n + 1)[:-1]
    last = M.row(M.rows - 1)
    if a1 != a2 or last[n] != 0 or last[n + 1] != 1:
        raise ContractError("left summand is not of the form [[A, a, a], [c, 0, 1]]")
    return A, a1, last[:n]


def parse_right(M: RationalMatrix):
    """``[[1, 0, b], [d, d, B]]`` -> ``(b, d, B)``."""
    if M.rows < 1 or M.cols < 2:
        raise ContractError("right summand needs two distinguished columns and a top row")
    first = M.row(0)
    d1, d2 = M.column(0)[1:], M.column(1)[1:]
    if first[0] != 1 or first[1] != 0 or d1 != d2:
        raise ContractError("right summand is not of the form [[1, 0, b], [d, d, B]]")
    B = M.select_rows(range(1, M.rows)).select_columns(range(2, M.cols))
    return first[2:], d1, B


def raw_three_sum_system(P: StandardFormSystem, Q: StandardFormSystem) -> StandardFormSystem:
    A, a, c = parse_left(P.A)
    b, d, B = parse_right(Q.A)
    c_A, c_a = P.b[:-1], P.b[-1]
    c_b, c_B = Q.b[0], Q.b[1:]
    M = matrix_three_sum(A, a, c, b, d, B)
    rhs = tuple(u + ai * c_b for u, ai in zip(c_A, a)) + tuple(u + di * c_a for u, di in zip(c_B, d))
    return StandardFormSystem(M, rhs)


def poly_three_sum(P: StandardFormSystem, Q: StandardFormSystem, name: str = "") -> ThreeSumInstance:
    """3-sum of ``P`` (columns ``x, s1, s2``) and ``Q`` (columns ``s1, s2, y``), row-reduced.

    The first shared row is row ``r`` of the top block divided by ``a_r``
    (first nonzero of ``a``); the second is row ``q`` of the bottom block
    divided by ``d_q``.  The remaining rows are cleared of the ``a b`` and
    ``d c`` blocks by subtracting multiples of the pivot rows.
    """
    A, a, c = parse_left(P.A)
    b, d, B = parse_right(Q.A)
    if not any(a) or not any(b) or not any(c) or not any(d):
        raise ContractError("3-sum reduction assumes a b != 0 and d c != 0")
    c_A, c_a = P.b[:-1], P.b[-1]
    c_b, c_B = Q.b[0], Q.b[1:]
    r = next(i for i, v in enumerate(a) if v != 0)
    q = next(i for i, v in enumerate(d) if v != 0)
    A_rows, A_rhs = [], []
    for i in range(A.rows):
        if i != r:
            f = a[i] / a[r]
            A_rows.append([u - f * w for u, w in zip(A.row(i), A.row(r))])
            A_rhs.append(c_A[i] - f * c_A[r])
    B_rows, B_rhs = [], []
    for i in range(B.rows):
        if i != q:
            f = d[i] / d[q]
            B_rows.append([u - f * w for u, w in zip(B.row(i), B.row(q))])
            B_rhs.append(c_B[i] - f * c_B[q])
    a1 = tuple(v / a[r] for v in A.row(r))
    b2 = tuple(v / d[q] for v in B.row(q))
    split1 = (c_A[r] / a[r], c_b)
    split2 = (c_a, c_B[q] / d[q])
    return ThreeSumInstance(RationalMatrix(A_rows, cols=A.cols), a1, c, b, b2,
                            RationalMatrix(B_rows, cols=B.cols), tuple(A_rhs),
                            sum(split1), sum(split2), tuple(B_rhs), (split1, split2),
                            name, (P, Q))


def projection_check(inst: ThreeSumInstance) -> list[dict]:
    """Reconstruct summand slacks for every vertex and test the projections.

    Slacks are read off the summands' own rows: in ``P`` the bottom row gives
    ``s2 = c_a - c x`` and the ``a``-rows give ``s1 + s2``; in ``Q`` the top
    row gives ``s1 = c_b - b y`` and the ``d``-rows give ``s1 + s2``.  One
    record per vertex says whether each lifted point is a vertex of its
    summand.
    """
    if inst.sources is None:
        raise ContractError("instance does not carry its summands")
    P, Q = inst.sources
    A, a, c = parse_left(P.A)
    b, d, B = parse_right(Q.A)
    c_A, c_a = P.b[:-1], P.b[-1]
    c_b, c_B = Q.b[0], Q.b[1:]
    r = next(i for i, v in enumerate(a) if v != 0)
    q = next(i for i, v in enumerate(d) if v != 0)
    out = []
    for v in enumerate_vertices(inst.system):
        x, y = inst.split_point(v.coords)
        s2p = c_a - dot(c, x)
        s1p = (c_A[r] - dot(A.row(r), x)) / a[r] - s2p
        s1q = c_b - dot(b, y)
        s2q = (c_B[q] - dot(B.row(q), y)) / d[q] - s1q
        p_pt, q_pt = tuple(x) + (s1p, s2p), (s1q, s2q) + tuple(y)
        out.append({"vertex": v.coords, "P_point": p_pt, "Q_point": q_pt,
                    "P_vertex": P.contains(p_pt) and is_vertex(P, p_pt),
                    "Q_vertex": Q.contains(q_pt) and is_vertex(Q, q_pt)})
    return out


# ---------------------------------------------------------------- categories

def classify3(inst: ThreeSumInstance, v) -> str:
    x, y = inst.split_point(v)
    dx = minimal_face_dimension(inst.P_A, x)
    if dx == 0:
        return X_VERTEX
    dy = minimal_face_dimension(inst.Q_B, y)
    if dy == 0:
        return Y_VERTEX
    if dx == 1 and dy == 1:
        return MIXED
    raise IntegrityError(f"projections of {v} lie on faces of dimension {dx} and {dy}")


# ---------------------------------------------------------------- band polygon

def _cross(o, p, q) -> Fraction:
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])


def convex_hull(points) -> list[tuple]:
    """Counterclockwise hull without collinear points (monotone chain)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull


@dataclass(frozen=True)
class BandPolygon:
    vertices_2d: tuple
    support: tuple

    def contains(self, point) -> bool:
        """Closed-polygon membership by exact orientation tests."""
        p = (Fraction(point[0]), Fraction(point[1]))
        vs = self.vertices_2d
        if len(vs) == 1:
            return p == vs[0]
        if len(vs) == 2:
            u, w = vs
            return (_cross(u, w, p) == 0 and min(u[0], w[0]) <= p[0] <= max(u[0], w[0])
                    and min(u[1], w[1]) <= p[1] <= max(u[1], w[1]))
        return all(_cross(vs[i], vs[(i + 1) % len(vs)], p) >= 0 for i in range(len(vs)))

    def bounding_box(self):
        xs = [v[0] for v in self.vertices_2d]
        ys = [v[1] for v in self.vertices_2d]
        return (min(xs), min(ys)), (max(xs), max(ys))


def restricted_face_points(inst: ThreeSumInstance, y: Sequence):
    """Vertices of ``{B z = c_B, supp z in supp y, z >= 0}`` in full y coordinates."""
    idx = support(y)
    face = restrict_face(inst.Q_B, [j for j in range(inst.ny) if j not in set(idx)])
    return [embed(v.coords, idx, inst.ny) for v in enumerate_vertices(face)], face, idx


def band_project(inst: ThreeSumInstance, z: Sequence) -> tuple:
    return (inst.c1_shared - dot(inst.b1_row, z), inst.c2_shared - dot(inst.b2_row, z))


def band_x3(inst: ThreeSumInstance, y: Sequence) -> BandPolygon:
    y = tuple(Fraction(v) for v in y)
    if not inst.Q_B.contains(y):
        raise ContractError("band is defined only for points of Q_B")
    pts, face, idx = restricted_face_points(inst, y)
    if not pts:
        raise IntegrityError("restricted face is empty")
    # a recession direction that moves the projection would make the band unbounded
    cone = StandardFormSystem(face.A.vstack(RationalMatrix([[1] * face.n])),
                              (Fraction(0),) * face.m + (Fraction(1),))
    for ray in enumerate_vertices(cone):
        r = embed(ray.coords, idx, inst.ny)
        if dot(inst.b1_row, r) != 0 or dot(inst.b2_row, r) != 0:
            raise IntegrityError("restricted face has an unbounded projection")
    return BandPolygon(tuple(convex_hull(band_project(inst, z) for z in pts)), idx)


# ---------------------------------------------------------------- lifting

@dataclass(frozen=True)
class Lift3:
    lifted: bool
    vertex: tuple | None
    polygon: BandPolygon
    point: tuple


def lift_step3(inst: ThreeSumInstance, at, target: Sequence) -> Lift3:
    """Band-polygon criterion for lifting the ``P_A`` step ``x -> target``.

    A lifted step carries ``(target, y*)`` where ``y*`` is the
    lexicographically first vertex of the slice ``Q(target)`` restricted to
    ``supp(y)`` that is adjacent to ``at``.  A failed step carries no vertex.
    """
    x, y = inst.split_point(at)
    target = tuple(Fraction(v) for v in target)
    if not is_vertex(inst.P_A, x):
        raise ContractError("lift_step3 starts at an x-vertex")
    if not is_vertex(inst.P_A, target) or target == x or \
            not are_adjacent(inst.P_A, Vertex.of(x), Vertex.of(target)):
        raise ContractError("lift step target is not adjacent to the current vertex")
    poly = band_x3(inst, y)
    pt = (dot(inst.a1_row, target), dot(inst.a2_row, target))
    if not poly.contains(pt):
        return Lift3(False, None, poly, pt)
    idx = support(y)
    face = restrict_face(inst.Q_of(target), [j for j in range(inst.ny) if j not in set(idx)])
    here = Vertex.of(tuple(at.coords if isinstance(at, Vertex) else at))
    cands = [inst.join(target, embed(w.coords, idx, inst.ny)) for w in enumerate_vertices(face)]
    for cand in cands:
        if is_vertex(inst.system, cand) and are_adjacent(inst.system, here, Vertex.of(cand)):
            return Lift3(True, cand, poly, pt)
    return Lift3(True, cands[0] if cands else None, poly, pt)


def connect_same_x3(inst: ThreeSumInstance, u, v) -> Walk:
    """Walk ``(x, y) -> (x, y')`` along a shortest path of the slice ``Q(x)``."""
    u = tuple(u.coords if isinstance(u, Vertex) else u)
    v = tuple(v.coords if isinstance(v, Vertex) else v)
    x, y = inst.split_point(u)
    x2, y2 = inst.split_point(v)
    if x != x2:
        raise ContractError("connect_same_x3 needs identical x-projections")
    walk = Walk.start(u)
    if u == v:
        return walk
    g = adjacency_graph(inst.Q_of(x))
    path = g.shortest_path(g.index_of(y), g.index_of(y2))
    for k in path[1:]:
        walk.push(inst.join(x, g.vertices[k].coords), "same_x", SAME_X)
    walk.jumps.append({"face": "Q(x)", "anchor": x, "length": len(path) - 1,
                       "diameter": g.diameter()})
    return walk
