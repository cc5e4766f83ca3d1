"""2-sums of standard-form polyhedra and constructive edge walks on them.

An instance is kept in reduced block form::

    [ A  0 ] [x]   [ c_A ]
    [ a  b ] [y] = [  c  ]       x, y >= 0
    [ 0  B ]       [ c_B ]

with the shared right-hand side ``c`` split as ``c_a + c_b``.  The summand
views are ``P_A = {Ax = c_A}`` and ``Q_B = {By = c_B}``; ``P(y)`` and
``Q(x)`` are the slices with the shared row fixed by the partner point.

A vertex ``(x, y)`` is an *x-vertex* when ``x`` is a vertex of ``P_A`` and
a *y-vertex* otherwise.  Walks in ``P_A`` are lifted step by step; the band
of an x-vertex decides whether a step lifts, and a failing step ends on an
endpoint of the ``Q_B`` edge through ``y``.
"""
from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

from .errors import ConstructionError, ContractError, IntegrityError
from .polyhedron import (AdjacencyGraph, StandardFormSystem, Vertex, Walk,
                         adjacency_graph, are_adjacent, diameter, embed,
                         enumerate_vertices, is_simple, is_vertex,
                         perturb_to_simple, restrict_face, support)
from .ratmat import RationalMatrix, as_vector, dot, kernel_basis, rref

X_VERTEX = "XVertex"
Y_VERTEX = "YVertex"

# budget_log tags naming the argument behind each step
BAND_STEP = "band_step"
OUT_OF_BAND = "out_of_band"
SAME_X = "same_x"
CHANGE_CATEGORY = "change_category"
IN_BAND = "in_band"
UNIT_COLUMN = "unit_column"


def _zero_row_matrix(ncols: int) -> RationalMatrix:
    return RationalMatrix([], cols=ncols)


@dataclass(frozen=True)
class TwoSumInstance:
    A: RationalMatrix
    a_row: tuple
    b_row: tuple
    B: RationalMatrix
    c_A: tuple
    c_shared: Fraction
    c_B: tuple
    split: tuple = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        a_row, b_row = as_vector(self.a_row), as_vector(self.b_row)
        A = self.A if isinstance(self.A, RationalMatrix) else RationalMatrix(self.A, cols=len(a_row))
        B = self.B if isinstance(self.B, RationalMatrix) else RationalMatrix(self.B, cols=len(b_row))
        c = Fraction(self.c_shared)
        split = (c, Fraction(0)) if self.split is None else tuple(Fraction(v) for v in self.split)
        set_ = object.__setattr__
        set_(self, "A", A)
        set_(self, "B", B)
        set_(self, "a_row", a_row)
        set_(self, "b_row", b_row)
        set_(self, "c_A", as_vector(self.c_A))
        set_(self, "c_B", as_vector(self.c_B))
        set_(self, "c_shared", c)
        set_(self, "split", split)
        if A.cols != len(a_row) or B.cols != len(b_row):
            raise ContractError("shared row lengths do not match block widths")
        if A.rows != len(self.c_A) or B.rows != len(self.c_B):
            raise ContractError("right-hand side lengths do not match block heights")
        if not any(a_row) or not any(b_row):
            raise ContractError("2-sum needs a nonzero shared row on both sides (a != 0, b != 0)")
        if len(split) != 2 or split[0] + split[1] != c:
            raise ContractError(f"split {split} does not add up to c = {c}")

    @property
    def nx(self) -> int:
        return len(self.a_row)

    @property
    def ny(self) -> int:
        return len(self.b_row)

    @property
    def c_a(self) -> Fraction:
        return self.split[0]

    @property
    def c_b(self) -> Fraction:
        return self.split[1]

    @cached_property
    def system(self) -> StandardFormSystem:
        top = self.A.hstack(RationalMatrix.zeros(self.A.rows, self.ny))
        mid = RationalMatrix([self.a_row + self.b_row])
        bottom = RationalMatrix.zeros(self.B.rows, self.nx).hstack(self.B)
        M = top.vstack(mid).vstack(bottom)
        return StandardFormSystem(M, self.c_A + (self.c_shared,) + self.c_B, self.name)

    @cached_property
    def P_A(self) -> StandardFormSystem:
        return StandardFormSystem(self.A, self.c_A, "P_A")

    @cached_property
    def Q_B(self) -> StandardFormSystem:
        return StandardFormSystem(self.B, self.c_B, "Q_B")

    def P_of(self, y: Sequence) -> StandardFormSystem:
        """``P(y)``: the x with ``(x, y)`` feasible."""
        M = self.A.vstack(RationalMatrix([self.a_row]))
        return StandardFormSystem(M, self.c_A + (self.c_shared - dot(self.b_row, y),), "P(y)")

    def Q_of(self, x: Sequence) -> StandardFormSystem:
        """``Q(x)``: the y with ``(x, y)`` feasible."""
        M = RationalMatrix([self.b_row]).vstack(self.B)
        return StandardFormSystem(M, (self.c_shared - dot(self.a_row, x),) + self.c_B, "Q(x)")

    def split_point(self, point) -> tuple[tuple, tuple]:
        coords = point.coords if isinstance(point, Vertex) else tuple(point)
        if len(coords) != self.nx + self.ny:
            raise ContractError(f"point of length {len(coords)} for a 2-sum with {self.nx}+{self.ny} columns")
        return tuple(coords[:self.nx]), tuple(coords[self.nx:])

    def join(self, x: Sequence, y: Sequence) -> tuple:
        return tuple(Fraction(v) for v in x) + tuple(Fraction(v) for v in y)

    @cached_property
    def swapped(self) -> "TwoSumInstance":
        """Same polyhedron with the roles of x and y exchanged (columns reordered)."""
        return TwoSumInstance(self.B, self.b_row, self.a_row, self.A, self.c_B, self.c_shared,
                              self.c_A, (self.c_b, self.c_a), self.name)

    def swap_point(self, point) -> tuple:
        x, y = self.split_point(point)
        return y + x

    def unswap_point(self, point) -> tuple:
        coords = tuple(point)
        return coords[self.ny:] + coords[:self.ny]

    def with_rhs(self, c_A, c_shared, c_B, split=None) -> "TwoSumInstance":
        return TwoSumInstance(self.A, self.a_row, self.b_row, self.B, c_A, c_shared, c_B,
                              split, self.name)


# ---------------------------------------------------------------- construction

def matrix_two_sum(A, a, b, B) -> RationalMatrix:
    """``[A a] (+)_2 [b; B] = [[A, a b], [0, B]]``."""
    A = A if isinstance(A, RationalMatrix) else RationalMatrix(A)
    B = B if isinstance(B, RationalMatrix) else RationalMatrix(B)
    a, b = as_vector(a), as_vector(b)
    if not a or not b:
        raise ContractError("distinguished column and row must be nonempty")
    if len(a) != A.rows or len(b) != B.cols:
        raise ContractError("distinguished column/row sizes do not match the blocks")
    if not any(a) or not any(b):
        warnings.warn("zero distinguished column or row: the 2-sum is a direct sum", stacklevel=2)
    outer = RationalMatrix([[ai * bj for bj in b] for ai in a], cols=len(b))
    top = A.hstack(outer)
    bottom = RationalMatrix.zeros(B.rows, A.cols).hstack(B)
    return top.vstack(bottom)


def split_last_column(M: RationalMatrix):
    """``[A a]`` -> ``(A, a)``."""
    if M.cols < 1:
        raise ContractError("matrix has no distinguished column")
    return M.select_columns(range(M.cols - 1)), M.column(M.cols - 1)


def split_first_row(M: RationalMatrix):
    """``[b; B]`` -> ``(b, B)``."""
    if M.rows < 1:
        raise ContractError("matrix has no distinguished row")
    return M.row(0), M.select_rows(range(1, M.rows))


def poly_two_sum(P: StandardFormSystem, Q: StandardFormSystem, name: str = "") -> TwoSumInstance:
    """2-sum of ``P = {[A a] (x, s) = c_A}`` and ``Q = {[b; B] y = (c_b, c_B)}``.

    The last column of ``P`` and the first row of ``Q`` are the distinguished
    column and row.  The summed system has right-hand side ``(c_A + a c_b, c_B)``;
    it is brought into reduced block form by pivoting on the first nonzero
    entry ``a_r`` of ``a``.  The recorded split is ``(c_A[r] / a_r, c_b)``.
    """
    A_full, a = split_last_column(P.A)
    b, B = split_first_row(Q.A)
    if not any(a) or not any(b):
        raise ContractError("2-sum of polyhedra assumes a != 0 and b != 0")
    c_b, c_B = Q.b[0], Q.b[1:]
    r = next(i for i, v in enumerate(a) if v != 0)
    ar = a[r]
    pivot_row = A_full.row(r)
    rows, rhs = [], []
    for i in range(A_full.rows):
        if i == r:
            continue
        f = a[i] / ar
        rows.append([p - f * q for p, q in zip(A_full.row(i), pivot_row)])
        rhs.append(P.b[i] - f * P.b[r])
    a_row = tuple(v / ar for v in pivot_row)
    c_a = P.b[r] / ar
    A_red = RationalMatrix(rows, cols=A_full.cols)
    return TwoSumInstance(A_red, a_row, b, B, tuple(rhs), c_a + c_b, c_B, (c_a, c_b),
                          name or (f"{P.name}+{Q.name}" if P.name or Q.name else ""))


def raw_two_sum_system(P: StandardFormSystem, Q: StandardFormSystem) -> StandardFormSystem:
    """The unreduced 2-sum system exactly as assembled from the summands."""
    A_full, a = split_last_column(P.A)
    b, B = split_first_row(Q.A)
    c_b = Q.b[0]
    M = matrix_two_sum(A_full, a, b, B)
    return StandardFormSystem(M, tuple(ci + ai * c_b for ci, ai in zip(P.b, a)) + Q.b[1:])


def decompose(inst: TwoSumInstance) -> tuple[StandardFormSystem, StandardFormSystem]:
    """Summands ``P = {[A 0; a 1](x, s) = (c_A, c_a)}`` and ``Q = {[b; B] y = (c_b, c_B)}``."""
    top = inst.A.hstack(RationalMatrix.zeros(inst.A.rows, 1))
    slack_row = RationalMatrix([inst.a_row + (Fraction(1),)])
    P = StandardFormSystem(top.vstack(slack_row), inst.c_A + (inst.c_a,), "P")
    Q = StandardFormSystem(RationalMatrix([inst.b_row]).vstack(inst.B),
                           (inst.c_b,) + inst.c_B, "Q")
    return P, Q


def same_reduced_system(S1: StandardFormSystem, S2: StandardFormSystem) -> bool:
    """True when two systems have identical row spaces of ``[A | b]``."""
    def canon(S):
        aug = S.A.hstack(RationalMatrix([[v] for v in S.b], cols=1)) if S.m else S.A
        return rref(aug)[0]
    if S1.n != S2.n:
        return False
    R1, R2 = canon(S1), canon(S2)
    nz = lambda R: [r for r in R if any(r)]
    return nz(R1) == nz(R2)


def views(inst: TwoSumInstance):
    """``(P_A, Q_B, P(.), Q(.))``."""
    return inst.P_A, inst.Q_B, inst.P_of, inst.Q_of


# ---------------------------------------------------------------- categories

def classify(inst: TwoSumInstance, v) -> str:
    x, y = inst.split_point(v)
    if is_vertex(inst.P_A, x):
        return X_VERTEX
    if is_vertex(inst.Q_B, y):
        return Y_VERTEX
    raise IntegrityError(f"neither projection of {v} is a vertex of its summand view")


# ---------------------------------------------------------------- band

@dataclass(frozen=True)
class BandInterval:
    """Values ``c - b z`` over the support-restricted face of ``Q_B``.

    ``None`` marks an unbounded side.  ``lo_point`` attains ``lo`` (largest
    ``b z``) and ``hi_point`` attains ``hi`` (smallest ``b z``).
    """

    lo: Fraction | None
    hi: Fraction | None
    support: tuple
    lo_point: tuple | None = None
    hi_point: tuple | None = None
    direction: tuple | None = None

    def contains(self, value) -> bool:
        return (self.lo is None or self.lo <= value) and (self.hi is None or value <= self.hi)

    @property
    def is_point(self) -> bool:
        return self.lo is not None and self.lo == self.hi


def _ray_range(y: Sequence, d: Sequence, idx: Sequence[int]):
    """Interval of t with ``y + t d >= 0`` on ``idx`` (None = unbounded)."""
    t_lo = t_hi = None
    for i in idx:
        if d[i] > 0:
            t = -y[i] / d[i]
            t_lo = t if t_lo is None else max(t_lo, t)
        elif d[i] < 0:
            t = -y[i] / d[i]
            t_hi = t if t_hi is None else min(t_hi, t)
    return t_lo, t_hi


def _restricted_face(S: StandardFormSystem, point: Sequence):
    idx = support(point)
    return restrict_face(S, [j for j in range(S.n) if j not in set(idx)]), idx


def _band_generic(c, row, S: StandardFormSystem, point: Sequence) -> BandInterval:
    face, idx = _restricted_face(S, point)
    if not S.contains(point):
        raise ContractError("band is defined only for points of the summand view")
    K = kernel_basis(face.A) if face.n else []
    n = S.n
    if not K:
        val = c - dot(row, point)
        pt = tuple(Fraction(v) for v in point)
        return BandInterval(val, val, idx, pt, pt)
    if len(K) == 1:
        d = embed(K[0], idx, n)
        t_lo, t_hi = _ray_range(point, d, idx)
        slope = dot(row, d)  # d(b z)/dt
        at = lambda t: tuple(p + t * q for p, q in zip(point, d))
        ends = {"lo": None, "hi": None}
        for t, side in ((t_lo, -1), (t_hi, 1)):
            if slope == 0:
                continue
            # band value c - b z decreases in t when slope > 0
            key = "lo" if (slope > 0) == (side > 0) else "hi"
            ends[key] = None if t is None else at(t)
        if slope == 0:
            val = c - dot(row, point)
            return BandInterval(val, val, idx, None, None, d)
        lo = None if ends["lo"] is None else c - dot(row, ends["lo"])
        hi = None if ends["hi"] is None else c - dot(row, ends["hi"])
        return BandInterval(lo, hi, idx, ends["lo"], ends["hi"], d)
    verts = [embed(v.coords, idx, n) for v in enumerate_vertices(face)]
    if not verts:
        raise IntegrityError("restricted face is empty")
    vals = [c - dot(row, z) for z in verts]
    lo_i = min(range(len(vals)), key=lambda i: (vals[i], verts[i]))
    hi_i = max(range(len(vals)), key=lambda i: (vals[i], [-v for v in verts[i]]))
    lo, hi, lo_pt, hi_pt = vals[lo_i], vals[hi_i], verts[lo_i], verts[hi_i]
    # recession directions: vertices of {d : B_I d = 0, sum d = 1, d >= 0}
    cone = StandardFormSystem(face.A.vstack(RationalMatrix([[1] * face.n])),
                              (Fraction(0),) * face.m + (Fraction(1),))
    for ray in enumerate_vertices(cone):
        s = dot(row, embed(ray.coords, idx, n))
        if s > 0:
            lo, lo_pt = None, None
        elif s < 0:
            hi, hi_pt = None, None
    return BandInterval(lo, hi, idx, lo_pt, hi_pt)


def band_x(inst: TwoSumInstance, y: Sequence) -> BandInterval:
    """x-band of ``y``: ``{c - b z : B z = c_B, supp z in supp y, z >= 0}``."""
    return _band_generic(inst.c_shared, inst.b_row, inst.Q_B, tuple(Fraction(v) for v in y))


def band_y(inst: TwoSumInstance, x: Sequence) -> BandInterval:
    return band_x(inst.swapped, x)


def _point_at_level(band: BandInterval, y: Sequence, row, level) -> tuple:
    """The point z of the restricted edge with ``b z = level``."""
    if band.direction is None:
        if band.lo_point is not None and band.lo == band.hi:
            return tuple(y)
        raise IntegrityError("restricted face is not an edge (non-simple instance?)")
    slope = dot(row, band.direction)
    if slope == 0:
        return tuple(y)
    t = (level - dot(row, y)) / slope
    return tuple(p + t * q for p, q in zip(y, band.direction))


# ---------------------------------------------------------------- lifting

@dataclass(frozen=True)
class LiftOutcome:
    """Result of lifting one step of a ``P_A`` walk.

    ``kind`` is ``"lifted"`` or ``"terminated"``.  For a terminated step
    ``x_mid`` lies on the segment from the start to the target, ``y_end`` is
    the ``Q_B`` edge endpoint reached and ``endpoint`` names the violated band
    end (``"lo"``, ``"hi"`` or ``"point"`` for a zero-length band).
    """

    kind: str
    vertex: tuple
    endpoint: str | None = None
    x_mid: tuple | None = None
    y_end: tuple | None = None
    level: Fraction | None = None
    band: BandInterval | None = None

    @property
    def lifted(self) -> bool:
        return self.kind == "lifted"


def _check_step(S: StandardFormSystem, x, x_new) -> None:
    if not (is_vertex(S, x) and is_vertex(S, x_new)):
        raise ContractError("lift step endpoints must be vertices of the summand view")
    if tuple(x) == tuple(x_new) or not are_adjacent(S, Vertex.of(x), Vertex.of(x_new)):
        raise ContractError("lift step target is not adjacent to the current vertex")


def lift_step(inst: TwoSumInstance, at, target: Sequence) -> LiftOutcome:
    """Lift the ``P_A`` step ``x -> target`` at the x-vertex ``at = (x, y)``."""
    x, y = inst.split_point(at)
    target = tuple(Fraction(v) for v in target)
    if not is_vertex(inst.P_A, x):
        raise ContractError("lift_step starts at an x-vertex")
    _check_step(inst.P_A, x, target)
    band = band_x(inst, y)
    alpha = dot(inst.a_row, target)
    c, b = inst.c_shared, inst.b_row
    if band.contains(alpha):
        if band.lo == band.hi:
            y_new = tuple(y)
        elif band.direction is not None:
            y_new = _point_at_level(band, y, b, c - alpha)
        else:
            raise IntegrityError("restricted face has dimension >= 2 at an x-vertex")
        return LiftOutcome("lifted", inst.join(target, y_new), band=band)
    ax = dot(inst.a_row, x)
    if band.hi is not None and alpha > band.hi:
        level, y_end, tag = band.hi, band.hi_point, "hi"
    else:
        level, y_end, tag = band.lo, band.lo_point, "lo"
    if band.lo == band.hi:
        tag = "point"
    if y_end is None:
        y_end = tuple(y)
    lam = (level - ax) / (alpha - ax)
    x_mid = tuple(p + lam * (q - p) for p, q in zip(x, target))
    return LiftOutcome("terminated", inst.join(x_mid, y_end), tag, x_mid, tuple(y_end), level, band)


def lift_step_y(inst: TwoSumInstance, at, target: Sequence) -> LiftOutcome:
    """Lift the ``Q_B`` step ``y -> target`` at the y-vertex ``at = (x, y)``."""
    sw = inst.swapped
    out = lift_step(sw, inst.swap_point(at), target)
    vertex = inst.unswap_point(out.vertex)
    return LiftOutcome(out.kind, vertex, out.endpoint, out.x_mid, out.y_end, out.level, out.band)


def _step_tag(out: LiftOutcome) -> str:
    return BAND_STEP if out.lifted else OUT_OF_BAND


def lift_walk(inst: TwoSumInstance, at, path: Sequence[Sequence]):
    """Lift a ``P_A`` vertex path starting at the x-projection of ``at``.

    Returns ``(walk, outcome)``; ``outcome`` is ``("completed",)`` or
    ``("stopped", k, LiftOutcome)`` where step ``k`` (1-based) failed.
    """
    at = tuple(at.coords if isinstance(at, Vertex) else at)
    walk = Walk.start(at)
    if not path:
        return walk, ("completed",)
    path = [tuple(Fraction(v) for v in p) for p in path]
    x, _ = inst.split_point(at)
    if path[0] != x:
        raise ContractError("path must start at the x-projection of the start vertex")
    cur = at
    for k in range(1, len(path)):
        out = lift_step(inst, cur, path[k])
        walk.push(out.vertex, "lift", _step_tag(out))
        cur = out.vertex
        if not out.lifted:
            return walk, ("stopped", k, out)
    return walk, ("completed",)


def lift_walk_y(inst: TwoSumInstance, at, path):
    sw = inst.swapped
    walk, outcome = lift_walk(sw, inst.swap_point(at), path)
    walk = walk.map(inst.unswap_point)
    if outcome[0] == "stopped":
        o = outcome[2]
        outcome = ("stopped", outcome[1],
                   LiftOutcome(o.kind, inst.unswap_point(o.vertex), o.endpoint, o.x_mid,
                               o.y_end, o.level, o.band))
    return walk, outcome


# ---------------------------------------------------------------- same-x walks

def _face_diameter(S: StandardFormSystem):
    return diameter(S)


def connect_same_x(inst: TwoSumInstance, u, v, rule: str = "same_x") -> Walk:
    """Walk ``(x, y) -> (x, y')`` along a shortest path of ``Q(x)``."""
    u = tuple(u.coords if isinstance(u, Vertex) else u)
    v = tuple(v.coords if isinstance(v, Vertex) else v)
    x, y = inst.split_point(u)
    x2, y2 = inst.split_point(v)
    if x != x2:
        raise ContractError("connect_same_x needs identical x-projections")
    walk = Walk.start(u)
    if u == v:
        return walk
    face = inst.Q_of(x)
    g = adjacency_graph(face)
    path = g.shortest_path(g.index_of(y), g.index_of(y2))
    for k in path[1:]:
        walk.push(inst.join(x, g.vertices[k].coords), rule, SAME_X)
    walk.jumps.append({"face": "Q(x)", "anchor": x, "length": len(path) - 1,
                       "diameter": g.diameter()})
    return walk


def connect_same_y(inst: TwoSumInstance, u, v, rule: str = "jump") -> Walk:
    """Walk ``(x, y) -> (x', y)`` along a shortest path of ``P(y)``."""
    sw = inst.swapped
    w = connect_same_x(sw, inst.swap_point(u), inst.swap_point(v), rule)
    out = w.map(inst.unswap_point)
    for j in out.jumps:
        j["face"] = "P(y)"
    return out


# ---------------------------------------------------------------- change category

def _graph_and_categories(inst: TwoSumInstance):
    g = adjacency_graph(inst.system)
    cats = [classify(inst, v.coords) for v in g.vertices]
    return g, cats


def escape_y_vertex(inst: TwoSumInstance, u):
    """Walk from the y-vertex ``u`` to some x-vertex.

    Picks an adjacent (y-vertex, x-vertex) pair ``(w2, w3)`` whose y-part is
    closest to ``u``'s in ``Q_B``, lifts a shortest ``Q_B`` path toward it and
    either stops at the first failed step (which lands on an x-vertex) or jumps
    inside ``P(y2)`` to ``w2`` and takes the edge to ``w3``.
    """
    u = tuple(u.coords if isinstance(u, Vertex) else u)
    if classify(inst, u) != Y_VERTEX:
        raise ContractError("escape_y_vertex starts at a y-vertex")
    g, cats = _graph_and_categories(inst)
    if X_VERTEX not in cats:
        raise ConstructionError("single-category instance: no x-vertex to escape to")
    qg = adjacency_graph(inst.Q_B)
    x1, y1 = inst.split_point(u)
    i_y1 = qg.index_of(y1)
    pairs = []
    for i, j in sorted(g.edges):
        for w2, w3 in ((i, j), (j, i)):
            if cats[w2] == Y_VERTEX and cats[w3] == X_VERTEX:
                y2 = inst.split_point(g.vertices[w2].coords)[1]
                pairs.append((qg.distance(i_y1, qg.index_of(y2)), w2, w3))
    _, w2, w3 = min(pairs)
    W2, W3 = g.vertices[w2].coords, g.vertices[w3].coords
    y2 = inst.split_point(W2)[1]
    ypath = [qg.vertices[k].coords for k in qg.shortest_path(i_y1, qg.index_of(y2))]
    walk, outcome = lift_walk_y(inst, u, ypath)
    for rec in walk.budget_log:
        rec["rule"] = "escape"
    if outcome[0] == "stopped":
        end = walk.last
        if classify(inst, end) != X_VERTEX:
            raise ConstructionError("failed lift did not end at an x-vertex")
        return walk, end
    walk.extend(connect_same_y(inst, walk.last, W2))
    walk.push(W3, "escape", CHANGE_CATEGORY)
    return walk, W3


# ---------------------------------------------------------------- in-band walks

def _p_a_path(inst: TwoSumInstance, x, x2) -> list[tuple]:
    g = adjacency_graph(inst.P_A)
    return [g.vertices[k].coords for k in g.shortest_path(g.index_of(x), g.index_of(x2))]


def _edge_point(p, q, lam):
    return tuple(a + lam * (b - a) for a, b in zip(p, q))


def connect_in_band(inst: TwoSumInstance, u, v, path: Sequence | None = None) -> Walk:
    """Walk between x-vertices ``(x, y)`` and ``(x', y')`` with ``a x'`` in the band of ``y``.

    Lifts a shortest ``P_A`` path.  When a step leaves the band at level
    ``beta``, the walk jumps inside ``P(y_end)`` to the last crossing of
    ``beta`` along the path, re-enters the band with one ``Q_B`` step, and
    continues lifting.  The final piece is a same-x walk in ``Q(x')``.
    """
    u = tuple(u.coords if isinstance(u, Vertex) else u)
    v = tuple(v.coords if isinstance(v, Vertex) else v)
    x, y = inst.split_point(u)
    x2, y2 = inst.split_point(v)
    if classify(inst, u) != X_VERTEX or classify(inst, v) != X_VERTEX:
        raise ContractError("connect_in_band joins two x-vertices")
    band = band_x(inst, y)
    a = inst.a_row
    if not band.contains(dot(a, x2)):
        raise ContractError("a x' is not in the band of y; use connect")
    X = [tuple(p) for p in (path if path is not None else _p_a_path(inst, x, x2))]
    if X[0] != x or X[-1] != x2:
        raise ContractError("path endpoints do not match the vertices")
    aX = [dot(a, p) for p in X]
    k = len(X) - 1
    walk = Walk.start(u)
    cur = u
    t = 0
    state = "x"
    beta = y_end = None
    while True:
        if state == "x":
            if t == k:
                break
            out = lift_step(inst, cur, X[t + 1])
            walk.push(out.vertex, "lift", _step_tag(out))
            cur = out.vertex
            if out.lifted:
                t += 1
            else:
                state, beta, y_end = "y", out.level, out.y_end
            continue
        # at (point of edge t..t+1 at level beta, y_end); X[t+1] lies beyond beta
        sigma = 1 if aX[t + 1] > beta else -1
        beyond = [i for i in range(t + 1, k + 1) if sigma * (aX[i] - beta) > 0]
        i = beyond[-1]
        if i == k:
            raise ConstructionError("path endpoint outside the band")
        lam = (beta - aX[i]) / (aX[i + 1] - aX[i])
        target = inst.join(_edge_point(X[i], X[i + 1], lam), y_end)
        walk.extend(connect_same_y(inst, cur, target))
        cur = target
        other = band.lo_point if y_end == band.hi_point else band.hi_point
        if other is None:
            raise ConstructionError("band re-entry needs a bounded edge")
        out = lift_step_y(inst, cur, other)
        walk.push(out.vertex, "lift", _step_tag(out))
        cur = out.vertex
        if out.lifted:
            t, beta, y_end = i, dot(a, inst.split_point(cur)[0]), other
            beta = inst.c_shared - dot(inst.b_row, other)
        else:
            if inst.split_point(cur)[0] != X[i + 1]:
                raise ConstructionError("band re-entry did not reach the next path vertex")
            t, state = i + 1, "x"
    walk.extend(connect_same_x(inst, cur, v))
    if walk.last != v:
        raise ConstructionError("in-band walk did not reach its target")
    return walk


# ---------------------------------------------------------------- theorem walk

@dataclass
class DiameterBudget:
    D_PA: int
    D_QB: int
    D_Abar: int
    D_Bbar: int

    @property
    def bound(self) -> int:
        return (self.D_PA * (1 + self.D_Abar) + self.D_QB * (1 + self.D_Bbar)
                + min(self.D_Abar + self.D_QB + 1, self.D_PA + self.D_Bbar + 1))

    def as_dict(self) -> dict:
        return {"D_PA": self.D_PA, "D_QB": self.D_QB, "D_Abar": self.D_Abar,
                "D_Bbar": self.D_Bbar, "bound": self.bound}


@lru_cache(maxsize=512)
def diameter_budget(inst: TwoSumInstance) -> DiameterBudget:
    """Per-instance values of the quantities in the quadratic diameter bound.

    Slice diameters are maximised over the ``P(y)`` / ``Q(x)`` faces realised by
    the projections of the instance's vertices.
    """
    verts = enumerate_vertices(inst.system)
    xs = sorted({inst.split_point(v.coords)[0] for v in verts})
    ys = sorted({inst.split_point(v.coords)[1] for v in verts})
    D_Abar = max((diameter(inst.P_of(y)) for y in ys), default=0)
    D_Bbar = max((diameter(inst.Q_of(x)) for x in xs), default=0)
    return DiameterBudget(diameter(inst.P_A), diameter(inst.Q_B), D_Abar, D_Bbar)


def _crossing(p, q, fp, fq, level):
    if fp == fq or not (min(fp, fq) < level < max(fp, fq)):
        return None
    return _edge_point(p, q, (level - fp) / (fq - fp))


def _grid_walk(inst: TwoSumInstance, X, Y, start, goal, goal_links) -> Walk:
    """Shortest sequence of lift steps and slice jumps on the ``X x Y`` grid.

    Nodes are sum vertices ``(X[t], y)`` with ``y`` on the edge ``Y[u]Y[u+1]``
    and ``(x, Y[u])`` with ``x`` on ``X[t]X[t+1]``.  Lift steps inside a grid
    cell cost one edge; jumps along a grid line cost their slice distance.
    """
    a, b, c = inst.a_row, inst.b_row, inst.c_shared
    aX = [dot(a, p) for p in X]
    bY = [dot(b, q) for q in Y]
    nodes: dict[tuple, int] = {}
    coords: list[tuple] = []
    vertical: dict[int, list[int]] = {}
    horizontal: dict[int, list[int]] = {}
    cell_nodes: dict[tuple, list[int]] = {}

    def add(point):
        if point not in nodes:
            nodes[point] = len(coords)
            coords.append(point)
        return nodes[point]

    for t in range(len(X)):
        for u in range(len(Y) - 1):
            yq = _crossing(Y[u], Y[u + 1], bY[u], bY[u + 1], c - aX[t])
            if yq is None:
                continue
            n = add(inst.join(X[t], yq))
            vertical.setdefault(t, []).append(n)
            for cell in ((t - 1, u), (t, u)):
                cell_nodes.setdefault(cell, []).append(n)
    for u in range(len(Y)):
        for t in range(len(X) - 1):
            xp = _crossing(X[t], X[t + 1], aX[t], aX[t + 1], c - bY[u])
            if xp is None:
                continue
            n = add(inst.join(xp, Y[u]))
            horizontal.setdefault(u, []).append(n)
            for cell in ((t, u - 1), (t, u)):
                cell_nodes.setdefault(cell, []).append(n)
    s = add(tuple(start))
    gnode = add(tuple(goal))
    adj: dict[int, list] = {i: [] for i in range(len(coords))}
    S = inst.system
    for cell, members in cell_nodes.items():
        members = sorted(set(members))
        for p in range(len(members)):
            for q in range(p + 1, len(members)):
                i, j = members[p], members[q]
                if are_adjacent(S, Vertex.of(coords[i]), Vertex.of(coords[j])):
                    adj[i].append((1, j, ("lift",)))
                    adj[j].append((1, i, ("lift",)))
    for t, members in vertical.items():
        face = inst.Q_of(X[t])
        g = adjacency_graph(face)
        group = sorted(set(members) | ({gnode} if inst.split_point(goal)[0] == X[t] else set()))
        for p in range(len(group)):
            for q in range(p + 1, len(group)):
                i, j = group[p], group[q]
                d = g.distance(g.index_of(inst.split_point(coords[i])[1]),
                               g.index_of(inst.split_point(coords[j])[1]))
                adj[i].append((d, j, ("same_x",)))
                adj[j].append((d, i, ("same_x",)))
    for u, members in horizontal.items():
        face = inst.P_of(Y[u])
        g = adjacency_graph(face)
        group = sorted(set(members))
        for p in range(len(group)):
            for q in range(p + 1, len(group)):
                i, j = group[p], group[q]
                d = g.distance(g.index_of(inst.split_point(coords[i])[0]),
                               g.index_of(inst.split_point(coords[j])[0]))
                adj[i].append((d, j, ("same_y",)))
                adj[j].append((d, i, ("same_y",)))
    for link in goal_links:
        n = add(tuple(link))
        adj.setdefault(n, [])
        adj[n].append((1, gnode, ("lift",)))
        adj[gnode].append((1, n, ("lift",)))
    dist = {s: 0}
    prev: dict[int, tuple] = {}
    heap = [(0, coords[s], s)]
    while heap:
        d, _, i = heapq.heappop(heap)
        if d > dist.get(i, float("inf")):
            continue
        if i == gnode:
            break
        for w, j, move in sorted(adj[i], key=lambda e: (e[0], coords[e[1]])):
            nd = d + w
            if nd < dist.get(j, float("inf")):
                dist[j] = nd
                prev[j] = (i, move)
                heapq.heappush(heap, (nd, coords[j], j))
    if gnode not in dist:
        raise ConstructionError("lift/jump moves on the path grid do not reach the target")
    chain = []
    i = gnode
    while i != s:
        p, move = prev[i]
        chain.append((p, i, move))
        i = p
    walk = Walk.start(coords[s])
    for p, i, move in reversed(chain):
        if move[0] == "lift":
            walk.push(coords[i], "lift", BAND_STEP)
        elif move[0] == "same_x":
            walk.extend(connect_same_x(inst, coords[p], coords[i], rule="jump"))
        else:
            walk.extend(connect_same_y(inst, coords[p], coords[i]))
    return walk


def _connect_xx(inst: TwoSumInstance, u: tuple, v: tuple) -> Walk:
    x, y = inst.split_point(u)
    x2, y2 = inst.split_point(v)
    if x == x2:
        return connect_same_x(inst, u, v)
    a = inst.a_row
    band_u, band_v = band_x(inst, y), band_x(inst, y2)
    if band_u.contains(dot(a, x2)):
        return connect_in_band(inst, u, v)
    if band_v.contains(dot(a, x)):
        return connect_in_band(inst, v, u).reversed()
    X = _p_a_path(inst, x, x2)
    k = len(X) - 1
    aX = [dot(a, p) for p in X]
    c, b = inst.c_shared, inst.b_row
    i = max(t for t in range(k + 1) if band_u.contains(aX[t]))
    y_star = _point_at_level(band_u, y, b, c - aX[i])
    mid_u = inst.join(X[i], y_star)
    walk = connect_in_band(inst, u, mid_u, X[:i + 1])
    if band_v.contains(aX[i]):
        y2_star = _point_at_level(band_v, y2, b, c - aX[i])
        mid_v = inst.join(X[i], y2_star)
        walk.extend(connect_same_x(inst, mid_u, mid_v))
        walk.extend(connect_in_band(inst, v, mid_v, X[i:][::-1]).reversed())
        return walk
    j = min(t for t in range(i + 1, k + 1) if band_v.contains(aX[t]))
    y2_star = _point_at_level(band_v, y2, b, c - aX[j])
    mid_v = inst.join(X[j], y2_star)
    tail = connect_in_band(inst, v, mid_v, X[j:][::-1]).reversed()
    out1 = lift_step(inst, mid_u, X[i + 1])
    out2 = lift_step(inst, mid_v, X[j - 1])
    if out1.lifted or out2.lifted:
        raise ConstructionError("band extremes misidentified")
    walk.push(out1.vertex, "lift", OUT_OF_BAND)
    w1, w2 = out1.vertex, out2.vertex
    qg = adjacency_graph(inst.Q_B)
    Y = [qg.vertices[n].coords for n in
         qg.shortest_path(qg.index_of(out1.y_end), qg.index_of(out2.y_end))]
    walk.extend(_grid_walk(inst, X, Y, w1, mid_v, [w2]))
    walk.extend(tail)
    return walk


def _connect_simple(inst: TwoSumInstance, u: tuple, v: tuple) -> Walk:
    if u == v:
        return Walk.start(u)
    cu, cv = classify(inst, u), classify(inst, v)
    if cu == X_VERTEX and cv == X_VERTEX:
        return _connect_xx(inst, u, v)
    if cu == Y_VERTEX and cv == Y_VERTEX:
        sw = inst.swapped
        return _connect_xx(sw, inst.swap_point(u), inst.swap_point(v)).map(inst.unswap_point)
    flip = cu == X_VERTEX
    if flip:
        u, v = v, u
    # u is the y-vertex, v the x-vertex
    esc, e = escape_y_vertex(inst, u)
    option_a = esc
    option_a.extend(_connect_xx(inst, e, v))
    sw = inst.swapped
    esc_b, e_b = escape_y_vertex(sw, inst.swap_point(v))
    rest = _connect_xx(sw, inst.swap_point(u), e_b)
    option_b = esc_b.reversed()
    option_b = rest.map(inst.unswap_point)
    option_b.extend(esc_b.reversed().map(inst.unswap_point))
    best = option_a if option_a.length <= option_b.length else option_b
    return best.reversed() if flip else best


@dataclass
class ConnectResult:
    walk: Walk
    instance: TwoSumInstance
    perturbation: Fraction = Fraction(0)


def connect(inst: TwoSumInstance, u, v, *, seed: int = 0) -> Walk:
    """Constructive walk from ``u`` to ``v`` following the quadratic-bound argument.

    Non-simple instances are first perturbed to simple ones; the returned
    walk then lives in the perturbed instance, recorded on ``walk.instance``
    together with ``walk.perturbation``.
    """
    u = tuple(u.coords if isinstance(u, Vertex) else u)
    v = tuple(v.coords if isinstance(v, Vertex) else v)
    S = inst.system
    if not (is_vertex(S, u) and is_vertex(S, v)):
        raise ContractError("connect endpoints must be vertices of the 2-sum")
    if is_simple(S):
        walk = _connect_simple(inst, u, v)
        walk.instance, walk.perturbation = inst, Fraction(0)
        return walk
    pert, eps = perturb_to_simple(S, seed)
    m_A = inst.A.rows
    p_inst = inst.with_rhs(pert.b[:m_A], pert.b[m_A], pert.b[m_A + 1:],
                           (inst.c_a + pert.b[m_A] - inst.c_shared, inst.c_b))
    pu, pv = _perturbed_vertex(S, pert, u), _perturbed_vertex(S, pert, v)
    walk = _connect_simple(p_inst, pu, pv)
    walk.instance, walk.perturbation = p_inst, eps
    return walk


def _perturbed_vertex(S: StandardFormSystem, pert: StandardFormSystem, point: tuple) -> tuple:
    """A vertex of the perturbed system whose basis reproduces ``point`` on the original rhs."""
    from .ratmat import solve
    reduced, rhs, _ = S._reduced
    for w in enumerate_vertices(pert):
        sol = solve(reduced.select_columns(w.support), rhs)
        if sol is not None and embed(sol, w.support, S.n) == tuple(point):
            return w.coords
    raise IntegrityError("no perturbed vertex corresponds to the given vertex")


# ---------------------------------------------------------------- unit column

def append_unit_column(P: StandardFormSystem, row: int) -> StandardFormSystem:
    """Append the unit column on ``row`` (relaxes that equality to ``<=``)."""
    if not 0 <= row < P.m:
        raise ContractError(f"row {row} out of range for {P.m} rows")
    unit = RationalMatrix([[1 if i == row else 0] for i in range(P.m)], cols=1)
    return StandardFormSystem(P.A.hstack(unit), P.b, f"{P.name}+e{row}" if P.name else "")


def _unit_parts(P_Abar: StandardFormSystem, row: int | None):
    last = P_Abar.A.column(P_Abar.n - 1)
    nz = [i for i, v in enumerate(last) if v != 0]
    if len(nz) != 1 or last[nz[0]] != 1 or (row is not None and nz[0] != row):
        raise ContractError("last column is not the appended unit column")
    r = nz[0]
    n = P_Abar.n - 1
    keep_rows = [i for i in range(P_Abar.m) if i != r]
    P = restrict_face(P_Abar, [n])
    A = P_Abar.A.select_rows(keep_rows).select_columns(range(n))
    P_A = StandardFormSystem(A, tuple(P_Abar.b[i] for i in keep_rows), "P_A")
    a = P_Abar.A.row(r)[:n]
    return P, P_A, a, P_Abar.b[r]


def unit_budget(P_Abar: StandardFormSystem, row: int | None = None) -> dict:
    P, P_A, _, _ = _unit_parts(P_Abar, row)
    dA, dP = diameter(P_A), diameter(P)
    return {"D_PA": dA, "D_P": dP, "bound": dA + dP + 2}


def connect_unit(P_Abar: StandardFormSystem, u, v, row: int | None = None) -> Walk:
    """Walk in ``P_Abar`` (last column = unit column) of length <= d(P_A) + d(P) + 2."""
    u = tuple(u.coords if isinstance(u, Vertex) else u)
    v = tuple(v.coords if isinstance(v, Vertex) else v)
    if not (is_vertex(P_Abar, u) and is_vertex(P_Abar, v)):
        raise ContractError("connect_unit endpoints must be vertices")
    P, P_A, a, c_a = _unit_parts(P_Abar, row)
    n = P_Abar.n - 1
    if u == v:
        return Walk.start(u)
    su, sv = u[n], v[n]
    if su == 0 and sv == 0:
        return _walk_in_face(P, u[:n], v[:n])
    if su > 0 and sv > 0:
        return _unit_basic_walk(P, P_A, a, c_a, u, v)
    flip = su > 0
    if flip:
        u, v = v, u
    g = adjacency_graph(P_Abar)
    best = None
    for k in g.neighbors[g.index_of(u)]:
        w = g.vertices[k].coords
        if w[n] > 0:
            cand = Walk.start(u)
            cand.push(w, "escape", UNIT_COLUMN)
            cand.extend(w == v and Walk.start(v) or _unit_basic_walk(P, P_A, a, c_a, w, v))
            if best is None or cand.length < best.length:
                best = cand
    if best is None:
        raise ConstructionError("no neighbour with a basic slack")
    return best.reversed() if flip else best


def _walk_in_face(P: StandardFormSystem, x, x2) -> Walk:
    g = adjacency_graph(P)
    path = g.shortest_path(g.index_of(x), g.index_of(x2))
    walk = Walk.start(tuple(x) + (Fraction(0),))
    for k in path[1:]:
        walk.push(g.vertices[k].coords + (Fraction(0),), "jump", UNIT_COLUMN)
    walk.jumps.append({"face": "P", "anchor": (), "length": len(path) - 1,
                       "diameter": g.diameter()})
    return walk


def _unit_basic_walk(P, P_A, a, c_a, u, v) -> Walk:
    n = len(a)
    x, x2 = u[:n], v[:n]
    if not (is_vertex(P_A, x) and is_vertex(P_A, x2)):
        raise IntegrityError("basic-slack vertex does not project to a vertex of P_A")
    X = [tuple(p) for p in _path(P_A, x, x2)]
    aX = [dot(a, p) for p in X]
    lifted = lambda t: X[t] + (c_a - aX[t],)
    walk = Walk.start(u)
    over = [t for t in range(len(X)) if aX[t] > c_a]
    if not over:
        for t in range(1, len(X)):
            walk.push(lifted(t), "lift", UNIT_COLUMN)
        return walk
    i, j = over[0] - 1, over[-1]
    for t in range(1, i + 1):
        walk.push(lifted(t), "lift", UNIT_COLUMN)
    xi = _edge_point(X[i], X[i + 1], (c_a - aX[i]) / (aX[i + 1] - aX[i]))
    xj = _edge_point(X[j], X[j + 1], (c_a - aX[j]) / (aX[j + 1] - aX[j]))
    walk.push(xi + (Fraction(0),), "lift", UNIT_COLUMN)
    walk.extend(_walk_in_face(P, xi, xj))
    for t in range(j + 1, len(X)):
        walk.push(lifted(t), "lift", UNIT_COLUMN)
    return walk


def _path(S: StandardFormSystem, p, q) -> list[tuple]:
    g = adjacency_graph(S)
    return [g.vertices[k].coords for k in g.shortest_path(g.index_of(p), g.index_of(q))]
