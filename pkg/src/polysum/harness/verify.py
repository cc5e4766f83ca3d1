"""Per-instance verification against the brute-force oracle.

Each check produces one record::

    {"instance": <hash>, "kind": ..., "check": ..., "tag": ..., "passed": bool,
     "cases": int, "failures": int, "witness": [...], "stats": {...}}

Witnesses are plain JSON (rationals as strings) and can be replayed with
:func:`replay`.  Records contain no timings so that reports are byte-stable.

Structural checks on a non-simple 2-sum run on its right-hand-side perturbation,
whose ``eps`` is recorded in ``stats``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from ..errors import PolysumError
from ..polyhedron import (StandardFormSystem, adjacency_graph, enumerate_vertices, is_simple,
                          perturb_to_simple, restrict_face, support)
from ..ratmat import dot, format_rational, parse_rational
from ..threesum import (MIXED, ThreeSumInstance, band_project, band_x3, classify3,
                        connect_same_x3, lift_step3, projection_check)
from ..twosum import (X_VERTEX, Y_VERTEX, TwoSumInstance, _unit_parts, band_x, classify, connect,
                      connect_in_band, connect_same_x, connect_unit, escape_y_vertex, lift_step)
from .io import ProductInstance, UnitColumnInstance, content_hash, dumps
from .oracle import Oracle

MAX_WITNESSES = 5

CHECKS = {
    "two_sum": ("oracle_agreement", "band_criterion", "termination_shape", "same_x_budget",
                "escape_budget", "in_band_budget", "theorem_budget", "walk_validity"),
    "three_sum": ("oracle_agreement", "band3_criterion", "band_polygon", "same_x3_budget",
                  "projection"),
    "unit_column": ("oracle_agreement", "unit_column_budget", "walk_validity"),
    "product": ("oracle_agreement", "product_identity"),
    "system": ("oracle_agreement",),
}

TAGS = {
    "oracle_agreement": "enumeration", "band_criterion": "band_step",
    "termination_shape": "out_of_band", "same_x_budget": "same_x",
    "escape_budget": "change_category", "in_band_budget": "in_band",
    "theorem_budget": "quadratic_bound", "walk_validity": "walk",
    "unit_column_budget": "unit_column", "band3_criterion": "band_step_3",
    "band_polygon": "band_3", "same_x3_budget": "same_x_3", "projection": "projection_3",
    "product_identity": "product",
}

# reported but not counted as failures: the property is not guaranteed
INFORMATIONAL = {"projection"}


def _s(v) -> str:
    return format_rational(v)


def _pt(p) -> list[str]:
    return [_s(v) for v in p]


def _unpt(p) -> tuple:
    return tuple(parse_rational(v) for v in p)


def kind_of(inst) -> str:
    if isinstance(inst, TwoSumInstance):
        return "two_sum"
    if isinstance(inst, ThreeSumInstance):
        return "three_sum"
    if isinstance(inst, UnitColumnInstance):
        return "unit_column"
    if isinstance(inst, ProductInstance):
        return "product"
    return "system"


@dataclass
class Outcome:
    cases: int = 0
    failures: int = 0
    witness: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def record(self, ok: bool, witness_fn=None) -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            if witness_fn is not None and len(self.witness) < MAX_WITNESSES:
                self.witness.append(witness_fn())

    def bump(self, key: str, value, how=max) -> None:
        self.stats[key] = value if key not in self.stats else how(self.stats[key], value)


class Context:
    """Shared state for the checks on one instance."""

    def __init__(self, inst):
        self.original = inst
        self.kind = kind_of(inst)
        self.inst = inst
        self.eps = Fraction(0)
        if self.kind == "two_sum" and not is_simple(inst.system):
            pert, eps = perturb_to_simple(inst.system, seed=0)
            m_A = inst.A.rows
            c = pert.b[m_A]
            self.inst = inst.with_rhs(pert.b[:m_A], c, pert.b[m_A + 1:],
                                      (inst.c_a + c - inst.c_shared, inst.c_b))
            self.eps = eps
        self.system = inst if isinstance(inst, StandardFormSystem) else self.inst.system
        self.oracle = Oracle.of(self.system)
        self.walks: list = []
        self._face_oracles: dict = {}

    def face_oracle(self, S: StandardFormSystem) -> Oracle:
        key = (S.A, S.b)
        if key not in self._face_oracles:
            self._face_oracles[key] = Oracle.of(S)
        return self._face_oracles[key]

    def face_diameter(self, S: StandardFormSystem) -> int:
        return self.face_oracle(S).diameter()

    def vertices(self) -> list[tuple]:
        return self.oracle.vertices


# ---------------------------------------------------------------- generic

def check_oracle_agreement(ctx: Context) -> Outcome:
    out = Outcome()
    mine = [v.coords for v in enumerate_vertices(ctx.system)]
    out.record(mine == ctx.oracle.vertices,
               lambda: {"type": "vertex_sets", "package": [_pt(p) for p in mine],
                        "oracle": [_pt(p) for p in ctx.oracle.vertices]})
    g = adjacency_graph(ctx.system)
    for i, nbrs in enumerate(ctx.oracle.neighbours):
        j_mine = sorted(g.index_of(ctx.oracle.vertices[j]) for j in nbrs) if mine == ctx.oracle.vertices else []
        ok = mine == ctx.oracle.vertices and j_mine == sorted(g.neighbors[g.index_of(ctx.oracle.vertices[i])])
        out.record(ok, lambda i=i: {"type": "neighbours", "vertex": _pt(ctx.oracle.vertices[i])})
    out.stats["vertices"] = len(ctx.oracle.vertices)
    return out


def _walk_witness(walk, u, v, bound=None, reason=None) -> dict:
    return {"type": "walk", "from": _pt(u), "to": _pt(v), "steps": [_pt(s) for s in walk.steps],
            "length": walk.length, "bound": bound, "reason": reason}


def _check_walk(ctx: Context, out: Outcome, producer: str, walk, u, v, bound) -> None:
    reason = ctx.oracle.check_walk(walk.steps)
    if reason is None and (walk.first != tuple(u) or walk.last != tuple(v)):
        reason = "wrong endpoints"
    if reason is None and bound is not None and walk.length > bound:
        reason = "over budget"
    ctx.walks.append((producer, tuple(u), tuple(v), walk))
    out.record(reason is None, lambda: _walk_witness(walk, u, v, bound, reason))
    if bound is not None:
        out.bump("max_length", walk.length)
        out.bump("max_bound", bound)


def check_walk_validity(ctx: Context) -> Outcome:
    """Every walk produced by the other checks, re-validated by the oracle."""
    out = Outcome()
    if not ctx.walks:
        V = ctx.vertices()
        for u, v in combinations(V, 2):
            walk = (connect(ctx.inst, u, v) if ctx.kind == "two_sum"
                    else connect_unit(ctx.system, u, v))
            ctx.walks.append(("connect", u, v, walk))
    for producer, u, v, walk in ctx.walks:
        reason = ctx.oracle.check_walk(walk.steps)
        if reason is None and (walk.first != u or walk.last != v):
            reason = "wrong endpoints"
        out.record(reason is None, lambda: {**_walk_witness(walk, u, v, None, reason),
                                            "producer": producer})
    return out


# ---------------------------------------------------------------- 2-sum

def _x_vertices(ctx: Context) -> list[tuple]:
    return [p for p in ctx.vertices() if classify(ctx.inst, p) == X_VERTEX]


def _oracle_lift_exists(ctx: Context, p, x_new) -> tuple | None:
    """An oracle neighbour ``(x_new, y')`` of ``p`` with ``supp y'`` inside ``supp y``."""
    inst = ctx.inst
    _, y = inst.split_point(p)
    sy = set(support(y))
    o = ctx.oracle
    for j in o.neighbours[o.index(p)]:
        w = o.vertices[j]
        wx, wy = inst.split_point(w)
        if wx == tuple(x_new) and set(support(wy)) <= sy:
            return w
    return None


def check_band_criterion(ctx: Context) -> Outcome:
    out = Outcome()
    inst = ctx.inst
    pa = Oracle.of(inst.P_A)
    for p in _x_vertices(ctx):
        x, y = inst.split_point(p)
        i = pa.index(x)
        band = band_x(inst, y)
        for j in pa.neighbours[i]:
            x_new = pa.vertices[j]
            res = lift_step(inst, p, x_new)
            in_band = band.contains(dot(inst.a_row, x_new))
            target = _oracle_lift_exists(ctx, p, x_new)
            ok = res.lifted == in_band == (target is not None)
            if ok and res.lifted:
                ok = ctx.oracle.adjacent(p, res.vertex) and ctx.oracle.is_vertex(res.vertex)
            out.record(ok, lambda: {"type": "lift", "at": _pt(p), "target": _pt(x_new),
                                    "lifted": res.lifted, "in_band": in_band,
                                    "oracle": target is not None})
            out.stats["lifted"] = out.stats.get("lifted", 0) + int(res.lifted)
    return out


def check_termination_shape(ctx: Context) -> Outcome:
    out = Outcome()
    inst = ctx.inst
    pa = Oracle.of(inst.P_A)
    for p in _x_vertices(ctx):
        x, y = inst.split_point(p)
        idx = support(y)
        face = restrict_face(inst.Q_B, [k for k in range(inst.ny) if k not in set(idx)])
        ends = {tuple(_embed(w, idx, inst.ny)) for w in Oracle.of(face).vertices}
        for j in pa.neighbours[pa.index(x)]:
            x_new = pa.vertices[j]
            res = lift_step(inst, p, x_new)
            if res.lifted:
                continue
            xm, ye = inst.split_point(res.vertex)
            lam = _segment_parameter(x, x_new, xm)
            problems = []
            if lam is None:
                problems.append("x'' not on conv(x, x')")
            if tuple(ye) not in ends:
                problems.append("terminal y is not an endpoint of the Q_B edge through y")
            if dot(inst.a_row, xm) + dot(inst.b_row, ye) != inst.c_shared:
                problems.append("shared row violated")
            if not ctx.oracle.is_vertex(res.vertex):
                problems.append("terminal point is not a vertex")
            out.record(not problems, lambda: {"type": "termination", "at": _pt(p),
                                              "target": _pt(x_new), "vertex": _pt(res.vertex),
                                              "problems": problems})
    return out


def _embed(point, idx, n) -> list:
    full = [Fraction(0)] * n
    for k, v in zip(idx, point):
        full[k] = v
    return full


def _segment_parameter(p, q, r):
    """``t`` in ``[0, 1]`` with ``r = p + t (q - p)``, or ``None``."""
    t = None
    for a, b, c in zip(p, q, r):
        if a == b:
            if c != a:
                return None
            continue
        s = (c - a) / (b - a)
        if t is None:
            t = s
        elif s != t:
            return None
    t = Fraction(0) if t is None else t
    return t if 0 <= t <= 1 else None


def check_same_x_budget(ctx: Context) -> Outcome:
    out = Outcome()
    inst = ctx.inst
    groups: dict = {}
    for p in _x_vertices(ctx):
        groups.setdefault(inst.split_point(p)[0], []).append(p)
    for x, members in sorted(groups.items()):
        d = ctx.face_diameter(inst.Q_of(x)) if len(members) > 1 else 0
        for u, v in combinations(members, 2):
            _check_walk(ctx, out, "same_x", connect_same_x(inst, u, v), u, v, d)
    return out


def _jump_budget(ctx: Context, walk, face: str) -> int:
    inst = ctx.inst
    diams = [0]
    for j in walk.jumps:
        if j["face"] != face:
            continue
        S = inst.Q_of(j["anchor"]) if face == "Q(x)" else inst.P_of(j["anchor"])
        diams.append(ctx.face_diameter(S))
    return max(diams)


def check_escape_budget(ctx: Context) -> Outcome:
    out = Outcome()
    inst = ctx.inst
    cats = {p: classify(inst, p) for p in ctx.vertices()}
    if set(cats.values()) != {X_VERTEX, Y_VERTEX}:
        out.stats["skipped"] = "single category"
        return out
    d_qb = ctx.face_diameter(inst.Q_B)
    for p, cat in cats.items():
        if cat != Y_VERTEX:
            continue
        walk, end = escape_y_vertex(inst, p)
        bound = d_qb + _jump_budget(ctx, walk, "P(y)") + 1
        ok_end = cats.get(tuple(end)) == X_VERTEX
        _check_walk(ctx, out, "escape", walk, p, end, bound)
        if not ok_end:
            out.failures += 1
    return out


def check_in_band_budget(ctx: Context) -> Outcome:
    out = Outcome()
    inst = ctx.inst
    pa = Oracle.of(inst.P_A)
    xs = _x_vertices(ctx)
    for u in xs:
        band = band_x(inst, inst.split_point(u)[1])
        for v in xs:
            if u == v or not band.contains(dot(inst.a_row, inst.split_point(v)[0])):
                continue
            walk = connect_in_band(inst, u, v)
            path = pa.distance(inst.split_point(u)[0], inst.split_point(v)[0])
            bound = path + 2 * _jump_budget(ctx, walk, "P(y)") + _jump_budget(ctx, walk, "Q(x)") + 2
            _check_walk(ctx, out, "in_band", walk, u, v, bound)
            out.bump("max_jumps", sum(1 for j in walk.jumps if j["face"] == "P(y)"))
    return out


def oracle_budget(ctx: Context) -> dict:
    """Quadratic-bound ingredients from oracle diameters of realised faces."""
    inst = ctx.inst
    xs = sorted({inst.split_point(p)[0] for p in ctx.vertices()})
    ys = sorted({inst.split_point(p)[1] for p in ctx.vertices()})
    D_PA, D_QB = ctx.face_diameter(inst.P_A), ctx.face_diameter(inst.Q_B)
    D_Ab = max(ctx.face_diameter(inst.P_of(y)) for y in ys)
    D_Bb = max(ctx.face_diameter(inst.Q_of(x)) for x in xs)
    bound = D_PA * (1 + D_Ab) + D_QB * (1 + D_Bb) + min(D_Ab + D_QB + 1, D_PA + D_Bb + 1)
    return {"D_PA": D_PA, "D_QB": D_QB, "D_Abar": D_Ab, "D_Bbar": D_Bb, "bound": bound}


def check_theorem_budget(ctx: Context) -> Outcome:
    out = Outcome()
    budget = oracle_budget(ctx)
    out.stats.update(budget)
    worst = Fraction(0)
    for u, v in combinations(ctx.vertices(), 2):
        walk = connect(ctx.inst, u, v)
        _check_walk(ctx, out, "connect", walk, u, v, budget["bound"])
        shortest = ctx.oracle.distance(u, v)
        if shortest:
            worst = max(worst, Fraction(walk.length, shortest))
    out.stats["max_ratio"] = _s(worst)
    if ctx.eps:
        out.stats["perturbation"] = _s(ctx.eps)
    return out


# ---------------------------------------------------------------- unit column

def check_unit_column_budget(ctx: Context) -> Outcome:
    out = Outcome()
    P, P_A, _, _ = _unit_parts(ctx.system, ctx.original.row)
    bound = ctx.face_diameter(P_A) + ctx.face_diameter(P) + 2
    out.stats["bound"] = bound
    for u, v in combinations(ctx.vertices(), 2):
        _check_walk(ctx, out, "connect_unit", connect_unit(ctx.system, u, v, ctx.original.row),
                    u, v, bound)
    return out


# ---------------------------------------------------------------- 3-sum

def check_band3_criterion(ctx: Context) -> Outcome:
    out = Outcome()
    inst = ctx.inst
    pa = Oracle.of(inst.P_A)
    for p in ctx.vertices():
        if classify3(inst, p) != X_VERTEX:
            continue
        x, y = inst.split_point(p)
        for j in pa.neighbours[pa.index(x)]:
            x_new = pa.vertices[j]
            res = lift_step3(inst, p, x_new)
            member = res.polygon.contains((dot(inst.a1_row, x_new), dot(inst.a2_row, x_new)))
            target = _oracle_lift_exists(ctx, p, x_new)
            ok = res.lifted == member == (target is not None)
            if ok and res.lifted:
                ok = res.vertex is not None and ctx.oracle.adjacent(p, res.vertex)
            out.record(ok, lambda: {"type": "lift3", "at": _pt(p), "target": _pt(x_new),
                                    "lifted": res.lifted, "in_band": member,
                                    "oracle": target is not None})
    return out


def _extreme_points(points) -> set:
    """Points not in the convex hull of the others (2-D, brute force)."""
    pts = sorted(set(points))

    def in_triangle(q, a, b, c):
        def side(p1, p2, p3):
            return (p2[0] - p1[0]) * (p3[1] - p1[1]) - (p2[1] - p1[1]) * (p3[0] - p1[0])
        s = [side(a, b, q), side(b, c, q), side(c, a, q)]
        return all(v >= 0 for v in s) or all(v <= 0 for v in s)

    extreme = set()
    for q in pts:
        others = [p for p in pts if p != q]
        covered = False
        for a, b, c in combinations(others, 3) if len(others) >= 3 else ():
            if in_triangle(q, a, b, c):
                covered = True
                break
        if not covered:
            for a, b in combinations(others, 2):
                if in_triangle(q, a, b, b) and min(a, b) <= q <= max(a, b):
                    covered = True
                    break
        if not covered:
            extreme.add(q)
    return extreme


def check_band_polygon(ctx: Context) -> Outcome:
    out = Outcome()
    inst = ctx.inst
    seen = set()
    for p in ctx.vertices():
        y = inst.split_point(p)[1]
        idx = support(y)
        if idx in seen:
            continue
        seen.add(idx)
        face = restrict_face(inst.Q_B, [k for k in range(inst.ny) if k not in set(idx)])
        proj = [band_project(inst, _embed(w, idx, inst.ny)) for w in Oracle.of(face).vertices]
        expected = _extreme_points(proj)
        poly = band_x3(inst, y)
        got = set(poly.vertices_2d)
        inside = all(poly.contains(q) for q in proj)
        out.record(got == expected and inside,
                   lambda: {"type": "polygon", "support": list(idx),
                            "polygon": [_pt(q) for q in poly.vertices_2d],
                            "expected": [_pt(q) for q in sorted(expected)]})
        out.bump("max_polygon_vertices", len(got))
    return out


def check_same_x3_budget(ctx: Context) -> Outcome:
    out = Outcome()
    inst = ctx.inst
    groups: dict = {}
    for p in ctx.vertices():
        if classify3(inst, p) == X_VERTEX:
            groups.setdefault(inst.split_point(p)[0], []).append(p)
    for x, members in sorted(groups.items()):
        d = ctx.face_diameter(inst.Q_of(x)) if len(members) > 1 else 0
        for u, v in combinations(members, 2):
            _check_walk(ctx, out, "same_x3", connect_same_x3(inst, u, v), u, v, d)
    out.stats["mixed_vertices"] = sum(classify3(inst, p) == MIXED for p in ctx.vertices())
    return out


def check_projection(ctx: Context) -> Outcome:
    out = Outcome()
    if ctx.inst.sources is None:
        out.stats["skipped"] = "no summands"
        return out
    for rec in projection_check(ctx.inst):
        out.record(rec["P_vertex"] and rec["Q_vertex"],
                   lambda rec=rec: {"type": "projection", "vertex": _pt(rec["vertex"]),
                                    "P_point": _pt(rec["P_point"]), "Q_point": _pt(rec["Q_point"])})
    return out


# ---------------------------------------------------------------- product

def check_product_identity(ctx: Context) -> Outcome:
    out = Outcome()
    inst = ctx.original
    d = ctx.oracle.diameter()
    dP, dQ = Oracle.of(inst.P).diameter(), Oracle.of(inst.Q).diameter()
    out.stats.update({"product": d, "P": dP, "Q": dQ})
    out.record(d is not None and dP is not None and dQ is not None and d == dP + dQ,
               lambda: {"type": "product", "product": d, "P": dP, "Q": dQ})
    return out


_RUN = {name[len("check_"):]: fn for name, fn in globals().items() if name.startswith("check_")}


def verify(inst, checks="all") -> list[dict]:
    """Run the selected checks; returns one record per check."""
    kind = kind_of(inst)
    available = CHECKS[kind]
    if checks == "all" or checks is None:
        selected = available
    else:
        wanted = [checks] if isinstance(checks, str) else list(checks)
        unknown = [c for c in wanted if c not in _RUN]
        if unknown:
            raise ValueError(f"unknown checks {unknown}; known: {sorted(_RUN)}")
        selected = [c for c in available if c in wanted]
    ctx = Context(inst)
    ident = content_hash(inst)
    records = []
    for name in selected:
        try:
            res = _RUN[name](ctx)
        except PolysumError as exc:
            res = Outcome(1, 1, [{"type": "error", "error": type(exc).__name__, "message": str(exc)}])
        rec = {"instance": ident, "name": getattr(inst, "name", ""), "kind": kind, "check": name,
               "tag": TAGS[name], "passed": res.failures == 0, "cases": res.cases,
               "failures": res.failures, "witness": res.witness, "stats": res.stats}
        if name in INFORMATIONAL:
            rec["informational"] = True
        records.append(rec)
    return records


def failed(records) -> list[dict]:
    return [r for r in records if not r["passed"] and not r.get("informational")]


def verify_walk(inst, walk, u=None, v=None) -> dict:
    """Check an externally supplied walk against the instance's oracle."""
    system = inst.system if not isinstance(inst, StandardFormSystem) else inst
    o = Oracle.of(system)
    reason = o.check_walk(walk.steps)
    if reason is None and u is not None and (walk.first != tuple(u) or walk.last != tuple(v)):
        reason = "wrong endpoints"
    return {"check": "walk_validity", "tag": "walk", "passed": reason is None, "cases": 1,
            "failures": int(reason is not None), "length": walk.length,
            "witness": [] if reason is None else [_walk_witness(walk, walk.first, walk.last, None, reason)]}


def replay(inst, witness: dict) -> bool:
    """Re-run the computation behind a witness; ``True`` when it still fails."""
    kind = witness.get("type")
    if kind == "walk":
        steps = [_unpt(s) for s in witness["steps"]]
        o = Oracle.of(inst.system)
        reason = o.check_walk(steps)
        if reason is not None:
            return True
        if steps[0] != _unpt(witness["from"]) or steps[-1] != _unpt(witness["to"]):
            return True
        return witness.get("bound") is not None and len(steps) - 1 > witness["bound"]
    if kind in ("lift", "lift3"):
        ctx = Context(inst)
        p, x_new = _unpt(witness["at"]), _unpt(witness["target"])
        if kind == "lift":
            res = lift_step(ctx.inst, p, x_new)
            member = band_x(ctx.inst, ctx.inst.split_point(p)[1]).contains(dot(ctx.inst.a_row, x_new))
        else:
            res = lift_step3(ctx.inst, p, x_new)
            member = res.polygon.contains((dot(ctx.inst.a1_row, x_new), dot(ctx.inst.a2_row, x_new)))
        oracle = _oracle_lift_exists(ctx, p, x_new) is not None
        return not (res.lifted == member == oracle)
    raise ValueError(f"cannot replay witness of type {kind!r}")


def report_lines(records) -> str:
    return "".join(dumps(r) + "\n" for r in records)
