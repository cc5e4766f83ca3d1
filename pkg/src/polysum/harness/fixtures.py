"""Hand-built regression instances."""
from __future__ import annotations

from collections import deque
from fractions import Fraction

from ..polyhedron import StandardFormSystem, enumerate_vertices, is_simple
from ..ratmat import RationalMatrix
from ..rng import SplitMix64
from ..threesum import MIXED, ThreeSumInstance, classify3
from ..twosum import TwoSumInstance, append_unit_column, poly_two_sum
from .generate import assemble_three_sum

F = Fraction


def fix1() -> TwoSumInstance:
    """Rows ``x1+x2=1; x1+y1=1; y1+y2=2``: a segment with two vertices."""
    return TwoSumInstance([[1, 1]], [1, 0], [1, 0], [[1, 1]], [1], 1, [2], (1, 0), "FIX-1")


def fix1_summands() -> tuple[StandardFormSystem, StandardFormSystem]:
    """``P = [A | a]`` with ``a`` the last column, ``Q = [b; B]``; their 2-sum is FIX-1."""
    P = StandardFormSystem(RationalMatrix([[1, 1, 0], [1, 0, 1]]), (F(1), F(1)), "P")
    Q = StandardFormSystem(RationalMatrix([[1, 0], [1, 1]]), (F(0), F(2)), "Q")
    return P, Q


def fix1_from_summands() -> TwoSumInstance:
    return poly_two_sum(*fix1_summands(), name="FIX-1")


def hypercube(n: int) -> StandardFormSystem:
    """``x_i + s_i = 1``, columns ``x_1..x_n, s_1..s_n``."""
    rows = [[1 if j == i or j == n + i else 0 for j in range(2 * n)] for i in range(n)]
    return StandardFormSystem(RationalMatrix(rows), (F(1),) * n, f"FIX-CUBE-{n}")


def hypercube_by_unit_columns(n: int) -> StandardFormSystem:
    """The same cube grown from ``{x = 1}`` by relaxing one row at a time."""
    S = StandardFormSystem(RationalMatrix.identity(n), (F(1),) * n, "box")
    for i in range(n):
        S = append_unit_column(S, i)
    return StandardFormSystem(S.A, S.b, f"FIX-CUBE-{n}")


OCTAGON = ((2, 1), (3, 1), (4, 2), (4, 3), (3, 4), (2, 4), (1, 3), (1, 2))
SQUARE = ((1, 1), (3, 1), (3, 3), (1, 3))


def _pyramid_rows(polygon, apex):
    """One inequality ``n u + g z <= h`` per side facet through a polygon edge and the apex."""
    ax, ay, az = (F(v) for v in apex)
    rows = []
    for k, p in enumerate(polygon):
        q = polygon[(k + 1) % len(polygon)]
        nx, ny = F(q[1] - p[1]), F(-(q[0] - p[0]))  # outward normal of a CCW edge
        h = nx * p[0] + ny * p[1]
        g = (h - nx * ax - ny * ay) / az
        rows.append((nx, ny, g, h))
    return rows


def pyramid(polygon=OCTAGON, apex=(F(5, 2), F(5, 2), 2), height=None) -> StandardFormSystem:
    """Pyramid over a CCW lattice polygon in slack form; columns ``u, v, z, s_1..s_k``.

    With ``height`` the system also fixes ``z = height`` (a horizontal slice).
    """
    facets = _pyramid_rows(polygon, apex)
    k = len(facets)
    rows, rhs = [], []
    for i, (nx, ny, g, h) in enumerate(facets):
        rows.append([nx, ny, g] + [1 if j == i else 0 for j in range(k)])
        rhs.append(h)
    if height is not None:
        rows.append([0, 0, 1] + [0] * k)
        rhs.append(F(height))
    name = f"FIX-PYR-{k}" + ("" if height is None else f"@z={height}")
    return StandardFormSystem(RationalMatrix(rows), tuple(rhs), name)


def pyramid_slice(polygon=OCTAGON, apex=(F(5, 2), F(5, 2), 2)) -> StandardFormSystem:
    return pyramid(polygon, apex, height=F(apex[2]) / 2)


def square_pyramid() -> StandardFormSystem:
    return pyramid(SQUARE, (2, 2, 2))


# ---------------------------------------------------------------- graph example

G1_ARCS = {"p1p2": ("p1", "p2"), "p2p3": ("p2", "p3"), "p3p1": ("p3", "p1"),
           "p1p4": ("p1", "p4"), "e": ("p3", "p4")}
G1_TREE = ("p1p2", "p2p3", "p1p4")
G2_ARCS = {"q1q2": ("q1", "q2"), "q2q3": ("q2", "q3"), "q3q4": ("q3", "q4"),
           "q4q5": ("q4", "q5"), "q4q2": ("q4", "q2"), "e": ("q5", "q1")}
G2_TREE = ("e", "q1q2", "q2q3", "q3q4")
GLUE = {"q5": "p3", "q1": "p4"}


def network_matrix(arcs: dict, tree: tuple, nontree: tuple) -> RationalMatrix:
    """Rows = tree arcs, columns = non-tree arcs; entry +-1 when the tree path
    from tail to head of the column arc uses the row arc forwards/backwards."""
    adj: dict = {}
    for name in tree:
        u, v = arcs[name]
        adj.setdefault(u, []).append((v, name, 1))
        adj.setdefault(v, []).append((u, name, -1))
    cols = []
    for name in nontree:
        src, dst = arcs[name]
        prev = {src: None}
        queue = deque([src])
        while queue:
            node = queue.popleft()
            for nxt, arc, sign in adj.get(node, []):
                if nxt not in prev:
                    prev[nxt] = (node, arc, sign)
                    queue.append(nxt)
        col = {t: 0 for t in tree}
        node = dst
        while prev[node] is not None:
            node, arc, sign = prev[node]
            col[arc] = sign
        cols.append([col[t] for t in tree])
    return RationalMatrix(cols, cols=len(tree)).transpose() if cols else RationalMatrix.zeros(len(tree), 0)


def graph_example():
    """Network matrices of the two summand graphs and of their 2-sum along ``e``.

    Returns ``(N1, N2, N)`` with ``N1``'s last column and ``N2``'s first row
    belonging to ``e``; ``N`` is the network matrix of the glued 7-node graph
    for the tree ``T1 + T2 - e``, rows and columns in matching order.
    """
    nt1 = ("p3p1", "e")
    nt2 = ("q4q5", "q4q2")
    N1 = network_matrix(G1_ARCS, G1_TREE, nt1)
    N2 = network_matrix(G2_ARCS, G2_TREE, nt2)
    glued = dict(G1_ARCS)
    del glued["e"]
    for name, (u, v) in G2_ARCS.items():
        if name != "e":
            glued[name] = (GLUE.get(u, u), GLUE.get(v, v))
    tree = G1_TREE + tuple(t for t in G2_TREE if t != "e")
    N = network_matrix(glued, tree, ("p3p1",) + nt2)
    return N1, N2, N


# ---------------------------------------------------------------- 3-sum

FIX3_SEED = 3


def fix3(seed: int = FIX3_SEED) -> ThreeSumInstance:
    """Square ``P_A`` (``x1+x3 = 1, x2+x4 = 1``), triangle ``Q_B`` (``y1+y2+y3 = 1``),
    shared rows drawn from ``seed``."""
    rng = SplitMix64(seed)
    A = RationalMatrix([[1, 0, 1, 0], [0, 1, 0, 1]])
    B = RationalMatrix([[1, 1, 1]])
    draw = lambda n: [rng.randint(-3, 3) for _ in range(n)]
    a1, a2, b1, b2 = draw(4), draw(4), draw(3), draw(3)
    x0 = (F(rng.randint(0, 1)), F(rng.randint(0, 1)))
    x0 = x0 + (1 - x0[0], 1 - x0[1])
    w = [F(rng.randint(0, 2)) for _ in range(3)]
    total = sum(w) or F(1)
    y0 = tuple(v / total for v in w) if sum(w) else (F(1), F(0), F(0))
    return assemble_three_sum(A, B, a1, a2, b1, b2, x0, y0, [1, 0], [1], "FIX-3")


def has_mixed_vertex(inst: ThreeSumInstance) -> bool:
    verts = enumerate_vertices(inst.system)
    return bool(verts) and is_simple(inst.system) and any(
        classify3(inst, v.coords) == MIXED for v in verts)


def find_fix3_seed(limit: int = 500) -> int:
    for seed in range(limit):
        try:
            inst = fix3(seed)
        except ValueError:
            continue
        if has_mixed_vertex(inst):
            return seed
    raise LookupError("no seed gives a simple 3-sum with a mixed vertex")


FIXTURES = {
    "FIX-1": fix1,
    "FIX-CUBE-2": lambda: hypercube(2),
    "FIX-CUBE-3": lambda: hypercube(3),
    "FIX-PYR-4": square_pyramid,
    "FIX-PYR-8": pyramid,
    "FIX-PYR-8-SLICE": pyramid_slice,
    "FIX-3": fix3,
}
