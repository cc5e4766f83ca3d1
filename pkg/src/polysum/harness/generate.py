"""Seeded random instances.

Every draw comes from one :class:`SplitMix64` stream seeded by the config, in
a fixed documented order, so an implementation in another language that
follows the same order reproduces the JSON byte for byte.

Boundedness is arranged by giving the first row of every summand block
strictly positive entries.  Feasibility is arranged by drawing a
nonnegative point first and setting each right-hand side to match it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ContractError, GenerationError
from ..polyhedron import StandardFormSystem, enumerate_vertices, is_simple
from ..ratmat import RationalMatrix, dot
from ..rng import SplitMix64
from ..threesum import ThreeSumInstance, poly_three_sum
from ..twosum import TwoSumInstance, X_VERTEX, Y_VERTEX, append_unit_column, classify
from .io import ProductInstance, UnitColumnInstance

KINDS = ("two_sum", "three_sum", "unit_column", "product")


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    kind: str = "two_sum"
    m_P: tuple = (1, 2)
    n_P: tuple = (3, 4)
    m_Q: tuple = (1, 2)
    n_Q: tuple = (3, 4)
    entry_bound: int = 3
    point_bound: int = 2
    require_simple: bool = True
    require_both_categories: bool = False
    max_attempts: int = 400

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        for name in ("m_P", "n_P", "m_Q", "n_Q"):
            lo, hi = getattr(self, name)
            if lo > hi or lo < 0:
                raise ContractError(f"empty range {name}={getattr(self, name)}")
        if self.entry_bound < 1:
            raise ContractError("entry_bound must be positive")


def _row(rng: SplitMix64, n: int, bound: int, positive: bool = False) -> list[int]:
    if positive:
        return [rng.randint(1, bound) for _ in range(n)]
    return [rng.randint(-bound, bound) for _ in range(n)]


def _nonzero_row(rng: SplitMix64, n: int, bound: int) -> list[int]:
    while True:
        r = _row(rng, n, bound)
        if any(r):
            return r


def _block(rng: SplitMix64, m: int, n: int, bound: int) -> RationalMatrix:
    """``m x n`` block whose first row is strictly positive."""
    rows = [_row(rng, n, bound, positive=(i == 0)) for i in range(m)]
    return RationalMatrix(rows, cols=n)


def _point(rng: SplitMix64, n: int, bound: int) -> tuple:
    return tuple(Fraction(rng.randint(0, bound)) for _ in range(n))


def _draw_two_sum(rng: SplitMix64, cfg: GeneratorConfig, tag: str) -> TwoSumInstance:
    m_A, n_A = rng.randint(*cfg.m_P), rng.randint(*cfg.n_P)
    m_B, n_B = rng.randint(*cfg.m_Q), rng.randint(*cfg.n_Q)
    A = _block(rng, max(m_A, 1), n_A, cfg.entry_bound)
    B = _block(rng, max(m_B, 1), n_B, cfg.entry_bound)
    a = _nonzero_row(rng, n_A, cfg.entry_bound)
    b = _nonzero_row(rng, n_B, cfg.entry_bound)
    x0, y0 = _point(rng, n_A, cfg.point_bound), _point(rng, n_B, cfg.point_bound)
    c_a, c_b = dot(a, x0), dot(b, y0)
    return TwoSumInstance(A, a, b, B, A.matvec(x0), c_a + c_b, B.matvec(y0), (c_a, c_b), tag)


def _lift_rows(reduced: RationalMatrix, pivot: list, mult: list) -> list[list[Fraction]]:
    """Undo the elimination: pivot row first, other rows plus ``mult[i]`` times it."""
    rows = [list(pivot)]
    for i, r in enumerate(reduced):
        rows.append([u + mult[i] * p for u, p in zip(r, pivot)])
    return rows


def assemble_three_sum(A: RationalMatrix, B: RationalMatrix, a1, a2, b1, b2, x0, y0,
                       mult_a, mult_d, tag: str = "") -> ThreeSumInstance:
    """Build summands ``P``, ``Q`` whose 3-sum reduces to the given blocks.

    ``(x0, y0)`` fixes the right-hand sides; ``mult_a`` / ``mult_d`` are the
    entries of the distinguished columns below their leading 1, which the
    reduction has to eliminate again.
    """
    c_A, c_B = A.matvec(x0), B.matvec(y0)
    split1 = (dot(a1, x0), dot(b1, y0))
    split2 = (dot(a2, x0), dot(b2, y0))
    top = _lift_rows(A, a1, mult_a)
    bot = _lift_rows(B, b2, mult_d)
    a_col, d_col = [1] + list(mult_a), [1] + list(mult_d)
    P_rows = [r + [ai, ai] for r, ai in zip(top, a_col)] + [list(a2) + [0, 1]]
    c_A_full = [split1[0]] + [u + m * split1[0] for u, m in zip(c_A, mult_a)]
    Q_rows = [[1, 0] + list(b1)] + [[di, di] + r for r, di in zip(bot, d_col)]
    c_B_full = [split2[1]] + [u + m * split2[1] for u, m in zip(c_B, mult_d)]
    P = StandardFormSystem(RationalMatrix(P_rows), tuple(c_A_full) + (split2[0],), "P")
    Q = StandardFormSystem(RationalMatrix(Q_rows), (split1[1],) + tuple(c_B_full), "Q")
    return poly_three_sum(P, Q, tag)


def _draw_three_sum(rng: SplitMix64, cfg: GeneratorConfig, tag: str) -> ThreeSumInstance:
    """Draw a reduced 3-sum, then rebuild summands that reduce to it."""
    m_A, n_A = rng.randint(*cfg.m_P), rng.randint(*cfg.n_P)
    m_B, n_B = rng.randint(*cfg.m_Q), rng.randint(*cfg.n_Q)
    bound = cfg.entry_bound
    A = _block(rng, max(m_A, 1), n_A, bound)
    B = _block(rng, max(m_B, 1), n_B, bound)
    a1, a2 = _nonzero_row(rng, n_A, bound), _nonzero_row(rng, n_A, bound)
    b1, b2 = _nonzero_row(rng, n_B, bound), _nonzero_row(rng, n_B, bound)
    mult_a = [rng.randint(-bound, bound) for _ in range(A.rows)]
    mult_d = [rng.randint(-bound, bound) for _ in range(B.rows)]
    x0, y0 = _point(rng, n_A, cfg.point_bound), _point(rng, n_B, cfg.point_bound)
    return assemble_three_sum(A, B, a1, a2, b1, b2, x0, y0, mult_a, mult_d, tag)


def _draw_system(rng: SplitMix64, m_range, n_range, cfg: GeneratorConfig, name: str) -> StandardFormSystem:
    m, n = rng.randint(*m_range), rng.randint(*n_range)
    A = _block(rng, max(m, 1), n, cfg.entry_bound)
    x0 = _point(rng, n, cfg.point_bound)
    return StandardFormSystem(A, A.matvec(x0), name)


def _draw_unit(rng: SplitMix64, cfg: GeneratorConfig, tag: str) -> UnitColumnInstance:
    m = max(rng.randint(*cfg.m_P) + 1, 2)
    n = rng.randint(*cfg.n_P)
    A = _block(rng, m, n, cfg.entry_bound)
    x0 = _point(rng, n, cfg.point_bound)
    P = StandardFormSystem(A, A.matvec(x0), "P")
    row = rng.randint(1, m - 1)
    return UnitColumnInstance(append_unit_column(P, row), row, tag)


def _draw_product(rng: SplitMix64, cfg: GeneratorConfig, tag: str) -> ProductInstance:
    P = _draw_system(rng, cfg.m_P, cfg.n_P, cfg, "P")
    Q = _draw_system(rng, cfg.m_Q, cfg.n_Q, cfg, "Q")
    return ProductInstance(P, Q, tag)


_DRAW = {"two_sum": _draw_two_sum, "three_sum": _draw_three_sum,
         "unit_column": _draw_unit, "product": _draw_product}


def _system_of(inst) -> StandardFormSystem:
    return inst.system


def _accept(inst, cfg: GeneratorConfig, stats: dict) -> bool:
    S = _system_of(inst)
    verts = enumerate_vertices(S)
    if len(verts) < 2:
        stats["too_few_vertices"] += 1
        return False
    if cfg.require_simple and not is_simple(S):
        stats["not_simple"] += 1
        return False
    if cfg.kind == "product":
        if not enumerate_vertices(inst.P) or not enumerate_vertices(inst.Q):
            stats["too_few_vertices"] += 1
            return False
    if cfg.require_both_categories and cfg.kind == "two_sum":
        cats = {classify(inst, v.coords) for v in verts}
        if cats != {X_VERTEX, Y_VERTEX}:
            stats["single_category"] += 1
            return False
    return True


def generate(cfg: GeneratorConfig):
    """One instance for ``cfg``; rejection-samples until the ``require_*`` flags hold."""
    rng = SplitMix64(cfg.seed)
    stats = {"too_few_vertices": 0, "not_simple": 0, "single_category": 0, "invalid": 0}
    for attempt in range(cfg.max_attempts):
        tag = f"{cfg.kind}-s{cfg.seed}"
        try:
            inst = _DRAW[cfg.kind](rng, cfg, tag)
        except ContractError:
            stats["invalid"] += 1
            continue
        if _accept(inst, cfg, stats):
            return inst
    raise GenerationError(cfg.max_attempts, stats)
