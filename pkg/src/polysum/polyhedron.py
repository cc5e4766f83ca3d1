"""Standard-form polyhedra ``{x : Ax = b, x >= 0}`` and their vertex graphs.

Vertices are enumerated as basic feasible solutions over all column subsets
of size ``rank(A)``.  Two vertices are adjacent when the smallest face
containing both is one-dimensional, i.e. when the columns indexed by the
union of their supports have nullity exactly one.  This test stays correct
for degenerate polyhedra, where basis-pivot adjacency does not.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .errors import (ContractError, EnumerationCapError, NoVerticesError,
                     PerturbationError)
from .ratmat import RationalMatrix, as_vector, nullity, rank, row_basis, solve
from .rng import SplitMix64

DEFAULT_CAP = 18
INFINITY = math.inf

_settings = {"cap": DEFAULT_CAP}


def set_enumeration_cap(cap: int) -> None:
    """Change the column cap used when no explicit ``cap`` is passed."""
    _settings["cap"] = int(cap)


def _cap(cap):
    return _settings["cap"] if cap is None else cap


@dataclass(frozen=True)
class StandardFormSystem:
    A: RationalMatrix
    b: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not isinstance(self.A, RationalMatrix):
            object.__setattr__(self, "A", RationalMatrix(self.A))
        object.__setattr__(self, "b", as_vector(self.b))
        if self.A.rows != len(self.b):
            raise ContractError(f"A has {self.A.rows} rows but b has {len(self.b)} entries")

    @property
    def m(self) -> int:
        return self.A.rows

    @property
    def n(self) -> int:
        return self.A.cols

    @cached_property
    def _reduced(self):
        return row_basis(self.A, self.b)

    @property
    def rank(self) -> int:
        return self._reduced[0].rows

    @property
    def is_consistent(self) -> bool:
        return self._reduced[2]

    def contains(self, point: Sequence) -> bool:
        return (len(point) == self.n and all(v >= 0 for v in point)
                and self.A.matvec(point) == self.b)

    def column_nullity(self, columns: Iterable[int]) -> int:
        cols = sorted(set(columns))
        if not cols:
            return 0
        return nullity(self._reduced[0].select_columns(cols))

    def with_rhs(self, b: Sequence, name: str | None = None) -> "StandardFormSystem":
        return StandardFormSystem(self.A, tuple(b), self.name if name is None else name)


def support(point: Sequence) -> tuple:
    return tuple(i for i, v in enumerate(point) if v != 0)


@dataclass(frozen=True, order=True)
class Vertex:
    coords: tuple
    support: tuple = field(compare=False)

    @classmethod
    def of(cls, coords: Sequence) -> "Vertex":
        c = tuple(Fraction(v) for v in coords)
        return cls(c, support(c))

    def __len__(self) -> int:
        return len(self.coords)


def minimal_face_dimension(S: StandardFormSystem, point: Sequence) -> int:
    """Dimension of the smallest face of ``S`` containing a feasible ``point``."""
    return S.column_nullity(support(point))


def is_vertex(S: StandardFormSystem, point: Sequence) -> bool:
    return S.contains(point) and minimal_face_dimension(S, point) == 0


@lru_cache(maxsize=4096)
def _enumerate(S: StandardFormSystem) -> tuple:
    reduced, rhs, consistent = S._reduced
    if not consistent:
        return ()
    r, n = reduced.rows, S.n
    found = set()
    for basis in combinations(range(n), r):
        sol = solve(reduced.select_columns(basis), rhs) if r else ()
        if sol is None or any(v < 0 for v in sol):
            continue
        coords = [Fraction(0)] * n
        for j, v in zip(basis, sol):
            coords[j] = v
        found.add(tuple(coords))
    verts = tuple(sorted(Vertex.of(c) for c in found))
    for v in verts:
        if not S.contains(v.coords):
            raise AssertionError(f"enumerated infeasible point {v.coords}")
    return verts


def enumerate_vertices(S: StandardFormSystem, cap: int | None = None) -> list[Vertex]:
    """All basic feasible solutions of ``S`` in lexicographic order."""
    cap = _cap(cap)
    if S.n > cap:
        raise EnumerationCapError(S.n, cap)
    return list(_enumerate(S))


def are_adjacent(S: StandardFormSystem, u: Vertex, v: Vertex) -> bool:
    if u.coords == v.coords:
        raise ContractError("adjacency of a vertex with itself is undefined")
    return S.column_nullity(set(u.support) | set(v.support)) == 1


class AdjacencyGraph:
    """1-skeleton over the enumerated vertices of a system."""

    def __init__(self, vertices: Sequence[Vertex], edges: Iterable[tuple[int, int]]):
        self.vertices = list(vertices)
        self.edges = frozenset((min(i, j), max(i, j)) for i, j in edges)
        self.neighbors: list[list[int]] = [[] for _ in self.vertices]
        for i, j in sorted(self.edges):
            self.neighbors[i].append(j)
            self.neighbors[j].append(i)
        for nb in self.neighbors:
            nb.sort()
        self.index = {v.coords: i for i, v in enumerate(self.vertices)}
        self._dist_cache: dict[int, list] = {}

    def __len__(self) -> int:
        return len(self.vertices)

    def index_of(self, point) -> int:
        coords = point.coords if isinstance(point, Vertex) else tuple(Fraction(v) for v in point)
        try:
            return self.index[coords]
        except KeyError:
            raise ContractError(f"{coords} is not a vertex of this polyhedron") from None

    def distances_from(self, i: int) -> list:
        if i not in self._dist_cache:
            dist = [INFINITY] * len(self.vertices)
            dist[i] = 0
            queue = deque([i])
            while queue:
                u = queue.popleft()
                for w in self.neighbors[u]:
                    if dist[w] == INFINITY:
                        dist[w] = dist[u] + 1
                        queue.append(w)
            self._dist_cache[i] = dist
        return self._dist_cache[i]

    def distance(self, i: int, j: int):
        return self.distances_from(i)[j]

    def shortest_path(self, i: int, j: int) -> list[int]:
        """Lexicographically smallest shortest path (by vertex order) from i to j."""
        to_target = self.distances_from(j)
        if to_target[i] == INFINITY:
            raise ContractError(f"vertices {i} and {j} are disconnected")
        path = [i]
        while path[-1] != j:
            cur = path[-1]
            path.append(next(w for w in self.neighbors[cur]
                             if to_target[w] == to_target[cur] - 1))
        return path

    def diameter(self):
        if not self.vertices:
            raise NoVerticesError()
        return max(max(self.distances_from(i)) for i in range(len(self.vertices)))


@lru_cache(maxsize=4096)
def _graph(S: StandardFormSystem) -> AdjacencyGraph:
    verts = _enumerate(S)
    edges = [(i, j) for i, j in combinations(range(len(verts)), 2)
             if are_adjacent(S, verts[i], verts[j])]
    return AdjacencyGraph(verts, edges)


def adjacency_graph(S: StandardFormSystem, cap: int | None = None) -> AdjacencyGraph:
    cap = _cap(cap)
    if S.n > cap:
        raise EnumerationCapError(S.n, cap)
    return _graph(S)


def distance(S: StandardFormSystem, u, v, cap: int | None = None):
    g = adjacency_graph(S, cap)
    if not g.vertices:
        raise NoVerticesError(S.name)
    return g.distance(g.index_of(u), g.index_of(v))


def diameter(S: StandardFormSystem, cap: int | None = None):
    """Combinatorial diameter; ``math.inf`` if the vertex graph is disconnected."""
    g = adjacency_graph(S, cap)
    if not g.vertices:
        raise NoVerticesError(S.name)
    return g.diameter()


def is_simple(S: StandardFormSystem, cap: int | None = None) -> bool:
    r = S.rank
    return all(len(v.support) == r for v in enumerate_vertices(S, cap))


def restrict_face(S: StandardFormSystem, zero_set: Iterable[int]) -> StandardFormSystem:
    """Delete the columns in ``zero_set`` (fix those variables to zero)."""
    zero = set(zero_set)
    if any(j < 0 or j >= S.n for j in zero):
        raise ContractError(f"zero set {sorted(zero)} out of range for {S.n} columns")
    keep = [j for j in range(S.n) if j not in zero]
    return StandardFormSystem(S.A.select_columns(keep), S.b, S.name)


def embed(point: Sequence, keep: Sequence[int], n: int) -> tuple:
    """Lift coordinates of a restricted system back to ``n`` columns."""
    out = [Fraction(0)] * n
    for j, v in zip(keep, point):
        out[j] = v
    return tuple(out)


def _feasible_point(S: StandardFormSystem, cap: int):
    verts = enumerate_vertices(S, cap)
    return verts[0].coords if verts else None


def perturb_to_simple(S: StandardFormSystem, seed: int, *, max_retries: int = 6,
                      denominator_bound: int = 16, cap: int | None = None):
    """Perturb the right-hand side until the polyhedron is simple.

    The perturbation is ``b + eps * A w`` with ``w`` a random positive
    rational vector, so any feasible ``x0`` gives the feasible ``x0 + eps w``.
    ``eps`` runs through ``2**-10, 2**-20, ...``.  Returns ``(system, eps)``
    where ``eps == 0`` means ``S`` was already simple.
    """
    x0 = _feasible_point(S, cap)
    if x0 is not None and is_simple(S, cap):
        return S, Fraction(0)
    rng = SplitMix64(seed)
    schedule = []
    for k in range(1, max_retries + 1):
        eps = Fraction(1, 2 ** (10 * k))
        schedule.append(eps)
        w = [Fraction(rng.randint(1, denominator_bound), rng.randint(1, denominator_bound))
             for _ in range(S.n)]
        if x0 is None:
            continue
        shift = S.A.matvec(w)
        cand = S.with_rhs([bi + eps * si for bi, si in zip(S.b, shift)],
                          name=f"{S.name}~" if S.name else "")
        if _feasible_point(cand, cap) is not None and is_simple(cand, cap):
            return cand, eps
    raise PerturbationError(schedule)


@dataclass
class Walk:
    """Edge walk: vertex sequence plus one provenance record per step."""

    steps: list = field(default_factory=list)
    budget_log: list = field(default_factory=list)
    jumps: list = field(default_factory=list)

    @classmethod
    def start(cls, vertex) -> "Walk":
        return cls([_coords(vertex)], [])

    @property
    def length(self) -> int:
        return max(len(self.steps) - 1, 0)

    def __len__(self) -> int:
        return self.length

    @property
    def first(self):
        return self.steps[0]

    @property
    def last(self):
        return self.steps[-1]

    def push(self, vertex, rule: str, lemma: str) -> None:
        coords = _coords(vertex)
        if self.steps and coords == self.steps[-1]:
            return
        self.steps.append(coords)
        self.budget_log.append({"step": len(self.steps) - 1, "rule": rule, "lemma": lemma})

    def extend(self, other: "Walk") -> None:
        if not other.steps:
            return
        if self.steps and other.steps[0] != self.steps[-1]:
            raise ContractError("walks do not join")
        offset = len(self.steps) - 1 if self.steps else 0
        if not self.steps:
            self.steps.append(other.steps[0])
        self.steps.extend(other.steps[1:])
        for rec in other.budget_log:
            self.budget_log.append({**rec, "step": rec["step"] + offset})
        self.jumps.extend(other.jumps)

    def reversed(self) -> "Walk":
        n = len(self.steps)
        by_step = {rec["step"]: rec for rec in self.budget_log}
        log = []
        for k in range(1, n):
            # step k of the reversed walk traverses original step n - k
            rec = by_step.get(n - k, {"rule": "?", "lemma": "?"})
            log.append({**rec, "step": k})
        return Walk(list(reversed(self.steps)), log, list(self.jumps))

    def map(self, fn) -> "Walk":
        return Walk([fn(s) for s in self.steps], [dict(r) for r in self.budget_log],
                    [dict(j) for j in self.jumps])


def _coords(vertex) -> tuple:
    if isinstance(vertex, Vertex):
        return vertex.coords
    return tuple(Fraction(v) for v in vertex)


def block_diagonal(P: StandardFormSystem, Q: StandardFormSystem, name: str = "") -> StandardFormSystem:
    """Cartesian product ``P x Q`` as one standard-form system."""
    top = P.A.hstack(RationalMatrix.zeros(P.m, Q.n))
    bottom = RationalMatrix.zeros(Q.m, P.n).hstack(Q.A)
    return StandardFormSystem(top.vstack(bottom), P.b + Q.b, name or f"{P.name}x{Q.name}")


__all__ = [
    "DEFAULT_CAP", "INFINITY", "set_enumeration_cap", "StandardFormSystem", "Vertex", "AdjacencyGraph", "Walk",
    "enumerate_vertices", "are_adjacent", "adjacency_graph", "distance", "diameter",
    "is_simple", "perturb_to_simple", "restrict_face", "embed", "support",
    "minimal_face_dimension", "is_vertex", "block_diagonal", "rank",
]
