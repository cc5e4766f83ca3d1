"""Brute-force reference implementation.

This module shares no linear algebra with the rest of the package: it has
its own elimination routine and finds vertices by scanning column subsets
of every size up to the row count, keeping strictly positive unique
solutions.  Its results are the ground truth the verification checks
compare against.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from itertools import combinations


def _eliminate(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(r) for r in rows]
    pivots = []
    top = 0
    for col in range(ncols):
        pick = None
        for i in range(top, len(rows)):
            if rows[i][col] != 0:
                pick = i
                break
        if pick is None:
            continue
        rows[top], rows[pick] = rows[pick], rows[top]
        lead = rows[top][col]
        rows[top] = [v / lead for v in rows[top]]
        for i in range(len(rows)):
            if i != top and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [v - f * w for v, w in zip(rows[i], rows[top])]
        pivots.append(col)
        top += 1
        if top == len(rows):
            break
    return rows, pivots


def column_rank(A, cols) -> int:
    rows = [[Fraction(r[j]) for j in cols] for r in A]
    return len(_eliminate(rows, len(cols))[1])


def _unique_solution(A, b, cols):
    rows = [[Fraction(r[j]) for j in cols] + [Fraction(bi)] for r, bi in zip(A, b)]
    red, piv = _eliminate(rows, len(cols))
    if len(piv) < len(cols):
        return None
    for r in red[len(piv):]:
        if r[-1] != 0:
            return None
    return [red[i][-1] for i in range(len(cols))]


class Oracle:
    """Vertices, adjacency and distances of ``{x : A x = b, x >= 0}``."""

    def __init__(self, A, b):
        self.A = [[Fraction(v) for v in r] for r in A]
        self.b = [Fraction(v) for v in b]
        self.n = len(self.A[0]) if self.A else 0
        self._vertices = None
        self._adj = None
        self._dist = None

    @classmethod
    def of(cls, system) -> "Oracle":
        return cls(system.A.tolist(), system.b)

    def feasible(self, x) -> bool:
        if len(x) != self.n or any(v < 0 for v in x):
            return False
        return all(sum(a * v for a, v in zip(r, x)) == bi for r, bi in zip(self.A, self.b))

    def is_vertex(self, x) -> bool:
        supp = [j for j, v in enumerate(x) if v != 0]
        return self.feasible(x) and column_rank(self.A, supp) == len(supp)

    def adjacent(self, x, y) -> bool:
        if tuple(x) == tuple(y):
            return False
        union = sorted({j for j, v in enumerate(x) if v != 0} | {j for j, v in enumerate(y) if v != 0})
        return len(union) - column_rank(self.A, union) == 1

    @property
    def vertices(self) -> list[tuple]:
        if self._vertices is None:
            found = set()
            if all(v == 0 for v in self.b):
                found.add(tuple(Fraction(0) for _ in range(self.n)))
            for k in range(1, min(len(self.A), self.n) + 1):
                for cols in combinations(range(self.n), k):
                    sol = _unique_solution(self.A, self.b, cols)
                    if sol is None or any(v <= 0 for v in sol):
                        continue
                    x = [Fraction(0)] * self.n
                    for j, v in zip(cols, sol):
                        x[j] = v
                    found.add(tuple(x))
            self._vertices = sorted(found)
        return self._vertices

    @property
    def neighbours(self) -> list[list[int]]:
        if self._adj is None:
            V = self.vertices
            self._adj = [[j for j in range(len(V)) if j != i and self.adjacent(V[i], V[j])]
                         for i in range(len(V))]
        return self._adj

    def _bfs(self, s: int) -> list:
        dist = [None] * len(self.vertices)
        dist[s] = 0
        queue = deque([s])
        while queue:
            i = queue.popleft()
            for j in self.neighbours[i]:
                if dist[j] is None:
                    dist[j] = dist[i] + 1
                    queue.append(j)
        return dist

    @property
    def distances(self) -> list[list]:
        if self._dist is None:
            self._dist = [self._bfs(i) for i in range(len(self.vertices))]
        return self._dist

    def index(self, x) -> int:
        return self.vertices.index(tuple(Fraction(v) for v in x))

    def distance(self, x, y):
        return self.distances[self.index(x)][self.index(y)]

    def diameter(self):
        """Largest BFS distance; ``None`` when the graph is disconnected."""
        if not self.vertices:
            raise ValueError("no vertices")
        best = 0
        for row in self.distances:
            if any(d is None for d in row):
                return None
            best = max(best, max(row))
        return best

    def check_walk(self, steps) -> str | None:
        """``None`` when ``steps`` is a valid edge walk, else the reason."""
        if not steps:
            return "empty walk"
        for k, x in enumerate(steps):
            if not self.is_vertex(x):
                return f"step {k} is not a vertex"
        for k in range(1, len(steps)):
            if not self.adjacent(steps[k - 1], steps[k]):
                return f"steps {k - 1} and {k} are not adjacent"
        return None


def oracle_diameter(system) -> tuple:
    """``(diameter, distance table)`` by full enumeration and all-pairs BFS."""
    o = Oracle.of(system)
    return o.diameter(), o.distances
