"""Finite Ramsey combinatorics on edge colorings of complete graphs.

Vertices are ``1..n``; colors are ``1..c``.  A coloring is *transitive*
when ``COL(i,j) == COL(j,k)`` forces ``COL(i,k)`` to the same color for all
``i < j < k``.  A monochromatic increasing path (MIP) is an increasing
vertex sequence whose consecutive edges share one color.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence

__all__ = [
    "EdgeColoring",
    "MipResult",
    "SearchBudgetExceeded",
    "is_transitive",
    "transitivity_witness",
    "longest_mip",
    "trt_size",
    "build_extremal",
    "find_homogeneous",
    "monotone_subsequence",
    "all_colorings",
    "transitive_colorings",
    "ramsey_bounds",
    "homogeneous_free_coloring",
    "classical_ramsey_number",
    "parse_coloring",
    "format_coloring",
]

HOMOG_BUDGET = 10**8


class SearchBudgetExceeded(RuntimeError):
    pass


def _pair_index(i: int, j: int) -> int:
    # (1,2),(1,3),(2,3),(1,4),... : edges ordered by larger endpoint
    return (j - 1) * (j - 2) // 2 + (i - 1)


@dataclass(frozen=True)
class EdgeColoring:
    n: int
    c: int
    colors: tuple[int, ...]  # indexed by _pair_index

    def __post_init__(self):
        if self.n < 1 or self.c < 1:
            raise ValueError("need n >= 1 and c >= 1")
        if len(self.colors) != self.n * (self.n - 1) // 2:
            raise ValueError(f"expected {self.n * (self.n - 1) // 2} edge colors, got {len(self.colors)}")
        for col in self.colors:
            if not 1 <= col <= self.c:
                raise ValueError(f"color {col} outside 1..{self.c}")

    @classmethod
    def from_function(cls, n: int, c: int, f: Callable[[int, int], int]) -> "EdgeColoring":
        colors = [0] * (n * (n - 1) // 2)
        for j in range(2, n + 1):
            for i in range(1, j):
                colors[_pair_index(i, j)] = f(i, j)
        return cls(n, c, tuple(colors))

    @classmethod
    def from_mapping(cls, n: int, c: int, m: Mapping[tuple[int, int], int]) -> "EdgeColoring":
        missing = [(i, j) for j in range(2, n + 1) for i in range(1, j) if (i, j) not in m]
        if missing:
            raise ValueError(f"coloring is not total; first missing edge {missing[0]}")
        return cls.from_function(n, c, lambda i, j: m[(i, j)])

    @classmethod
    def constant(cls, n: int, color: int = 1, c: int = 1) -> "EdgeColoring":
        return cls(n, c, (color,) * (n * (n - 1) // 2))

    def __call__(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        if not 1 <= i < j <= self.n:
            raise IndexError(f"no edge ({i},{j}) in K_{self.n}")
        return self.colors[_pair_index(i, j)]

    def edges(self) -> Iterator[tuple[int, int, int]]:
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                yield i, j, self(i, j)


# -- transitivity and monochromatic increasing paths ----------------------------------


def transitivity_witness(col: EdgeColoring) -> tuple[int, int, int] | None:
    """First ``(i, j, k)`` with ``COL(i,j) == COL(j,k) != COL(i,k)``, or None."""
    for i in range(1, col.n + 1):
        for j in range(i + 1, col.n + 1):
            a = col(i, j)
            for k in range(j + 1, col.n + 1):
                if col(j, k) == a and col(i, k) != a:
                    return i, j, k
    return None


def is_transitive(col: EdgeColoring) -> bool:
    return transitivity_witness(col) is None


@dataclass(frozen=True)
class MipResult:
    path: tuple[int, ...]
    color: int | None  # None for a single vertex
    vectors: dict  # vertex -> (a_1, ..., a_c), longest path of each color ending there

    @property
    def length(self) -> int:
        return len(self.path)


def longest_mip(col: EdgeColoring) -> MipResult:
    """Longest monochromatic increasing path, by dynamic programming over vertices.

    ``length[v][q]`` is one more than the best ``length[u][q]`` over
    ``u < v`` with ``COL(u, v) == q``.  Ties go to the smaller color, then
    the smaller end vertex.
    """
    n, c = col.n, col.c
    length = {v: [1] * c for v in range(1, n + 1)}
    back = {v: [None] * c for v in range(1, n + 1)}
    for v in range(2, n + 1):
        for u in range(1, v):
            q = col(u, v) - 1
            if length[u][q] + 1 > length[v][q]:
                length[v][q] = length[u][q] + 1
                back[v][q] = u
    best = max(
        ((length[v][q], -q, -v) for v in range(1, n + 1) for q in range(c)),
    )
    best_len, q, v = best[0], -best[1], -best[2]
    vectors = {u: tuple(length[u]) for u in range(1, n + 1)}
    if best_len == 1:
        return MipResult((1,), None, vectors)
    path = [v]
    while back[path[-1]][q] is not None:
        path.append(back[path[-1]][q])
    return MipResult(tuple(reversed(path)), q + 1, vectors)


def trt_size(k: int, c: int) -> int:
    """Least ``n`` with a length-``k`` MIP in every transitive ``c``-coloring of ``K_n``."""
    if k < 2 or c < 1:
        raise ValueError("need k >= 2 and c >= 1")
    return (k - 1) ** c + 1


def build_extremal(k: int, c: int) -> EdgeColoring:
    """Transitive ``c``-coloring of ``K_{(k-1)^c}`` whose longest MIP has ``k - 1`` vertices.

    Built recursively: the ``(c-1)``-color construction has each vertex
    blown up into a block of ``k - 1`` vertices; edges inside a block get
    the fresh color ``c`` and edges between blocks keep the color of the
    corresponding outer edge.
    """
    if k < 2 or c < 1:
        raise ValueError("need k >= 2 and c >= 1")
    block = k - 1
    if c == 1:
        return EdgeColoring.constant(block, 1, 1)
    outer = build_extremal(k, c - 1)
    n = outer.n * block

    def color(i: int, j: int) -> int:
        gi, gj = (i - 1) // block + 1, (j - 1) // block + 1
        return c if gi == gj else outer(gi, gj)

    return EdgeColoring.from_function(n, c, color)


# -- homogeneous sets ---------------------------------------------------------------------


def find_homogeneous(
    col: EdgeColoring, k: int, budget: int = HOMOG_BUDGET
) -> tuple[int, ...] | None:
    """Lexicographically first ``k``-set whose internal edges share one color."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > col.n:
        return None
    if math.comb(col.n, k) * (k * (k - 1) // 2) > budget:
        raise SearchBudgetExceeded(
            f"C({col.n},{k}) subsets x {k * (k - 1) // 2} edges exceeds budget {budget}"
        )
    if k == 1:
        return (1,)

    def extend(chosen: list[int], color: int | None) -> tuple[int, ...] | None:
        if len(chosen) == k:
            return tuple(chosen)
        start = chosen[-1] + 1
        for v in range(start, col.n - (k - len(chosen)) + 2):
            cv = col(chosen[0], v)
            if color is not None and cv != color:
                continue
            if all(col(u, v) == cv for u in chosen[1:]):
                chosen.append(v)
                found = extend(chosen, cv)
                chosen.pop()
                if found:
                    return found
        return None

    for first in range(1, col.n - k + 2):
        found = extend([first], None)
        if found:
            return found
    return None


def all_colorings(n: int, c: int) -> Iterator[EdgeColoring]:
    m = n * (n - 1) // 2
    for colors in itertools.product(range(1, c + 1), repeat=m):
        yield EdgeColoring(n, c, colors)


def transitive_colorings(n: int, c: int) -> Iterator[EdgeColoring]:
    """Every transitive ``c``-coloring of ``K_n``, by backtracking vertex by vertex."""
    m = n * (n - 1) // 2
    colors = [0] * m

    def assign(j: int, i: int):
        # color edge (i, j); edges are filled in _pair_index order
        if j > n:
            yield EdgeColoring(n, c, tuple(colors))
            return
        nj, ni = (j + 1, 1) if i + 1 == j else (j, i + 1)
        for q in range(1, c + 1):
            colors[_pair_index(i, j)] = q
            # (i, j) is the last edge of every triple (a, i, j), a < i
            ok = all(
                not (colors[_pair_index(a, i)] == q and colors[_pair_index(a, j)] != q)
                for a in range(1, i)
            )
            if ok:
                yield from assign(nj, ni)
        colors[_pair_index(i, j)] = 0

    if n == 1:
        yield EdgeColoring(1, c, ())
        return
    yield from assign(2, 1)


def ramsey_bounds(k: int, c: int) -> tuple[float, int]:
    """Classical bounds ``c^(k/2) <= R(k, c) <= c^(ck - c + 1)``."""
    return c ** (k / 2), c ** (c * k - c + 1)


def homogeneous_free_coloring(n: int, k: int, c: int = 2) -> EdgeColoring | None:
    """A ``c``-coloring of ``K_n`` with no homogeneous ``k``-set, or None if none exists.

    Exhaustive over all ``c^C(n,2)`` colorings; colorings are encoded as
    base-``c`` digit vectors (bitmasks when ``c == 2``).
    """
    m = n * (n - 1) // 2
    subsets = [
        [_pair_index(a, b) for a, b in itertools.combinations(s, 2)]
        for s in itertools.combinations(range(1, n + 1), k)
    ]
    if c == 2:
        masks = [sum(1 << e for e in edges) for edges in subsets]
        for code in range(1 << m):
            if all((code & mk) not in (0, mk) for mk in masks):
                return EdgeColoring(n, 2, tuple(1 + ((code >> e) & 1) for e in range(m)))
        return None
    for col in all_colorings(n, c):
        colors = col.colors
        if all(len({colors[e] for e in edges}) > 1 for edges in subsets):
            return col
    return None


def classical_ramsey_number(k: int, c: int = 2, n_max: int = 6) -> tuple[int, EdgeColoring | None]:
    """Least ``n <= n_max`` where every coloring of ``K_n`` has a homogeneous ``k``-set.

    Also returns the extremal coloring of ``K_{n-1}`` that has none.
    """
    witness = None
    for n in range(1, n_max + 1):
        col = homogeneous_free_coloring(n, k, c) if n >= k else EdgeColoring.constant(n, 1, c)
        if col is None:
            return n, witness
        witness = col
    raise SearchBudgetExceeded(f"R({k},{c}) exceeds {n_max}")


# -- monotone subsequences -----------------------------------------------------------------


@dataclass(frozen=True)
class MonotoneResult:
    direction: str  # "increasing" or "decreasing"
    values: tuple[int, ...]
    indices: tuple[int, ...]


def monotone_subsequence(seq: Sequence[int], k: int) -> MonotoneResult:
    """Monotone subsequence of length ``k`` via the ascending/descending 2-coloring.

    Positions ``i < j`` get color 1 when ``seq[i] < seq[j]`` and color 2
    otherwise; this coloring is transitive, so a MIP is a monotone
    subsequence.  When the sequence is shorter than ``(k-1)^2 + 1`` and no
    length-``k`` subsequence exists, the longest one found is returned.
    """
    if len(set(seq)) != len(seq):
        raise ValueError("sequence elements must be distinct")
    if not seq:
        return MonotoneResult("increasing", (), ())
    col = EdgeColoring.from_function(
        len(seq), 2, lambda i, j: 1 if seq[i - 1] < seq[j - 1] else 2
    )
    mip = longest_mip(col)
    path = mip.path[:k] if mip.length >= k else mip.path
    direction = "decreasing" if mip.color == 2 else "increasing"
    return MonotoneResult(direction, tuple(seq[v - 1] for v in path), tuple(v - 1 for v in path))


# -- file format -----------------------------------------------------------------------------


def parse_coloring(text: str) -> EdgeColoring:
    """Read ``n c`` then one ``i j color`` line per pair ``i < j``."""
    lines = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or len(lines[0]) != 2:
        raise ValueError("first line must be 'n c'")
    n, c = (int(t) for t in lines[0])
    m = {}
    for ln in lines[1:]:
        if len(ln) != 3:
            raise ValueError(f"bad edge line {' '.join(ln)!r}")
        i, j, q = (int(t) for t in ln)
        if i > j:
            i, j = j, i
        if (i, j) in m:
            raise ValueError(f"edge ({i},{j}) listed twice")
        m[(i, j)] = q
    return EdgeColoring.from_mapping(n, c, m)


def format_coloring(col: EdgeColoring) -> str:
    return "\n".join([f"{col.n} {col.c}", *(f"{i} {j} {q}" for i, j, q in col.edges())])
