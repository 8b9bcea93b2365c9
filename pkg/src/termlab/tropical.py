"""Min-plus matrices over the integers extended with +infinity.

Entries are Python ``int`` (arbitrary precision) or :data:`INF`.  Products
are exact; :func:`clamp` is the only lossy operation and it only ever
raises entries, so a clamped matrix is a weaker (still sound) size-change
bound than the original.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

__all__ = [
    "INF",
    "Entry",
    "TropicalMatrix",
    "DimensionError",
    "mul",
    "identity",
    "clamp",
    "has_negative_diagonal",
    "negative_diagonal_index",
    "column_condition",
    "power_diag_negative",
    "parse_matrix",
    "format_matrix",
    "DEFAULT_CLAMP",
]

INF = math.inf
Entry = Union[int, float]

DEFAULT_CLAMP = 8


class DimensionError(ValueError):
    pass


def _check_entry(v) -> Entry:
    if v == INF:
        return INF
    if isinstance(v, bool) or not isinstance(v, int):
        if isinstance(v, float) and v.is_integer():
            return int(v)
        raise TypeError(f"matrix entries must be integers or INF, got {v!r}")
    return v


@dataclass(frozen=True)
class TropicalMatrix:
    rows: tuple[tuple[Entry, ...], ...]

    def __post_init__(self):
        n = len(self.rows)
        if n < 1:
            raise DimensionError("matrix must have dimension >= 1")
        rows = []
        for r in self.rows:
            if len(r) != n:
                raise DimensionError(f"matrix is not square: row of length {len(r)} in {n}x{n}")
            rows.append(tuple(_check_entry(v) for v in r))
        object.__setattr__(self, "rows", tuple(rows))

    @classmethod
    def of(cls, rows: Iterable[Iterable[Entry]]) -> "TropicalMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> Entry:
        i, j = ij
        return self.rows[i][j]

    def diagonal(self) -> tuple[Entry, ...]:
        return tuple(self.rows[i][i] for i in range(self.dim))

    def __matmul__(self, other: "TropicalMatrix") -> "TropicalMatrix":
        return mul(self, other)

    def __le__(self, other: "TropicalMatrix") -> bool:
        """Entrywise ``<=`` (a tighter-or-equal bound everywhere)."""
        if self.dim != other.dim:
            raise DimensionError("cannot compare matrices of different dimension")
        return all(a <= b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))

    def __ge__(self, other: "TropicalMatrix") -> bool:
        return other <= self

    def __str__(self) -> str:
        return format_matrix(self)

    def to_lists(self) -> list[list]:
        return [["inf" if v == INF else v for v in r] for r in self.rows]


def identity(n: int) -> TropicalMatrix:
    return TropicalMatrix(tuple(tuple(0 if i == j else INF for j in range(n)) for i in range(n)))


def mul(a: TropicalMatrix, b: TropicalMatrix) -> TropicalMatrix:
    """Exact min-plus product: ``(AB)[i,j] = min_k A[i,k] + B[k,j]``."""
    n = a.dim
    if b.dim != n:
        raise DimensionError(f"cannot multiply {n}x{n} by {b.dim}x{b.dim}")
    cols = list(zip(*b.rows))
    out = []
    for row in a.rows:
        out_row = []
        for col in cols:
            best = INF
            for x, y in zip(row, col):
                if x != INF and y != INF and x + y < best:
                    best = x + y
            out_row.append(best)
        out.append(tuple(out_row))
    return TropicalMatrix(tuple(out))


def clamp(a: TropicalMatrix, k: int) -> TropicalMatrix:
    """Map finite entries below ``-k`` to ``-k`` and above ``k`` to INF."""
    if k < 1:
        raise ValueError(f"clamp bound must be positive, got {k}")

    def c(v: Entry) -> Entry:
        if v == INF or v > k:
            return INF
        return -k if v < -k else v

    return TropicalMatrix(tuple(tuple(c(v) for v in r) for r in a.rows))


def negative_diagonal_index(a: TropicalMatrix) -> int | None:
    for i, v in enumerate(a.diagonal()):
        if v < 0:
            return i
    return None


def has_negative_diagonal(a: TropicalMatrix) -> bool:
    return negative_diagonal_index(a) is not None


def column_condition(a: TropicalMatrix) -> bool:
    """True when every column has at most one finite entry."""
    return all(sum(1 for v in col if v != INF) <= 1 for col in zip(*a.rows))


def power_diag_negative(a: TropicalMatrix, k: int = DEFAULT_CLAMP) -> int | None:
    """Least ``p`` such that the clamped ``p``-th power has a negative diagonal entry.

    Clamped powers live in a finite set, so the sequence ``A, A^2, ...``
    becomes periodic; the search stops at the first repeated matrix.
    """
    base = clamp(a, k)
    power = base
    seen = set()
    p = 1
    while power not in seen:
        if has_negative_diagonal(power):
            return p
        seen.add(power)
        power = clamp(mul(power, base), k)
        p += 1
    return None


# -- text format -------------------------------------------------------------


def parse_matrix(text: str) -> TropicalMatrix:
    """Read ``n`` followed by ``n`` rows of ``n`` integers or ``inf``."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty matrix text")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValueError(f"first line must be the dimension, got {lines[0]!r}") from None
    if n < 1:
        raise DimensionError(f"dimension must be >= 1, got {n}")
    if len(lines) != n + 1:
        raise ValueError(f"expected {n} rows, got {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        toks = ln.split()
        if len(toks) != n:
            raise ValueError(f"row {ln!r} has {len(toks)} entries, expected {n}")
        row = []
        for t in toks:
            if t.lower() in ("inf", "+inf", "∞"):
                row.append(INF)
            else:
                try:
                    row.append(int(t))
                except ValueError:
                    raise ValueError(f"bad matrix entry {t!r}") from None
        rows.append(tuple(row))
    return TropicalMatrix(tuple(rows))


def format_matrix(a: TropicalMatrix) -> str:
    body = [" ".join("inf" if v == INF else str(v) for v in r) for r in a.rows]
    return "\n".join([str(a.dim), *body])


def matrix_from_lists(rows: Sequence[Sequence]) -> TropicalMatrix:
    """Build from nested lists where the string ``"inf"`` (or INF) means infinity."""
    return TropicalMatrix.of(
        [INF if (v == INF or (isinstance(v, str) and v.lower() == "inf")) else v for v in r]
        for r in rows
    )
