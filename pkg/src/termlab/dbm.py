"""Difference-bound constraint systems over the integers.

A system is a conjunction of constraints ``x - y <= c`` (``y`` may be the
distinguished zero variable, giving unary bounds).  Tight bounds are the
shortest paths of the constraint graph; a negative cycle means the
system is unsatisfiable.  For integer constants the closure is exact over
the integers, so entailment checks are exact.
"""

from __future__ import annotations

import math
from typing import Iterable

ZERO = "0"


class DifferenceSystem:
    def __init__(self, variables: Iterable[str] = ()):
        self.names: list[str] = [ZERO]
        self.index: dict[str, int] = {ZERO: 0}
        self.bounds: dict[tuple[int, int], int] = {}
        for v in variables:
            self._var(v)

    def _var(self, name: str) -> int:
        if name not in self.index:
            self.index[name] = len(self.names)
            self.names.append(name)
        return self.index[name]

    def add(self, x: str, y: str, c: int) -> None:
        """Add ``x - y <= c``."""
        key = (self._var(y), self._var(x))
        if c < self.bounds.get(key, math.inf):
            self.bounds[key] = c

    def add_eq(self, x: str, y: str, c: int) -> None:
        """Add ``x - y == c``."""
        self.add(x, y, c)
        self.add(y, x, -c)

    def copy(self) -> "DifferenceSystem":
        out = DifferenceSystem()
        out.names = list(self.names)
        out.index = dict(self.index)
        out.bounds = dict(self.bounds)
        return out

    def close(self) -> list[list[float]] | None:
        """All-pairs tightest bounds ``d[y][x] >= x - y``; None if unsatisfiable."""
        n = len(self.names)
        d = [[0 if i == j else math.inf for j in range(n)] for i in range(n)]
        for (a, b), c in self.bounds.items():
            d[a][b] = min(d[a][b], c)
        for k in range(n):
            dk = d[k]
            for i in range(n):
                dik = d[i][k]
                if dik == math.inf:
                    continue
                di = d[i]
                for j in range(n):
                    v = dik + dk[j]
                    if v < di[j]:
                        di[j] = v
        if any(d[i][i] < 0 for i in range(n)):
            return None
        return d

    def entails(self, constraints: Iterable[tuple[str, str, int]]) -> bool:
        """Whether every ``x - y <= c`` in ``constraints`` follows from the system."""
        d = self.close()
        if d is None:
            return True
        for x, y, c in constraints:
            if x not in self.index or y not in self.index:
                if x == y and c >= 0:
                    continue
                return False
            if d[self.index[y]][self.index[x]] > c:
                return False
        return True

    def satisfiable(self) -> bool:
        return self.close() is not None
