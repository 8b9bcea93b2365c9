"""Lexicographic ranking functions built from affine components.

A ranking maps a guarded state to the tuple of its component values and
every other state to a bottom element below all tuples.  It proves
termination when each case either leaves a prefix of components
unchanged and strictly lowers the next one, which must also be bounded
below by 0 under the guard.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .interp import Box, DEFAULT_INPUT_CAP, frontier_search, guard_mask, replay_path
from .program import (
    Affine,
    DivByConst,
    InputAny,
    InputAtLeast,
    Program,
    guard_holds,
    guard_lower_bounds,
    parse_affine,
)
from .report import Verdict
from .sct import post_upper_bound, supremum

__all__ = [
    "RankingSpec",
    "ComponentChange",
    "CaseJustification",
    "RankingResult",
    "classify_change",
    "verify_ranking",
    "rank_tuple",
    "lex_less",
    "check_lex_decrease",
]

UNCHANGED = "unchanged"
DECREASING = "decreasing"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class RankingSpec:
    components: tuple[Affine, ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("a ranking needs at least one component")

    @classmethod
    def parse(cls, text: str) -> "RankingSpec":
        parts = [t.strip() for t in text.split(",") if t.strip()]
        return cls(tuple(parse_affine(t) for t in parts))

    @property
    def labels(self) -> list[str]:
        return [str(c) for c in self.components]

    def check_vars(self, p: Program) -> None:
        for comp in self.components:
            for v in comp.variables():
                if v not in p.vars:
                    raise ValueError(f"ranking component {comp} uses undeclared variable {v!r}")


@dataclass(frozen=True)
class ComponentChange:
    kind: str  # unchanged | decreasing | unknown
    max_delta: object = None  # supremum of post - pre over guarded states
    bounded_below: bool = False
    detail: str = ""


@dataclass
class CaseJustification:
    case: int
    changes: list[ComponentChange]
    decreasing_index: int | None  # 0-based component that certifies the case
    witness_state: tuple[int, ...] | None = None

    def describe(self, labels: Sequence[str]) -> str:
        if self.decreasing_index is None:
            bad = next(
                (i for i, ch in enumerate(self.changes) if ch.kind != UNCHANGED), len(labels) - 1
            )
            ch = self.changes[bad]
            return f"case {self.case}: component {labels[bad]} is {ch.kind} ({ch.detail})"
        i = self.decreasing_index
        ch = self.changes[i]
        prefix = ", ".join(labels[:i]) or "nothing"
        return (
            f"case {self.case}: {prefix} unchanged; {labels[i]} decreases by at least "
            f"{-ch.max_delta} (tight at {self.witness_state})"
        )


@dataclass
class RankingResult:
    verdict: Verdict
    cases: list[CaseJustification]
    offending_case: int | None = None


def _feeds(p: Program, case_id: int, comp: Affine) -> str | None:
    upd = p.case(case_id).update_map
    for v in comp.variables():
        rhs = upd.get(v)
        if isinstance(rhs, (InputAny, InputAtLeast)):
            return f"{v} is read from input"
        if isinstance(rhs, DivByConst):
            return f"{v} is updated by division"
    return None


def _infimum(p: Program, expr: Affine):
    lbs = guard_lower_bounds(p)
    total = expr.const
    for v, c in expr.coeffs:
        if c < 0 or v not in lbs:
            return -np.inf
        total += c * lbs[v]
    return total


def classify_change(p: Program, case_id: int, comp: Affine) -> ComponentChange:
    """How one component changes under one case, over all guarded states."""
    bounded = _infimum(p, comp) >= 0
    upper = post_upper_bound(p, case_id, comp)
    fed = _feeds(p, case_id, comp)
    if upper is None:
        return ComponentChange(UNKNOWN, np.inf, bounded, fed or "unbounded above")
    delta = upper - comp
    if fed is None and not delta.coeffs and delta.const == 0:
        return ComponentChange(UNCHANGED, 0, bounded, "no change")
    sup = supremum(p, delta)
    if sup <= -1:
        return ComponentChange(DECREASING, sup, bounded, f"change <= {sup}")
    detail = fed or f"change {delta} can reach {sup}"
    return ComponentChange(UNKNOWN, sup, bounded, detail)


def _corner(p: Program) -> tuple[int, ...]:
    lbs = guard_lower_bounds(p)
    return tuple(lbs.get(v, 0) for v in p.vars)


def verify_ranking(p: Program, r: RankingSpec) -> RankingResult:
    r.check_vars(p)
    cases = []
    offending = None
    for case_id in p.case_ids:
        changes = [classify_change(p, case_id, comp) for comp in r.components]
        chosen = None
        for i, ch in enumerate(changes):
            if ch.kind == DECREASING and ch.bounded_below:
                chosen = i
                break
            if ch.kind != UNCHANGED:
                break
        cases.append(CaseJustification(case_id, changes, chosen, _corner(p) if chosen is not None else None))
        if chosen is None and offending is None:
            offending = case_id
    verdict = Verdict.TERMINATES if offending is None else Verdict.UNKNOWN
    return RankingResult(verdict, cases, offending)


def rank_tuple(p: Program, r: RankingSpec, s: Sequence[int]) -> tuple[int, ...] | None:
    """Rank of a state; None stands for the bottom element (guard false)."""
    if not guard_holds(p, s):
        return None
    env = p.env(s)
    return tuple(c.evaluate(env) for c in r.components)


def lex_less(a: tuple[int, ...] | None, b: tuple[int, ...] | None) -> bool:
    """``a <_lex b`` with None as the least element."""
    if b is None:
        return False
    if a is None:
        return True
    return a < b


@dataclass
class LexCheckReport:
    passed: bool
    counterexample: object = None
    starts: int = 0
    pairs_checked: int = 0
    violations: int = field(default=0)


def check_lex_decrease(
    p: Program,
    r: RankingSpec,
    box: Box,
    max_len: int,
    input_cap: int = DEFAULT_INPUT_CAP,
) -> LexCheckReport:
    """Empirically confirm that rank(end) <_lex rank(start) on every segment from ``box``."""
    r.check_vars(p)
    idx = {v: i for i, v in enumerate(p.vars)}
    coef = np.zeros((p.nvars, len(r.components)), dtype=np.int64)
    const = np.array([c.const for c in r.components], dtype=np.int64)
    for k, comp in enumerate(r.components):
        for v, c in comp.coeffs:
            coef[idx[v], k] = c

    def bad(starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
        a = ends @ coef + const
        b = starts @ coef + const
        less = np.zeros(len(a), dtype=bool)
        decided = np.zeros(len(a), dtype=bool)
        for k in range(a.shape[1]):
            less |= ~decided & (a[:, k] < b[:, k])
            decided |= a[:, k] != b[:, k]
        bottom = ~guard_mask(p, ends)
        return ~(bottom | less)

    res = frontier_search(p, box, max_len, input_cap, bad, exhaustive=True)
    report = LexCheckReport(res.path is None, starts=res.starts, pairs_checked=res.pairs)
    report.violations = res.violations
    if res.path is not None:
        report.counterexample = replay_path(p, res.path, input_cap)
    return report
