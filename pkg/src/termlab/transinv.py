"""Disjunctive well-founded transition invariants.

A candidate is a union ``T_1 | ... | T_k`` of relations between a
pre-state (unprimed variables) and a post-state (primed variables).  It
proves termination when (a) every computational segment ``s_1 .. s_n``
has ``(s_1, s_n)`` in some ``T_i``, and (b) each ``T_i`` is well founded.
Well-foundedness is certified, not decided: each disjunct carries an
affine rank that is nonnegative on its pre-states and drops by at least
one across every pair it relates.

Both properties are checked exhaustively on a bounded box.  When every
atom and every program update is a difference bound, the inductive
property is additionally proved symbolically for all integer states.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dbm import ZERO, DifferenceSystem
from .interp import Box, DEFAULT_INPUT_CAP, Trace, one_step
from .program import (
    Affine,
    DivByConst,
    InputAny,
    InputAtLeast,
    Program,
    guard_holds,
    parse_affine,
)
from .ramsey import EdgeColoring

__all__ = [
    "RelAtom",
    "Disjunct",
    "InvariantCandidate",
    "DwfResult",
    "InvariantResult",
    "UncoveredPair",
    "parse_atom",
    "parse_invariant",
    "format_invariant",
    "check_dwf",
    "check_transition_invariant",
    "symbolic_case_split",
    "segment_coloring",
    "DEFAULT_BOX",
]

DEFAULT_BOX = (-50, 50)


def _primed(v: str) -> str:
    return v + "'"


@dataclass(frozen=True)
class RelAtom:
    """``expr cmp bound`` where ``expr`` ranges over pre and primed post variables."""

    expr: Affine
    cmp: str  # "<" or "<="
    bound: int

    def __post_init__(self):
        if self.cmp not in ("<", "<="):
            raise ValueError(f"comparison must be '<' or '<=', got {self.cmp!r}")
        if not self.expr.coeffs:
            raise ValueError("relation atom mentions no variable")
        if self.expr.const:
            object.__setattr__(self, "bound", self.bound - self.expr.const)
            object.__setattr__(self, "expr", Affine(self.expr.coeffs, 0))

    def holds(self, pre: dict[str, int], post: dict[str, int]) -> bool:
        value = 0
        for v, c in self.expr.coeffs:
            value += c * (post[v[:-1]] if v.endswith("'") else pre[v])
        return value < self.bound if self.cmp == "<" else value <= self.bound

    def difference_form(self) -> tuple[str, str, int] | None:
        """As ``x - y <= c`` (``y`` possibly the zero variable), if it is one."""
        c = self.bound - 1 if self.cmp == "<" else self.bound
        terms = self.expr.coeffs
        if len(terms) == 1:
            (v, a), = terms
            if a == 1:
                return v, ZERO, c
            if a == -1:
                return ZERO, v, c
            return None
        if len(terms) == 2:
            (v1, a1), (v2, a2) = terms
            if (a1, a2) == (1, -1):
                return v1, v2, c
            if (a1, a2) == (-1, 1):
                return v2, v1, c
        return None

    def __str__(self) -> str:
        return f"{self.expr} {self.cmp} {self.bound}"


@dataclass(frozen=True)
class Disjunct:
    atoms: tuple[RelAtom, ...]
    witness: Affine  # rank over pre-state variables

    def holds(self, pre: dict[str, int], post: dict[str, int]) -> bool:
        return all(a.holds(pre, post) for a in self.atoms)

    def is_difference_bound(self) -> bool:
        return all(a.difference_form() is not None for a in self.atoms)


@dataclass(frozen=True)
class InvariantCandidate:
    disjuncts: tuple[Disjunct, ...]

    def __post_init__(self):
        if not self.disjuncts:
            raise ValueError("an invariant needs at least one disjunct")

    def __len__(self) -> int:
        return len(self.disjuncts)

    def first_satisfied(self, pre: dict[str, int], post: dict[str, int]) -> int | None:
        """1-based index of the least disjunct relating ``pre`` to ``post``."""
        for idx, d in enumerate(self.disjuncts, start=1):
            if d.holds(pre, post):
                return idx
        return None

    def variables(self) -> set[str]:
        out = set()
        for d in self.disjuncts:
            for a in d.atoms:
                out.update(v.rstrip("'") for v in a.expr.variables())
            out.update(d.witness.variables())
        return out


# -- parsing ---------------------------------------------------------------------------

_CMP = re.compile(r"(<=|>=|<|>)")


def parse_atom(text: str) -> RelAtom:
    """Parse ``x' < y - 1``, ``0 <= y``, ``x > 3*x'`` and similar."""
    parts = _CMP.split(text)
    if len(parts) != 3:
        raise ValueError(f"relation atom needs exactly one comparison: {text!r}")
    lhs, op, rhs = parse_affine(parts[0]), parts[1], parse_affine(parts[2])
    if op in ("<", "<="):
        diff = lhs - rhs
    else:
        diff = rhs - lhs
        op = "<" if op == ">" else "<="
    return RelAtom(diff, op, 0)


def parse_invariant(text: str) -> InvariantCandidate:
    disjuncts = []
    atoms: list[RelAtom] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line == "disjunct:":
                if atoms is not None:
                    raise ValueError("previous disjunct has no 'rank:' line")
                atoms = []
            elif line.startswith("rank:"):
                if atoms is None:
                    raise ValueError("'rank:' outside a disjunct")
                witness = parse_affine(line[len("rank:"):])
                if any(v.endswith("'") for v in witness.variables()):
                    raise ValueError("rank must use pre-state variables only")
                disjuncts.append(Disjunct(tuple(atoms), witness))
                atoms = None
            else:
                if atoms is None:
                    raise ValueError("atom outside a disjunct")
                atoms.append(parse_atom(line))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if atoms is not None:
        raise ValueError("last disjunct has no 'rank:' line")
    return InvariantCandidate(tuple(disjuncts))


def format_invariant(c: InvariantCandidate) -> str:
    out = []
    for d in c.disjuncts:
        out.append("disjunct:")
        out.extend(f"  {a}" for a in d.atoms)
        out.append(f"rank: {d.witness}")
    return "\n".join(out) + "\n"


# -- well-foundedness ---------------------------------------------------------------------


@dataclass
class DwfResult:
    passed: bool
    failure: dict | None = None
    exact: list[bool] = field(default_factory=list)  # per disjunct: proved symbolically
    pairs_checked: int = 0


def _pair_values(expr: Affine, names: Sequence[str], pre: np.ndarray, post: np.ndarray):
    """``expr`` on all (pre row, post row) pairs: shape ``(len(pre), len(post))``."""
    idx = {v: i for i, v in enumerate(names)}
    a = np.zeros(len(names), dtype=np.int64)
    b = np.zeros(len(names), dtype=np.int64)
    for v, c in expr.coeffs:
        if v.endswith("'"):
            b[idx[v[:-1]]] += c
        else:
            a[idx[v]] += c
    return (pre @ a)[:, None] + (post @ b)[None, :] + expr.const


def _disjunct_mask(d: Disjunct, names, pre, post) -> np.ndarray:
    mask = np.ones((len(pre), len(post)), dtype=bool)
    for atom in d.atoms:
        val = _pair_values(atom.expr, names, pre, post)
        mask &= val < atom.bound if atom.cmp == "<" else val <= atom.bound
    return mask


def _dwf_exact(d: Disjunct) -> bool:
    """Prove ``r(pre) >= 0`` and ``r(post) <= r(pre) - 1`` from the atoms by difference bounds."""
    if not d.is_difference_bound():
        return False
    w = d.witness
    rank_ok = RelAtom(-w, "<=", 0) if w.coeffs else None
    drop = RelAtom(w.substitute({v: Affine.var(_primed(v)) for v in w.variables()}) - w, "<=", -1) if w.coeffs else None
    if rank_ok is None or drop is None:
        return False
    goals = [rank_ok.difference_form(), drop.difference_form()]
    if any(g is None for g in goals):
        return False
    sys = DifferenceSystem()
    for a in d.atoms:
        sys.add(*a.difference_form())
    return sys.entails(goals)


def check_dwf(c: InvariantCandidate, box: Box, variables: Sequence[str]) -> DwfResult:
    """Check every disjunct's rank witness on all pre/post pairs drawn from ``box``.

    The first failing pair is reported as the least (disjunct, pre, post)
    in lexicographic order.
    """
    names = list(variables)
    if box.dim != len(names):
        raise ValueError(f"box has dimension {box.dim} for {len(names)} variables")
    states = np.array(list(box.states()), dtype=np.int64).reshape(-1, len(names))
    result = DwfResult(True, exact=[_dwf_exact(d) for d in c.disjuncts])
    chunk = max(1, 2_000_000 // max(1, len(states)))
    for k, d in enumerate(c.disjuncts, start=1):
        for r0 in range(0, len(states), chunk):
            pre = states[r0 : r0 + chunk]
            mask = _disjunct_mask(d, names, pre, states)
            rank_pre = _pair_values(d.witness, names, pre, states)
            post_w = d.witness.substitute({v: Affine.var(_primed(v)) for v in d.witness.variables()})
            rank_post = _pair_values(post_w, names, pre, states)
            bad = mask & ((rank_pre < 0) | (rank_post > rank_pre - 1))
            result.pairs_checked += int(mask.sum())
            if bad.any():
                i, j = np.argwhere(bad)[0]
                pre_s = tuple(int(v) for v in pre[i])
                post_s = tuple(int(v) for v in states[j])
                result.passed = False
                result.failure = {
                    "disjunct": k,
                    "pre": pre_s,
                    "post": post_s,
                    "rank_pre": int(rank_pre[i, j]),
                    "rank_post": int(rank_post[i, j]),
                }
                return result
    return result


# -- transition invariance ----------------------------------------------------------------


@dataclass
class UncoveredPair:
    start: tuple[int, ...]
    end: tuple[int, ...]
    segment: tuple[tuple[int, ...], ...]
    kind: str  # "base" (one step) or "step" (longer segment)


@dataclass
class InvariantResult:
    passed: bool
    counterexample: UncoveredPair | None = None
    exact: bool = False  # inductive property proved symbolically
    base_split: dict | None = None  # case -> least disjunct entailed
    step_split: dict | None = None  # (disjunct, case) -> least disjunct entailed
    pairs_checked: int = 0
    starts: int = 0
    notes: list[str] = field(default_factory=list)


def _update_constraints(p: Program, case_id: int, src: str, dst: str):
    """Difference constraints linking state ``src`` to its successor ``dst``, or None."""
    upd = p.case(case_id).update_map
    out = []
    for v in p.vars:
        rhs = upd.get(v, Affine.var(v))
        target = f"{dst}{v}"
        if isinstance(rhs, Affine):
            if not rhs.coeffs:
                out.append(("eq", target, ZERO, rhs.const))
            elif len(rhs.coeffs) == 1 and rhs.coeffs[0][1] == 1:
                out.append(("eq", target, f"{src}{rhs.coeffs[0][0]}", rhs.const))
            else:
                return None
        elif isinstance(rhs, InputAtLeast):
            low = rhs.lower
            if not low.coeffs:
                out.append(("le", ZERO, target, -low.const))
            elif len(low.coeffs) == 1 and low.coeffs[0][1] == 1:
                out.append(("le", f"{src}{low.coeffs[0][0]}", target, -low.const))
            else:
                return None
        elif isinstance(rhs, InputAny):
            continue
        elif isinstance(rhs, DivByConst):
            return None
    return out


def _add_guard(sys: DifferenceSystem, p: Program, prefix: str) -> None:
    for atom in p.guard:
        sys.add(ZERO, f"{prefix}{atom.var}", -atom.lower_bound)


def _add_constraints(sys: DifferenceSystem, cons) -> None:
    for kind, x, y, c in cons:
        if kind == "eq":
            sys.add_eq(x, y, c)
        else:
            sys.add(x, y, c)


def _rename(atom: RelAtom, pre: str, post: str) -> tuple[str, str, int]:
    x, y, c = atom.difference_form()

    def r(v: str) -> str:
        if v == ZERO:
            return v
        return f"{post}{v[:-1]}" if v.endswith("'") else f"{pre}{v}"

    return r(x), r(y), c


def symbolic_case_split(p: Program, c: InvariantCandidate):
    """Prove the invariant inductively with difference-bound reasoning.

    Returns ``(base, step)`` maps: ``base[case]`` is the least disjunct
    implied by one step of ``case`` from a guarded state, and
    ``step[(i, case)]`` the least disjunct implied for ``(s_1, s_{n+1})``
    when ``(s_1, s_n)`` satisfies disjunct ``i`` and ``s_n`` takes ``case``.
    An entry is None when no single disjunct is implied.  Returns None if
    the program or candidate falls outside the difference-bound fragment.
    """
    if not all(d.is_difference_bound() for d in c.disjuncts):
        return None
    for cid in p.case_ids:
        if _update_constraints(p, cid, "a.", "b.") is None:
            return None

    def least_implied(sys: DifferenceSystem, pre: str, post: str) -> int | None:
        for j, dj in enumerate(c.disjuncts, start=1):
            if sys.entails(_rename(a, pre, post) for a in dj.atoms):
                return j
        return None

    base = {}
    for cid in p.case_ids:
        sys = DifferenceSystem()
        _add_guard(sys, p, "1.")
        _add_constraints(sys, _update_constraints(p, cid, "1.", "2."))
        base[cid] = least_implied(sys, "1.", "2.")
    step = {}
    for i, di in enumerate(c.disjuncts, start=1):
        for cid in p.case_ids:
            sys = DifferenceSystem()
            for a in di.atoms:
                sys.add(*_rename(a, "1.", "n."))
            _add_guard(sys, p, "n.")
            _add_constraints(sys, _update_constraints(p, cid, "n.", "m."))
            step[(i, cid)] = least_implied(sys, "1.", "m.")
    return base, step


def check_transition_invariant(
    p: Program,
    c: InvariantCandidate,
    box: Box,
    input_cap: int = DEFAULT_INPUT_CAP,
    max_len: int | None = None,
) -> InvariantResult:
    """Check that every segment starting in ``box`` relates its ends by some disjunct.

    Induction on segment length: the base covers every one-step pair from
    a guarded state in ``box``; the step extends each covered pair
    ``(s_1, s_n)`` with ``s_n`` in ``box`` by one more transition.  Each
    start's reachable states are explored to a fixpoint (or ``max_len``
    states), so only pairs that actually occur on segments are examined.
    The reported counterexample is the lexicographically least uncovered
    ``(start, end)``.
    """
    if box.dim != p.nvars:
        raise ValueError(f"box has dimension {box.dim}, program has {p.nvars} variables")
    result = InvariantResult(True)
    for s1 in box.states():
        if not guard_holds(p, s1):
            continue
        result.starts += 1
        pre = p.env(s1)
        parent: dict[tuple[int, ...], tuple[int, ...] | None] = {s1: None}
        depth = {s1: 1}
        reached: dict[tuple[int, ...], tuple[int, ...]] = {}  # end -> predecessor
        frontier = [s1]
        while frontier:
            nxt = []
            for s in frontier:
                if max_len is not None and depth[s] >= max_len:
                    continue
                for _, t in one_step(p, s, input_cap):
                    if t not in reached:
                        reached[t] = s
                        result.pairs_checked += 1
                    if t in parent:
                        continue
                    parent[t] = s
                    depth[t] = depth[s] + 1
                    if t in box and guard_holds(p, t):
                        nxt.append(t)
            frontier = nxt
        failures = [t for t in reached if c.first_satisfied(pre, p.env(t)) is None]
        if failures:
            end = min(failures)
            seg = [end]
            node = reached[end]
            while node is not None:
                seg.append(node)
                node = parent[node]
            seg.reverse()
            result.passed = False
            result.counterexample = UncoveredPair(
                s1, end, tuple(seg), "base" if len(seg) == 2 else "step"
            )
            break
    split = symbolic_case_split(p, c)
    if split is None:
        result.notes.append("outside the difference-bound fragment: box-checked only")
    else:
        result.base_split, result.step_split = split
        result.exact = all(v is not None for v in result.base_split.values()) and all(
            v is not None for v in result.step_split.values()
        )
        if not result.exact:
            result.notes.append("some case is not covered by a single disjunct symbolically")
    return result


def segment_coloring(p: Program, c: InvariantCandidate, trace: Trace | Sequence) -> EdgeColoring:
    """Color edge ``(i, j)`` of the trace by the least disjunct relating ``s_i`` to ``s_j``."""
    states = trace.states if isinstance(trace, Trace) else tuple(tuple(s) for s in trace)
    envs = [p.env(s) for s in states]
    colors = {}
    for i, j in itertools.combinations(range(1, len(states) + 1), 2):
        k = c.first_satisfied(envs[i - 1], envs[j - 1])
        if k is None:
            raise ValueError(
                f"pair {states[i - 1]} -> {states[j - 1]} (positions {i},{j}) satisfies no disjunct"
            )
        colors[(i, j)] = k
    return EdgeColoring.from_mapping(len(states), len(c), colors)
