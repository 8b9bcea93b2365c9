"""Bounded execution: runs under user strategies and exhaustive segment search.

The user of a program is modelled as a strategy that picks the case and the
input values at every step.  Inputs are unbounded in the language, so every
search here truncates them: an input with lower bound ``lo`` ranges over
``lo .. lo + input_cap`` and an unrestricted input over ``-input_cap ..
input_cap``.  Verdicts produced by these searches hold for the searched
space only.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .program import (
    Affine,
    DivByConst,
    ExecutionError,
    InputAny,
    InputAtLeast,
    Program,
    guard_holds,
    input_updates,
    successors,
)

__all__ = [
    "Box",
    "Choice",
    "Trace",
    "Scripted",
    "SeededRandom",
    "CheckReport",
    "DEFAULT_INPUT_CAP",
    "admissible_inputs",
    "one_step",
    "run",
    "enumerate_segments",
    "check_segment_decrease",
    "frontier_search",
    "FrontierResult",
    "guard_mask",
    "replay_path",
]

DEFAULT_INPUT_CAP = 3


@dataclass(frozen=True)
class Box:
    """A finite integer hyper-rectangle, one inclusive range per variable."""

    ranges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for lo, hi in self.ranges:
            if lo > hi:
                raise ValueError(f"empty range {lo}:{hi}")

    @classmethod
    def uniform(cls, lo: int, hi: int, n: int) -> "Box":
        return cls(((lo, hi),) * n)

    @classmethod
    def point(cls, state: Sequence[int]) -> "Box":
        return cls(tuple((v, v) for v in state))

    @classmethod
    def parse(cls, text: str, n: int) -> "Box":
        """``"1:15"`` (every variable) or ``"1:15,-3:3"`` (one range per variable)."""
        parts = [t.strip() for t in text.split(",") if t.strip()]
        ranges = []
        for part in parts:
            lo, sep, hi = part.rpartition(":")
            if not sep:
                raise ValueError(f"bad box range {part!r}; expected lo:hi")
            ranges.append((int(lo), int(hi)))
        if len(ranges) == 1:
            ranges = ranges * n
        if len(ranges) != n:
            raise ValueError(f"box has {len(ranges)} ranges for {n} variables")
        return cls(tuple(ranges))

    @property
    def dim(self) -> int:
        return len(self.ranges)

    def __contains__(self, state: Sequence[int]) -> bool:
        return len(state) == self.dim and all(
            lo <= v <= hi for v, (lo, hi) in zip(state, self.ranges)
        )

    def states(self) -> Iterator[tuple[int, ...]]:
        """All states in lexicographic order."""
        return itertools.product(*(range(lo, hi + 1) for lo, hi in self.ranges))

    def size(self) -> int:
        out = 1
        for lo, hi in self.ranges:
            out *= hi - lo + 1
        return out

    def describe(self) -> str:
        return " x ".join(f"[{lo},{hi}]" for lo, hi in self.ranges)


class Choice(NamedTuple):
    case: int
    inputs: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, case: int, inputs: Mapping[str, int] | None = None) -> "Choice":
        return cls(case, tuple(sorted((inputs or {}).items())))

    @property
    def input_map(self) -> dict[str, int]:
        return dict(self.inputs)


@dataclass(frozen=True)
class Trace:
    states: tuple[tuple[int, ...], ...]
    choices: tuple[Choice, ...]
    terminated: bool

    @property
    def start(self) -> tuple[int, ...]:
        return self.states[0]

    @property
    def end(self) -> tuple[int, ...]:
        return self.states[-1]

    @property
    def word(self) -> tuple[int, ...]:
        """The sequence of case ids taken."""
        return tuple(c.case for c in self.choices)

    def __len__(self) -> int:
        return len(self.states)

    def prefix(self, length: int) -> "Trace":
        return Trace(self.states[:length], self.choices[: length - 1], False)

    def lines(self) -> list[str]:
        return [",".join(str(v) for v in s) for s in self.states]


def _input_range(rhs, env: Mapping[str, int], cap: int) -> range:
    if isinstance(rhs, InputAtLeast):
        lo = rhs.lower.evaluate(env)
        return range(lo, lo + cap + 1)
    return range(-cap, cap + 1)


def admissible_inputs(
    p: Program, s: Sequence[int], case_id: int, input_cap: int = DEFAULT_INPUT_CAP
) -> Iterator[dict[str, int]]:
    """Every capped input assignment for one step of ``case_id`` from ``s``."""
    names = input_updates(p, case_id)
    if not names:
        yield {}
        return
    env = p.env(s)
    upd = p.case(case_id).update_map
    ranges = [_input_range(upd[v], env, input_cap) for v in names]
    for values in itertools.product(*ranges):
        yield dict(zip(names, values))


def one_step(
    p: Program, s: Sequence[int], input_cap: int = DEFAULT_INPUT_CAP
) -> Iterator[tuple[Choice, tuple[int, ...]]]:
    """All capped transitions out of a guarded state, in case then input order."""
    for case_id in p.case_ids:
        for inputs in admissible_inputs(p, s, case_id, input_cap):
            yield Choice.of(case_id, inputs), successors(p, s, case_id, inputs)


# -- strategies ----------------------------------------------------------------


@dataclass(frozen=True)
class Scripted:
    """A fixed list of decisions; running past its end is an error."""

    steps: tuple[Choice, ...]

    @classmethod
    def of(cls, steps: Sequence) -> "Scripted":
        out = []
        for st in steps:
            if isinstance(st, Choice):
                out.append(st)
            elif isinstance(st, int):
                out.append(Choice.of(st))
            else:
                case, inputs = st
                out.append(Choice.of(case, inputs))
        return cls(tuple(out))

    def chooser(self) -> Callable[[Program, tuple[int, ...], int], Choice]:
        def choose(p, state, step):
            if step >= len(self.steps):
                raise ExecutionError(f"step {step}: scripted strategy exhausted")
            return self.steps[step]

        return choose


@dataclass(frozen=True)
class SeededRandom:
    """Uniform case choice; inputs uniform in ``[lower, lower + input_cap]``."""

    seed: int
    input_cap: int = DEFAULT_INPUT_CAP

    def chooser(self) -> Callable[[Program, tuple[int, ...], int], Choice]:
        rng = random.Random(self.seed)

        def choose(p, state, step):
            case_id = rng.randint(1, len(p.cases))
            env = p.env(state)
            upd = p.case(case_id).update_map
            inputs = {}
            for v in input_updates(p, case_id):
                r = _input_range(upd[v], env, self.input_cap)
                inputs[v] = rng.randint(r.start, r.stop - 1)
            return Choice.of(case_id, inputs)

        return choose


def run(p: Program, start: Sequence[int], strat, max_steps: int) -> Trace:
    """Execute from ``start`` until the guard fails or ``max_steps`` steps were taken."""
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    state = tuple(start)
    p.env(state)
    choose = strat.chooser()
    states = [state]
    choices = []
    for step in range(max_steps):
        if not guard_holds(p, state):
            break
        choice = choose(p, state, step)
        try:
            state = successors(p, state, choice.case, choice.input_map)
        except ExecutionError as exc:
            raise ExecutionError(f"step {step}: {exc}") from None
        states.append(state)
        choices.append(choice)
    return Trace(tuple(states), tuple(choices), not guard_holds(p, state))


# -- exhaustive enumeration ------------------------------------------------------


def enumerate_segments(
    p: Program, box: Box, max_len: int, input_cap: int = DEFAULT_INPUT_CAP
) -> Iterator[Trace]:
    """Yield the maximal computational segments starting in ``box``.

    A segment is extended until it has ``max_len`` states or reaches a
    state where the guard fails.  Every segment of length ``2..max_len``
    from ``box`` is a prefix of exactly one yielded trace; distinct
    choices leading to the same state are merged.
    """
    if box.dim != p.nvars:
        raise ValueError(f"box has dimension {box.dim}, program has {p.nvars} variables")
    if max_len < 2:
        return

    def extend(states: list, choices: list) -> Iterator[Trace]:
        state = states[-1]
        if len(states) == max_len or not guard_holds(p, state):
            yield Trace(tuple(states), tuple(choices), not guard_holds(p, state))
            return
        seen = {}
        for choice, nxt in one_step(p, state, input_cap):
            seen.setdefault(nxt, choice)
        for nxt, choice in seen.items():
            states.append(nxt)
            choices.append(choice)
            yield from extend(states, choices)
            states.pop()
            choices.pop()

    for s in box.states():
        if guard_holds(p, s):
            yield from extend([s], [])


# -- vectorised frontier search -----------------------------------------------------


@dataclass
class CheckReport:
    passed: bool
    counterexample: Trace | None = None
    starts: int = 0
    pairs_checked: int = 0
    notes: list[str] = field(default_factory=list)


def _compile_case(p: Program, case_id: int, input_cap: int):
    """Vectorised successor function for one case.

    Takes an ``(N, n)`` array of guarded states and returns ``(M, n)``
    successor states plus the ``(M,)`` row index of each successor's
    parent (inputs fan a row out into several successors).
    """
    n = p.nvars
    upd = p.case(case_id).update_map
    idx = {v: i for i, v in enumerate(p.vars)}
    inputs = [v for v in p.vars if isinstance(upd.get(v), (InputAny, InputAtLeast))]

    def affine_eval(expr: Affine, arr: np.ndarray) -> np.ndarray:
        out = np.full(arr.shape[0], expr.const, dtype=np.int64)
        for v, c in expr.coeffs:
            out += c * arr[:, idx[v]]
        return out

    spans = [
        range(input_cap + 1) if isinstance(upd[v], InputAtLeast) else range(2 * input_cap + 1)
        for v in inputs
    ]
    offsets = list(itertools.product(*spans))

    def step(arr: np.ndarray):
        base = arr.copy()
        for v in p.vars:
            rhs = upd.get(v)
            if isinstance(rhs, Affine):
                base[:, idx[v]] = affine_eval(rhs, arr)
            elif isinstance(rhs, DivByConst):
                base[:, idx[v]] = np.floor_divide(arr[:, idx[rhs.var]], rhs.divisor)
        if not inputs:
            return base, np.arange(arr.shape[0])
        lows = []
        for v in inputs:
            rhs = upd[v]
            if isinstance(rhs, InputAtLeast):
                lows.append(affine_eval(rhs.lower, arr))
            else:
                lows.append(np.full(arr.shape[0], -input_cap, dtype=np.int64))
        outs = []
        for off in offsets:
            out = base.copy()
            for v, low, o in zip(inputs, lows, off):
                out[:, idx[v]] = low + o
            outs.append(out)
        # successor k of parent row r sits at position r * len(offsets) + k
        stacked = np.stack(outs, axis=1).reshape(-1, n)
        parents = np.repeat(np.arange(arr.shape[0]), len(offsets))
        return stacked, parents

    return step


def guard_mask(p: Program, arr: np.ndarray) -> np.ndarray:
    mask = np.ones(arr.shape[0], dtype=bool)
    for atom in p.guard:
        col = arr[:, p.index(atom.var)]
        mask &= col > atom.bound if atom.cmp == ">" else col >= atom.bound
    return mask


def _measure_matrix(p: Program, basis: Sequence[Affine]) -> tuple[np.ndarray, np.ndarray]:
    coef = np.zeros((p.nvars, len(basis)), dtype=np.int64)
    const = np.zeros(len(basis), dtype=np.int64)
    for j, f in enumerate(basis):
        for v, c in f.coeffs:
            coef[p.index(v), j] = c
        const[j] = f.const
    return coef, const


def replay_path(p: Program, states: Sequence[tuple[int, ...]], input_cap: int) -> Trace:
    """Recover the choices along a state path found by the frontier search."""
    choices = []
    for s, t in zip(states, states[1:]):
        for choice, nxt in one_step(p, s, input_cap):
            if nxt == t:
                choices.append(choice)
                break
        else:  # pragma: no cover - frontier and interpreter disagree
            raise AssertionError(f"no transition {s} -> {t}")
    return Trace(tuple(states), tuple(choices), not guard_holds(p, states[-1]))


@dataclass
class FrontierResult:
    path: list | None
    starts: int
    pairs: int = 0
    violations: int = 0


def _unique_rows(rows: np.ndarray) -> np.ndarray:
    """Indices of the first occurrence of each distinct row, in lexicographic row order."""
    lo = rows.min(axis=0)
    span = rows.max(axis=0) - lo + 1
    total = 1
    for s in span.tolist():
        total *= s
    if total >= 2**62:
        _, first = np.unique(rows, axis=0, return_index=True)
        return first
    # mixed-radix packing keeps lexicographic order and is much faster than a row sort
    key = np.zeros(rows.shape[0], dtype=np.int64)
    for k in range(rows.shape[1]):
        key = key * span[k] + (rows[:, k] - lo[k])
    _, first = np.unique(key, return_index=True)
    return first


def frontier_search(
    p: Program,
    box: Box,
    max_len: int,
    input_cap: int,
    bad: Callable[[np.ndarray, np.ndarray], np.ndarray],
    batch: int = 512,
    exhaustive: bool = False,
) -> FrontierResult:
    """Breadth-first search over ``(start, state)`` pairs reachable from ``box``.

    ``bad(starts, ends)`` flags pairs that violate the property under test.
    The reported counterexample has the lexicographically least start, then
    the fewest steps, then the least end state.  Unless ``exhaustive`` is
    set, the search stops after the first batch of starts containing a
    violation, so ``violations`` is then a lower bound.
    """
    steps = [_compile_case(p, c, input_cap) for c in p.case_ids]
    all_starts = np.array(list(box.states()), dtype=np.int64).reshape(-1, p.nvars)
    all_starts = all_starts[guard_mask(p, all_starts)]
    result = FrontierResult(None, all_starts.shape[0])
    for b0 in range(0, all_starts.shape[0], batch):
        starts = all_starts[b0 : b0 + batch]
        # layer rows: start index (into ``starts``) and current state
        sid = np.arange(starts.shape[0])
        cur = starts.copy()
        layers = [(sid, cur, None)]
        found = None
        for depth in range(1, max_len):
            live = guard_mask(p, cur)
            if not live.any():
                break
            src_rows = np.nonzero(live)[0]
            nxt_parts, par_parts = [], []
            for step in steps:
                out, par = step(cur[src_rows])
                nxt_parts.append(out)
                par_parts.append(src_rows[par])
            nxt = np.concatenate(nxt_parts)
            par = np.concatenate(par_parts)
            nsid = sid[par]
            first = _unique_rows(np.concatenate([nsid[:, None], nxt], axis=1))
            sid, cur, par = nsid[first], nxt[first], par[first]
            layers.append((sid, cur, par))
            result.pairs += cur.shape[0]
            flags = bad(starts[sid], cur)
            result.violations += int(flags.sum())
            if flags.any():
                rows = np.nonzero(flags)[0]
                # rows are sorted by (start, state); keep the least start
                cand = (depth, int(sid[rows[0]]), int(rows[0]))
                if found is None or cand[1] < found[1]:
                    found = cand
        if found is not None and result.path is None:
            depth, _, row = found
            path = []
            for d in range(depth, 0, -1):
                s_ids, states, parents = layers[d]
                path.append(tuple(int(v) for v in states[row]))
                row = int(parents[row])
            path.append(tuple(int(v) for v in layers[0][1][row]))
            result.path = path[::-1]
            if not exhaustive:
                return result
    return result


def check_segment_decrease(
    p: Program,
    basis: Sequence[Affine],
    box: Box,
    max_len: int,
    input_cap: int = DEFAULT_INPUT_CAP,
) -> CheckReport:
    """Check that along every segment some measure ends strictly below where it started.

    Every segment of length ``2..max_len`` whose first state lies in
    ``box`` is examined (inputs capped).  The property depends only on the
    first and last state, so states reached twice from the same start are
    merged.
    """
    if box.dim != p.nvars:
        raise ValueError(f"box has dimension {box.dim}, program has {p.nvars} variables")
    basis = list(basis)
    if not basis:
        raise ValueError("measure basis is empty")
    coef, const = _measure_matrix(p, basis)

    def bad(starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
        before = starts @ coef + const
        after = ends @ coef + const
        return ~(after < before).any(axis=1)

    res = frontier_search(p, box, max_len, input_cap, bad)
    report = CheckReport(res.path is None, starts=res.starts, pairs_checked=res.pairs)
    if res.path is not None:
        report.counterexample = replay_path(p, res.path, input_cap)
    return report
