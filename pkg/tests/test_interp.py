import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from termlab.interp import (
    Box,
    Choice,
    Scripted,
    SeededRandom,
    admissible_inputs,
    check_segment_decrease,
    enumerate_segments,
    run,
)
from termlab.program import Affine, ExecutionError, guard_holds, successors

from conftest import PROGRAMS, load


def test_prog6_run():
    t = run(load("prog6"), (5, -1), Scripted.of([1] * 10), 10)
    # x := x + y reads the pre-state y, so x drops by 1, 2, 3, ...
    assert t.states == ((5, -1), (4, -2), (2, -3), (-1, -4))
    assert t.terminated


def test_prog3_minimal_state_stops_after_one_step():
    p = load("prog3")
    for seed in range(10):
        t = run(p, (1, 1, 1), SeededRandom(seed), 50)
        assert t.terminated and len(t) == 2


def test_prog4_scripted_input():
    t = run(load("prog4"), (1, 1, 1, 1), Scripted.of([Choice.of(2, {"y": 2})]), 5)
    assert t.states[1] == (1, 0, 2, 1)
    assert t.terminated


def test_script_exhausted_names_step():
    with pytest.raises(ExecutionError, match="step 2"):
        run(load("prog5"), (50, 50), Scripted.of([1, 1]), 10)


def test_invalid_scripted_input_names_step():
    with pytest.raises(ExecutionError, match="step 0"):
        run(load("prog4"), (3, 3, 3, 3), Scripted.of([Choice.of(1, {"x": 0})]), 1)


@pytest.mark.parametrize("name", PROGRAMS)
def test_seeded_runs_are_reproducible_and_valid(name):
    p = load(name)
    start = tuple(3 for _ in p.vars)
    for seed in range(5):
        t1 = run(p, start, SeededRandom(seed), 30)
        t2 = run(p, start, SeededRandom(seed), 30)
        assert t1 == t2
        for s, c, nxt in zip(t1.states, t1.choices, t1.states[1:]):
            assert successors(p, s, c.case, c.input_map) == nxt
        assert t1.terminated == (not guard_holds(p, t1.end))


def test_segment_counts():
    assert len(list(enumerate_segments(load("prog5"), Box.uniform(1, 2, 2), 2))) == 8
    assert len(list(enumerate_segments(load("prog3"), Box.uniform(1, 1, 3), 2))) == 3
    segs = list(enumerate_segments(load("prog6"), Box.point((1, 0)), 3))
    assert [s.states for s in segs] == [((1, 0), (1, -1), (0, -2))]


def naive_prefixes(p, box, max_len, cap):
    """Every segment (as a state tuple) of length 2..max_len, by plain recursion."""
    out = set()

    def go(states):
        if len(states) >= 2:
            out.add(tuple(states))
        if len(states) == max_len or not guard_holds(p, states[-1]):
            return
        for case in p.case_ids:
            for inputs in admissible_inputs(p, states[-1], case, cap):
                go(states + [successors(p, states[-1], case, inputs)])

    for s in box.states():
        if guard_holds(p, s):
            go([s])
    return out


@pytest.mark.parametrize(
    "name,lo,hi,max_len,cap",
    [("prog2", -1, 2, 4, 3), ("prog3", 1, 2, 4, 3), ("prog4", 1, 2, 3, 1), ("prog5", 0, 3, 5, 3),
     ("prog6", -2, 2, 5, 3), ("not_transitive", -1, 6, 4, 3)],
)
def test_enumeration_matches_naive_recursion(name, lo, hi, max_len, cap):
    p = load(name)
    box = Box.uniform(lo, hi, p.nvars)
    segs = list(enumerate_segments(p, box, max_len, cap))
    got = set()
    for t in segs:
        for k in range(2, len(t) + 1):
            got.add(t.states[:k])
        for s, c, nxt in zip(t.states, t.choices, t.states[1:]):
            assert successors(p, s, c.case, c.input_map) == nxt
    assert len({t.states for t in segs}) == len(segs)
    assert got == naive_prefixes(p, box, max_len, cap)


def brute_decrease(p, basis, box, max_len, cap):
    for seg in naive_prefixes(p, box, max_len, cap):
        a, b = p.env(seg[0]), p.env(seg[-1])
        if not any(f.evaluate(b) < f.evaluate(a) for f in basis):
            return seg
    return None


def test_segment_decrease_prog4():
    p = load("prog4")
    basis = [Affine.var(v) for v in "wxy"]
    assert check_segment_decrease(p, basis, Box.uniform(1, 4, 4), 4, 3).passed


def test_segment_decrease_counterexample_is_real():
    p = load("prog4")
    rep = check_segment_decrease(p, [Affine.var("x")], Box.uniform(1, 3, 4), 3, 2)
    assert not rep.passed
    cx = rep.counterexample
    env0, env1 = p.env(cx.start), p.env(cx.end)
    assert env1["x"] >= env0["x"]
    for s, c, nxt in zip(cx.states, cx.choices, cx.states[1:]):
        assert successors(p, s, c.case, c.input_map) == nxt


@pytest.mark.parametrize("name", ["prog3", "prog5", "prog6", "not_transitive"])
def test_segment_decrease_agrees_with_brute_force(name):
    p = load(name)
    for basis in ([Affine.var(p.vars[0])], [Affine.var(v) for v in p.vars]):
        box = Box.uniform(-1, 4, p.nvars)
        rep = check_segment_decrease(p, basis, box, 4, 2)
        assert rep.passed == (brute_decrease(p, basis, box, 4, 2) is None)


@settings(max_examples=50, deadline=None)
@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(0, 2**32))
def test_box_contains_its_states(lo, width, seed):
    box = Box.uniform(lo, lo + abs(width), 2)
    states = list(box.states())
    assert len(states) == box.size()
    assert states == sorted(states)
    assert all(s in box for s in states)
