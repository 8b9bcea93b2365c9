import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from termlab.program import (
    Affine,
    Case,
    DivByConst,
    DslSemanticError,
    DslSyntaxError,
    ExecutionError,
    GuardAtom,
    InputAny,
    InputAtLeast,
    Program,
    guard_holds,
    parse,
    parse_affine,
    parse_state,
    pretty,
    successors,
)

from conftest import PROGRAMS, load


@pytest.mark.parametrize("name", PROGRAMS)
def test_corpus_round_trips(name):
    p = load(name)
    assert parse(pretty(p)) == p


def test_prog6_single_case_without_header():
    p = load("prog6")
    assert p.case_ids == (1,)
    assert successors(p, (5, -1), 1, {}) == (4, -2)


def test_simultaneous_assignment():
    p = load("prog5")
    # x := y - 2 and y := x + 1 both read the pre-state
    assert successors(p, (3, 7), 2, {}) == (5, 4)


@pytest.mark.parametrize(
    "name,state,case,expected",
    [("prog5", (4, 7), 1, (3, 4)), ("prog5", (4, 7), 2, (5, 5)), ("prog2", (1, 1), 1, (11, 0))],
)
def test_successor_examples(name, state, case, expected):
    assert successors(load(name), state, case, {}) == expected


def test_guard_only_constrains_listed_vars():
    assert guard_holds(load("prog6"), (3, -100))
    assert guard_holds(load("prog3"), (1, 1, 1))
    assert not guard_holds(load("prog3"), (0, 5, 5))


def test_case_without_updates_rejected():
    with pytest.raises(DslSemanticError):
        Program("p", ("x",), (GuardAtom("x", ">", 0),), (Case(1, ()),))


def test_floor_division():
    p = load("not_transitive")
    assert successors(p, (5,), 1, {}) == (2,)
    assert successors(p, (1,), 1, {}) == (0,)


def test_input_lower_bound_enforced():
    p = load("prog4")
    assert successors(p, (1, 1, 1, 1), 1, {"x": 2}) == (0, 2, 1, 1)
    with pytest.raises(ExecutionError, match="x"):
        successors(p, (1, 1, 1, 1), 1, {"x": 1})
    with pytest.raises(ExecutionError):
        successors(p, (1, 1, 1, 1), 1, {})


def test_guard_false_rejected():
    p = load("prog3")
    assert not guard_holds(p, (0, 1, 1))
    with pytest.raises(ExecutionError):
        successors(p, (0, 1, 1), 1, {})


def test_syntax_error_has_position():
    with pytest.raises(DslSyntaxError) as exc:
        parse("program p\nvars x : int\nwhile x > 0\n  x := x +\n")
    assert exc.value.line == 4


@pytest.mark.parametrize(
    "text",
    [
        "program p\nvars x : int\nwhile y > 0\n  x := x - 1\n",
        "program p\nvars x x : int\nwhile x > 0\n  x := x - 1\n",
        "program p\nvars x : int\nwhile x > 0\n  x := x - 1\n  x := x - 2\n",
        "program p\nvars x : int\nwhile x > 0\n  x := z\n",
    ],
)
def test_semantic_errors(text):
    with pytest.raises(DslSemanticError):
        parse(text)


def test_parse_affine_and_state():
    assert parse_affine("x + 2*y - 1") == Affine.of({"x": 1, "y": 2}, -1)
    assert parse_affine("-x") == Affine.of({"x": -1})
    assert parse_state("(5, -1)") == (5, -1)
    assert parse_state("5,-1") == (5, -1)


# -- random programs ----------------------------------------------------------------------

NAMES = ["a", "b", "c", "d"]


@st.composite
def programs(draw):
    nv = draw(st.integers(1, 4))
    names = NAMES[:nv]
    small = st.integers(-20, 20)

    def affine():
        coeffs = draw(st.dictionaries(st.sampled_from(names), st.integers(-3, 3), max_size=nv))
        return Affine.of(coeffs, draw(small))

    guard_vars = draw(st.lists(st.sampled_from(names), min_size=1, unique=True))
    guard = tuple(GuardAtom(v, draw(st.sampled_from([">", ">="])), draw(small)) for v in guard_vars)
    cases = []
    for cid in range(1, draw(st.integers(1, 3)) + 1):
        targets = draw(st.lists(st.sampled_from(names), min_size=1, unique=True))
        ups = []
        for t in targets:
            kind = draw(st.integers(0, 3))
            if kind == 0:
                rhs = InputAny()
            elif kind == 1:
                rhs = InputAtLeast(affine())
            elif kind == 2:
                rhs = DivByConst(draw(st.sampled_from(names)), draw(st.integers(2, 5)))
            else:
                rhs = affine()
            ups.append((t, rhs))
        cases.append(Case(cid, tuple(ups)))
    return Program("gen", tuple(names), guard, tuple(cases))


@settings(max_examples=300, deadline=None)
@given(programs())
def test_pretty_parse_round_trip(p):
    assert parse(pretty(p)) == p
