import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from termlab.ramsey import (
    EdgeColoring,
    SearchBudgetExceeded,
    all_colorings,
    build_extremal,
    classical_ramsey_number,
    find_homogeneous,
    format_coloring,
    is_transitive,
    longest_mip,
    monotone_subsequence,
    parse_coloring,
    ramsey_bounds,
    transitive_colorings,
    transitivity_witness,
    trt_size,
)


def brute_mip_paths(col: EdgeColoring) -> int:
    """Exhaustive over vertex subsets; only for tiny n."""
    best = 1
    for r in range(2, col.n + 1):
        for s in itertools.combinations(range(1, col.n + 1), r):
            cs = {col(a, b) for a, b in zip(s, s[1:])}
            if len(cs) == 1:
                best = max(best, r)
    return best


def pentagon() -> EdgeColoring:
    return EdgeColoring.from_function(5, 2, lambda i, j: 1 if (j - i) % 5 in (1, 4) else 2)


def test_transitivity_examples():
    assert is_transitive(EdgeColoring.constant(5, 1, 2))
    col = EdgeColoring.from_mapping(3, 2, {(1, 2): 2, (2, 3): 2, (1, 3): 1})
    assert transitivity_witness(col) == (1, 2, 3)
    assert is_transitive(build_extremal(3, 2))


def test_mip_examples():
    assert longest_mip(EdgeColoring.constant(4, 1, 1)).length == 4
    assert longest_mip(build_extremal(3, 2)).length == 2
    single = longest_mip(EdgeColoring(1, 1, ()))
    assert single.length == 1 and single.path == (1,)


def test_mip_path_is_monochromatic_and_increasing():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(2, 7)
        col = EdgeColoring(n, 3, tuple(rng.randint(1, 3) for _ in range(n * (n - 1) // 2)))
        m = longest_mip(col)
        assert list(m.path) == sorted(set(m.path))
        assert all(col(a, b) == m.color for a, b in zip(m.path, m.path[1:]))


def test_mip_agrees_with_brute_force():
    rng = random.Random(11)
    for _ in range(1000):
        n = rng.randint(1, 7)
        c = rng.randint(1, 3)
        col = EdgeColoring(n, c, tuple(rng.randint(1, c) for _ in range(n * (n - 1) // 2)))
        assert longest_mip(col).length == brute_mip_paths(col)


def test_trt_formula():
    assert trt_size(3, 2) == 5
    assert all(trt_size(2, c) == 2 for c in range(1, 6))
    with pytest.raises(ValueError):
        trt_size(1, 2)
    with pytest.raises(ValueError):
        build_extremal(3, 0)


@pytest.mark.parametrize("k,c", [(k, c) for k in range(2, 6) for c in range(1, 4)])
def test_construction_is_extremal(k, c):
    col = build_extremal(k, c)
    assert col.n == (k - 1) ** c
    assert is_transitive(col)
    assert longest_mip(col).length == k - 1


def test_trt_3_2_exhaustive():
    transitive = [col for col in all_colorings(5, 2) if is_transitive(col)]
    assert transitive and all(longest_mip(col).length >= 3 for col in transitive)
    k4 = [col for col in all_colorings(4, 2) if is_transitive(col)]
    assert any(longest_mip(col).length == 2 for col in k4)


@pytest.mark.parametrize("n", range(1, 7))
def test_transitive_enumeration_matches_filter(n):
    fast = {col.colors for col in transitive_colorings(n, 2)}
    slow = {col.colors for col in all_colorings(n, 2) if is_transitive(col)}
    assert fast == slow
    assert len(fast) == __import__("math").factorial(n)


@pytest.mark.parametrize("n", range(2, 10))
def test_vector_map_injective(n):
    """Distinct vertices get distinct length vectors on every transitive 2-coloring."""
    for col in transitive_colorings(n, 2):
        m = longest_mip(col)
        vecs = list(m.vectors.values())
        assert len(set(vecs)) == n
        k = m.length + 1
        assert all(1 <= a <= k - 1 for v in vecs for a in v)


def test_homogeneous_examples():
    assert find_homogeneous(pentagon(), 3) is None
    assert find_homogeneous(EdgeColoring.constant(3, 1, 2), 3) == (1, 2, 3)
    with pytest.raises(SearchBudgetExceeded):
        find_homogeneous(EdgeColoring.constant(40, 1, 1), 20, budget=1000)


def test_every_k6_coloring_has_a_triangle():
    triangles = list(itertools.combinations(range(1, 7), 3))
    for col in all_colorings(6, 2):
        assert any(col(a, b) == col(b, c) == col(a, c) for a, b, c in triangles)


def test_classical_r32():
    n, witness = classical_ramsey_number(3, 2)
    assert n == 6
    assert witness.n == 5 and find_homogeneous(witness, 3) is None
    lo, hi = ramsey_bounds(3, 2)
    assert lo <= n <= hi and hi == 32


def test_monotone_examples():
    r = monotone_subsequence((2, 1, 4, 3, 5), 3)
    assert r.direction == "increasing" and r.values == (2, 4, 5)
    r = monotone_subsequence((3, 2, 1), 3)
    assert r.direction == "decreasing" and r.values == (3, 2, 1)
    assert len(monotone_subsequence((2, 1, 4, 3), 3).values) == 2
    with pytest.raises(ValueError):
        monotone_subsequence((1, 1, 2), 2)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-50, 50), unique=True, min_size=1, max_size=12), st.integers(2, 4))
def test_erdos_szekeres(seq, k):
    r = monotone_subsequence(seq, k)
    vals = list(r.values)
    assert vals == [seq[i] for i in r.indices]
    assert vals == sorted(vals) or vals == sorted(vals, reverse=True)
    if len(seq) >= (k - 1) ** 2 + 1:
        assert len(vals) == k


def test_coloring_file_round_trip():
    col = build_extremal(3, 2)
    assert parse_coloring(format_coloring(col)) == col
    with pytest.raises(ValueError, match="not total"):
        parse_coloring("3 2\n1 2 1\n")
