import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wellmix.errors import PartialFunction, UnknownVariable
from wellmix.graph import make_graph
from wellmix.info import (JointTable, edge_joint, edge_profile, entropy, exact_independent,
                          is_function_of, map_variable, mutual_info, triple_info)

CASES = [(2, 1, 1), (3, 1, 1), (2, 2, 1), (5, 1, 1), (2, 1, 2), (3, 1, 2), (2, 2, 2)]


def naive_entropy(rows, weights, cols):
    counts = Counter()
    for r, w in zip(rows, weights):
        counts[tuple(r[c] for c in cols)] += w
    total = sum(counts.values())
    return -sum(c / total * math.log2(c / total) for c in counts.values())


@st.composite
def tables(draw):
    nvars = 3
    outcomes = draw(st.dictionaries(
        st.tuples(*[st.integers(0, 2)] * nvars), st.integers(1, 6), min_size=1, max_size=20))
    return JointTable(("A", "B", "C"), outcomes)


@given(tables())
def test_entropy_against_naive(t):
    rows = [o for o, _ in t.items()]
    ws = [w for _, w in t.items()]
    for cols in [(0,), (1,), (0, 1), (0, 1, 2)]:
        names = tuple("ABC"[c] for c in cols)
        assert math.isclose(entropy(t, names), naive_entropy(rows, ws, cols), abs_tol=1e-12)
    h_a_given_b = naive_entropy(rows, ws, (0, 1)) - naive_entropy(rows, ws, (1,))
    assert math.isclose(entropy(t, "A", "B"), h_a_given_b, abs_tol=1e-12)


@given(tables())
def test_shannon_inequalities(t):
    assert mutual_info(t, "A", "B") >= -1e-12
    assert mutual_info(t, "A", "B", "C") >= -1e-12
    assert entropy(t, ("A", "B")) <= entropy(t, "A") + entropy(t, "B") + 1e-12
    ti = triple_info(t, "A", "B", "C")
    assert math.isclose(ti, triple_info(t, "B", "C", "A"), abs_tol=1e-9)


@given(tables())
def test_exact_independence_agrees_with_fraction_oracle(t):
    probs = t.probs()
    pa, pb = Counter(), Counter()
    for (a, b, _), p in probs.items():
        pa[a] += p
        pb[b] += p
    pab = Counter()
    for (a, b, _), p in probs.items():
        pab[(a, b)] += p
    naive = all(pab.get((a, b), Fraction(0)) == pa[a] * pb[b] for a in pa for b in pb)
    assert exact_independent(t, "A", "B") == naive
    if naive:
        assert abs(mutual_info(t, "A", "B")) < 1e-12


def test_conditional_independence_xor():
    rows = [(a, b, a ^ b) for a in (0, 1) for b in (0, 1)]
    t = JointTable.uniform(("A", "B", "C"), rows)
    assert exact_independent(t, "A", "B")
    assert not exact_independent(t, "A", "B", "C")
    assert math.isclose(triple_info(t, "A", "B", "C"), -1.0)
    assert is_function_of(t, "C", ("A", "B"))
    assert not is_function_of(t, "C", "A")


@pytest.mark.parametrize("p,k,d", CASES)
def test_edge_profile(p, k, d):
    g = make_graph(p, k, d)
    prof = edge_profile(g).values
    n = math.log2(g.q)
    assert abs(prof["H_X"] - 2 * n) <= 1e-10
    assert abs(prof["H_Y"] - (d + 1) * n) <= 1e-10
    assert abs(prof["H_XY"] - (d + 2) * n) <= 1e-10
    assert abs(prof["I"] - n) <= 1e-10


def test_table_normalizes_and_serializes():
    t = JointTable(("A",), {(0,): 2, (1,): 4, (2,): 0})
    assert t.total == 3 and t.prob((1,)) == Fraction(2, 3)
    d = t.to_dict()
    assert d["variables"] == ["A"]
    assert t.to_json() == JointTable(("A",), {(1,): 2, (0,): 1}).to_json()


def test_map_variable_errors():
    t = edge_joint(make_graph(2, 1, 1))
    with pytest.raises(PartialFunction):
        map_variable(t, "W", lambda r: None)
    with pytest.raises(PartialFunction):
        map_variable(t, "W", lambda r: r["missing"])
    with pytest.raises(UnknownVariable):
        exact_independent(t, "X", "Q")


def test_bad_tables():
    with pytest.raises(ValueError):
        JointTable(("A",), {})
    with pytest.raises(ValueError):
        JointTable(("A", "A"), {(0, 0): 1})
    with pytest.raises(ValueError):
        JointTable(("A",), {(0, 1): 1})
