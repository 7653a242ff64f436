import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wellmix.errors import DuplicateVertex, InvalidVertexId, TooLargeToMaterialize
from wellmix.graph import make_graph, neighbors
from wellmix.mixing import (SubsetPair, WeightedSubsets, exhaustive_biclique_search,
                            induced_edge_count, mixing_check, mixing_fuzz, union_lower_bound)


def dense_incidence(g):
    m = np.zeros((g.n_left, g.n_right), dtype=np.int64)
    left, right = g.edge_arrays
    m[left, right] = 1
    return m


def numeric_lambda2(m):
    s = np.linalg.svd(m.astype(float), compute_uv=False)
    return float(s[1])


@st.composite
def subset_pairs(draw):
    g = make_graph(*draw(st.sampled_from([(2, 1, 1), (3, 1, 1), (2, 2, 1), (2, 1, 2)])))
    left = draw(st.sets(st.integers(0, g.n_left - 1)))
    right = draw(st.sets(st.integers(0, g.n_right - 1)))
    return g, SubsetPair.of(g, left, right)


@given(subset_pairs())
def test_induced_count_and_bound_against_dense_oracle(args):
    g, pair = args
    m = dense_incidence(g)
    rows, cols = sorted(pair.left), sorted(pair.right)
    e = int(m[np.ix_(rows, cols)].sum()) if rows and cols else 0
    assert induced_edge_count(g, pair) == e
    lam = numeric_lambda2(m)
    assert math.isclose(lam, g.q ** (g.d / 2), rel_tol=1e-9)
    n_e = g.n_edges
    lhs = e / n_e
    rhs = len(rows) * len(cols) / (g.n_left * g.n_right) + lam * math.sqrt(len(rows) * len(cols)) / n_e
    assert lhs <= rhs + 1e-12
    rep = mixing_check(g, pair)
    assert rep.holds and rep.lhs == Fraction(e, n_e)


@given(st.integers(0, 2**31), st.sampled_from([1, 2]))
def test_weighted_count_matches_explicit_amplified_graph(seed, m):
    g = make_graph(2, 1, 1, m=m)
    c = g.cluster_size
    rng = np.random.default_rng(seed)
    sel_l = rng.integers(0, 2, size=g.n_left * c)
    sel_r = rng.integers(0, 2, size=g.n_right * c)
    mbar = np.kron(dense_incidence(g.base()), np.ones((c, c), dtype=np.int64))
    explicit = int(sel_l @ mbar @ sel_r)
    ws = WeightedSubsets(sel_l.reshape(-1, c).sum(1), sel_r.reshape(-1, c).sum(1))
    rep = mixing_check(g, ws)
    assert rep.edges_induced == explicit
    assert rep.left_size == sel_l.sum() and rep.right_size == sel_r.sum()
    assert math.isclose(numeric_lambda2(mbar), 2**m * math.sqrt(2), rel_tol=1e-9)
    assert rep.holds


def test_full_sets_are_tight():
    g = make_graph(3, 1, 1)
    rep = mixing_check(g, SubsetPair.full(g))
    assert rep.lhs == 1 and rep.rhs_main == 1 and rep.holds


@pytest.mark.parametrize("m", [0, 2])
def test_fuzz_is_deterministic_and_clean(m):
    g = make_graph(2, 2, 1, m=m)
    a = mixing_fuzz(g, 300, seed=7)
    b = mixing_fuzz(g, 300, seed=7)
    assert a.violations == 0
    assert a.to_csv() == b.to_csv()
    assert mixing_fuzz(g, 300, seed=8).to_csv() != a.to_csv()


def test_fuzz_trial_matches_single_check():
    g = make_graph(3, 1, 1, m=1)
    summary = mixing_fuzz(g, 5, seed=11)
    for t in summary.trials:
        assert t.report.holds
        assert t.prob in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))


def test_too_small_lambda_is_caught():
    g = make_graph(3, 1, 1)
    # a single edge is far denser than the average
    pair = SubsetPair.of(g, [0], [0])
    assert induced_edge_count(g, pair) == 1
    assert not mixing_check(g, pair, lambda2=0.0).holds


def test_subset_validation():
    g = make_graph(2, 1, 1)
    with pytest.raises(InvalidVertexId):
        SubsetPair.of(g, [4], [])
    with pytest.raises(DuplicateVertex):
        SubsetPair.of(g, [1, 1], [])
    with pytest.raises(InvalidVertexId):
        mixing_check(make_graph(2, 1, 1, m=1), WeightedSubsets(np.full(4, 3), np.zeros(4, int)))


@given(st.sampled_from([(2, 1, 1), (3, 1, 1), (2, 1, 2), (5, 1, 1)]), st.data())
def test_union_bound_against_bruteforce(params, data):
    g = make_graph(*params)
    ids = data.draw(st.lists(st.integers(0, g.n_right - 1), min_size=1, max_size=6, unique=True))
    union = set()
    for y in ids:
        union |= set(neighbors(g, g.poly_from_id(y)))
    ub = union_lower_bound(g, ids, cap=g.d)
    assert ub.actual_union == len(union)
    assert ub.ie_bound == len(ids) * g.q - math.comb(len(ids), 2) * g.d
    assert ub.holds


def naive_max_biclique(g, min_a, min_b):
    m = dense_incidence(g)
    best = None
    for r in range(min_b, g.n_right + 1):
        for cols in itertools.combinations(range(g.n_right), r):
            common = np.flatnonzero(m[:, cols].all(axis=1))
            if len(common) >= min_a:
                if best is None or len(common) * r > best:
                    best = len(common) * r
    return best


@pytest.mark.parametrize("p,d", [(2, 1), (3, 1)])
@pytest.mark.parametrize("min_a,min_b", [(2, 2), (1, 1), (1, 3), (3, 1), (1, 2)])
def test_biclique_matches_naive(p, d, min_a, min_b):
    g = make_graph(p, 1, d)
    found = exhaustive_biclique_search(g, min_a, min_b)
    expected = naive_max_biclique(g, min_a, min_b)
    if expected is None:
        assert found is None
        return
    assert found.edges == expected and found.a >= min_a and found.b >= min_b
    m = dense_incidence(g)
    assert m[np.ix_(found.left, found.right)].all()


def test_biclique_pruned_mode():
    g = make_graph(5, 1, 1)
    assert exhaustive_biclique_search(g, 2, 2) is None
    with pytest.raises(TooLargeToMaterialize):
        exhaustive_biclique_search(g, 1, 2)
