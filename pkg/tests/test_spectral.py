import math

import numpy as np
import pytest

from wellmix._accel import BACKENDS, HAVE_NUMBA, use_backend
from wellmix.errors import NotSymmetric, TooLargeToMaterialize
from wellmix.graph import make_graph
from wellmix.spectral import (adjacency_spectrum, amplified_lambda2, build_mmt, closed_form_mmt,
                              cluster_eigenvalues, expander_check, expected_mmt_spectrum,
                              matrix_csv, spectrum)

CASES = [(2, 1, 1), (3, 1, 1), (2, 2, 1), (5, 1, 1), (2, 1, 2), (3, 1, 2), (2, 2, 2)]


def dense_incidence(g):
    m = np.zeros((g.n_left, g.n_right), dtype=np.int64)
    left, right = g.edge_arrays
    m[left, right] = 1
    return m


@pytest.mark.parametrize("p,k,d", CASES)
def test_mmt_equals_dense_product_and_closed_form(p, k, d):
    g = make_graph(p, k, d)
    m = dense_incidence(g)
    mmt = build_mmt(g)
    assert np.array_equal(mmt, m @ m.T)
    assert np.array_equal(mmt, closed_form_mmt(g))


@pytest.mark.parametrize("p,k,d", CASES)
def test_spectrum_matches_expected_and_eigvalsh(p, k, d):
    g = make_graph(p, k, d)
    chk = expander_check(g)
    q = g.q
    got = [(round(v), mult) for v, mult in chk.report.eigenvalues]
    assert got == expected_mmt_spectrum(q, d)
    for (v, _), (e, _) in zip(chk.report.eigenvalues, expected_mmt_spectrum(q, d)):
        assert abs(v - e) <= 1e-9 * max(1, e)
    ref = np.sort(np.linalg.eigvalsh(build_mmt(g).astype(float)))[::-1]
    flat = [v for v, mult in chk.report.eigenvalues for _ in range(mult)]
    assert np.allclose(flat, ref, atol=1e-8)
    assert chk.expander_ok and chk.lambda1_matches and chk.lambda2_matches and chk.closed_form_ok
    assert math.isclose(chk.report.lambda2, q ** (d / 2), rel_tol=1e-9)


def test_adjacency_spectrum_matches_full_adjacency():
    g = make_graph(3, 1, 1)
    m = dense_incidence(g).astype(float)
    n_l, n_r = m.shape
    a = np.zeros((n_l + n_r, n_l + n_r))
    a[:n_l, n_l:] = m
    a[n_l:, :n_l] = m.T
    ref = np.sort(np.linalg.eigvalsh(a))[::-1]
    rep = spectrum(build_mmt(g), n_right=g.n_right)
    flat = [v for v, mult in rep.adjacency for _ in range(mult)]
    assert len(flat) == n_l + n_r
    assert np.allclose(flat, ref, atol=1e-8)


def test_amplified_lambda2_against_tensor_product():
    g = make_graph(2, 1, 1)
    m = dense_incidence(g).astype(float)
    c = 4
    mbar = np.kron(m, np.ones((c, c)))
    n_l, n_r = mbar.shape
    a = np.zeros((n_l + n_r, n_l + n_r))
    a[:n_l, n_l:] = mbar
    a[n_l:, :n_l] = mbar.T
    ref = np.sort(np.linalg.eigvalsh(a))[::-1]
    assert math.isclose(ref[1], amplified_lambda2(math.sqrt(2), 2), rel_tol=1e-9)


@pytest.mark.parametrize("backend", [b for b in BACKENDS if b == "numpy" or HAVE_NUMBA])
def test_backends_give_same_spectrum(backend):
    with use_backend(backend):
        rep = expander_check(make_graph(2, 2, 1)).report
    assert [(round(v), m) for v, m in rep.eigenvalues] == [(16, 1), (4, 12), (0, 3)]


def test_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        spectrum(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotSymmetric):
        spectrum(np.ones((2, 3)))


def test_size_guard():
    with pytest.raises(TooLargeToMaterialize):
        build_mmt(make_graph(67, 1, 1))


def test_clustering_and_zero_padding():
    assert cluster_eigenvalues([3.0, 1.0, 3.0 + 1e-9], 1e-6)[0][1] == 2
    adj = adjacency_spectrum([4.0, 1.0, 0.0], n_right=5, gap=1e-9)
    assert sum(m for _, m in adj) == 3 + 5
    assert adj[0] == (2.0, 1) and adj[-1] == (-2.0, 1)


def test_matrix_csv_shape():
    text = matrix_csv(build_mmt(make_graph(2, 1, 1)))
    rows = text.strip().splitlines()
    assert len(rows) >= 4
