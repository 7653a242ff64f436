import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from wellmix import kernels
from wellmix._accel import BACKENDS, HAVE_NUMBA, get_backend, set_backend, use_backend
from wellmix.field import make_field
from wellmix.graph import make_graph

backends = pytest.mark.parametrize(
    "backend", [b for b in BACKENDS if b == "numpy" or HAVE_NUMBA])


@backends
def test_eval_table_matches_scalar(backend):
    g = make_graph(3, 2, 2)
    F = g.field
    add, mul = F.tables()
    with use_backend(backend):
        ev = kernels.eval_table(g.coeff_matrix, add, mul, g.q)
    for y in range(0, g.n_right, 37):
        s = g.poly_from_id(y)
        for x in range(g.q):
            acc = 0
            for i, c in enumerate(s.coeffs):
                acc = F.add(acc, F.mul(c, F.pow(x, i)))
            assert ev[y, x] == acc


@backends
def test_max_common_picks_first_maximum(backend):
    ev = np.array([[0, 1, 2], [0, 1, 0], [0, 0, 2], [1, 1, 2]])
    with use_backend(backend):
        assert kernels.max_common(ev) == (2, 0, 1)
        assert kernels.max_common(ev[:1]) == (-1, -1, -1)


@given(arrays(np.int64, st.tuples(st.integers(2, 12), st.integers(1, 6)), elements=st.integers(0, 2)))
def test_max_common_backends_agree(ev):
    naive = max((int((ev[i] == ev[j]).sum()), i, j)
                for i in range(len(ev)) for j in range(i + 1, len(ev)))
    best = naive[0]
    first = min((i, j) for i in range(len(ev)) for j in range(i + 1, len(ev))
                if (ev[i] == ev[j]).sum() == best)
    for b in BACKENDS:
        if b == "numba" and not HAVE_NUMBA:
            continue
        with use_backend(b):
            assert kernels.max_common(ev) == (best,) + first


@backends
def test_path_counts_is_m_mt(backend):
    g = make_graph(2, 2, 1)
    dense = np.zeros((g.n_left, g.n_right), dtype=np.int64)
    left, right = g.edge_arrays
    dense[left, right] = 1
    with use_backend(backend):
        mmt = kernels.path_counts(g.evals, g.q)
    assert np.array_equal(mmt, dense @ dense.T)


@backends
@pytest.mark.parametrize("n", [1, 2, 5, 16])
def test_jacobi_against_eigvalsh(backend, n):
    rng = np.random.default_rng(n)
    a = rng.normal(size=(n, n))
    a = a + a.T
    with use_backend(backend):
        w, v, sweeps, ok = kernels.jacobi_eigh(a)
    assert ok
    assert np.allclose(np.sort(w), np.linalg.eigvalsh(a), atol=1e-10)
    assert np.allclose(v @ np.diag(w) @ v.T, a, atol=1e-9)
    assert np.allclose(v.T @ v, np.eye(n), atol=1e-12)


@backends
def test_jacobi_sweep_cap(backend):
    a = np.array([[1.0, 2.0], [2.0, -3.0]])
    with use_backend(backend):
        _, _, sweeps, ok = kernels.jacobi_eigh(a, max_sweeps=0)
    assert not ok and sweeps == 0


@given(st.integers(0, 2**32 - 1))
def test_weighted_edges_backends_agree(seed):
    rng = np.random.default_rng(seed)
    g = make_graph(3, 1, 1)
    left, right = g.edge_arrays
    wl = rng.integers(0, 5, size=(3, g.n_left))
    wr = rng.integers(0, 5, size=(3, g.n_right))
    expected = [sum(int(wl[t, a] * wr[t, b]) for a, b in zip(left, right)) for t in range(3)]
    for b in BACKENDS:
        if b == "numba" and not HAVE_NUMBA:
            continue
        with use_backend(b):
            assert kernels.weighted_edges(left, right, wl, wr).tolist() == expected


def test_backend_switching():
    before = get_backend()
    with use_backend("numpy"):
        assert get_backend() == "numpy"
    assert get_backend() == before
    with pytest.raises(ValueError):
        set_backend("cuda")


def test_tables_feed_kernels():
    F = make_field(2, 3)
    add, mul = F.tables()
    coeffs = np.array([[1, 1]])
    with use_backend("numpy"):
        np_ev = kernels.eval_table(coeffs, add, mul, F.q)
    assert np_ev[0].tolist() == [F.add(1, x) for x in range(F.q)]
