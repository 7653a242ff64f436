"""Hot numeric kernels, each with a numba loop path and a numpy path.

The public functions dispatch on :func:`wellmix._accel.get_backend` at call
time.  Both paths must return identical results; ``tests/test_kernels.py``
runs every kernel under both backends.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import get_backend, njit

try:
    from numba import prange
except ImportError:  # pragma: no cover
    prange = range

# Elements processed per numpy block; bounds temporary memory.
_BLOCK = 1 << 22


# -- polynomial evaluation table --------------------------------------------

@njit(cache=True)
def _eval_table_nb(coeffs, add, mul, q):
    n, width = coeffs.shape
    out = np.empty((n, q), dtype=np.int64)
    for y in range(n):
        for x in range(q):
            acc = 0
            for i in range(width - 1, -1, -1):
                acc = add[mul[acc, x], coeffs[y, i]]
            out[y, x] = acc
    return out


def _eval_table_np(coeffs, add, mul, q):
    n, width = coeffs.shape
    xs = np.arange(q, dtype=np.int64)
    acc = np.zeros((n, q), dtype=np.int64)
    for i in range(width - 1, -1, -1):
        acc = add[mul[acc, xs[None, :]], coeffs[:, i][:, None]]
    return acc


def eval_table(coeffs: np.ndarray, add: np.ndarray, mul: np.ndarray, q: int) -> np.ndarray:
    """``out[y, x] = S_y(x)`` for every coefficient row ``y`` and field element ``x``."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.int64)
    if get_backend() == "numba":
        return _eval_table_nb(coeffs, np.ascontiguousarray(add), np.ascontiguousarray(mul), q)
    return _eval_table_np(coeffs, add, mul, q)


# -- common neighbourhood scan ----------------------------------------------

@njit(cache=True, parallel=True)
def _max_common_nb(evals):
    n, q = evals.shape
    row_best = np.full(n, -1, dtype=np.int64)
    row_arg = np.full(n, -1, dtype=np.int64)
    for i in prange(n - 1):
        best = -1
        arg = -1
        for j in range(i + 1, n):
            c = 0
            for x in range(q):
                if evals[i, x] == evals[j, x]:
                    c += 1
            if c > best:
                best = c
                arg = j
        row_best[i] = best
        row_arg[i] = arg
    best, bi, bj = -1, -1, -1
    for i in range(n - 1):
        if row_best[i] > best:
            best, bi, bj = row_best[i], i, row_arg[i]
    return best, bi, bj


def _max_common_np(evals):
    n, q = evals.shape
    best, bi, bj = -1, -1, -1
    block = max(1, _BLOCK // max(1, n * q))
    cols = np.arange(n)
    for start in range(0, n - 1, block):
        stop = min(n - 1, start + block)
        rows = evals[start:stop]
        counts = (rows[:, None, :] == evals[None, :, :]).sum(axis=2)
        counts[cols[None, :] <= np.arange(start, stop)[:, None]] = -1
        flat = int(np.argmax(counts))
        r, c = divmod(flat, n)
        if counts[r, c] > best:
            best, bi, bj = int(counts[r, c]), start + r, c
    return best, bi, bj


def max_common(evals: np.ndarray) -> tuple[int, int, int]:
    """Largest agreement count over row pairs ``i < j`` of ``evals``.

    Returns ``(count, i, j)`` with the lexicographically smallest maximizing
    pair, or ``(-1, -1, -1)`` when there are fewer than two rows.
    """
    evals = np.ascontiguousarray(evals, dtype=np.int64)
    if get_backend() == "numba":
        best, i, j = _max_common_nb(evals)
    else:
        best, i, j = _max_common_np(evals)
    return int(best), int(i), int(j)


# -- two-path counts M M^T ---------------------------------------------------

@njit(cache=True)
def _path_counts_nb(evals, q):
    n = evals.shape[0]
    out = np.zeros((q * q, q * q), dtype=np.int64)
    for y in range(n):
        for a in range(q):
            pa = a * q + evals[y, a]
            for b in range(q):
                out[pa, b * q + evals[y, b]] += 1
    return out


def _path_counts_np(evals, q):
    n = evals.shape[0]
    size = q * q
    pts = np.arange(q, dtype=np.int64)[None, :] * q + evals
    flat = np.zeros(size * size, dtype=np.int64)
    block = max(1, _BLOCK // (q * q))
    for start in range(0, n, block):
        chunk = pts[start:start + block]
        idx = chunk[:, :, None] * size + chunk[:, None, :]
        flat += np.bincount(idx.ravel(), minlength=size * size)
    return flat.reshape(size, size)


def path_counts(evals: np.ndarray, q: int) -> np.ndarray:
    """Matrix of 2-paths point -> polynomial -> point (point id ``x1*q + x2``)."""
    evals = np.ascontiguousarray(evals, dtype=np.int64)
    if get_backend() == "numba":
        return _path_counts_nb(evals, q)
    return _path_counts_np(evals, q)


# -- cyclic Jacobi eigensolver -----------------------------------------------

@njit(cache=True)
def _off_norm_nb(a):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j] * a[i, j]
    return math.sqrt(s)


@njit(cache=True)
def _jacobi_nb(a, rel_tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n)
    fro = math.sqrt(np.sum(a * a))
    threshold = rel_tol * fro
    sweeps = 0
    off = _off_norm_nb(a)
    while off > threshold:
        if sweeps >= max_sweeps:
            return np.diag(a).copy(), v, sweeps, False
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                tau = (a[r, r] - a[p, p]) / (2.0 * apr)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akr = a[k, r]
                    a[k, p] = c * akp - s * akr
                    a[k, r] = s * akp + c * akr
                for k in range(n):
                    apk = a[p, k]
                    ark = a[r, k]
                    a[p, k] = c * apk - s * ark
                    a[r, k] = s * apk + c * ark
                a[p, r] = 0.0
                a[r, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkr = v[k, r]
                    v[k, p] = c * vkp - s * vkr
                    v[k, r] = s * vkp + c * vkr
        sweeps += 1
        off = _off_norm_nb(a)
    return np.diag(a).copy(), v, sweeps, True


def _off_norm_np(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return math.sqrt(float(np.sum(off * off)))


def _jacobi_np(a, rel_tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n)
    threshold = rel_tol * math.sqrt(float(np.sum(a * a)))
    sweeps = 0
    off = _off_norm_np(a)
    while off > threshold:
        if sweeps >= max_sweeps:
            return np.diag(a).copy(), v, sweeps, False
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                tau = (a[r, r] - a[p, p]) / (2.0 * apr)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p, col_r = a[:, p].copy(), a[:, r].copy()
                a[:, p] = c * col_p - s * col_r
                a[:, r] = s * col_p + c * col_r
                row_p, row_r = a[p, :].copy(), a[r, :].copy()
                a[p, :] = c * row_p - s * row_r
                a[r, :] = s * row_p + c * row_r
                a[p, r] = a[r, p] = 0.0
                vp, vr = v[:, p].copy(), v[:, r].copy()
                v[:, p] = c * vp - s * vr
                v[:, r] = s * vp + c * vr
        sweeps += 1
        off = _off_norm_np(a)
    return np.diag(a).copy(), v, sweeps, True


def jacobi_eigh(matrix: np.ndarray, rel_tol: float = 1e-12, max_sweeps: int = 100):
    """Cyclic Jacobi rotations on a symmetric matrix.

    Iterates until the off-diagonal Frobenius norm is at most
    ``rel_tol * ||A||_F``.  Returns ``(eigenvalues, eigenvectors, sweeps,
    converged)``; eigenvectors are the columns of the second array.
    """
    a = np.array(matrix, dtype=np.float64, copy=True, order="C")
    if get_backend() == "numba":
        w, v, sweeps, ok = _jacobi_nb(a, rel_tol, max_sweeps)
    else:
        w, v, sweeps, ok = _jacobi_np(a, rel_tol, max_sweeps)
    return w, v, int(sweeps), bool(ok)


# -- weighted induced edge counts --------------------------------------------

@njit(cache=True)
def _weighted_edges_nb(edge_left, edge_right, wl, wr):
    trials = wl.shape[0]
    out = np.zeros(trials, dtype=np.int64)
    for t in range(trials):
        s = 0
        for e in range(edge_left.shape[0]):
            s += wl[t, edge_left[e]] * wr[t, edge_right[e]]
        out[t] = s
    return out


def _weighted_edges_np(edge_left, edge_right, wl, wr):
    return (wl[:, edge_left] * wr[:, edge_right]).sum(axis=1)


def weighted_edges(edge_left, edge_right, wl, wr) -> np.ndarray:
    """Per-trial ``sum_e wl[t, left(e)] * wr[t, right(e)]``.

    With 0/1 weights this is the induced edge count; with cluster weights in
    ``[0, 2^m]`` it is the edge count of the amplified graph.
    """
    edge_left = np.ascontiguousarray(edge_left, dtype=np.int64)
    edge_right = np.ascontiguousarray(edge_right, dtype=np.int64)
    wl = np.ascontiguousarray(np.atleast_2d(wl), dtype=np.int64)
    wr = np.ascontiguousarray(np.atleast_2d(wr), dtype=np.int64)
    if get_backend() == "numba":
        return _weighted_edges_nb(edge_left, edge_right, wl, wr)
    return _weighted_edges_np(edge_left, edge_right, wl, wr)
