"""Compare the numba and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each kernel is called once per backend before timing so JIT compilation is
not counted.  Results from the two backends are checked for equality.
"""

import argparse
import json
import statistics
import time

import numpy as np

from wellmix import kernels
from wellmix._accel import HAVE_NUMBA, use_backend
from wellmix.graph import make_graph
from wellmix.spectral import build_mmt


def cases():
    for p, k, d in [(2, 2, 2), (3, 2, 2), (2, 5, 1)]:
        g = make_graph(p, k, d)
        add, mul = g.field.tables()
        label = f"q={g.q},d={d}"
        yield f"eval_table {label}", lambda g=g, a=add, m=mul: kernels.eval_table(g.coeff_matrix, a, m, g.q)
        yield f"path_counts {label}", lambda g=g: kernels.path_counts(g.evals, g.q)
    for p, k, d in [(2, 3, 2), (3, 2, 2), (2, 4, 1)]:
        g = make_graph(p, k, d)
        yield f"max_common q={g.q},d={d}", lambda g=g: kernels.max_common(g.evals)
    for p, k in [(2, 3), (3, 2)]:
        mmt = build_mmt(make_graph(p, k, 1)).astype(float)
        yield f"jacobi_eigh n={mmt.shape[0]}", lambda a=mmt: kernels.jacobi_eigh(a)
    g = make_graph(2, 2, 1)
    rng = np.random.default_rng(0)
    wl = rng.integers(0, 5, size=(10_000, g.n_left))
    wr = rng.integers(0, 5, size=(10_000, g.n_right))
    left, right = g.edge_arrays
    yield "weighted_edges 10k trials q=4", lambda: kernels.weighted_edges(left, right, wl, wr)


def same(a, b):
    if isinstance(a, tuple):
        if len(a) == 4:  # jacobi: compare sorted eigenvalues only
            return np.allclose(np.sort(a[0]), np.sort(b[0]), atol=1e-8)
        return a == b
    return np.array_equal(a, b)


def timed(fn, repeat):
    fn()
    runs = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        runs.append(time.perf_counter() - t)
    return statistics.median(runs), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None, help="also write results here")
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    rows = []
    print(f"{'kernel':36s}" + "".join(f"{b:>12s}" for b in backends) + f"{'speedup':>10s}  match")
    for name, fn in cases():
        times, outs = {}, {}
        for b in backends:
            with use_backend(b):
                times[b], outs[b] = timed(fn, args.repeat)
        ok = same(outs["numpy"], outs[backends[-1]])
        speedup = times["numpy"] / times[backends[-1]] if times[backends[-1]] else float("inf")
        print(f"{name:36s}" + "".join(f"{times[b] * 1e3:10.2f}ms" for b in backends)
              + f"{speedup:9.1f}x  {'yes' if ok else 'NO'}")
        rows.append({"kernel": name, "seconds": times, "speedup": speedup, "match": ok})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
