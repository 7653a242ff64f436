"""Backend selection for the hot kernels.

Every kernel in :mod:`wellmix.kernels` exists twice: a numba ``@njit`` loop
version and a pure-numpy version.  The active backend is read from the
``WELLMIX_BACKEND`` environment variable (``numba`` or ``numpy``) at import
time; when numba cannot be imported the numpy path is used regardless.
"""

from __future__ import annotations

import contextlib
import os

try:
    import numba

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the bundled TBB is too old and only produces a warning
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

BACKENDS = ("numba", "numpy")


def _initial_backend() -> str:
    requested = os.environ.get("WELLMIX_BACKEND", "numba").strip().lower()
    if requested not in BACKENDS:
        raise ValueError(f"WELLMIX_BACKEND must be one of {BACKENDS}, got {requested!r}")
    if requested == "numba" and not HAVE_NUMBA:
        return "numpy"
    return requested


_backend = _initial_backend()


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise the identity decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch the kernel backend."""
    previous = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def set_threads(n: int | None) -> None:
    """Cap numba worker threads; ``None`` falls back to ``WELLMIX_THREADS``."""
    if n is None:
        env = os.environ.get("WELLMIX_THREADS")
        if not env:
            return
        n = int(env)
    if n < 1:
        raise ValueError("thread count must be positive")
    if HAVE_NUMBA:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
