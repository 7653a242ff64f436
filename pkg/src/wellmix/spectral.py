"""Spectrum of the incidence graph via the 2-path matrix M M^T.

The biadjacency matrix M (points x polynomials) determines the adjacency
spectrum: the adjacency eigenvalues are +/- sqrt(mu) for every eigenvalue mu
of M M^T, padded with zeros.  Only M M^T (q^2 x q^2) is ever eigensolved.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NoConvergence, NotSymmetric, TooLargeToMaterialize
from .graph import GraphSpec

MAX_MMT_DIM = 4096
MAX_PATH_WORK = 1 << 30
JACOBI_REL_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
CLUSTER_REL_GAP = 1e-6


def build_mmt(spec: GraphSpec) -> np.ndarray:
    """Integer matrix of 2-paths point -> polynomial -> point."""
    if spec.m != 0:
        raise ValueError("build_mmt works on the base graph (m = 0)")
    if spec.n_left > MAX_MMT_DIM:
        raise TooLargeToMaterialize(f"q^2 = {spec.n_left} exceeds {MAX_MMT_DIM}")
    if spec.n_right * spec.q * spec.q > MAX_PATH_WORK:
        raise TooLargeToMaterialize("too many 2-paths to count")
    return kernels.path_counts(spec.evals, spec.q)


def closed_form_mmt(spec: GraphSpec) -> np.ndarray:
    """``q^d I + q^(d-1) (J - S)`` where S marks points with equal first coordinate."""
    q, d = spec.q, spec.d
    if d < 1:
        raise ValueError("the closed form needs d >= 1")
    n = q * q
    same_x1 = np.kron(np.eye(q, dtype=np.int64), np.ones((q, q), dtype=np.int64))
    return q**d * np.eye(n, dtype=np.int64) + q ** (d - 1) * (np.ones((n, n), dtype=np.int64) - same_x1)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: list[tuple[float, int]]
    lambda1: float
    lambda2: float
    residual: float
    sweeps: int
    expander_ok: bool | None = None
    adjacency: list[tuple[float, int]] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return sum(mult for _, mult in self.eigenvalues)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [{"value": v, "multiplicity": m} for v, m in self.eigenvalues],
            "adjacency_eigenvalues": [{"value": v, "multiplicity": m} for v, m in self.adjacency],
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "residual": self.residual,
            "sweeps": self.sweeps,
            "expander_ok": self.expander_ok,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eigenvalue", "multiplicity"])
        for v, m in self.eigenvalues:
            w.writerow([repr(v), m])
        return buf.getvalue()


def cluster_eigenvalues(values, gap: float) -> list[tuple[float, int]]:
    """Group sorted values whose consecutive differences are at most ``gap``."""
    vals = sorted((float(v) for v in values), reverse=True)
    groups: list[list[float]] = []
    for v in vals:
        if groups and groups[-1][-1] - v <= gap:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [(math.fsum(g) / len(g), len(g)) for g in groups]


def adjacency_spectrum(mmt_eigs, n_right: int, gap: float) -> list[tuple[float, int]]:
    """Bipartite adjacency spectrum from the eigenvalues of M M^T.

    Nonzero ``mu`` contribute ``+sqrt(mu)`` and ``-sqrt(mu)``; the remaining
    ``|L| + |R| - 2 * rank`` eigenvalues are zero.
    """
    mus = [max(0.0, float(mu)) for mu in mmt_eigs]
    clusters = cluster_eigenvalues(mus, gap)
    out = []
    rank = 0
    for mu, mult in clusters:
        if mu > gap:
            out.append((math.sqrt(mu), mult))
            rank += mult
    zeros = len(mus) + n_right - 2 * rank
    pos = list(out)
    if zeros:
        pos.append((0.0, zeros))
    neg = [(-v, m) for v, m in reversed(out)]
    return pos + neg


def spectrum(matrix, tol: float = 1e-9, n_right: int | None = None) -> SpectrumReport:
    """Eigenvalues of a symmetric matrix with multiplicities.

    ``matrix`` is treated as ``M M^T`` of a bipartite graph whose right side
    has ``n_right`` vertices (default: same size as the left), which fixes
    the adjacency eigenvalues ``lambda1 >= lambda2`` reported alongside.
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asym > tol:
        raise NotSymmetric(f"max |A - A^T| = {asym:.3g} > {tol:.3g}")
    w, v, sweeps, ok = kernels.jacobi_eigh(a, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
    if not ok:
        raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    residual = float(np.max(np.abs(a @ v - v * w[None, :]))) if a.size else 0.0
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    gap = CLUSTER_REL_GAP * scale if scale > 0 else tol
    clusters = cluster_eigenvalues(w, gap)
    adj = adjacency_spectrum(w, a.shape[0] if n_right is None else n_right, gap)
    flat = [val for val, mult in adj for _ in range(mult)]
    lambda1 = flat[0] if flat else 0.0
    lambda2 = flat[1] if len(flat) > 1 else 0.0
    return SpectrumReport(clusters, lambda1, lambda2, residual, sweeps, None, adj)


@dataclass(frozen=True)
class ExpanderCheck:
    expander_ok: bool
    report: SpectrumReport
    lambda1_expected: float
    lambda2_expected: float
    lambda1_matches: bool
    lambda2_matches: bool
    closed_form_ok: bool | None

    def to_dict(self) -> dict:
        return {
            "expander_ok": self.expander_ok,
            "lambda1_expected": self.lambda1_expected,
            "lambda2_expected": self.lambda2_expected,
            "lambda1_matches": self.lambda1_matches,
            "lambda2_matches": self.lambda2_matches,
            "closed_form_ok": self.closed_form_ok,
            "spectrum": self.report.to_dict(),
        }


def expander_check(spec: GraphSpec, tol: float = 1e-9) -> ExpanderCheck:
    """Eigensolve M M^T and test lambda2 <= sqrt(max(D_L, D_R)).

    ``tol`` is relative to the expected value when comparing lambda1 and
    lambda2 against ``q^((d+1)/2)`` and ``q^(d/2)``.
    """
    mmt = build_mmt(spec)
    rep = spectrum(mmt, tol, n_right=spec.n_right)
    bound = math.sqrt(max(spec.left_degree, spec.right_degree))
    ok = rep.lambda2 <= bound + tol * max(1.0, bound)
    l1 = spec.q ** ((spec.d + 1) / 2)
    l2 = spec.q ** (spec.d / 2)
    closed = bool(np.array_equal(mmt, closed_form_mmt(spec))) if spec.d >= 1 else None
    rep = SpectrumReport(rep.eigenvalues, rep.lambda1, rep.lambda2, rep.residual,
                         rep.sweeps, ok, rep.adjacency)
    return ExpanderCheck(
        ok, rep, l1, l2,
        abs(rep.lambda1 - l1) <= tol * l1,
        abs(rep.lambda2 - l2) <= tol * l2,
        closed,
    )


def expected_mmt_spectrum(q: int, d: int) -> list[tuple[int, int]]:
    """``{q^(d+1): 1, q^d: q^2 - q, 0: q - 1}`` for d >= 1."""
    return [(q ** (d + 1), 1), (q**d, q * q - q), (0, q - 1)]


def amplified_lambda2(lambda2: float, m: int) -> float:
    """Second adjacency eigenvalue of the m-amplified graph.

    The amplified adjacency is ``A (x) J_{2^m}``; tensor eigenvalues multiply
    and ``J_{2^m}`` has spectrum ``{2^m, 0}``.
    """
    return float(2**m) * lambda2


def matrix_csv(matrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(matrix).tolist():
        w.writerow(row)
    return buf.getvalue()
