"""Mixing checks on induced subgraphs.

Subsets of the amplified graph are described by integer cluster weights:
``w[v]`` in ``[0, 2^m]`` says how many tagged copies of base vertex ``v``
are selected.  With ``m = 0`` the weights are 0/1 indicators.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import DuplicateVertex, InvalidVertexId, TooLargeToMaterialize
from .graph import GraphSpec, Poly, neighbors
from .spectral import amplified_lambda2

MIX_SLACK = 1e-12
INCLUSION_PROBS = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))
MAX_UNION_WORK = 1 << 20
EXHAUSTIVE_BICLIQUE_VERTICES = 20


def _ids(values: Iterable[int], bound: int, side: str) -> frozenset[int]:
    seen: set[int] = set()
    for v in values:
        v = int(v)
        if not 0 <= v < bound:
            raise InvalidVertexId(f"{side} vertex id {v} outside [0, {bound})")
        if v in seen:
            raise DuplicateVertex(f"{side} vertex id {v} listed twice")
        seen.add(v)
    return frozenset(seen)


@dataclass(frozen=True)
class SubsetPair:
    """Point ids on the left, polynomial ids on the right."""

    left: frozenset[int]
    right: frozenset[int]

    @classmethod
    def of(cls, spec: GraphSpec, left: Iterable[int], right: Iterable[int]) -> "SubsetPair":
        return cls(_ids(left, spec.n_left, "left"), _ids(right, spec.n_right, "right"))

    @classmethod
    def full(cls, spec: GraphSpec) -> "SubsetPair":
        return cls(frozenset(range(spec.n_left)), frozenset(range(spec.n_right)))


@dataclass(frozen=True)
class WeightedSubsets:
    """Cluster-weighted subsets of the amplified graph."""

    left: np.ndarray
    right: np.ndarray

    @classmethod
    def from_pair(cls, spec: GraphSpec, pair: SubsetPair) -> "WeightedSubsets":
        # a base-vertex subset selects whole clusters
        wl = np.zeros(spec.n_left, dtype=np.int64)
        wr = np.zeros(spec.n_right, dtype=np.int64)
        wl[list(pair.left)] = spec.cluster_size
        wr[list(pair.right)] = spec.cluster_size
        return cls(wl, wr)

    def validate(self, spec: GraphSpec) -> None:
        for w, n, side in ((self.left, spec.n_left, "left"), (self.right, spec.n_right, "right")):
            if w.shape != (n,):
                raise InvalidVertexId(f"{side} weights must have shape ({n},), got {w.shape}")
            if w.min(initial=0) < 0 or w.max(initial=0) > spec.cluster_size:
                raise InvalidVertexId(f"{side} weights must lie in [0, {spec.cluster_size}]")


def induced_edge_count(spec: GraphSpec, pair: SubsetPair) -> int:
    """Edges of the base graph with both ends in ``pair``."""
    if spec.m != 0:
        raise ValueError("use weighted subsets for amplified graphs")
    _ids(pair.left, spec.n_left, "left")
    _ids(pair.right, spec.n_right, "right")
    if not pair.left or not pair.right:
        return 0
    # walk the cheaper side's neighbour lists
    if len(pair.right) * spec.right_degree <= len(pair.left) * spec.left_degree:
        ev = spec.evals
        q = spec.q
        return sum(
            1
            for y in pair.right
            for x in range(q)
            if x * q + int(ev[y, x]) in pair.left
        )
    return sum(
        1
        for x in pair.left
        for y in neighbors(spec, spec.point_from_id(x))
        if spec.poly_id(y) in pair.right
    )


@dataclass(frozen=True)
class MixingReport:
    edges_induced: int
    left_size: int
    right_size: int
    lhs: Fraction
    rhs_main: Fraction
    rhs_spectral: float
    holds: bool
    slack: float

    def to_dict(self) -> dict:
        return {
            "edges_induced": self.edges_induced,
            "left_size": self.left_size,
            "right_size": self.right_size,
            "lhs": str(self.lhs),
            "rhs_main": str(self.rhs_main),
            "rhs_spectral": self.rhs_spectral,
            "holds": self.holds,
            "slack": self.slack,
        }


def _report(spec: GraphSpec, edges: int, size_l: int, size_r: int, lambda2: float) -> MixingReport:
    c = spec.cluster_size
    n_l, n_r, n_e = spec.n_left * c, spec.n_right * c, spec.n_edges * c * c
    lhs = Fraction(edges, n_e)
    rhs_main = Fraction(size_l * size_r, n_l * n_r)
    rhs_spec = lambda2 * math.sqrt(size_l * size_r) / n_e
    excess = float(lhs - rhs_main)
    return MixingReport(edges, size_l, size_r, lhs, rhs_main, rhs_spec,
                        excess <= rhs_spec + MIX_SLACK, rhs_spec - excess)


def mixing_check(spec: GraphSpec, pair: SubsetPair | WeightedSubsets,
                 lambda2: float | None = None) -> MixingReport:
    """Compare induced edge density with the expander-mixing bound.

    ``lambda2`` defaults to ``2^m q^(d/2)``, the analytic second eigenvalue
    of the amplified graph.  A :class:`SubsetPair` on an amplified graph
    selects whole clusters.
    """
    if lambda2 is None:
        lambda2 = amplified_lambda2(spec.q ** (spec.d / 2), spec.m)
    if isinstance(pair, SubsetPair) and spec.m == 0:
        edges = induced_edge_count(spec, pair)
        return _report(spec, edges, len(pair.left), len(pair.right), lambda2)
    if isinstance(pair, SubsetPair):
        pair = WeightedSubsets.from_pair(spec, pair)
    pair.validate(spec)
    left, right = spec.edge_arrays
    edges = int(kernels.weighted_edges(left, right, pair.left, pair.right)[0])
    return _report(spec, edges, int(pair.left.sum()), int(pair.right.sum()), lambda2)


@dataclass(frozen=True)
class FuzzTrial:
    trial: int
    prob: Fraction
    report: MixingReport


@dataclass(frozen=True)
class FuzzSummary:
    trials: list[FuzzTrial]
    lambda2: float
    seed: int

    @property
    def violations(self) -> int:
        return sum(not t.report.holds for t in self.trials)

    @property
    def min_slack(self) -> float:
        return min((t.report.slack for t in self.trials), default=math.inf)

    def to_dict(self) -> dict:
        return {"trials": len(self.trials), "violations": self.violations,
                "min_slack": self.min_slack, "lambda2": self.lambda2, "seed": self.seed}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "L_w", "R_w", "E_w", "lhs", "rhs", "slack"])
        for t in self.trials:
            r = t.report
            rhs = float(r.rhs_main) + r.rhs_spectral
            w.writerow([t.trial, r.left_size, r.right_size, r.edges_induced,
                        repr(float(r.lhs)), repr(rhs), repr(r.slack)])
        return buf.getvalue()


def sample_weights(spec: GraphSpec, rng: np.random.Generator) -> tuple[Fraction, WeightedSubsets]:
    """Each tagged vertex joins independently with one probability per trial."""
    prob = INCLUSION_PROBS[int(rng.integers(len(INCLUSION_PROBS)))]
    c = spec.cluster_size
    wl = rng.binomial(c, float(prob), size=spec.n_left).astype(np.int64)
    wr = rng.binomial(c, float(prob), size=spec.n_right).astype(np.int64)
    return prob, WeightedSubsets(wl, wr)


def mixing_fuzz(spec: GraphSpec, trials: int, seed: int, lambda2: float | None = None) -> FuzzSummary:
    """Seeded random subset pairs checked against the mixing bound.

    Trial ``i`` draws from its own child of ``SeedSequence(seed)``.
    """
    if lambda2 is None:
        lambda2 = amplified_lambda2(spec.q ** (spec.d / 2), spec.m)
    children = np.random.SeedSequence(seed).spawn(trials)
    probs, wls, wrs = [], [], []
    for child in children:
        prob, ws = sample_weights(spec, np.random.default_rng(child))
        probs.append(prob)
        wls.append(ws.left)
        wrs.append(ws.right)
    if not trials:
        return FuzzSummary([], lambda2, seed)
    wl, wr = np.stack(wls), np.stack(wrs)
    left, right = spec.edge_arrays
    edges = kernels.weighted_edges(left, right, wl, wr)
    size_l, size_r = wl.sum(axis=1), wr.sum(axis=1)
    out = [
        FuzzTrial(i, probs[i], _report(spec, int(edges[i]), int(size_l[i]), int(size_r[i]), lambda2))
        for i in range(trials)
    ]
    return FuzzSummary(out, lambda2, seed)


# -- inclusion-exclusion union bound ----------------------------------------

@dataclass(frozen=True)
class UnionBound:
    actual_union: int
    ie_bound: int

    @property
    def holds(self) -> bool:
        return self.actual_union >= self.ie_bound


def union_lower_bound(spec: GraphSpec, right_vertices: Sequence[int | Poly], cap: int) -> UnionBound:
    """Size of the union of neighbourhoods versus ``k*D_R - C(k,2)*cap``.

    Vertices are polynomial ids (or :class:`Poly`) naming distinct clusters;
    on an amplified graph each contributes its whole cluster of ``2^m`` copies
    with degree ``q * 2^m``.
    """
    ids = [spec.poly_id(v) if isinstance(v, Poly) else int(v) for v in right_vertices]
    _ids(ids, spec.n_right, "right")
    k = len(ids)
    if k * spec.q > MAX_UNION_WORK:
        raise TooLargeToMaterialize(f"union of {k} neighbourhoods is too large")
    ev = spec.evals
    q = spec.q
    union = {x * q + int(ev[y, x]) for y in ids for x in range(q)}
    c = spec.cluster_size
    actual = len(union) * c
    bound = k * q * c - math.comb(k, 2) * cap
    return UnionBound(actual, bound)


# -- biclique search ---------------------------------------------------------

@dataclass(frozen=True)
class Biclique:
    left: tuple[int, ...]
    right: tuple[int, ...]

    @property
    def a(self) -> int:
        return len(self.left)

    @property
    def b(self) -> int:
        return len(self.right)

    @property
    def edges(self) -> int:
        return self.a * self.b

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "left": list(self.left), "right": list(self.right)}


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _neighbor_masks(spec: GraphSpec) -> tuple[list[int], list[int]]:
    left_masks = [0] * spec.n_left
    right_masks = [0] * spec.n_right
    lefts, rights = spec.edge_arrays
    for x, y in zip(lefts.tolist(), rights.tolist()):
        left_masks[x] |= 1 << y
        right_masks[y] |= 1 << x
    return left_masks, right_masks


def _scan_subsets(side_masks: list[int], full_other: int, min_side: int, min_other: int):
    """Every subset of one side with its common neighbourhood on the other."""
    n = len(side_masks)
    best = None
    best_key = None
    for subset in range(1, 1 << n):
        members = _bits(subset)
        if len(members) < min_side:
            continue
        common = full_other
        for v in members:
            common &= side_masks[v]
            if not common:
                break
        size = common.bit_count()
        if size < min_other:
            continue
        key = (len(members) * size, -subset)
        if best_key is None or key > best_key:
            best_key, best = key, (members, _bits(common))
    return best


def _branch_and_prune(right_masks: list[int], full_left: int, min_a: int, min_b: int):
    """DFS over right subsets in id order, pruning on the common left set."""
    n = len(right_masks)
    best = [0, None]

    def dfs(start: int, chosen: list[int], common: int):
        a = common.bit_count()
        if len(chosen) >= min_b and a * len(chosen) > best[0]:
            best[0], best[1] = a * len(chosen), (tuple(_bits(common)), tuple(chosen))
        if a * (len(chosen) + n - start) <= best[0]:
            return
        for y in range(start, n):
            nxt = common & right_masks[y]
            if nxt.bit_count() >= min_a:
                chosen.append(y)
                dfs(y + 1, chosen, nxt)
                chosen.pop()

    dfs(0, [], full_left)
    return best[1]


def exhaustive_biclique_search(spec: GraphSpec, min_a: int, min_b: int) -> Biclique | None:
    """Maximum-edge complete bipartite K_{a,b} with ``a >= min_a`` points and
    ``b >= min_b`` polynomials, or ``None`` when none exists.

    Small graphs (``|L| + |R| <= 20``) scan every subset of the smaller side,
    which is exhaustive because the best partner set of a fixed subset is its
    full common neighbourhood.  Larger graphs use a pruned DFS over
    polynomial subsets that requires ``min_a >= 2``.
    """
    if spec.m != 0:
        raise ValueError("biclique search runs on the base graph (m = 0)")
    min_a, min_b = max(1, min_a), max(1, min_b)
    left_masks, right_masks = _neighbor_masks(spec)
    full_left = (1 << spec.n_left) - 1
    full_right = (1 << spec.n_right) - 1
    if spec.n_left + spec.n_right <= EXHAUSTIVE_BICLIQUE_VERTICES:
        if spec.n_left <= spec.n_right:
            found = _scan_subsets(left_masks, full_right, min_a, min_b)
            return Biclique(*found) if found else None
        found = _scan_subsets(right_masks, full_left, min_b, min_a)
        return Biclique(found[1], found[0]) if found else None
    if min_a < 2 or spec.n_right > (1 << 14):
        raise TooLargeToMaterialize(
            "pruned biclique search needs min_a >= 2 and at most 2^14 polynomials")
    found = _branch_and_prune(right_masks, full_left, min_a, min_b)
    return Biclique(*found) if found else None
