"""The points-versus-polynomials incidence graph and its amplified version.

Left vertices are points ``(x1, x2)`` of the affine plane over the field,
right vertices are polynomials ``s_0 + s_1 t + ... + s_d t^d`` (all
coefficient vectors, leading zeros allowed).  A point is adjacent to a
polynomial when it lies on the polynomial's graph.

The m-private-randomness amplified graph tags every vertex with an m-bit
string ``r``; it is never materialized.  All its quantities follow from the
base graph and the cluster size ``2^m``.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from . import kernels
from .errors import InvalidVertexId, TooLargeToMaterialize
from .field import FieldSpec, eval_poly, field_from_dict, make_field

MAX_NEIGHBORS = 1 << 20
MAX_EDGES = 1 << 24
MAX_RIGHT_PAIRS = 1 << 14


class Point(NamedTuple):
    x1: int
    x2: int


class Poly(NamedTuple):
    coeffs: tuple


class AmplifiedVertex(NamedTuple):
    base: Point | Poly
    r: int


@dataclass(frozen=True)
class GraphSpec:
    field: FieldSpec
    d: int
    m: int = 0

    def __post_init__(self):
        if self.d < 0:
            raise ValueError(f"degree bound must be >= 0, got {self.d}")
        if self.m < 0:
            raise ValueError(f"amplification must be >= 0, got {self.m}")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def n_left(self) -> int:
        return self.q**2

    @property
    def n_right(self) -> int:
        return self.q ** (self.d + 1)

    @property
    def n_edges(self) -> int:
        return self.q ** (self.d + 2)

    @property
    def left_degree(self) -> int:
        return self.q**self.d

    @property
    def right_degree(self) -> int:
        return self.q

    @property
    def cluster_size(self) -> int:
        return 1 << self.m

    def base(self) -> "GraphSpec":
        return GraphSpec(self.field, self.d, 0)

    # vertex ids: point = x1*q + x2, poly = sum s_i q^i

    def point_id(self, pt: Sequence[int]) -> int:
        x1, x2 = pt
        self.field.check(x1)
        self.field.check(x2)
        return x1 * self.q + x2

    def point_from_id(self, idx: int) -> Point:
        if not 0 <= idx < self.n_left:
            raise InvalidVertexId(f"point id {idx} outside [0, {self.n_left})")
        return Point(*divmod(int(idx), self.q))

    def poly_id(self, poly: Poly | Sequence[int]) -> int:
        coeffs = poly.coeffs if isinstance(poly, Poly) else tuple(poly)
        if len(coeffs) != self.d + 1:
            raise InvalidVertexId(f"expected {self.d + 1} coefficients, got {len(coeffs)}")
        idx = 0
        for c in reversed(coeffs):
            idx = idx * self.q + self.field.check(c)
        return idx

    def poly_from_id(self, idx: int) -> Poly:
        if not 0 <= idx < self.n_right:
            raise InvalidVertexId(f"poly id {idx} outside [0, {self.n_right})")
        coeffs = []
        idx = int(idx)
        for _ in range(self.d + 1):
            idx, c = divmod(idx, self.q)
            coeffs.append(c)
        return Poly(tuple(coeffs))

    # dense arrays for the kernels

    @cached_property
    def coeff_matrix(self) -> np.ndarray:
        """Row ``y`` holds the coefficients of polynomial id ``y``."""
        self._guard(self.n_right * (self.d + 1), MAX_EDGES, "coefficient matrix")
        ids = np.arange(self.n_right, dtype=np.int64)
        powers = self.q ** np.arange(self.d + 1, dtype=np.int64)
        return (ids[:, None] // powers[None, :]) % self.q

    @cached_property
    def evals(self) -> np.ndarray:
        """``evals[y, x] = S_y(x)``; shape ``(|R|, q)``."""
        self._guard(self.n_edges, MAX_EDGES, "evaluation table")
        add, mul = self.field.tables()
        out = kernels.eval_table(self.coeff_matrix, add, mul, self.q)
        out.flags.writeable = False
        return out

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(point_ids, poly_ids)`` for every edge, ordered by poly id then x1."""
        ev = self.evals
        xs = np.arange(self.q, dtype=np.int64)
        left = (xs[None, :] * self.q + ev).ravel()
        right = np.repeat(np.arange(self.n_right, dtype=np.int64), self.q)
        return left, right

    @staticmethod
    def _guard(size: int, limit: int, what: str):
        if size > limit:
            raise TooLargeToMaterialize(f"{what} needs {size} entries (limit {limit})")

    def to_dict(self) -> dict:
        return {
            "field": self.field.to_dict(),
            "d": self.d,
            "m": self.m,
            "counts": amplified_stats(self).to_dict() | {
                "L": self.n_left, "R": self.n_right, "E": self.n_edges,
            },
        }


def make_graph(p: int, k: int = 1, d: int = 1, m: int = 0, modulus=None) -> GraphSpec:
    return GraphSpec(make_field(p, k, modulus), d, m)


def graph_from_dict(data: dict) -> GraphSpec:
    return GraphSpec(field_from_dict(data["field"]), data["d"], data.get("m", 0))


# -- queries ---------------------------------------------------------------

def is_edge(spec: GraphSpec, point: Sequence[int], poly: Poly | Sequence[int]) -> bool:
    coeffs = poly.coeffs if isinstance(poly, Poly) else tuple(poly)
    x1, x2 = point
    spec.field.check(x2)
    if len(coeffs) != spec.d + 1:
        raise InvalidVertexId(f"expected {spec.d + 1} coefficients, got {len(coeffs)}")
    return eval_poly(spec.field, coeffs, x1) == x2


def neighbors(spec: GraphSpec, v: Point | Poly) -> list:
    """Opposite-side neighbours of a point or a polynomial, in id order."""
    F = spec.field
    if isinstance(v, Poly):
        if len(v.coeffs) != spec.d + 1:
            raise InvalidVertexId(f"expected {spec.d + 1} coefficients, got {len(v.coeffs)}")
        return [Point(x, eval_poly(F, v.coeffs, x)) for x in F.elements()]
    if isinstance(v, Point):
        if spec.left_degree > MAX_NEIGHBORS:
            raise TooLargeToMaterialize(f"point degree {spec.left_degree} exceeds {MAX_NEIGHBORS}")
        x1, x2 = F.check(v.x1), F.check(v.x2)
        out = []
        # free s_1..s_d; s_0 is forced by S(x1) = x2
        for higher in itertools.product(F.elements(), repeat=spec.d):
            rest = eval_poly(F, (0,) + higher, x1)
            out.append(Poly((F.sub(x2, rest),) + higher))
        out.sort(key=spec.poly_id)
        return out
    raise TypeError(f"expected Point or Poly, got {type(v).__name__}")


def amplified_neighborhood(spec: GraphSpec, v: AmplifiedVertex) -> tuple[frozenset, int]:
    """Neighbourhood of an amplified vertex as ``(base neighbours, tags per base)``.

    Every tag ``r`` of the opposite side is adjacent, so the result does not
    depend on ``v.r``.
    """
    if not 0 <= v.r < spec.cluster_size:
        raise InvalidVertexId(f"tag {v.r} outside [0, {spec.cluster_size})")
    return frozenset(neighbors(spec, v.base)), spec.cluster_size


def enumerate_edges(spec: GraphSpec) -> Iterator[tuple[Point, Poly]]:
    if spec.n_edges > MAX_EDGES:
        raise TooLargeToMaterialize(f"|E| = {spec.n_edges} exceeds {MAX_EDGES}")
    ev = spec.evals
    for y in range(spec.n_right):
        poly = spec.poly_from_id(y)
        for x in range(spec.q):
            yield Point(x, int(ev[y, x])), poly


def sample_edge(spec: GraphSpec, seed) -> tuple[Point, Poly]:
    """Uniform edge: uniform polynomial, uniform x1, then x2 = S(x1)."""
    rng = np.random.default_rng(seed)
    coeffs = tuple(int(c) for c in rng.integers(0, spec.q, size=spec.d + 1))
    x1 = int(rng.integers(0, spec.q))
    return Point(x1, eval_poly(spec.field, coeffs, x1)), Poly(coeffs)


def degrees(spec: GraphSpec) -> tuple[np.ndarray, np.ndarray]:
    """Exact ``(left_degrees, right_degrees)`` counted from the edge list."""
    left, right = spec.edge_arrays
    return (np.bincount(left, minlength=spec.n_left),
            np.bincount(right, minlength=spec.n_right))


@dataclass(frozen=True)
class CommonNeighborhood:
    max: int
    witness: tuple[Poly, Poly]


def common_neighborhood_max(spec: GraphSpec) -> CommonNeighborhood:
    """Exhaustive maximum of common left neighbours over distinct right pairs."""
    if spec.n_right > MAX_RIGHT_PAIRS:
        raise TooLargeToMaterialize(f"|R| = {spec.n_right} exceeds {MAX_RIGHT_PAIRS}")
    best, i, j = kernels.max_common(spec.evals)
    return CommonNeighborhood(best, (spec.poly_from_id(i), spec.poly_from_id(j)))


@dataclass(frozen=True)
class AmplifiedStats:
    L_bar: int
    R_bar: int
    E_bar: int
    cluster_size: int

    def to_dict(self) -> dict:
        return {"L_bar": self.L_bar, "R_bar": self.R_bar, "E_bar": self.E_bar,
                "cluster_size": self.cluster_size}


def amplified_stats(spec: GraphSpec) -> AmplifiedStats:
    c = spec.cluster_size
    return AmplifiedStats(spec.n_left * c, spec.n_right * c, spec.n_edges * c * c, c)


def edges_csv(spec: GraphSpec) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["point_id", "poly_id"])
    left, right = spec.edge_arrays
    w.writerows(zip(left.tolist(), right.tolist()))
    return buf.getvalue()
