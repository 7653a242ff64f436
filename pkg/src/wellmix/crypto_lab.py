"""Brute-force entropy experiments on tiny incidence graphs.

Muchnik setting: the clear message ``X`` and the key ``Y`` are the two
coordinates of a uniformly random point, and the eavesdropper holds a
uniformly random polynomial ``Z`` through it.  An encoder ``P`` is a table
indexed by ``x * q + y``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

import numpy as np

from .errors import SearchSpaceTooLarge
from .graph import GraphSpec
from .info import JointTable, edge_joint, exact_independent, is_function_of, map_variable, mutual_info

MAX_ENCODERS = 10**7


def muchnik_base(spec: GraphSpec) -> JointTable:
    """Uniform table over ``(X, Y, Z)`` with ``(X, Y)`` a point on polynomial ``Z``."""
    edges = edge_joint(spec)
    weights = {(pt.x1, pt.x2, poly): w for (pt, poly), w in edges.items()}
    return JointTable(("X", "Y", "Z"), weights)


@dataclass(frozen=True)
class MuchnikScenario:
    spec: GraphSpec
    encoder: tuple[int, ...]
    alphabet: int

    def __post_init__(self):
        q = self.spec.q
        if len(self.encoder) != q * q:
            raise ValueError(f"encoder needs {q * q} entries, got {len(self.encoder)}")
        if any(not 0 <= s < self.alphabet for s in self.encoder):
            raise ValueError(f"encoder symbols must lie in [0, {self.alphabet})")

    @classmethod
    def from_function(cls, spec: GraphSpec, f: Callable[[int, int], Hashable]) -> "MuchnikScenario":
        """Encoder from any function of ``(x, y)``; symbols are renumbered by first use."""
        q = spec.q
        codes: dict = {}
        table = tuple(codes.setdefault(f(x, y), len(codes)) for x in range(q) for y in range(q))
        return cls(spec, table, max(1, len(codes)))

    def table(self, base: JointTable | None = None) -> JointTable:
        base = muchnik_base(self.spec) if base is None else base
        q, enc = self.spec.q, self.encoder
        return map_variable(base, "P", lambda r: enc[r["X"] * q + r["Y"]])


@dataclass(frozen=True)
class MuchnikVerdict:
    useful: bool
    useless: bool
    alphabet_size: int

    def to_dict(self) -> dict:
        return {"useful": self.useful, "useless": self.useless, "alphabet_size": self.alphabet_size}


def muchnik_classify(scenario: MuchnikScenario, base: JointTable | None = None) -> MuchnikVerdict:
    """useful: ``(P, Y)`` determines ``X``.  useless: ``P`` independent of ``X`` given ``Z``."""
    t = scenario.table(base)
    return MuchnikVerdict(
        is_function_of(t, "X", ("P", "Y")),
        exact_independent(t, "P", "X", "Z"),
        scenario.alphabet,
    )


def restricted_growth_strings(length: int, max_symbols: int):
    """Encoders up to renaming of symbols: ``s[0] = 0`` and each new symbol is ``max + 1``."""
    if length == 0:
        yield ()
        return
    s = [0] * length

    def rec(i: int, top: int):
        if i == length:
            yield tuple(s)
            return
        for v in range(min(top + 2, max_symbols)):
            s[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


@dataclass
class AlphabetResult:
    a: int
    total: int
    raw_total: int
    useful_only: int
    useless_only: int
    both: int
    neither: int
    min_both_witness: tuple[int, ...] | None

    def to_dict(self) -> dict:
        return {
            "a": self.a, "total": self.total, "raw_total": self.raw_total,
            "useful_only": self.useful_only, "useless_only": self.useless_only,
            "both": self.both, "neither": self.neither,
            "min_both_witness": list(self.min_both_witness) if self.min_both_witness else None,
        }


@dataclass
class MuchnikSearchReport:
    q: int
    d: int
    alphabets: list[AlphabetResult]

    @property
    def min_alphabet_both(self) -> int | None:
        return next((r.a for r in self.alphabets if r.both), None)

    def to_dict(self) -> dict:
        return {"q": self.q, "d": self.d, "min_alphabet_both": self.min_alphabet_both,
                "alphabets": [r.to_dict() for r in self.alphabets]}


def muchnik_exhaustive_search(spec: GraphSpec, max_alphabet: int) -> MuchnikSearchReport:
    """Classify every encoder into alphabets of size ``1..max_alphabet``.

    Encoders are enumerated once per orbit under renaming of symbols;
    ``total`` counts orbit representatives and ``raw_total`` all ``a^(q^2)``
    tables.  Category counts are per representative.
    """
    q = spec.q
    if q > 3 or spec.d != 1:
        raise ValueError("the exhaustive search is defined for q <= 3 and d = 1")
    if not 1 <= max_alphabet <= q * q:
        raise ValueError(f"max_alphabet must lie in [1, {q * q}]")
    for a in range(1, max_alphabet + 1):
        if a ** (q * q) > MAX_ENCODERS:
            raise SearchSpaceTooLarge(f"{a}^{q * q} encoders exceed {MAX_ENCODERS}")
    base = muchnik_base(spec)
    results = []
    for a in range(1, max_alphabet + 1):
        res = AlphabetResult(a, 0, a ** (q * q), 0, 0, 0, 0, None)
        for enc in restricted_growth_strings(q * q, a):
            v = muchnik_classify(MuchnikScenario(spec, enc, a), base)
            res.total += 1
            if v.useful and v.useless:
                res.both += 1
                if res.min_both_witness is None:
                    res.min_both_witness = enc
            elif v.useful:
                res.useful_only += 1
            elif v.useless:
                res.useless_only += 1
            else:
                res.neither += 1
        results.append(res)
    return MuchnikSearchReport(q, spec.d, results)


# -- inequality gap ------------------------------------------------------------

@dataclass(frozen=True)
class GapRow:
    w_id: str
    i_wxy: float
    i_wx_given_y: float
    i_wy_given_x: float

    @property
    def gap(self) -> float:
        return self.i_wxy - 2 * self.i_wx_given_y - 2 * self.i_wy_given_x


@dataclass
class GapReport:
    rows: list[GapRow]
    seed: int | None = None

    @property
    def max_gap(self) -> float:
        return max((r.gap for r in self.rows), default=-math.inf)

    def to_dict(self) -> dict:
        arg = max(self.rows, key=lambda r: r.gap).w_id if self.rows else None
        return {"count": len(self.rows), "seed": self.seed, "max_gap": self.max_gap,
                "argmax": arg, "positive": sum(r.gap > 1e-10 for r in self.rows)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["W_id", "I_wxy", "I_wx_given_y", "I_wy_given_x", "gap"])
        for r in self.rows:
            w.writerow([r.w_id, repr(r.i_wxy), repr(r.i_wx_given_y), repr(r.i_wy_given_x), repr(r.gap)])
        return buf.getvalue()


def gap_for(table: JointTable, w_id: str, f: Callable[[dict], Hashable]) -> GapRow:
    """``I(W:X,Y) - 2 I(W:X|Y) - 2 I(W:Y|X)`` for ``W = f(row)`` on an edge table."""
    t = map_variable(table, "W", f)
    return GapRow(
        w_id,
        mutual_info(t, "W", ("X", "Y")),
        mutual_info(t, "W", "X", "Y"),
        mutual_info(t, "W", "Y", "X"),
    )


def inequality_gap(spec: GraphSpec, functions: Sequence[tuple[str, Callable]] = (),
                   count: int = 0, seed: int | None = None, max_alphabet: int | None = None) -> GapReport:
    """Gap statistics for named functions plus ``count`` seeded random ones.

    Random ``W`` assign each edge an independent uniform symbol from an
    alphabet whose size is itself drawn from ``2..max_alphabet`` (default
    ``|E|``).
    """
    if spec.d != 1:
        raise ValueError("the gap explorer is defined for d = 1")
    if count and seed is None:
        raise ValueError("random functions need an explicit seed")
    table = edge_joint(spec)
    rows = [gap_for(table, name, f) for name, f in functions]
    if count:
        top = max_alphabet or spec.n_edges
        children = np.random.SeedSequence(seed).spawn(count)
        for i, child in enumerate(children):
            rng = np.random.default_rng(child)
            a = int(rng.integers(2, top + 1))
            labels = rng.integers(0, a, size=spec.n_edges)
            lookup = {}
            for j, (outcome, _) in enumerate(table.items()):
                lookup[outcome] = int(labels[j])
            rows.append(gap_for(table, f"random_{i}", lambda r, lk=lookup: lk[(r["X"], r["Y"])]))
    return GapReport(rows, seed)


def standard_gap_functions() -> list[tuple[str, Callable]]:
    return [
        ("constant", lambda r: 0),
        ("X", lambda r: r["X"]),
        ("Y", lambda r: r["Y"]),
    ]
