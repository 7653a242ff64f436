"""Exact joint distributions and Shannon functionals.

A :class:`JointTable` stores integer weights over a common total, so every
probability is the exact rational ``weight / total``.  Marginalization and
independence tests stay in integers; only the final ``-sum p log2 p`` is
evaluated in floating point.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .errors import PartialFunction, TooLargeToMaterialize, UnknownVariable
from .graph import GraphSpec, enumerate_edges

MAX_OUTCOMES = 1 << 24


def _names(vs: str | Iterable[str]) -> tuple[str, ...]:
    if isinstance(vs, str):
        return (vs,)
    return tuple(vs)


class JointTable:
    """Joint distribution of named discrete variables.

    ``weights`` maps value tuples (ordered like ``variables``) to positive
    integers; the probability of an outcome is ``weight / total``.
    Zero-weight outcomes are dropped.
    """

    __slots__ = ("variables", "_weights", "total", "_index", "_marginals")

    def __init__(self, variables: Sequence[str], weights: Mapping[tuple, int]):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        clean = {}
        for outcome, w in weights.items():
            if len(outcome) != len(self.variables):
                raise ValueError(f"outcome {outcome!r} does not match {self.variables}")
            if w < 0:
                raise ValueError("weights must be nonnegative")
            if w:
                clean[tuple(outcome)] = int(w)
        if not clean:
            raise ValueError("a distribution needs at least one outcome")
        if len(clean) > MAX_OUTCOMES:
            raise TooLargeToMaterialize(f"{len(clean)} outcomes exceed {MAX_OUTCOMES}")
        g = 0
        for w in clean.values():
            g = math.gcd(g, w)
        self._weights = {k: w // g for k, w in clean.items()}
        self.total = sum(self._weights.values())
        self._index = {name: i for i, name in enumerate(self.variables)}
        self._marginals: dict[tuple[str, ...], dict[tuple, int]] = {}

    @classmethod
    def uniform(cls, variables: Sequence[str], rows: Iterable[tuple]) -> "JointTable":
        weights: dict[tuple, int] = defaultdict(int)
        for row in rows:
            weights[tuple(row)] += 1
        return cls(variables, weights)

    @classmethod
    def from_probs(cls, variables: Sequence[str], probs: Mapping[tuple, Fraction]) -> "JointTable":
        probs = {k: Fraction(v) for k, v in probs.items()}
        if sum(probs.values()) != 1:
            raise ValueError("probabilities must sum to exactly 1")
        den = 1
        for v in probs.values():
            den = den * v.denominator // math.gcd(den, v.denominator)
        return cls(variables, {k: int(v * den) for k, v in probs.items()})

    def __len__(self) -> int:
        return len(self._weights)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def items(self):
        return self._weights.items()

    def prob(self, outcome: tuple) -> Fraction:
        return Fraction(self._weights.get(tuple(outcome), 0), self.total)

    def probs(self) -> dict[tuple, Fraction]:
        return {k: Fraction(w, self.total) for k, w in self._weights.items()}

    def rows(self):
        """Outcomes as ``(dict(name -> value), weight)`` pairs."""
        for outcome, w in self._weights.items():
            yield dict(zip(self.variables, outcome)), w

    def _check(self, names: tuple[str, ...]) -> None:
        for n in names:
            if n not in self._index:
                raise UnknownVariable(n)

    def marginal(self, names: str | Iterable[str]) -> dict[tuple, int]:
        """Integer weights of the marginal on ``names`` (same total)."""
        names = _names(names)
        self._check(names)
        key = tuple(sorted(set(names), key=self._index.__getitem__))
        cached = self._marginals.get(key)
        if cached is None:
            idx = [self._index[n] for n in key]
            cached = defaultdict(int)
            for outcome, w in self._weights.items():
                cached[tuple(outcome[i] for i in idx)] += w
            cached = dict(cached)
            self._marginals[key] = cached
        if key == names:
            return cached
        pos = [key.index(n) for n in names]
        return {tuple(k[i] for i in pos): w for k, w in cached.items()}

    def project(self, names: str | Iterable[str]) -> "JointTable":
        names = _names(names)
        return JointTable(names, self.marginal(names))

    def to_dict(self) -> dict:
        outcomes = [
            {"values": [_jsonable(v) for v in k], "p": str(Fraction(w, self.total))}
            for k, w in self._weights.items()
        ]
        # canonical order so equal distributions serialize identically
        outcomes.sort(key=lambda o: json.dumps(o["values"], sort_keys=True))
        return {"variables": list(self.variables), "outcomes": outcomes}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _jsonable(v: Any):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return str(v)


# -- construction -----------------------------------------------------------

def edge_joint(spec: GraphSpec) -> JointTable:
    """Uniform distribution over edges, variables ``X`` (point) and ``Y`` (poly)."""
    return JointTable.uniform(("X", "Y"), enumerate_edges(spec))


def map_variable(table: JointTable, name: str, f: Callable[[dict], Hashable]) -> JointTable:
    """Append ``name = f(row)``; ``row`` maps every existing variable to its value."""
    if name in table:
        raise ValueError(f"variable {name!r} already exists")
    weights: dict[tuple, int] = {}
    for outcome, w in table.items():
        row = dict(zip(table.variables, outcome))
        try:
            value = f(row)
        except (KeyError, IndexError, ValueError, TypeError, ZeroDivisionError) as exc:
            raise PartialFunction(f"{name} undefined on {row!r}: {exc}") from exc
        if value is None:
            raise PartialFunction(f"{name} undefined on {row!r}")
        weights[outcome + (value,)] = w
    return JointTable(table.variables + (name,), weights)


# -- functionals ---------------------------------------------------------------

def _entropy_of(weights: Iterable[int], total: int) -> float:
    log_total = math.log2(total)
    terms = [w * (log_total - math.log2(w)) for w in weights]
    return math.fsum(terms) / total


def entropy(table: JointTable, of: str | Iterable[str], given: str | Iterable[str] = ()) -> float:
    """H(of | given) in bits."""
    of, given = _names(of), _names(given)
    joint = table.marginal(tuple(dict.fromkeys(of + given)))
    h_joint = _entropy_of(joint.values(), table.total)
    if not given:
        return h_joint
    return h_joint - _entropy_of(table.marginal(given).values(), table.total)


def mutual_info(table: JointTable, a, b, given=()) -> float:
    """I(a : b | given) = H(a|g) + H(b|g) - H(a,b|g)."""
    a, b, given = _names(a), _names(b), _names(given)
    return (entropy(table, a, given) + entropy(table, b, given)
            - entropy(table, tuple(dict.fromkeys(a + b)), given))


def triple_info(table: JointTable, a, b, c) -> float:
    """I(a : b : c) = I(a : b) - I(a : b | c); may be negative."""
    return mutual_info(table, a, b) - mutual_info(table, a, b, c)


def exact_independent(table: JointTable, a, b, given=()) -> bool:
    """Exact test of ``a`` independent of ``b`` conditionally on ``given``.

    Checks ``P(a,b,g) P(g) == P(a,g) P(b,g)`` on every combination of
    supported values, including pairs whose joint weight is zero.
    """
    a, b, given = _names(a), _names(b), _names(given)
    for n in a + b + given:
        if n not in table:
            raise UnknownVariable(n)
    na, nb = len(a), len(b)
    abg = table.marginal(a + b + given)
    ag = table.marginal(a + given)
    bg = table.marginal(b + given)
    g = table.marginal(given)
    by_g_a: dict[tuple, list[tuple]] = defaultdict(list)
    by_g_b: dict[tuple, list[tuple]] = defaultdict(list)
    for key in ag:
        by_g_a[key[na:]].append(key[:na])
    for key in bg:
        by_g_b[key[nb:]].append(key[:nb])
    for gv, wg in g.items():
        for av in by_g_a[gv]:
            wa = ag[av + gv]
            for bv in by_g_b[gv]:
                if abg.get(av + bv + gv, 0) * wg != wa * bg[bv + gv]:
                    return False
    return True


def is_function_of(table: JointTable, target, given) -> bool:
    """True when ``given`` determines ``target`` on the support (H(target|given) = 0)."""
    target, given = _names(target), _names(given)
    return len(table.marginal(given)) == len(table.marginal(tuple(dict.fromkeys(given + target))))


# -- profiles --------------------------------------------------------------

@dataclass
class InfoProfile:
    values: dict[str, float] = field(default_factory=dict)
    independent: dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"values": dict(self.values), "independent": dict(self.independent)}


def edge_profile(spec: GraphSpec) -> InfoProfile:
    """Entropy profile of a uniformly random edge."""
    t = edge_joint(spec)
    prof = InfoProfile()
    prof.values["n"] = spec.field.n_bits
    prof.values["H_X"] = entropy(t, "X")
    prof.values["H_Y"] = entropy(t, "Y")
    prof.values["H_XY"] = entropy(t, ("X", "Y"))
    prof.values["I"] = mutual_info(t, "X", "Y")
    prof.independent["X_Y"] = exact_independent(t, "X", "Y")
    return prof
