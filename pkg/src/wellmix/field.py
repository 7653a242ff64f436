"""Exact arithmetic in GF(p^k).

Elements are integers in ``[0, q)``: the base-``p`` digits of the index are
the coefficients of the element as a polynomial in the generator ``t``,
lowest degree first.  Index 0 is zero and index 1 is one in every field.
Moduli are stored the same way (low-to-high coefficient tuples, monic).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DegreeMismatch, DivisionByZero, InvalidElement, NotPrime, ReducibleModulus

MAX_Q = 1 << 16
TABLE_Q = 4096
DENSE_TABLE_Q = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % f for f in range(3, math.isqrt(n) + 1, 2))


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over GF(p), coefficient lists low-to-high ------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` divided by ``b`` over GF(p); ``b`` must be nonzero."""
    r = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    inv_lead = pow(b[-1], p - 2, p)
    db = len(b) - 1
    while len(r) - 1 >= db and r:
        coef = r[-1] * inv_lead % p
        shift = len(r) - 1 - db
        for i, bc in enumerate(b):
            r[shift + i] = (r[shift + i] - coef * bc) % p
        _trim(r)
    return r


def _monic_polys(p: int, deg: int):
    """All monic polynomials of exact degree ``deg`` in increasing integer order."""
    for low in range(p**deg):
        coeffs = []
        for _ in range(deg):
            low, c = divmod(low, p)
            coeffs.append(c)
        yield coeffs + [1]


def is_irreducible(p: int, coeffs: Sequence[int]) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    f = _trim([c % p for c in coeffs])
    deg = len(f) - 1
    if deg < 1:
        return False
    for dg in range(1, deg // 2 + 1):
        for g in _monic_polys(p, dg):
            if not _poly_mod(f, g, p):
                return False
    return True


def find_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree ``k``, ordered by ``sum(c_i p^i)``."""
    for cand in _monic_polys(p, k):
        if is_irreducible(p, cand):
            return tuple(cand)
    raise ReducibleModulus(f"no irreducible polynomial of degree {k} over GF({p})")  # pragma: no cover


# -- the field ---------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """A finite field GF(p^k) with an explicit monic modulus.

    Build instances with :func:`make_field`; the constructor trusts its inputs.
    """

    p: int
    k: int
    modulus: tuple[int, ...]
    q: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "q", self.p**self.k)

    # element encoding

    @property
    def n_bits(self) -> float:
        """log2 q; non-integral unless q is a power of two."""
        return math.log2(self.q)

    @property
    def bit_width(self) -> int:
        """Bits needed to write one element: ceil(log2 q)."""
        return (self.q - 1).bit_length()

    def check(self, a: int) -> int:
        if not isinstance(a, (int, np.integer)) or not 0 <= a < self.q:
            raise InvalidElement(f"{a!r} is not an element of GF({self.q})")
        return int(a)

    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            a, c = divmod(a, self.p)
            out.append(c)
        return out

    def from_digits(self, digits: Sequence[int]) -> int:
        idx = 0
        for c in reversed(digits):
            idx = idx * self.p + c
        return idx

    # arithmetic

    def add(self, a: int, b: int) -> int:
        a, b = self.check(a), self.check(b)
        if self.k == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_digits([(x + y) % self.p for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        a = self.check(a)
        if self.k == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return self.from_digits([-x % self.p for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        a, b = self.check(a), self.check(b)
        if self.k == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self.q <= TABLE_Q:
            exp, log = self._exp_log
            return int(exp[(log[a] + log[b]) % (self.q - 1)])
        return self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        a = self.check(a)
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in GF({self.q})")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        a = self.check(a)
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.k == 1:
            return pow(a, e, self.p)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def _mul_slow(self, a: int, b: int) -> int:
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        rem = _poly_mod(prod, self.modulus, self.p)
        return self.from_digits(rem + [0] * (self.k - len(rem)))

    def _pow_slow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_slow(result, base)
            base = self._mul_slow(base, base)
            e >>= 1
        return result

    @cached_property
    def primitive_element(self) -> int:
        """Smallest index generating the multiplicative group."""
        order = self.q - 1
        factors = _prime_factors(order)
        powf = self._pow_slow if self.k > 1 else (lambda x, e: pow(x, e, self.p))
        for g in range(1, self.q):
            if all(powf(g, order // r) != 1 for r in factors):
                return g
        raise AssertionError("multiplicative group is not cyclic")  # pragma: no cover

    @cached_property
    def _exp_log(self) -> tuple[np.ndarray, np.ndarray]:
        g = self.primitive_element
        exp = np.zeros(self.q - 1, dtype=np.int64)
        log = np.zeros(self.q, dtype=np.int64)
        x = 1
        for i in range(self.q - 1):
            exp[i] = x
            log[x] = i
            x = self._mul_slow(x, g) if self.k > 1 else x * g % self.p
        return exp, log

    def tables(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense ``(add, mul)`` tables of shape ``(q, q)`` for vectorized kernels."""
        return self._dense_tables

    @cached_property
    def _dense_tables(self) -> tuple[np.ndarray, np.ndarray]:
        from .errors import TooLargeToMaterialize

        if self.q > DENSE_TABLE_Q:
            raise TooLargeToMaterialize(f"dense tables for q={self.q} exceed q <= {DENSE_TABLE_Q}")
        q, p = self.q, self.p
        idx = np.arange(q, dtype=np.int64)
        if self.k == 1:
            add = (idx[:, None] + idx[None, :]) % p
            mul = (idx[:, None] * idx[None, :]) % p
        else:
            add = np.zeros((q, q), dtype=np.int64)
            scale = 1
            rest_a, rest_b = idx[:, None].copy(), idx[None, :].copy()
            for _ in range(self.k):
                add = add + ((rest_a % p + rest_b % p) % p) * scale
                rest_a //= p
                rest_b //= p
                scale *= p
            exp, log = self._exp_log
            la, lb = log[:, None], log[None, :]
            mul = exp[(la + lb) % (q - 1)]
            mul = np.where((idx[:, None] == 0) | (idx[None, :] == 0), 0, mul)
        for t in (add, mul):
            t.flags.writeable = False
        return add, mul

    def elements(self) -> range:
        return range(self.q)

    def to_dict(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus), "q": self.q}

    def __repr__(self):
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k}, modulus={list(self.modulus)})"


def make_field(p: int, k: int = 1, modulus: Sequence[int] | None = None) -> FieldSpec:
    """Validate parameters and build a :class:`FieldSpec`.

    ``modulus`` lists coefficients lowest degree first (``[1, 1, 1]`` is
    t^2 + t + 1).  It is normalized to be monic.  When omitted for ``k > 1``
    the smallest monic irreducible polynomial is used.
    """
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise NotPrime(f"{p!r} is not prime")
    p = int(p)
    if k < 1:
        raise DegreeMismatch(f"extension degree must be >= 1, got {k}")
    if p**k > MAX_Q:
        raise ValueError(f"q = {p}^{k} exceeds the supported size {MAX_Q}")
    if k == 1:
        return FieldSpec(p, 1, ())
    if modulus is None:
        return FieldSpec(p, k, find_irreducible(p, k))
    coeffs = [int(c) % p for c in modulus]
    if len(_trim(list(coeffs))) - 1 != k:
        raise DegreeMismatch(f"modulus {list(modulus)} does not have degree {k}")
    coeffs = coeffs[: k + 1]
    inv_lead = pow(coeffs[-1], p - 2, p)
    monic = tuple(c * inv_lead % p for c in coeffs)
    if not is_irreducible(p, monic):
        raise ReducibleModulus(f"modulus {list(modulus)} is reducible over GF({p})")
    return FieldSpec(p, k, monic)


def field_from_dict(data: dict) -> FieldSpec:
    return make_field(data["p"], data["k"], data.get("modulus") or None)


def arith(spec: FieldSpec, op: str, *operands: int) -> int:
    """Dispatch one of ``add | neg | mul | inv | pow`` (plus ``sub``, ``div``)."""
    ops = {
        "add": spec.add,
        "sub": spec.sub,
        "neg": spec.neg,
        "mul": spec.mul,
        "div": spec.div,
        "inv": spec.inv,
        "pow": spec.pow,
    }
    try:
        fn = ops[op]
    except KeyError:
        raise ValueError(f"unknown field operation {op!r}") from None
    return fn(*operands)


def eval_poly(spec: FieldSpec, coeffs: Sequence[int], point: int) -> int:
    """Horner evaluation of ``s_0 + s_1 t + ... + s_d t^d`` at ``point``."""
    if len(coeffs) < 1:
        raise ValueError("a polynomial needs at least one coefficient")
    spec.check(point)
    acc = 0
    for c in reversed(coeffs):
        acc = spec.add(spec.mul(acc, point), c)
    return acc
