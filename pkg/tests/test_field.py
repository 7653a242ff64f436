import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wellmix.errors import (DegreeMismatch, DivisionByZero, InvalidElement, NotPrime,
                            ReducibleModulus, TooLargeToMaterialize)
from wellmix.field import (arith, eval_poly, field_from_dict, find_irreducible, is_irreducible,
                           is_prime, make_field)

FIELDS = [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2), (2, 4), (5, 2)]


# plain polynomial arithmetic over Z_p, digits low to high
def _polymul_mod(a, b, mod, p):
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    k = len(mod) - 1
    for top in range(len(prod) - 1, k - 1, -1):
        c = prod[top]
        if c:
            for i in range(k + 1):
                prod[top - k + i] = (prod[top - k + i] - c * mod[i]) % p
    return (prod + [0] * k)[:k]


def _digits(a, p, k):
    return [(a // p**i) % p for i in range(k)]


def _undigits(ds, p):
    return sum(d * p**i for i, d in enumerate(ds))


def oracle_mul(f, a, b):
    if f.k == 1:
        return a * b % f.p
    return _undigits(_polymul_mod(_digits(a, f.p, f.k), _digits(b, f.p, f.k), f.modulus, f.p), f.p)


def oracle_add(f, a, b):
    return _undigits([(x + y) % f.p for x, y in zip(_digits(a, f.p, f.k), _digits(b, f.p, f.k))], f.p)


def test_is_prime_matches_sieve():
    sieve = [True] * 500
    sieve[0] = sieve[1] = False
    for i in range(2, 500):
        if sieve[i]:
            for j in range(i * i, 500, i):
                sieve[j] = False
    assert [is_prime(n) for n in range(500)] == sieve


def test_gf4_multiplication_table():
    f = make_field(2, 2)
    assert f.modulus == (1, 1, 1)
    # t * t = t + 1, t * (t + 1) = 1
    assert f.mul(2, 2) == 3
    assert f.mul(2, 3) == 1
    assert f.mul(3, 3) == 2


def test_default_modulus_is_smallest_irreducible():
    for p, k in [(2, 2), (2, 3), (3, 2), (2, 4), (5, 2)]:
        mod = find_irreducible(p, k)
        value = _undigits(mod, p)
        for smaller in range(p**k, value):
            cand = _digits(smaller, p, k + 1)
            assert not is_irreducible(p, cand)
        assert mod[-1] == 1


def test_irreducible_has_no_roots_in_small_cases():
    for p in (2, 3, 5):
        for coeffs in itertools.product(range(p), repeat=2):
            poly = list(coeffs) + [1]
            has_root = any(sum(c * x**i for i, c in enumerate(poly)) % p == 0 for x in range(p))
            assert is_irreducible(p, poly) == (not has_root)


@pytest.mark.parametrize("p,k", FIELDS)
def test_against_polynomial_oracle(p, k):
    f = make_field(p, k)
    for a in range(f.q):
        for b in range(f.q):
            assert f.mul(a, b) == oracle_mul(f, a, b)
            assert f.add(a, b) == oracle_add(f, a, b)


@pytest.mark.parametrize("p,k", FIELDS)
def test_tables_match_scalar_ops(p, k):
    f = make_field(p, k)
    add, mul = f.tables()
    for a in range(f.q):
        for b in range(f.q):
            assert add[a, b] == f.add(a, b)
            assert mul[a, b] == f.mul(a, b)
    assert not add.flags.writeable


@pytest.mark.parametrize("p,k", FIELDS)
def test_multiplicative_group_is_cyclic(p, k):
    f = make_field(p, k)
    g = f.primitive_element
    seen = {f.pow(g, e) for e in range(f.q - 1)}
    assert seen == set(range(1, f.q))


@st.composite
def field_and_elements(draw, n=3):
    p, k = draw(st.sampled_from(FIELDS + [(11, 1), (3, 3), (2, 8), (13, 2)]))
    f = make_field(p, k)
    return (f,) + tuple(draw(st.integers(0, f.q - 1)) for _ in range(n))


@given(field_and_elements())
def test_field_axioms(args):
    f, a, b, c = args
    assert f.add(a, b) == f.add(b, a)
    assert f.mul(a, b) == f.mul(b, a)
    assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.add(a, f.neg(a)) == 0
    assert f.sub(f.add(a, b), b) == a
    if a:
        assert f.mul(a, f.inv(a)) == 1
        assert f.div(f.mul(a, b), a) == b


@given(field_and_elements(1), st.integers(0, 200))
def test_pow_matches_repeated_multiplication(args, e):
    f, a = args
    acc = 1
    for _ in range(e):
        acc = f.mul(acc, a)
    assert f.pow(a, e) == acc


@given(field_and_elements(1))
def test_frobenius_fixes_everything_after_k_steps(args):
    f, a = args
    assert f.pow(a, f.q) == a


def test_division_by_zero():
    f = make_field(3, 2)
    with pytest.raises(DivisionByZero):
        f.inv(0)
    with pytest.raises(ZeroDivisionError):
        f.div(1, 0)


def test_invalid_parameters():
    with pytest.raises(NotPrime):
        make_field(4)
    with pytest.raises(NotPrime):
        make_field(1)
    with pytest.raises(ReducibleModulus):
        make_field(2, 2, [1, 0, 1])
    with pytest.raises(DegreeMismatch):
        make_field(2, 3, [1, 1, 1])
    with pytest.raises(InvalidElement):
        make_field(5).add(5, 0)


def test_modulus_normalized_to_monic():
    f = make_field(3, 2, [2, 0, 2])
    assert f.modulus == (1, 0, 1)


def test_tables_guard():
    with pytest.raises(TooLargeToMaterialize):
        make_field(2, 11).tables()


def test_roundtrip_and_dispatch():
    f = make_field(2, 3, [1, 1, 0, 1])
    assert field_from_dict(f.to_dict()) == f
    assert f.n_bits == 3.0 and f.bit_width == 3
    assert arith(f, "mul", 3, 5) == f.mul(3, 5)
    assert arith(f, "inv", 6) == f.inv(6)
    with pytest.raises(ValueError):
        arith(f, "sqrt", 2)


@given(field_and_elements(0), st.lists(st.integers(0, 10**6), min_size=1, max_size=5),
       st.integers(0, 10**6))
def test_eval_poly_matches_naive_sum(args, raw, raw_x):
    (f,) = args
    coeffs = [c % f.q for c in raw]
    x = raw_x % f.q
    naive = 0
    for i, c in enumerate(coeffs):
        naive = f.add(naive, f.mul(c, f.pow(x, i)))
    assert eval_poly(f, coeffs, x) == naive


def test_tables_dtype():
    add, mul = make_field(5).tables()
    assert add.dtype == mul.dtype and np.issubdtype(add.dtype, np.integer)
