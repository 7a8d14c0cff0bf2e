import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from odometer.padic import (
    BEYOND_PRECISION,
    ZERO,
    BaseError,
    BelowResolution,
    Exact,
    PAdicApprox,
    PrecisionMismatch,
    check_base,
    is_prime,
    padic_add,
    padic_distance,
    padic_from_int,
    padic_from_json,
    padic_neg,
    padic_order,
    padic_sub,
    padic_to_json,
    parse_padic,
)


def digits(a):
    return list(a.digits)


def base_p_digits(n, p, k):
    # oracle: repeated div/mod
    out = []
    n %= p**k
    for _ in range(k):
        out.append(n % p)
        n //= p
    return out


def v_p(n, p):
    # oracle: trial division
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def test_from_int_examples():
    assert digits(padic_from_int(-1, 2, 4)) == [1, 1, 1, 1]
    assert digits(padic_from_int(0, 5, 3)) == [0, 0, 0]
    assert digits(padic_from_int(35, 3, 4)) == base_p_digits(35, 3, 4) == [2, 2, 0, 1]


@pytest.mark.parametrize("n", [-1000, -7, -1, 0, 1, 12, 35, 10**9])
@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_from_int_residue(n, p):
    a = padic_from_int(n, p, 6)
    assert sum(d * p**i for i, d in enumerate(a.digits)) % p**6 == n % p**6
    assert a.to_int() == n % p**6


def test_add_examples():
    minus_one = PAdicApprox.from_digits([1, 1, 1, 1], 2)
    one = PAdicApprox.from_digits([1, 0, 0, 0], 2)
    assert digits(padic_add(minus_one, one)) == [0, 0, 0, 0]
    alpha = PAdicApprox.from_digits([2, 2, 0, 1], 3)
    assert padic_add(alpha, PAdicApprox.zero(3, 4)) == alpha
    assert digits(padic_add(alpha, PAdicApprox.from_digits([1, 0, 0, 0], 3))) == base_p_digits(36, 3, 4)
    assert base_p_digits(36, 3, 4) == [0, 0, 1, 1]


def test_neg_examples():
    assert digits(padic_neg(PAdicApprox.from_digits([1, 0, 0, 0], 2))) == [1, 1, 1, 1]
    assert digits(padic_neg(PAdicApprox.zero(3, 3))) == [0, 0, 0]
    # oracle: -(2 + 1*3) mod 27 = 22
    expected = base_p_digits(-(2 + 1 * 3), 3, 3)
    assert expected == [1, 1, 2]
    assert digits(padic_neg(PAdicApprox.from_digits([2, 1, 0], 3))) == expected


def test_order_examples():
    assert padic_order(PAdicApprox.from_digits([0, 0, 1, 2], 3)) == 2
    assert padic_order(PAdicApprox.zero(2, 4)) is BEYOND_PRECISION
    twelve = padic_from_int(12, 2, 6)
    assert digits(twelve) == [0, 0, 1, 1, 0, 0]
    assert padic_order(twelve) == v_p(12, 2) == 2


def test_distance_examples():
    a = padic_from_int(19, 5, 5)
    assert padic_distance(a, a) == BelowResolution(5)
    assert padic_distance(padic_from_int(6, 2, 8), padic_from_int(2, 2, 8)) == Exact(v_p(4, 2))
    for p in (2, 3, 5, 7):
        assert padic_distance(padic_from_int(1, p, 3), padic_from_int(0, p, 3)) == Exact(0)


def test_group_laws_exhaustive():
    for p, n in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)]:
        elems = [PAdicApprox(p, n, t) for t in itertools.product(range(p), repeat=n)]
        zero = PAdicApprox.zero(p, n)
        for a in elems:
            assert a + zero == a == zero + a
            assert a + padic_neg(a) == zero == padic_neg(a) + a
            for b in elems:
                assert a + b == b + a
                assert padic_sub(a, b) == a + padic_neg(b)
                for c in elems:
                    assert (a + b) + c == a + (b + c)


@given(st.integers(), st.integers(), st.sampled_from([2, 3, 5, 7, 11]), st.integers(1, 20))
def test_int_compatibility(m, n, p, k):
    assert padic_from_int(m, p, k) + padic_from_int(n, p, k) == padic_from_int(m + n, p, k)
    assert -padic_from_int(m, p, k) == padic_from_int(-m, p, k)


@given(st.integers(), st.integers(), st.integers(), st.sampled_from([2, 3, 5]), st.integers(1, 12))
def test_strong_triangle(x, y, z, p, k):
    a, b, c = (padic_from_int(t, p, k) for t in (x, y, z))
    assert padic_distance(a, c) <= max(padic_distance(a, b), padic_distance(b, c))


@given(st.integers(), st.integers(), st.sampled_from([2, 3, 5]), st.integers(1, 12))
def test_distance_is_valuation(x, y, p, k):
    d = padic_distance(padic_from_int(x, p, k), padic_from_int(y, p, k))
    if (x - y) % p**k == 0:
        assert d == BelowResolution(k)
    else:
        assert d == Exact(v_p(x - y, p))


@given(st.integers(), st.integers(), st.sampled_from([2, 3]), st.integers(2, 12), st.data())
def test_truncation_coherence(x, y, p, k, data):
    k2 = data.draw(st.integers(1, k - 1))
    a, b = padic_from_int(x, p, k), padic_from_int(y, p, k)
    assert (a + b).truncate(k2) == a.truncate(k2) + b.truncate(k2)


def test_mixed_precision_truncates():
    a = padic_from_int(5, 3, 6)
    b = padic_from_int(7, 3, 2)
    assert (a + b) == padic_from_int(12, 3, 2)


def test_errors():
    with pytest.raises(BaseError):
        padic_from_int(1, 1, 3)
    with pytest.raises(BaseError):
        padic_from_int(1, 6, 3)
    assert padic_from_int(7, 6, 2, allow_composite=True).digits == (1, 1)
    with pytest.raises(BaseError):
        padic_add(padic_from_int(1, 2, 3), padic_from_int(1, 3, 3))
    with pytest.raises(PrecisionMismatch):
        padic_distance(padic_from_int(1, 2, 3), padic_from_int(1, 2, 4))
    with pytest.raises(ValueError):
        PAdicApprox(2, 2, (0, 2))
    with pytest.raises(ValueError):
        padic_from_int(3, 2, 0)


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert check_base(9, allow_composite=True) == 9


def test_ultradist_ordering():
    assert Exact(3) < Exact(1)
    assert ZERO < Exact(40)
    assert BelowResolution(5) < Exact(4)
    assert not Exact(4) < BelowResolution(5)
    assert max(Exact(2), Exact(0), BelowResolution(3)) == Exact(0)
    assert Exact(2).value(3) == Fraction(1, 9)
    assert str(Exact(2)) == "1/p^2"


def test_text_and_json_formats():
    a = padic_from_int(-1, 2, 4)
    assert str(a) == "1,1,1,1 (base 2)"
    assert parse_padic("1,1,1,1 (base 2)", 2) == a
    assert parse_padic("1,1,1,1", 2) == a
    assert parse_padic("int:-1", 2, 4) == a
    assert parse_padic("1,1,1,1,0,1", 2, 4) == a
    assert padic_to_json(a) == {"p": 2, "precision": 4, "digits": [1, 1, 1, 1]}
    assert padic_from_json(json.dumps(padic_to_json(a))) == a
    with pytest.raises(BaseError):
        parse_padic("1,1 (base 3)", 2)
    with pytest.raises(ValueError):
        parse_padic("int:-1", 2)
    with pytest.raises(ValueError):
        parse_padic("1;2", 3)
    with pytest.raises(PrecisionMismatch):
        parse_padic("1,0", 2, 4)
