import math
import random
from fractions import Fraction

import pytest

from wavelet_cn import Backend, FieldParams, RingElem, format_scalar, parse_scalar
from wavelet_cn.errors import CharacteristicViolation, FieldMismatch, ParseError, PrecisionExhausted
from wavelet_cn.field import INF, is_prime, legendre_valuation

from conftest import fpt, zp


def zp_digits(k, p, n):
    out = []
    for _ in range(n):
        out.append(k % p)
        k //= p
    return out


# -- frozen examples ---------------------------------------------------------

def test_add_carries_in_zp():
    P = zp(3)
    s = P.from_int(5) + P.from_int(4)
    assert s == 9
    assert RingElem.from_scalar(s).digits[:3] == (0, 0, 1)


def test_add_identity():
    P = zp(3)
    a = P.from_fraction(Fraction(7, 5))
    assert (a + P.zero()).identical(a)


def test_add_without_carry_in_fpt():
    P = fpt(3)
    a = parse_scalar("1+2*t", P)
    b = parse_scalar("2+2*t", P)
    s = a + b
    assert s.valuation() == 1 and s.unit_digits()[:2] == [1, 0]
    assert format_scalar(s) == "t"


def test_inverse_of_two_mod_81():
    P = zp(3, 4)
    x = P.one() / 2
    assert x.valuation() == 0
    assert x.unit_digits() == zp_digits(pow(2, -1, 81), 3, 4) == [2, 1, 1, 1]


def test_self_division_and_valuation_bookkeeping():
    P = zp(3)
    a = P.from_fraction(Fraction(-22, 7))
    assert a / a == 1
    nine = P.from_int(9)
    assert nine.valuation() == 2 and nine.unit_digits()[0] == 1
    q = nine / 3
    assert q.valuation() == 1 and q == 3


def test_valuation_and_abs():
    P = zp(3)
    assert P.from_int(9).valuation() == 2
    assert abs(P.from_int(9)) == Fraction(1, 9)
    assert P.one().valuation() == 0 and abs(P.one()) == 1
    assert P.zero().valuation() == INF and abs(P.zero()) == 0


def test_factorial():
    P = zp(3)
    assert P.factorial(0) == 1
    assert P.factorial(3) == 6 and P.factorial(3).valuation() == 1
    with pytest.raises(CharacteristicViolation):
        fpt(3).factorial(3)
    assert fpt(3).factorial(2) == 2


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_factorial_valuation_matches_legendre(p):
    P = zp(p, 40)
    for j in range(0, 25):
        assert P.factorial(j).valuation() == legendre_valuation(j, p)
        # digit-level oracle
        k, v = math.factorial(j), 0
        while k % p == 0:
            k //= p
            v += 1
        assert v == legendre_valuation(j, p)


# -- precision semantics -----------------------------------------------------

def test_cancellation_is_zero_at_precision_not_exact_zero():
    P = zp(3, 10)
    a = P.from_fraction(Fraction(1, 7))
    d = a - a
    assert d.is_zero and not d.is_exact_zero
    assert d.absolute_precision == 10
    assert format_scalar(d) == "O(pi^10)"
    assert P.zero().is_exact_zero and format_scalar(P.zero()) == "0"


def test_division_by_zero_at_precision_raises():
    P = zp(3, 10)
    a = P.from_int(4)
    with pytest.raises(PrecisionExhausted):
        a / (a - a)
    with pytest.raises(ZeroDivisionError):
        a / P.zero()


def test_precision_shrinks_under_division_by_small_elements():
    P = zp(3, 10)
    x = P.from_fraction(Fraction(1, 5)) - P.from_fraction(Fraction(1, 5) + 81)
    assert x.valuation() == 4
    y = P.one() / x
    assert y.valuation() == -4
    assert x.absolute_precision == 10 and x.relative_precision == 6


def test_field_mismatch():
    a = zp(3).one()
    b = zp(5).one()
    with pytest.raises(FieldMismatch):
        a + b


def test_is_prime():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    with pytest.raises(ValueError):
        FieldParams(Backend.ZP, 4, 10)


# -- textual form ------------------------------------------------------------

@pytest.mark.parametrize("text", ["0", "1", "-1", "1/2", "-7/5", "9", "2/9", "O(pi^7)", "v:3 u:1,2"])
def test_zp_literals_round_trip(text):
    P = zp(3, 20)
    assert format_scalar(parse_scalar(text, P)) == text


@pytest.mark.parametrize("text", ["0", "1", "2", "t", "2*t^2", "1+t", "t^-2+2*t", "O(pi^5)"])
def test_fpt_literals_round_trip(text):
    P = fpt(3, 20)
    assert format_scalar(parse_scalar(text, P)) == text


def test_vu_form_for_large_units():
    P = zp(3, 6)
    x = P.from_digits([1, 2, 0, 2, 1, 1], v=-1)
    s = format_scalar(x)
    assert parse_scalar(s, P) == x


@pytest.mark.parametrize("bad", ["", "v:1 u:0,1", "v:1 u:3", "1/0", "abc"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_scalar(bad, zp(3, 10))


def test_random_fraction_round_trip():
    rng = random.Random(11)
    for p in (2, 3, 5):
        P = zp(p, 40)
        for _ in range(300):
            a = rng.randint(-10 ** 5, 10 ** 5)
            b = rng.randint(1, 10 ** 5)
            x = P.from_fraction(Fraction(a, b))
            assert parse_scalar(format_scalar(x), P) == x
