import itertools
from fractions import Fraction

import pytest

from wavelet_cn import Rep, chain, common_prefix, enumerate_reps, format_rep, parse_rep
from wavelet_cn.errors import ParseError
from wavelet_cn.reps import ZERO, ancestors, leaf, siblings

from conftest import zp


def R(k, p=3):
    return Rep.from_int(k, p)


def test_length():
    assert ZERO.length == 0
    assert R(5).length == 2 and R(5).digits == (2, 1)
    assert R(2).length == 1


def test_predecessor():
    assert R(5).predecessor() == R(2)
    assert R(2).predecessor() == ZERO
    assert R(4).predecessor() == R(1)
    with pytest.raises(ValueError):
        ZERO.predecessor()


def test_gamma():
    P = zp(3)
    assert ZERO.gamma(P) == 1
    g = R(5).gamma(P)
    assert g == 3 and g.valuation() == 1 and g.unit_digits()[0] == 1
    assert R(2).gamma(P) == 2 and R(2).gamma(P).valuation() == 0


def test_precedes():
    assert R(5).precedes(R(5))
    assert R(2).precedes(R(5))
    assert not R(1).precedes(R(5))


def test_enumerate():
    assert enumerate_reps(3, 0) == [ZERO]
    assert [r.to_int(3) for r in enumerate_reps(3, 1)] == [0, 1, 2]
    assert [r.digits for r in enumerate_reps(2, 2)] == [(), (1,), (0, 1), (1, 1)]
    assert [r.to_int(2) for r in enumerate_reps(2, 2)] == [0, 1, 2, 3]


def test_chain():
    assert [r.to_int(3) for r in chain(ZERO, R(5))] == [0, 2, 5]
    r = R(23)
    assert chain(r.predecessor(), r) == [r.predecessor(), r]
    assert [r.to_int(2) for r in chain(R(1, 2), R(7, 2))] == [1, 3, 7]
    with pytest.raises(ValueError):
        chain(R(1), R(5))


def test_common_prefix():
    assert common_prefix(R(5), R(2)) == R(2)
    assert common_prefix(R(1), R(2)) == ZERO
    assert common_prefix(R(3, 2), R(1, 2)) == R(1, 2)
    with pytest.raises(ValueError):
        common_prefix(R(1), R(1))


@pytest.mark.parametrize("p", [2, 3])
def test_invariants_exhaustive(p):
    P = zp(p)
    reps = enumerate_reps(p, 3)
    assert len(reps) == p ** 3
    assert set(enumerate_reps(p, 2)) <= set(reps)
    for r in reps[1:]:
        assert r.predecessor().precedes(r)
        assert abs(r.gamma(P)) == Fraction(1, p ** (len(r) - 1))
    for x, y in itertools.combinations(reps, 2):
        z = common_prefix(x, y)
        assert z.precedes(x) and z.precedes(y)
        zs, xs, ys = (u.scalar(P) for u in (z, x, y))
        assert abs(xs - ys) == max(abs(zs - xs), abs(zs - ys))
        if x.precedes(y):
            c = chain(x, y)
            assert all(c[i + 1].predecessor() == c[i] for i in range(len(c) - 1))
            assert all(len(c[i]) < len(c[i + 1]) for i in range(len(c) - 1))


def test_leaf_ancestors_siblings():
    assert leaf(R(23), 2) == R(23 % 9)
    assert ancestors(R(5)) == [ZERO, R(2), R(5)]
    assert siblings(R(5), 3) == [R(5), R(8)]


def test_text_form():
    assert format_rep(ZERO) == ""
    assert format_rep(R(5)) == "2,1"
    assert parse_rep("2,1", 3) == R(5)
    assert parse_rep("", 3) == ZERO
    for bad in ("2,0", "3", "a"):
        with pytest.raises(ParseError):
            parse_rep(bad, 3)
