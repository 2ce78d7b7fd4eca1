"""Property-based checks of the invariants, with hypothesis driving the inputs."""

import itertools
import math
from fractions import Fraction

from hypothesis import assume, given
from hypothesis import strategies as st

from wavelet_cn import (Backend, CnCombo, FieldParams, Rep, RingElem, antiderive, derivative_D, enumerate_reps,
                        extract_bnj, format_scalar, lower_basis, norm_n, parse_function, parse_scalar, phi, psi,
                        raise_basis, serialize_function)
from wavelet_cn.calculus import expand_c0, psi_of_derivative

FIELDS = [(Backend.ZP, 2), (Backend.ZP, 3), (Backend.ZP, 5), (Backend.FPT, 2), (Backend.FPT, 3), (Backend.FPT, 5)]
PREC = 24


@st.composite
def params(draw, min_p=2):
    b, p = draw(st.sampled_from([f for f in FIELDS if f[1] >= min_p]))
    return FieldParams(b, p, PREC)


@st.composite
def scalars(draw, P, vmin=-2, vmax=3, allow_zero=True):
    if allow_zero and draw(st.integers(0, 9)) == 0:
        return P.zero()
    lead = draw(st.integers(1, P.p - 1))
    rest = draw(st.lists(st.integers(0, P.p - 1), min_size=P.prec - 1, max_size=P.prec - 1))
    return P.from_digits([lead] + rest, v=draw(st.integers(vmin, vmax)))


@st.composite
def points(draw, P):
    return RingElem(P, draw(st.lists(st.integers(0, P.p - 1), min_size=P.prec, max_size=P.prec)))


def level_cap(P, cap=3):
    return min(cap, P.p - 1) if P.backend is Backend.FPT else cap


@st.composite
def combos(draw, P, level=None, max_depth=2, vmin=0, vmax=1):
    n = draw(st.integers(0, level_cap(P))) if level is None else level
    depth = draw(st.integers(0, max_depth))
    keys = [(r, j) for r in enumerate_reps(P.p, depth) for j in range(n + 1)]
    chosen = draw(st.lists(st.sampled_from(keys), unique=True, max_size=min(len(keys), 8)))
    return CnCombo(P, n, depth, {k: draw(scalars(P, vmin, vmax, allow_zero=False)) for k in chosen})


# -- scalars -------------------------------------------------------------------------

@given(st.data())
def test_ultrametric_and_multiplicativity(data):
    P = data.draw(params())
    a = data.draw(scalars(P))
    b = data.draw(scalars(P))
    s = a + b
    assert abs(s) <= max(abs(a), abs(b))
    if abs(a) != abs(b):
        assert abs(s) == max(abs(a), abs(b))
    assert abs(a * b) == abs(a) * abs(b)


@given(st.data())
def test_division_undoes_multiplication(data):
    P = data.draw(params())
    a = data.draw(scalars(P))
    b = data.draw(scalars(P, allow_zero=False))
    assert (a * b) / b == a


@given(st.data())
def test_scalar_text_round_trip(data):
    P = data.draw(params())
    a = data.draw(scalars(P))
    assert parse_scalar(format_scalar(a), P).identical(a)


# -- representatives ----------------------------------------------------------------

@given(st.sampled_from([2, 3, 5]), st.lists(st.integers(0, 4), max_size=6))
def test_rep_invariants(p, digits):
    digits = [d % p for d in digits]
    while digits and digits[-1] == 0:
        digits.pop()
    r = Rep(tuple(digits))
    P = FieldParams(Backend.ZP, p, PREC)
    assert Rep.from_int(r.to_int(p), p) == r
    if not r.is_zero:
        assert r.predecessor().precedes(r)
        assert abs(r.gamma(P)) == Fraction(1, p ** (len(r) - 1))
        assert r.scalar(P) - r.predecessor().scalar(P) == r.gamma(P)


# -- functions ------------------------------------------------------------------------

@given(st.data())
def test_combo_text_round_trip(data):
    P = data.draw(params())
    f = data.draw(combos(P, vmin=-2, vmax=2))
    s = serialize_function(f)
    assert serialize_function(parse_function(s)) == s


@given(st.data())
def test_eval_is_linear(data):
    P = data.draw(params())
    n = data.draw(st.integers(0, level_cap(P)))
    f = data.draw(combos(P, level=n))
    g = data.draw(combos(P, level=n))
    c = data.draw(scalars(P, 0, 2))
    x = data.draw(points(P))
    assert (f + g.scale(c))(x) == f(x) + c * g(x)


@given(st.data())
def test_phi_symmetric(data):
    P = data.draw(params())
    f = data.draw(combos(P))
    k = data.draw(st.integers(1, 3))
    xs = data.draw(st.lists(points(P), min_size=k + 1, max_size=k + 1, unique_by=lambda x: x.digits))
    ref = phi(f, xs)
    for perm in itertools.permutations(xs):
        assert phi(f, perm) == ref


@given(st.data())
def test_reconstruction(data):
    P = data.draw(params())
    f = data.draw(combos(P, vmin=-1, vmax=2))
    n = data.draw(st.integers(0, level_cap(P)))
    assume(f.level <= n)
    g = extract_bnj(f, n).rebuild()
    for _ in range(5):
        x = data.draw(points(P))
        assert g(x) == f(x)


@given(st.data())
def test_orthonormality(data):
    P = data.draw(params())
    n = data.draw(st.integers(1, level_cap(P)))
    f = data.draw(combos(P, level=n, vmin=-2, vmax=3))
    assert norm_n(f, n) == max((abs(c) for c in f.terms.values()), default=0)


@given(st.data())
def test_derivative_composition(data):
    P = data.draw(params())
    n = data.draw(st.integers(1, level_cap(P)))
    f = data.draw(combos(P, level=n))
    j = data.draw(st.integers(0, n))
    assert derivative_D(derivative_D(f, n - j), j) == derivative_D(f, n).scale(math.comb(n, j))


@given(st.data())
def test_first_chain_lemma(data):
    P = data.draw(params())
    n = data.draw(st.integers(0, level_cap(P)))
    f = data.draw(combos(P, level=n))
    x, y, z = data.draw(st.lists(points(P), min_size=3, max_size=3, unique_by=lambda x: x.digits))
    xs, ys, zs = x.scalar(), y.scalar(), z.scalar()
    rhs = ((xs - zs) / (xs - ys)) ** (n + 1) * psi(f, n, x, z)
    for l in range(n + 1):
        rhs = rhs - ((ys - zs) / (xs - ys)) ** (n + 1 - l) * psi_of_derivative(f, n - l, l, y, z)
    assert psi(f, n, x, y) == rhs


@given(st.data())
def test_lower_raise_round_trip(data):
    P = data.draw(params())
    n = data.draw(st.integers(1, level_cap(P)))
    f = data.draw(combos(P, level=n, max_depth=1))
    t = extract_bnj(f, n, depth=f.depth + 1)
    low = lower_basis(t, depth=f.depth + 1)
    assert low == extract_bnj(f, n - 1, depth=f.depth + 1)
    assert raise_basis(low, expand_c0(derivative_D(f, n), f.depth + 1)) == t


@given(st.data())
def test_antiderivative_differentiates_back(data):
    P = data.draw(params())
    n = data.draw(st.integers(1, level_cap(P)))
    f = data.draw(combos(P, level=n - 1))
    assert derivative_D(antiderive(f, n), 1) == f
