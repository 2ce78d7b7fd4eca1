"""Exact finite-precision arithmetic in R and K.

Two backends are provided:

``zp``
    R = Z_p, pi = p, digits carry base p.
``fpt``
    R = F_p[[t]], pi = t, digits add coefficient-wise mod p with no carries.

A :class:`Scalar` is stored in capped-relative form: a valuation ``v``, a
unit known modulo ``pi**prec`` and the relative precision ``prec`` (at most
the working precision ``N``).  Cancellation to zero is never reported as an
exact zero; it yields a *zero at precision k* that remembers its absolute
precision ``k``.
"""

from __future__ import annotations

import enum
import functools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

from .errors import CharacteristicViolation, FieldMismatch, ParseError, PrecisionExhausted

INF = math.inf


class Backend(str, enum.Enum):
    ZP = "zp"
    FPT = "fpt"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@functools.lru_cache(maxsize=None)
def _ppow(p: int, k: int) -> int:
    return p ** k


def legendre_valuation(n: int, p: int) -> int:
    """v_p(n!) by Legendre's formula."""
    v, k = 0, p
    while k <= n:
        v += n // k
        k *= p
    return v


class _ZpRing:
    """Payloads are non-negative ints reduced modulo p**n."""

    def __init__(self, p):
        self.p = p

    def from_digits(self, digits):
        p, x = self.p, 0
        for d in reversed(digits):
            x = x * p + d
        return x

    def digits(self, a, n):
        p, out = self.p, []
        for _ in range(n):
            a, d = divmod(a, p)
            out.append(d)
        return out

    def trunc(self, a, n):
        return a % _ppow(self.p, n)

    def add(self, a, b, n):
        return (a + b) % _ppow(self.p, n)

    def sub(self, a, b, n):
        return (a - b) % _ppow(self.p, n)

    def neg(self, a, n):
        return (-a) % _ppow(self.p, n)

    def mul(self, a, b, n):
        return (a * b) % _ppow(self.p, n)

    def inv(self, a, n):
        return pow(a, -1, _ppow(self.p, n))

    def shift(self, a, k):
        return a * _ppow(self.p, k)

    def unshift(self, a, k):
        return a // _ppow(self.p, k)

    def val(self, a, n):
        a %= _ppow(self.p, n)
        if a == 0:
            return n
        p, k = self.p, 0
        while a % p == 0:
            a //= p
            k += 1
        return k

    def from_int(self, k):
        """Return (valuation, unit) for a nonzero integer, or None."""
        if k == 0:
            return None
        p, v = self.p, 0
        while k % p == 0:
            k //= p
            v += 1
        return v, k

    def leading_digit(self, a):
        return a % self.p


class _FptRing:
    """Payloads are tuples of F_p coefficients, index i holding t**i."""

    def __init__(self, p):
        self.p = p

    def from_digits(self, digits):
        return tuple(digits)

    def digits(self, a, n):
        a = list(a[:n])
        return a + [0] * (n - len(a))

    def trunc(self, a, n):
        a = a[:n]
        return a + (0,) * (n - len(a))

    def add(self, a, b, n):
        p = self.p
        a, b = self.trunc(a, n), self.trunc(b, n)
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b, n):
        p = self.p
        a, b = self.trunc(a, n), self.trunc(b, n)
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a, n):
        p = self.p
        return tuple((-x) % p for x in self.trunc(a, n))

    def mul(self, a, b, n):
        # Kronecker substitution: pack both series into big ints, multiply once.
        p = self.p
        a, b = a[:n], b[:n]
        if not a or not b:
            return (0,) * n
        bits = (min(len(a), len(b)) * (p - 1) ** 2).bit_length() + 1
        A = B = 0
        for c in reversed(a):
            A = (A << bits) | c
        for c in reversed(b):
            B = (B << bits) | c
        C = A * B
        mask = (1 << bits) - 1
        out = []
        for _ in range(n):
            out.append((C & mask) % p)
            C >>= bits
        return tuple(out)

    def inv(self, a, n):
        p = self.p
        b = (pow(a[0], -1, p),)
        k = 1
        while k < n:
            k = min(2 * k, n)
            ab = self.mul(a, b, k)
            corr = ((2 - ab[0]) % p,) + tuple((-c) % p for c in ab[1:])
            b = self.mul(b, corr, k)
        return self.trunc(b, n)

    def shift(self, a, k):
        return (0,) * k + tuple(a)

    def unshift(self, a, k):
        return tuple(a[k:])

    def val(self, a, n):
        for i, c in enumerate(a[:n]):
            if c:
                return i
        return n

    def from_int(self, k):
        k %= self.p
        return None if k == 0 else (0, (k,))

    def leading_digit(self, a):
        return a[0]


@dataclass(frozen=True)
class FieldParams:
    """Backend, residue characteristic p (= q) and working precision N."""

    backend: Backend
    p: int
    prec: int

    def __post_init__(self):
        object.__setattr__(self, "backend", Backend(self.backend))
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.prec < 1:
            raise ValueError("precision must be >= 1")

    @property
    def q(self) -> int:
        return self.p

    @property
    def char(self) -> int:
        """Characteristic of K (0 for Q_p)."""
        return self.p if self.backend is Backend.FPT else 0

    @cached_property
    def ring(self):
        return _ZpRing(self.p) if self.backend is Backend.ZP else _FptRing(self.p)

    def __str__(self):
        return f"field {self.backend.value} p={self.p} prec={self.prec}"

    # -- constructors -------------------------------------------------
    def zero(self) -> "Scalar":
        return Scalar(self, None, None, None)

    def one(self) -> "Scalar":
        return self.from_int(1)

    def pi(self) -> "Scalar":
        return Scalar(self, 1, self.ring.from_digits([1]), self.prec)

    def from_int(self, k: int) -> "Scalar":
        vu = self.ring.from_int(k)
        if vu is None:
            return self.zero()
        v, u = vu
        return Scalar._make(self, v, u, self.prec)

    def from_fraction(self, x) -> "Scalar":
        x = Fraction(x)
        num, den = self.from_int(x.numerator), self.from_int(x.denominator)
        if den.is_zero:
            raise ZeroDivisionError(f"denominator {x.denominator} vanishes in characteristic {self.p}")
        return num / den

    def from_digits(self, digits: Sequence[int], v: int = 0) -> "Scalar":
        """Element sum_i digits[i] * pi**(v+i), taken as exact (capped at N)."""
        for d in digits:
            if not 0 <= d < self.p:
                raise ValueError(f"digit {d} out of range for p={self.p}")
        payload = self.ring.from_digits(list(digits))
        return Scalar._make(self, v, payload, max(len(digits), self.prec), cap=True)

    def coerce(self, x) -> "Scalar":
        if isinstance(x, Scalar):
            if x.params != self:
                raise FieldMismatch(f"operands live in different fields: {x.params} vs {self}")
            return x
        if isinstance(x, bool):
            raise TypeError("bool is not a field element")
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, Fraction):
            return self.from_fraction(x)
        if isinstance(x, RingElem):
            return x.scalar()
        to_scalar = getattr(x, "scalar", None)
        if to_scalar is not None:
            return to_scalar(self)
        raise TypeError(f"cannot coerce {type(x).__name__} to a field element")

    def binomial(self, n: int, k: int) -> "Scalar":
        return self.from_int(math.comb(n, k))

    def factorial(self, j: int) -> "Scalar":
        """j! as a field element; j >= p is refused in characteristic p."""
        if j < 0:
            raise ValueError("factorial of a negative integer")
        if self.backend is Backend.FPT and j >= self.p:
            raise CharacteristicViolation(f"{j}! vanishes in characteristic {self.p} (need j <= p-1)")
        return self.from_int(math.factorial(j))

    def check_order(self, n: int, what: str = "order") -> None:
        """Refuse n >= p in positive characteristic."""
        if self.backend is Backend.FPT and n > self.p - 1:
            raise CharacteristicViolation(f"{what} n={n} requires n <= p-1 = {self.p - 1} in characteristic {self.p}")

    def check_compatible(self, other: "FieldParams") -> None:
        if other != self:
            raise FieldMismatch(f"{other} does not match {self}")


class Scalar:
    """An element of K at finite precision.  Immutable."""

    __slots__ = ("params", "v", "unit", "prec")

    def __init__(self, params: FieldParams, v, unit, prec):
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @staticmethod
    def _make(params, v, payload, n, cap=False):
        """Normalize payload * pi**v known modulo pi**(v+n)."""
        ring = params.ring
        k = ring.val(payload, n)
        if k >= n:
            if cap:
                return Scalar(params, None, None, None)
            return Scalar(params, v + n, None, 0)
        rel = min(n - k, params.prec)
        unit = ring.trunc(ring.unshift(payload, k), rel)
        return Scalar(params, v + k, unit, rel)

    @staticmethod
    def _zero_at(params, absprec):
        return Scalar(params, absprec, None, 0)

    # -- inspection -----------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.unit is None

    @property
    def is_exact_zero(self) -> bool:
        return self.unit is None and self.v is None

    def valuation(self):
        """v(x); +inf for zero (exact or at precision)."""
        return INF if self.unit is None else self.v

    def __abs__(self) -> Fraction:
        if self.unit is None:
            return Fraction(0)
        return Fraction(1, self.params.p ** self.v) if self.v >= 0 else Fraction(self.params.p ** -self.v)

    def abs(self) -> Fraction:
        return abs(self)

    @property
    def absolute_precision(self):
        if self.unit is None:
            return INF if self.v is None else self.v
        return self.v + self.prec

    @property
    def relative_precision(self) -> int:
        return 0 if self.unit is None else self.prec

    def unit_digits(self):
        if self.unit is None:
            return []
        return self.params.ring.digits(self.unit, self.prec)

    @property
    def leading_digit(self) -> int:
        if self.unit is None:
            raise ValueError("zero has no leading digit")
        return self.params.ring.leading_digit(self.unit)

    def identical(self, other: "Scalar") -> bool:
        """Structural equality: flags, valuation, unit and precision all agree."""
        return (self.params == other.params and self.v == other.v
                and self.unit == other.unit and self.prec == other.prec)

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other):
        try:
            return self.params.coerce(other)
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        params, ring = self.params, self.params.ring
        cap = min(self.absolute_precision, other.absolute_precision)
        v0 = min(self.v, other.v)
        if v0 >= cap:
            return Scalar._zero_at(params, cap)
        n = cap - v0
        a = ring.shift(self.unit, self.v - v0) if self.unit is not None else ring.from_digits([])
        b = ring.shift(other.unit, other.v - v0) if other.unit is not None else ring.from_digits([])
        return Scalar._make(params, v0, ring.add(a, b, n), n)

    __radd__ = __add__

    def __neg__(self):
        if self.unit is None:
            return self
        return Scalar(self.params, self.v, self.params.ring.neg(self.unit, self.prec), self.prec)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        params = self.params
        if self.is_exact_zero or other.is_exact_zero:
            return params.zero()
        if self.unit is None or other.unit is None:
            va = self.v
            vb = other.v
            return Scalar._zero_at(params, va + vb)
        n = min(self.prec, other.prec)
        return Scalar(params, self.v + other.v, params.ring.mul(self.unit, other.unit, n), n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        params = self.params
        if other.is_exact_zero:
            raise ZeroDivisionError("division by exact zero")
        if other.unit is None:
            raise PrecisionExhausted(f"division by zero at precision {other.v}")
        if self.is_exact_zero:
            return self
        if self.unit is None:
            return Scalar._zero_at(params, self.v - other.v)
        ring = params.ring
        n = min(self.prec, other.prec)
        return Scalar(params, self.v - other.v, ring.mul(self.unit, ring.inv(other.unit, n), n), n)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.params.one() / (self ** -k)
        if k == 0:
            return self.params.one()
        if self.is_exact_zero:
            return self
        if self.unit is None:
            return Scalar._zero_at(self.params, self.v * k) if self.v > 0 else self._pow_raise()
        ring = self.params.ring
        n = self.prec
        u, acc, e = self.unit, ring.from_digits([1]), k
        while e:
            if e & 1:
                acc = ring.mul(acc, u, n)
            u = ring.mul(u, u, n)
            e >>= 1
        return Scalar(self.params, self.v * k, acc, n)

    def _pow_raise(self):
        raise PrecisionExhausted("power of a zero with non-positive absolute precision")

    def shift(self, k: int) -> "Scalar":
        """Multiply by pi**k."""
        if self.unit is None:
            return self if self.v is None else Scalar._zero_at(self.params, self.v + k)
        return Scalar(self.params, self.v + k, self.unit, self.prec)

    def with_absolute_precision(self, k: int) -> "Scalar":
        """Forget every digit at or beyond pi**k."""
        if self.absolute_precision <= k:
            return self
        if self.unit is None or self.v >= k:
            return Scalar._zero_at(self.params, k)
        n = k - self.v
        return Scalar(self.params, self.v, self.params.ring.trunc(self.unit, n), n)

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero

    __hash__ = None

    def __bool__(self):
        return not self.is_zero

    # -- text -----------------------------------------------------------
    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Scalar({self.params.backend.value} p={self.params.p}: {format_scalar(self)})"


class RingElem:
    """An element of R modulo pi**N, stored as its N digits (index i = pi**i)."""

    __slots__ = ("params", "digits", "_scalar")

    def __init__(self, params: FieldParams, digits: Iterable[int]):
        digits = tuple(digits)
        if len(digits) > params.prec:
            digits = digits[:params.prec]
        digits = digits + (0,) * (params.prec - len(digits))
        for d in digits:
            if not 0 <= d < params.p:
                raise ValueError(f"digit {d} out of range for p={params.p}")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "_scalar", None)

    def __setattr__(self, name, value):
        raise AttributeError("RingElem is immutable")

    @classmethod
    def from_int(cls, params: FieldParams, k: int) -> "RingElem":
        if params.backend is Backend.ZP:
            k %= _ppow(params.p, params.prec)
            return cls(params, params.ring.digits(k, params.prec))
        return cls(params, [k % params.p])

    @classmethod
    def from_scalar(cls, x: Scalar) -> "RingElem":
        params = x.params
        if x.is_zero:
            return cls(params, [])
        if x.v < 0:
            raise ValueError("element is not integral")
        return cls(params, [0] * x.v + x.unit_digits())

    def scalar(self, params: FieldParams = None) -> Scalar:
        """The element as a Scalar known to absolute precision N."""
        if params is not None and params != self.params:
            raise FieldMismatch(f"{self.params} vs {params}")
        s = self._scalar
        if s is None:
            pr = self.params
            s = Scalar._make(pr, 0, pr.ring.from_digits(list(self.digits)), pr.prec)
            object.__setattr__(self, "_scalar", s)
        return s

    def __eq__(self, other):
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.params == other.params and self.digits == other.digits

    def __hash__(self):
        return hash((self.params, self.digits))

    def __repr__(self):
        return f"RingElem({','.join(map(str, self.digits))})"

    def to_int(self) -> int:
        """Digits read as a base-p integer (the Zp value; an index for FpT)."""
        x = 0
        for d in reversed(self.digits):
            x = x * self.params.p + d
        return x


# ---------------------------------------------------------------------------
# textual form
# ---------------------------------------------------------------------------

def _rational_reconstruct(u: int, M: int):
    """Small a/b with a == u*b (mod M), or None."""
    bound = math.isqrt(M // 2)
    r0, r1 = M, u % M
    s0, s1 = 0, 1
    while r1 > bound:
        qt = r0 // r1
        r0, r1 = r1, r0 - qt * r1
        s0, s1 = s1, s0 - qt * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    a, b = r1, s1
    if b < 0:
        a, b = -a, -b
    if math.gcd(a, b) != 1 or (a - u * b) % M:
        return None
    return a, b


def _fmt_digits(ds):
    return ",".join(str(d) for d in ds)


def format_scalar(x: Scalar) -> str:
    """Canonical text of a scalar.

    A value that keeps at least half of the working digits and is visibly
    small (a fraction recoverable by rational reconstruction for ``zp``, a
    Laurent polynomial using under half of its digits for ``fpt``) prints as a
    literal.  Anything else uses the explicit ``v:<int> u:<digits>`` form, and
    a zero at precision k prints as ``O(pi^k)``.
    """
    params = x.params
    if x.is_exact_zero:
        return "0"
    if x.unit is None:
        return f"O(pi^{x.v})"
    if 2 * x.prec >= params.prec:
        if params.backend is Backend.ZP:
            rr = _rational_reconstruct(x.unit, _ppow(params.p, x.prec))
            if rr is not None and rr[0] % params.p and rr[1] % params.p:
                a, b = rr
                if x.v >= 0:
                    a *= params.p ** x.v
                else:
                    b *= params.p ** (-x.v)
                return str(a) if b == 1 else f"{a}/{b}"
        else:
            ds = x.unit_digits()
            last = max(i for i, c in enumerate(ds) if c)
            if 2 * last < x.prec:
                terms = []
                for i, c in enumerate(ds):
                    if not c:
                        continue
                    e = x.v + i
                    if e == 0:
                        terms.append(str(c))
                    else:
                        mono = "t" if e == 1 else f"t^{e}"
                        terms.append(mono if c == 1 else f"{c}*{mono}")
                return "+".join(terms)
    return f"v:{x.v} u:{_fmt_digits(x.unit_digits())}"


_VU_RE = re.compile(r"^v:(-?\d+)\s+u:(\d+(?:,\d+)*)$")
_ZERO_RE = re.compile(r"^O\((?:pi|t)\^(-?\d+)\)$")
_FRAC_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")
_LTERM_RE = re.compile(r"([+-])(\d+)?\*?((?:t|pi)(?:\^-?\d+)?)?")
_TERM_RE = re.compile(r"^(\d+)?\*?(?:(t|pi)(?:\^(-?\d+))?)?$")


def parse_scalar(text: str, params: FieldParams, line=None, column=None) -> Scalar:
    s = text.strip()
    if not s:
        raise ParseError("empty scalar", line, column)
    m = _VU_RE.match(s)
    if m:
        v = int(m.group(1))
        digits = [int(d) for d in m.group(2).split(",")]
        if any(d >= params.p for d in digits):
            raise ParseError(f"digit out of range for p={params.p} in {s!r}", line, column)
        if digits[0] == 0:
            raise ParseError(f"unit must have a nonzero leading digit in {s!r}", line, column)
        if len(digits) > params.prec:
            raise ParseError(f"unit has more than prec={params.prec} digits", line, column)
        return Scalar(params, v, params.ring.from_digits(digits), len(digits))
    m = _ZERO_RE.match(s)
    if m:
        return Scalar._zero_at(params, int(m.group(1)))
    if params.backend is Backend.ZP:
        m = _FRAC_RE.match(s)
        if not m:
            raise ParseError(f"malformed zp scalar {s!r}", line, column)
        num, den = int(m.group(1)), int(m.group(2) or 1)
        if den == 0:
            raise ParseError("zero denominator", line, column)
        return params.from_fraction(Fraction(num, den))
    return _parse_laurent(s, params, line, column)


def _parse_laurent(s, params, line, column):
    body = s.replace(" ", "")
    if body[0] not in "+-":
        body = "+" + body
    pieces, pos = [], 0
    while pos < len(body):
        m = _LTERM_RE.match(body, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ParseError(f"malformed fpt scalar {s!r}", line, column)
        pieces.append(m)
        pos = m.end()
    coeffs = {}
    for m in pieces:
        sign = m.group(1)
        m = _TERM_RE.match(m.group(0)[1:])
        c = int(m.group(1)) if m.group(1) is not None else 1
        e = 0 if m.group(2) is None else int(m.group(3) or 1)
        if sign == "-":
            c = -c
        coeffs[e] = (coeffs.get(e, 0) + c) % params.p
    coeffs = {e: c for e, c in coeffs.items() if c}
    if not coeffs:
        return params.zero()
    lo, hi = min(coeffs), max(coeffs)
    if hi - lo + 1 > params.prec:
        raise ParseError(f"literal spans more than prec={params.prec} digits", line, column)
    return params.from_digits([coeffs.get(e, 0) for e in range(lo, hi + 1)], v=lo)


Number = Union[Scalar, int, Fraction]
