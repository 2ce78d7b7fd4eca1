"""The representative tree R = union of the R_m.

A representative is a finite digit string ``a_0, a_1, ..., a_{l-1}`` with a
nonzero top digit; it stands for ``sum a_i pi**i``.  Dropping the top digit
gives the predecessor, so the representatives form a tree rooted at 0.
"""

from __future__ import annotations

import itertools
import re
from functools import total_ordering
from typing import Iterator, List, Sequence, Union

from .errors import ParseError
from .field import FieldParams, RingElem, Scalar


def _strip(digits: Sequence[int]):
    digits = tuple(int(d) for d in digits)
    k = len(digits)
    while k and digits[k - 1] == 0:
        k -= 1
    return digits[:k]


@total_ordering
class Rep:
    """A representative in canonical (trailing-zero-free) digit form."""

    __slots__ = ("digits",)

    def __init__(self, digits: Sequence[int] = ()):
        digits = _strip(digits)
        if any(d < 0 for d in digits):
            raise ValueError("negative digit")
        object.__setattr__(self, "digits", digits)

    def __setattr__(self, name, value):
        raise AttributeError("Rep is immutable")

    @classmethod
    def from_int(cls, k: int, p: int) -> "Rep":
        """The representative whose digits are the base-p expansion of k >= 0."""
        if k < 0:
            raise ValueError("representatives are non-negative")
        out = []
        while k:
            k, d = divmod(k, p)
            out.append(d)
        return cls(out)

    def to_int(self, p: int) -> int:
        x = 0
        for d in reversed(self.digits):
            x = x * p + d
        return x

    @property
    def length(self) -> int:
        return len(self.digits)

    def __len__(self):
        return len(self.digits)

    @property
    def is_zero(self) -> bool:
        return not self.digits

    @property
    def top_digit(self) -> int:
        if not self.digits:
            raise ValueError("0 has no top digit")
        return self.digits[-1]

    def predecessor(self) -> "Rep":
        if not self.digits:
            raise ValueError("0 has no predecessor")
        return Rep(self.digits[:-1])

    def scalar(self, params: FieldParams) -> Scalar:
        self.check(params.p)
        if not self.digits:
            return params.zero()
        return params.from_digits(self.digits)

    def ring_elem(self, params: FieldParams) -> RingElem:
        self.check(params.p)
        if len(self.digits) > params.prec:
            raise ValueError(f"representative longer than prec={params.prec}")
        return RingElem(params, self.digits)

    def gamma(self, params: FieldParams) -> Scalar:
        """gamma_0 = 1, otherwise r - r_- = a * pi**(l(r)-1)."""
        if not self.digits:
            return params.one()
        self.check(params.p)
        return params.from_digits([self.digits[-1]], v=len(self.digits) - 1)

    def precedes(self, x: Union["Rep", RingElem, Sequence[int]]) -> bool:
        """r precedes x: the first l(r) digits of x are those of r."""
        xd = x.digits if isinstance(x, (Rep, RingElem)) else tuple(x)
        k = len(self.digits)
        head = tuple(xd[:k])
        if len(head) < k:
            head = head + (0,) * (k - len(head))
        return head == self.digits

    def check(self, p: int) -> "Rep":
        for d in self.digits:
            if d >= p:
                raise ValueError(f"digit {d} out of range for p={p}")
        return self

    def sort_key(self):
        return (len(self.digits), self.digits)

    def __eq__(self, other):
        if not isinstance(other, Rep):
            return NotImplemented
        return self.digits == other.digits

    def __lt__(self, other):
        if not isinstance(other, Rep):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __hash__(self):
        return hash(self.digits)

    def __repr__(self):
        return f"Rep({format_rep(self)})"

    def __str__(self):
        return format_rep(self)


ZERO = Rep()


def length(r: Rep) -> int:
    return r.length


def predecessor(r: Rep) -> Rep:
    return r.predecessor()


def gamma(r: Rep, params: FieldParams) -> Scalar:
    return r.gamma(params)


def precedes(r: Rep, x) -> bool:
    return r.precedes(x)


def enumerate_reps(p: int, m: int) -> List[Rep]:
    """All p**m elements of R_m in (length, lex) order."""
    out = [ZERO]
    for length_ in range(1, m + 1):
        for head in itertools.product(range(p), repeat=length_ - 1):
            for top in range(1, p):
                out.append(Rep(head + (top,)))
    return out


def iter_level(p: int, length_: int) -> Iterator[Rep]:
    """Representatives of exact length l, in lex order."""
    if length_ == 0:
        yield ZERO
        return
    for head in itertools.product(range(p), repeat=length_ - 1):
        for top in range(1, p):
            yield Rep(head + (top,))


def chain(y: Rep, x: Rep) -> List[Rep]:
    """The path y = t_1, t_2, ..., t_k = x with (t_j)_- = t_{j-1}."""
    if y == x or not y.precedes(x) or len(y) >= len(x):
        raise ValueError(f"{y} does not strictly precede {x}")
    path = [x]
    cur = x
    while len(cur) > len(y):
        cur = cur.predecessor()
        path.append(cur)
    if path[-1] != y:
        # y precedes x but is not a predecessor-ancestor: x has zeros between.
        raise ValueError(f"{y} is not an ancestor of {x}")
    path.reverse()
    return path


def common_prefix(x: Rep, y: Rep) -> Rep:
    """Longest common initial part of the two expansions."""
    if x == y:
        raise ValueError("common_prefix needs distinct representatives")
    a, b = x.digits, y.digits
    n = max(len(a), len(b))
    a = a + (0,) * (n - len(a))
    b = b + (0,) * (n - len(b))
    k = 0
    while a[k] == b[k]:
        k += 1
    return Rep(a[:k])


def leaf(x: Union[RingElem, Rep, Sequence[int]], m: int) -> Rep:
    """The unique r in R_m with r precedes x."""
    xd = x.digits if isinstance(x, (Rep, RingElem)) else tuple(x)
    return Rep(tuple(xd[:m]))


def ancestors(r: Rep) -> List[Rep]:
    """Representatives s with s precedes r, shortest first (includes 0 and r)."""
    out = [ZERO]
    d = r.digits
    for k in range(1, len(d) + 1):
        if d[k - 1]:
            out.append(Rep(d[:k]))
    return out


def siblings(r: Rep, p: int) -> List[Rep]:
    """Same length and same predecessor as r (r included)."""
    if r.is_zero:
        return [r]
    head = r.digits[:-1]
    return [Rep(head + (a,)) for a in range(1, p)]


_REP_RE = re.compile(r"^(?:\d+(?:,\d+)*)?$")


def parse_rep(text: str, p: int = None, line=None, column=None) -> Rep:
    """Parse the digits after ``r=`` (an empty string is 0)."""
    s = text.strip()
    if s.startswith("r="):
        s = s[2:]
    if not _REP_RE.match(s):
        raise ParseError(f"malformed representative {text!r}", line, column)
    digits = tuple(int(d) for d in s.split(",")) if s else ()
    if digits and digits[-1] == 0:
        raise ParseError(f"representative {text!r} has a trailing zero digit", line, column)
    if p is not None and any(d >= p for d in digits):
        raise ParseError(f"digit out of range for p={p} in {text!r}", line, column)
    return Rep(digits)


def format_rep(r: Rep) -> str:
    return ",".join(str(d) for d in r.digits)
