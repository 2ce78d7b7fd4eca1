"""Functions R -> K.

:class:`CnCombo` is a finite combination of level-n basis functions
``gamma_r**(n-j) * (x-r)**j * chi_r``; on every disk ``D_s`` of the deepest
level it is a polynomial of degree at most n, which :meth:`CnCombo.local_poly`
returns recentred at s.  :class:`Evaluator` wraps an arbitrary callable and
:class:`CoeffStream` describes a (possibly infinite) coefficient family.
"""

from __future__ import annotations

import math
import random
import re
import threading
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import CharacteristicViolation, FieldMismatch, ParseError
from .field import Backend, FieldParams, RingElem, Scalar, format_scalar, parse_scalar
from .reps import ZERO, Rep, ancestors, enumerate_reps, format_rep, leaf, parse_rep

Point = Union[RingElem, Rep]
TermKey = Tuple[Rep, int]


def chi_eval(r: Rep, x: Point, params: FieldParams) -> Scalar:
    """Indicator of the disk D_r as a field element."""
    return params.one() if r.precedes(x) else params.zero()


def _point_scalar(x: Point, params: FieldParams) -> Scalar:
    if isinstance(x, Rep):
        return x.scalar(params)
    if isinstance(x, RingElem):
        return x.scalar(params)
    return params.coerce(x)


def recenter(coeffs: Sequence[Scalar], shift: Scalar) -> List[Scalar]:
    """Coefficients of sum a_k (y + shift)**k as a polynomial in y."""
    n = len(coeffs)
    if n == 0:
        return []
    params = coeffs[0].params
    out = [params.zero() for _ in range(n)]
    powers = [params.one()]
    for _ in range(n - 1):
        powers.append(powers[-1] * shift)
    for k, a in enumerate(coeffs):
        if a.is_exact_zero:
            continue
        for j in range(k + 1):
            out[j] = out[j] + a * powers[k - j] * math.comb(k, j)
    return out


@dataclass(frozen=True)
class LeafPoly:
    """sum_j a_j (x - r)**j, valid on the disk D_r."""

    leaf: Rep
    coeffs: Tuple[Scalar, ...]

    def eval(self, x: Point) -> Scalar:
        params = self.coeffs[0].params
        h = _point_scalar(x, params) - self.leaf.scalar(params)
        acc = params.zero()
        for a in reversed(self.coeffs):
            acc = acc * h + a
        return acc

    def taylor(self, y: Point, j: int) -> Scalar:
        """D_j of the polynomial at y (coefficient of (x-y)**j)."""
        params = self.coeffs[0].params
        h = _point_scalar(y, params) - self.leaf.scalar(params)
        acc = params.zero()
        for k in range(len(self.coeffs) - 1, j - 1, -1):
            acc = acc * h + self.coeffs[k] * math.comb(k, j)
        return acc

    @property
    def degree(self) -> int:
        for k in range(len(self.coeffs) - 1, -1, -1):
            if not self.coeffs[k].is_zero:
                return k
        return -1


class CnCombo:
    """Finite combination sum c_{r,j} gamma_r**(n-j) (x-r)**j chi_r.

    Immutable.  ``terms`` maps (r, j) to a nonzero scalar; r must have
    length at most ``depth`` and j at most ``level``.
    """

    __slots__ = ("params", "level", "depth", "terms", "_leaf_cache", "_lock")

    def __init__(self, params: FieldParams, level: int, depth: int,
                 terms: Optional[Mapping[TermKey, object]] = None):
        if level < 0 or depth < 0:
            raise ValueError("level and depth must be non-negative")
        if params.backend is Backend.FPT and level > params.p - 1:
            raise CharacteristicViolation(
                f"level n={level} requires n <= p-1 = {params.p - 1} in characteristic {params.p}")
        clean: Dict[TermKey, Scalar] = {}
        for (r, j), c in (terms or {}).items():
            if not isinstance(r, Rep):
                raise TypeError("term keys are (Rep, int)")
            r.check(params.p)
            if len(r) > depth:
                raise ValueError(f"representative {r} is deeper than depth {depth}")
            if not 0 <= j <= level:
                raise ValueError(f"j={j} outside 0..{level}")
            c = params.coerce(c)
            if not c.is_zero:
                clean[(r, j)] = c
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1]))))
        object.__setattr__(self, "_leaf_cache", {})
        object.__setattr__(self, "_lock", threading.Lock())

    def __setattr__(self, name, value):
        raise AttributeError("CnCombo is immutable")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, params, level=0, depth=0):
        return cls(params, level, depth, {})

    @classmethod
    def chi(cls, params: FieldParams, r: Rep, level: int = 0, depth: Optional[int] = None) -> "CnCombo":
        """The indicator chi_r written in the level-n basis."""
        depth = len(r) if depth is None else depth
        return cls(params, level, depth, {(r, 0): r.gamma(params) ** (-level)})

    @classmethod
    def polynomial(cls, params: FieldParams, coeffs: Sequence, level: Optional[int] = None,
                   depth: int = 0) -> "CnCombo":
        """sum a_j x**j on all of R."""
        level = len(coeffs) - 1 if level is None else level
        if len(coeffs) - 1 > level:
            raise ValueError("polynomial degree exceeds the level")
        return cls(params, level, depth, {(ZERO, j): a for j, a in enumerate(coeffs)})

    @classmethod
    def random(cls, params: FieldParams, level: int, depth: int, rng: random.Random,
               density: float = 1.0, max_val: int = 0) -> "CnCombo":
        """Random integral coefficients; each (r, j) kept with probability density."""
        terms = {}
        for r in enumerate_reps(params.p, depth):
            for j in range(level + 1):
                if rng.random() < density:
                    v = rng.randint(0, max_val) if max_val else 0
                    digits = [rng.randrange(1, params.p)] + [rng.randrange(params.p) for _ in range(params.prec - 1)]
                    terms[(r, j)] = params.from_digits(digits, v=v)
        return cls(params, level, depth, terms)

    # -- structure --------------------------------------------------------
    def with_depth(self, depth: int) -> "CnCombo":
        if depth < self.depth and any(len(r) > depth for r, _ in self.terms):
            raise ValueError("cannot reduce depth below an occupied representative")
        return CnCombo(self.params, self.level, depth, self.terms)

    def with_level(self, level: int) -> "CnCombo":
        """Same function written in the level-n' basis (n' >= current level)."""
        if level < self.level:
            if any(j > level for _, j in self.terms):
                raise ValueError("terms of degree above the requested level")
        terms = {(r, j): c * r.gamma(self.params) ** (self.level - level) for (r, j), c in self.terms.items()}
        return CnCombo(self.params, level, self.depth, terms)

    def _aligned(self, other: "CnCombo"):
        if not isinstance(other, CnCombo):
            raise TypeError("expected a CnCombo")
        if other.params != self.params:
            raise FieldMismatch(f"{other.params} vs {self.params}")
        n = max(self.level, other.level)
        m = max(self.depth, other.depth)
        a = self if self.level == n else self.with_level(n)
        b = other if other.level == n else other.with_level(n)
        return a, b, n, m

    def __add__(self, other):
        a, b, n, m = self._aligned(other)
        terms = dict(a.terms)
        for k, c in b.terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return CnCombo(self.params, n, m, terms)

    def __neg__(self):
        return CnCombo(self.params, self.level, self.depth, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "CnCombo":
        s = self.params.coerce(s)
        return CnCombo(self.params, self.level, self.depth, {k: c * s for k, c in self.terms.items()})

    def __mul__(self, s):
        if isinstance(s, CnCombo):
            return NotImplemented
        return self.scale(s)

    __rmul__ = __mul__

    def same_terms(self, other: "CnCombo") -> bool:
        """Equal level, depth and coefficients (at tracked precision)."""
        if (self.params, self.level, self.depth) != (other.params, other.level, other.depth):
            return False
        if self.terms.keys() != other.terms.keys():
            return False
        return all(self.terms[k] == other.terms[k] for k in self.terms)

    def __eq__(self, other):
        if not isinstance(other, CnCombo):
            return NotImplemented
        return self.same_terms(other)

    __hash__ = None

    def __repr__(self):
        return f"CnCombo(level={self.level}, depth={self.depth}, terms={len(self.terms)})"

    # -- evaluation -------------------------------------------------------
    def eval(self, x: Point) -> Scalar:
        params = self.params
        xs = _point_scalar(x, params)
        acc = params.zero()
        n = self.level
        for (r, j), c in self.terms.items():
            if r.precedes(x):
                acc = acc + c * r.gamma(params) ** (n - j) * (xs - r.scalar(params)) ** j
        return acc

    __call__ = eval

    def local_poly(self, s: Rep) -> LeafPoly:
        """The polynomial of f near s, in powers of (x - s).

        It is valid on the disk of radius q**-max(depth, l(s)) around s, i.e.
        on the depth-m leaf containing s.
        """
        cache = self._leaf_cache
        hit = cache.get(s)
        if hit is not None:
            return hit
        params, n = self.params, self.level
        ss = s.scalar(params)
        coeffs = [params.zero() for _ in range(n + 1)]
        for r in ancestors(s):
            if len(r) > self.depth:
                break
            gr = r.gamma(params)
            shift = ss - r.scalar(params)
            for k in range(n + 1):
                c = self.terms.get((r, k))
                if c is None:
                    continue
                base = c * gr ** (n - k)
                for j in range(k + 1):
                    coeffs[j] = coeffs[j] + base * shift ** (k - j) * math.comb(k, j)
        poly = LeafPoly(s, tuple(coeffs))
        with self._lock:
            cache[s] = poly
        return poly

    def leaf_of(self, x: Point) -> Rep:
        return leaf(x, self.depth)

    def taylor(self, y: Point, j: int) -> Scalar:
        """D_j f(y): the j-th Taylor coefficient of f at y."""
        if j > self.level:
            return self.params.zero()
        return self.local_poly(self.leaf_of(y)).taylor(y, j)

    def leaf_normal_form(self, depth: Optional[int] = None) -> List[LeafPoly]:
        depth = self.depth if depth is None else depth
        return [self.local_poly(s) for s in enumerate_reps(self.params.p, depth)]

    def degree(self) -> int:
        """Largest polynomial degree on any leaf (-1 for the zero function)."""
        return max((pl.degree for pl in self.leaf_normal_form()), default=-1)

    def to_evaluator(self) -> "Evaluator":
        return Evaluator(self.params, self.eval, self.level, name="combo")


class Evaluator:
    """Black-box f: R -> K with a caller-asserted smoothness level."""

    def __init__(self, params: FieldParams, func: Callable[[Point], Scalar], level: int, name: str = "f"):
        self.params = params
        self.func = func
        self.level = level
        self.name = name

    def __call__(self, x: Point) -> Scalar:
        return self.params.coerce(self.func(x))

    def __repr__(self):
        return f"Evaluator({self.name}, level={self.level})"


class CoeffStream:
    """A rule (r, j) -> b_r^{n,j} defined at every depth."""

    def __init__(self, params: FieldParams, level: int, rule: Callable[[Rep, int], object], name: str = "stream"):
        if params.backend is Backend.FPT and level > params.p - 1:
            raise CharacteristicViolation(
                f"level n={level} requires n <= p-1 = {params.p - 1} in characteristic {params.p}")
        self.params = params
        self.level = level
        self.rule = rule
        self.name = name

    def __call__(self, r: Rep, j: int) -> Scalar:
        return self.params.coerce(self.rule(r, j))

    def truncate(self, depth: int) -> CnCombo:
        """Partial sum over R_depth as a combo."""
        terms = {}
        for r in enumerate_reps(self.params.p, depth):
            for j in range(self.level + 1):
                terms[(r, j)] = self(r, j)
        return CnCombo(self.params, self.level, depth, terms)

    @classmethod
    def from_combo(cls, f: CnCombo, level: Optional[int] = None) -> "CoeffStream":
        """Level-n expansion coefficients of a combo, computed on demand at any depth."""
        from .calculus import coefficient

        n = f.level if level is None else level
        return cls(f.params, n, lambda r, j: coefficient(f, n, r, j), name="combo")

    @classmethod
    def from_table(cls, table) -> "CoeffStream":
        zero = table.params.zero()
        return cls(table.params, table.level, lambda r, j: table.get(r, j, zero), name="table")


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

_HEADER_RE = re.compile(r"^field\s+(\S+)\s+p=(\d+)\s+prec=(\d+)$")
_LEVEL_RE = re.compile(r"^level\s+(\d+)\s+depth\s+(\d+)$")
_RECORD_RE = re.compile(r"^(\w+)\s+r=([\d,]*)\s+j=(\d+)\s+(\w)=(.+)$")


def _content_lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if s:
            yield i, s


def parse_header(lines, prec_override: Optional[int] = None):
    """Read ``field`` and ``level`` lines; returns (params, level, depth)."""
    try:
        ln, s = next(lines)
    except StopIteration:
        raise ParseError("empty input: expected a 'field' header", 1, 1)
    m = _HEADER_RE.match(s)
    if not m:
        raise ParseError(f"expected 'field <zp|fpt> p=<int> prec=<int>', got {s!r}", ln, 1)
    backend, p, prec = m.group(1), int(m.group(2)), int(m.group(3))
    if backend not in ("zp", "fpt"):
        raise ParseError(f"unknown field backend {backend!r}", ln, 7)
    if prec_override is not None:
        prec = prec_override
    try:
        params = FieldParams(Backend(backend), p, prec)
    except ValueError as e:
        raise ParseError(str(e), ln, 1)
    try:
        ln, s = next(lines)
    except StopIteration:
        raise ParseError("expected 'level <n> depth <m>'", ln + 1, 1)
    m = _LEVEL_RE.match(s)
    if not m:
        raise ParseError(f"expected 'level <n> depth <m>', got {s!r}", ln, 1)
    return params, int(m.group(1)), int(m.group(2))


def parse_records(lines, keyword: str, value_key: str, params: FieldParams, level: int, depth: int):
    """Parse ``<keyword> r=.. j=.. <value_key>=..`` lines into a dict, rejecting duplicates."""
    out: Dict[TermKey, Scalar] = {}
    for ln, s in lines:
        m = _RECORD_RE.match(s)
        if not m or m.group(1) != keyword or m.group(4) != value_key:
            raise ParseError(f"expected '{keyword} r=<digits> j=<int> {value_key}=<scalar>', got {s!r}", ln, 1)
        col_r = s.index("r=") + 3
        r = parse_rep(m.group(2), params.p, ln, col_r)
        j = int(m.group(3))
        if len(r) > depth:
            raise ParseError(f"representative {format_rep(r)} deeper than depth {depth}", ln, col_r)
        if j > level:
            raise ParseError(f"j={j} exceeds level {level}", ln, s.index("j=") + 3)
        col_v = m.start(5) + 1
        val = parse_scalar(m.group(5), params, ln, col_v)
        if (r, j) in out:
            raise ParseError(f"duplicate entry for r={format_rep(r)} j={j}", ln, 1)
        out[(r, j)] = val
    return out


def parse_function(text: str, prec_override: Optional[int] = None) -> CnCombo:
    lines = _content_lines(text)
    params, level, depth = parse_header(lines, prec_override)
    if params.backend is Backend.FPT and level > params.p - 1:
        raise CharacteristicViolation(
            f"level n={level} requires n <= p-1 = {params.p - 1} in characteristic {params.p}")
    terms = parse_records(lines, "term", "c", params, level, depth)
    return CnCombo(params, level, depth, terms)


def format_header(params: FieldParams, level: int, depth: int) -> str:
    return f"field {params.backend.value} p={params.p} prec={params.prec}\nlevel {level} depth {depth}\n"


def serialize_function(f: CnCombo) -> str:
    out = [format_header(f.params, f.level, f.depth)]
    for (r, j), c in f.terms.items():
        out.append(f"term r={format_rep(r)} j={j} c={format_scalar(c)}\n")
    return "".join(out)
