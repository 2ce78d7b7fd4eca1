"""Difference quotients, coefficient extraction, antiderivation and norms.

Everything here works on :class:`~wavelet_cn.funcspace.CnCombo` objects,
whose restriction to each depth-m disk is a polynomial.  That is what makes
repeated-point difference quotients, Taylor coefficients D_j f and the
infinite suprema in the norms computable exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import CharacteristicViolation, NoConvergence, PrecisionExhausted, UnsupportedDegree
from .field import Backend, FieldParams, RingElem, Scalar, format_scalar, legendre_valuation
from .funcspace import (CnCombo, Evaluator, Point, _content_lines, _point_scalar, format_header,
                        parse_header, parse_records, recenter)
from .reps import ZERO, Rep, ancestors, enumerate_reps, format_rep, leaf

Func = Union[CnCombo, Evaluator]


# ---------------------------------------------------------------------------
# coefficient tables
# ---------------------------------------------------------------------------

class CoeffTable:
    """Entries b_r^{n,j} over R_depth; absent entries are zero."""

    __slots__ = ("params", "level", "depth", "entries")

    def __init__(self, params: FieldParams, level: int, depth: int, entries: Mapping[Tuple[Rep, int], object] = None):
        params.check_order(level, "level")
        clean = {}
        for (r, j), b in (entries or {}).items():
            if len(r) > depth:
                raise ValueError(f"representative {r} is deeper than depth {depth}")
            if not 0 <= j <= level:
                raise ValueError(f"j={j} outside 0..{level}")
            b = params.coerce(b)
            if not b.is_zero:
                clean[(r, j)] = b
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "entries",
                           dict(sorted(clean.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1]))))

    def __setattr__(self, name, value):
        raise AttributeError("CoeffTable is immutable")

    def get(self, r: Rep, j: int, default=None) -> Scalar:
        b = self.entries.get((r, j))
        if b is not None:
            return b
        return self.params.zero() if default is None else default

    def items(self):
        return self.entries.items()

    def __len__(self):
        return len(self.entries)

    def ratio(self, r: Rep, j: int) -> Scalar:
        """b_r^{n,j} / gamma_r."""
        return self.get(r, j) / r.gamma(self.params)

    def rebuild(self) -> CnCombo:
        """sum b_r^{n,j} gamma_r^{n-j} (x-r)^j chi_r."""
        return CnCombo(self.params, self.level, self.depth, self.entries)

    def sup_ratio(self, include_root: bool = True):
        """(max |b gamma^-1|, first (r, j) attaining it) over the stored entries."""
        best, arg = Fraction(0), None
        for (r, j), b in self.entries.items():
            if r.is_zero and not include_root:
                continue
            a = abs(b) * self.params.p ** (len(r) - 1) if not r.is_zero else abs(b)
            if a > best:
                best, arg = a, (r, j)
        return best, arg

    def same_entries(self, other: "CoeffTable") -> bool:
        if (self.params, self.level, self.depth) != (other.params, other.level, other.depth):
            return False
        keys = set(self.entries) | set(other.entries)
        return all(self.get(*k) == other.get(*k) for k in keys)

    def __eq__(self, other):
        if not isinstance(other, CoeffTable):
            return NotImplemented
        return self.same_entries(other)

    __hash__ = None

    def __repr__(self):
        return f"CoeffTable(level={self.level}, depth={self.depth}, entries={len(self.entries)})"


def serialize_table(t: CoeffTable) -> str:
    out = [format_header(t.params, t.level, t.depth)]
    for (r, j), b in t.entries.items():
        out.append(f"b r={format_rep(r)} j={j} v={format_scalar(b)}\n")
    return "".join(out)


def parse_table(text: str, prec_override: Optional[int] = None) -> CoeffTable:
    lines = _content_lines(text)
    params, level, depth = parse_header(lines, prec_override)
    params.check_order(level, "level")
    entries = parse_records(lines, "b", "v", params, level, depth)
    return CoeffTable(params, level, depth, entries)


# ---------------------------------------------------------------------------
# precision sizing
# ---------------------------------------------------------------------------

def required_precision(params: FieldParams, n: int, probe_depth: int) -> int:
    """Digits consumed by order-n quotients on points of R_{m'}, plus one to spare."""
    loss = n * probe_depth
    if params.backend is Backend.ZP:
        loss += n * legendre_valuation(n, params.p)
    return loss + 1


def check_precision(params: FieldParams, n: int, probe_depth: int) -> None:
    need = required_precision(params, n, probe_depth)
    if params.prec < need:
        raise PrecisionExhausted(
            f"order {n} at probe depth {probe_depth} needs prec >= {need}, have {params.prec}")


# ---------------------------------------------------------------------------
# difference quotients
# ---------------------------------------------------------------------------

def is_pairwise_distinct(points: Sequence[Point]) -> bool:
    keys = [tuple(x.digits) if isinstance(x, Rep) else _ring_key(x) for x in points]
    return len(set(keys)) == len(keys)


def _ring_key(x):
    d = tuple(x.digits)
    k = len(d)
    while k and d[k - 1] == 0:
        k -= 1
    return d[:k]


def _key(x):
    return x.digits if isinstance(x, Rep) else _ring_key(x)


def phi(f: Func, points: Sequence[Point]) -> Scalar:
    """Divided difference Phi_k f(x_1, ..., x_{k+1}).

    Repeated points are allowed for combos, where the confluent quotient is
    the matching Taylor coefficient of the leaf polynomial.
    """
    pts = list(points)
    if not pts:
        raise ValueError("phi needs at least one point")
    params = f.params
    distinct = is_pairwise_distinct(pts)
    if not distinct:
        if not isinstance(f, CnCombo):
            raise ValueError("repeated points need a combo (D-values are not available for black boxes)")
        pts.sort(key=_key)
    xs = [_point_scalar(x, params) for x in pts]
    keys = [_key(x) for x in pts]
    table = [f(x) for x in pts]
    k_max = len(pts) - 1
    for k in range(1, k_max + 1):
        new = []
        for i in range(k_max - k + 1):
            if keys[i] == keys[i + k]:
                new.append(f.taylor(pts[i], k))
            else:
                new.append((table[i + 1] - table[i]) / (xs[i + k] - xs[i]))
        table = new
    return table[0]


def _require_distinct(x, y):
    if _key(x) == _key(y):
        raise ValueError("psi needs x != y")


def psi(f: CnCombo, j: int, x: Point, y: Point) -> Scalar:
    """psi_j f(x, y) by the defining recursion from psi_0 = Phi_1."""
    _require_distinct(x, y)
    params = f.params
    h = _point_scalar(x, params) - _point_scalar(y, params)
    acc = (f(x) - f(y)) / h
    for i in range(1, j + 1):
        acc = (acc - f.taylor(y, i)) / h
    return acc


def psi_of_derivative(f: CnCombo, k: int, j: int, x: Point, y: Point) -> Scalar:
    """psi_k (D_j f)(x, y), computed from the leaf polynomials.

    Splitting f = (poly of y's leaf) + jump keeps the same-leaf case free of
    division, so deep coefficients come out exactly zero when they should.
    """
    _require_distinct(x, y)
    params = f.params
    Py = f.local_poly(f.leaf_of(y))
    Px = f.local_poly(f.leaf_of(x))
    h = _point_scalar(x, params) - _point_scalar(y, params)
    acc = params.zero()
    top = f.level - j
    for i in range(top, k, -1):
        acc = acc * h + Py.taylor(y, i + j) * math.comb(i + j, j)
    if Px.leaf != Py.leaf:
        jump = Px.taylor(x, j) - Py.taylor(x, j)
        if not jump.is_exact_zero:
            acc = acc + jump / h ** (k + 1)
    return acc


def psi_nj(f: CnCombo, n: int, j: int, x: Point, y: Point) -> Scalar:
    """psi_{n,j} f(x, y) = Phi_{n+1} f(x,..,x, y,..,y), x taken j times."""
    if not 1 <= j <= n + 1:
        raise ValueError(f"j={j} outside 1..{n + 1}")
    _require_distinct(x, y)
    return phi(f, [x] * j + [y] * (n + 2 - j))


# ---------------------------------------------------------------------------
# symbolic derivatives and expansions
# ---------------------------------------------------------------------------

def derivative_D(f: CnCombo, j: int) -> CnCombo:
    """D_j f as a combo at level n - j (term rule (x-r)^k -> C(k,j) (x-r)^(k-j))."""
    if not 0 <= j <= f.level:
        raise ValueError(f"j={j} outside 0..{f.level}")
    f.params.check_order(j, "derivative order")
    if j == 0:
        return f
    terms = {}
    for (r, k), c in f.terms.items():
        if k >= j:
            terms[(r, k - j)] = c * math.comb(k, j)
    return CnCombo(f.params, f.level - j, f.depth, terms)


def expand_c0(f: Func, depth: int) -> CoeffTable:
    """Level-0 coefficients b_0 = f(0), b_r = f(r) - f(r_-)."""
    params = f.params
    vals = {}
    entries = {}
    for r in enumerate_reps(params.p, depth):
        vals[r] = f(r)
        if r.is_zero:
            entries[(r, 0)] = vals[r]
        else:
            entries[(r, 0)] = vals[r] - vals[r.predecessor()]
    return CoeffTable(params, 0, depth, entries)


def default_depth(f: CnCombo, n: int) -> int:
    if f.level <= n:
        return f.depth
    if f.level == n + 1:
        return f.depth + 1
    raise UnsupportedDegree(
        f"a level-{f.level} combo has infinitely many nonzero level-{n} coefficients; pass an explicit depth")


def coefficient(f: CnCombo, n: int, r: Rep, j: int) -> Scalar:
    """A single b_r^{n,j}(f), at any depth."""
    if not 0 <= j <= n:
        raise ValueError(f"j={j} outside 0..{n}")
    if r.is_zero:
        return f.taylor(ZERO, j)
    if j > f.level:
        return f.params.zero()
    return r.gamma(f.params) * psi_of_derivative(f, n - j, j, r, r.predecessor())


def extract_bnj(f: CnCombo, n: int, depth: Optional[int] = None) -> CoeffTable:
    """b_r^{n,j}(f) over R_depth: D_j f(0) at the root, gamma_r psi_{n-j} D_j f(r, r_-) elsewhere.

    For f.level <= n the entries below f.depth vanish and the table rebuilds
    f exactly.  For f.level = n + 1 the default depth is f.depth + 1, which
    holds every distinct value of |b_r gamma_r^-1| but rebuilds f only on
    R_{f.depth + 1}.
    """
    params = f.params
    params.check_order(n, "level")
    if depth is None:
        depth = default_depth(f, n)
    entries = {}
    for r in enumerate_reps(params.p, depth):
        for j in range(min(n, f.level) + 1):
            entries[(r, j)] = coefficient(f, n, r, j)
    return CoeffTable(params, n, depth, entries)


def _ancestor_sums(t: CoeffTable, key_j: int, depth: int) -> Dict[Rep, Scalar]:
    """S(r) = sum over r' preceding r of t[r', key_j], for r in R_depth."""
    params = t.params
    out = {}
    for r in enumerate_reps(params.p, depth):
        if r.is_zero:
            out[r] = t.get(r, key_j)
        else:
            out[r] = out[r.predecessor()] + t.get(r, key_j)
    return out


def lower_basis(t: CoeffTable, depth: Optional[int] = None) -> CoeffTable:
    """Level-n table -> level-(n-1) table of the same function.

    b_r^{n-1,j} = gamma_r (b_r^{n,j} + C(n,j) sum_{r' preceding r_-} b_{r'}^{n,n}),
    with the root entries carried over.
    """
    n = t.level
    if n < 1:
        raise ValueError("lower_basis needs level >= 1")
    params = t.params
    depth = t.depth + 1 if depth is None else depth
    sums = _ancestor_sums(t, n, max(depth - 1, 0))
    entries = {}
    for r in enumerate_reps(params.p, depth):
        for j in range(n):
            if r.is_zero:
                entries[(r, j)] = t.get(r, j)
            else:
                inner = t.get(r, j) + sums[r.predecessor()] * math.comb(n, j)
                entries[(r, j)] = inner * r.gamma(params)
    return CoeffTable(params, n - 1, depth, entries)


def raise_basis(t: CoeffTable, dn: CoeffTable) -> CoeffTable:
    """Inverse of lower_basis given the level-0 expansion of D_n f."""
    if dn.level != 0:
        raise ValueError("dn must be a level-0 table")
    if t.depth != dn.depth:
        raise ValueError(f"depth mismatch: {t.depth} vs {dn.depth}")
    if t.params != dn.params:
        raise ValueError("field mismatch")
    params = t.params
    n = t.level + 1
    depth = t.depth
    sums = _ancestor_sums(dn, 0, max(depth - 1, 0))
    entries = {}
    for r in enumerate_reps(params.p, depth):
        entries[(r, n)] = dn.get(r, 0)
        for j in range(n):
            if r.is_zero:
                entries[(r, j)] = t.get(r, j)
            else:
                entries[(r, j)] = t.ratio(r, j) - sums[r.predecessor()] * math.comb(n, j)
    return CoeffTable(params, n, depth, entries)


# ---------------------------------------------------------------------------
# antiderivation
# ---------------------------------------------------------------------------

def antiderive(f: CnCombo, n: Optional[int] = None) -> CnCombo:
    """P_n f for f at level n-1: each term c (x-r)^k becomes c/(k+1) (x-r)^(k+1)."""
    n = f.level + 1 if n is None else n
    if n < 1:
        raise ValueError("antiderivation order must be >= 1")
    params = f.params
    params.check_order(n, "antiderivation order")
    if f.level > n - 1:
        raise ValueError(f"P_{n} takes a level-{n - 1} combo, got level {f.level}")
    if f.level < n - 1:
        f = f.with_level(n - 1)
    terms = {(r, k + 1): c / (k + 1) for (r, k), c in f.terms.items()}
    return CnCombo(params, n, f.depth, terms)


def antiderive_digit_sum(f: CnCombo, n: int, x: Point) -> Scalar:
    """P_n f(x) = sum_m sum_{j<n} D_j f(x_m)/(j+1) (x_{m+1} - x_m)^(j+1).

    x_m is x cut to its first m digits; the sum runs over all N digits of x.
    """
    params = f.params
    params.check_order(n, "antiderivation order")
    if f.level > n - 1:
        raise ValueError(f"P_{n} takes a level-{n - 1} combo, got level {f.level}")
    digits = x.digits if isinstance(x, (Rep, RingElem)) else tuple(x)
    N = params.prec
    cut = [leaf(digits, m) for m in range(N + 1)]
    cut_s = [c.scalar(params) for c in cut]
    inv = [params.one() / (j + 1) for j in range(n)]
    acc = params.zero()
    for m in range(N):
        step = cut_s[m + 1] - cut_s[m]
        if step.is_zero:
            continue
        pw = step
        for j in range(min(n, f.level + 1)):
            d = f.taylor(cut[m], j)
            if not d.is_zero:
                acc = acc + d * inv[j] * pw
            pw = pw * step
    return acc


def t_n(f: Union[CnCombo, CoeffTable], n: int) -> CnCombo:
    """T_n = n! P_n o ... o P_1 applied to a continuous (level-0) function."""
    if isinstance(f, CoeffTable):
        f = f.rebuild()
    if f.level != 0:
        raise ValueError("T_n takes a level-0 combo")
    f.params.check_order(n, "order")
    g = f
    for k in range(1, n + 1):
        g = antiderive(g, k)
    return g.scale(f.params.factorial(n)) if n else g


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def _guard_level(f: CnCombo, n: int):
    if n < 1:
        raise ValueError("n must be >= 1")
    f.params.check_order(n, "order")
    if f.level > n:
        raise UnsupportedDegree(
            f"level-{f.level} combo: the level-{n - 1} table is only finite for level <= {n}")


def lower_table(f: CnCombo, n: int) -> CoeffTable:
    """The level-(n-1) table of f, complete enough to read off sups.

    For level <= n-1 everything below the stored depth vanishes; for level n
    the ratios below depth m+1 repeat those at depth m+1 leaf by leaf.
    """
    _guard_level(f, n)
    return extract_bnj(f, n - 1)


def norm_n(f: CnCombo, n: int) -> Fraction:
    """|f|_n = sup over r in R and j < n of |b_r^{n-1,j} gamma_r^-1|."""
    return lower_table(f, n).sup_ratio(include_root=True)[0]


def lipschitz_constant(f: CnCombo, n: int) -> Fraction:
    """A_f = sup over r in R_+ and j < n of |b_r^{n-1,j} gamma_r^-1|."""
    return lower_table(f, n).sup_ratio(include_root=False)[0]


def _disk_sup(coeffs: List[Scalar], center: Rep, e: int, p: int, limit: int) -> Fraction:
    """sup of |sum a_j (x-c)^j| over the disk |x-c| <= p^-e."""
    scaled = [abs(a) * Fraction(1, p ** (e * j)) for j, a in enumerate(coeffs)]
    upper = max(scaled, default=Fraction(0))
    lower = scaled[0] if scaled else Fraction(0)
    if upper == lower:
        return upper
    top = max(j for j, s in enumerate(scaled) if s == upper)
    # A nonzero reduction of degree < p has a non-root in F_p, so the
    # Gauss norm is attained.
    if top < p or e >= limit:
        return upper
    params = coeffs[0].params
    best = Fraction(0)
    for d in range(p):
        shift = params.from_digits([d], v=e) if d else params.zero()
        child = Rep(tuple(center.digits) + (0,) * (e - len(center.digits)) + (d,))
        best = max(best, _disk_sup(recenter(coeffs, shift), child, e + 1, p, limit))
    return best


def sup_norm(f: CnCombo) -> Fraction:
    """sup over x in R of |f(x)|."""
    p = f.params.p
    best = Fraction(0)
    for s in enumerate_reps(p, f.depth):
        poly = f.local_poly(s)
        best = max(best, _disk_sup(list(poly.coeffs), s, f.depth, p, f.params.prec))
    return best


# ---------------------------------------------------------------------------
# estimating D_j f for black boxes
# ---------------------------------------------------------------------------

@dataclass
class DjEstimate:
    value: Scalar
    depth: int
    history: List[Scalar] = field(default_factory=list)


def _centered_offsets(params: FieldParams, count: int) -> List[Scalar]:
    """``count`` distinct nodes summing to zero (0, +-1, +-2, ...).

    Phi_j on nodes a + h t_i is exact for polynomials of degree j + 1 when
    sum t_i = 0.  Falls back to canonical representatives when the
    symmetric nodes collide (small characteristic).
    """
    ks = [0] if count % 2 else []
    i = 1
    while len(ks) < count:
        ks += [i, -i]
        i += 1
    nodes = [params.from_int(k) for k in ks]
    keys = {tuple(RingElem.from_scalar(x).digits) if not x.is_zero else () for x in nodes}
    if len(keys) == count:
        return nodes
    return [r.scalar(params) for r in enumerate_reps(params.p, count.bit_length() + 1)[:count]]


def estimate_Dj(f: Func, j: int, a: Point, m0: int, m1: int, tol: int) -> DjEstimate:
    """Estimate D_j f(a) from Phi_j on the nodes a + pi^d t_i, d = m0..m1.

    The t_i are centered (they sum to zero), so the estimate is exact for
    polynomials of degree j + 1.  Returns the first value that agrees with
    its predecessor to |.| <= q^-tol, reduced to absolute precision tol.
    """
    params = f.params
    if j < 0 or m0 < 0 or m1 < m0:
        raise ValueError("need j >= 0 and 0 <= m0 <= m1")
    if j == 0:
        v = f(a)
        return DjEstimate(v.with_absolute_precision(tol), m0, [v])
    base = _point_scalar(a, params)
    offsets = _centered_offsets(params, j + 1)
    history = []
    prev = None
    for d in range(m0, m1 + 1):
        pts = [RingElem.from_scalar(base + t.shift(d)) for t in offsets]
        val = phi(f, pts)
        history.append(val)
        if prev is not None and (val - prev).valuation() >= tol:
            return DjEstimate(val.with_absolute_precision(tol), d, history)
        prev = val
    raise NoConvergence(f"values did not agree to q^-{tol} within depths {m0}..{m1}")
