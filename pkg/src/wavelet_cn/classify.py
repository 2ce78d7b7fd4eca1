"""Decision procedures on wavelet coefficients.

The criteria quantify over every r in R_+.  For a combo of depth m whose
leaf polynomials have degree at most 1, each r of length > m sits in one
leaf together with r_-, so b_r = c_eff * gamma_r with c_eff the leaf slope.
Checking R_{m+1} explicitly and the slopes once per leaf therefore decides
the infinite condition exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .calculus import expand_c0
from .errors import UnsupportedDegree
from .field import FieldParams, Scalar, format_scalar
from .funcspace import CnCombo, CoeffStream
from .reps import Rep, enumerate_reps, format_rep

Witness = Union[None, Rep, Tuple[Rep, Rep], Tuple[Rep, int]]


@dataclass(frozen=True)
class SignClass:
    """sgn(x) in K^x / K^+: valuation and leading digit."""

    valuation: int
    leading_digit: int

    @classmethod
    def of(cls, x: Scalar) -> "SignClass":
        if x.is_zero:
            raise ValueError("0 has no sign class")
        return cls(x.v, x.leading_digit)


def same_sign(x: Scalar, y: Scalar) -> bool:
    """x ~ y iff |1 - x/y| < 1."""
    return SignClass.of(x) == SignClass.of(y)


@dataclass
class Verdict:
    answer: str
    witness: Witness = None
    depth: int = 0
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.answer not in ("yes", "no", "inconclusive"):
            raise ValueError(f"bad answer {self.answer!r}")
        if self.answer == "no" and self.witness is None:
            raise ValueError("a 'no' verdict needs a witness")

    def __bool__(self):
        return self.answer == "yes"

    def __str__(self):
        return format_verdict(self)


def _fmt_witness(w: Witness) -> str:
    if w is None:
        return "none"
    if isinstance(w, Rep):
        return f"({format_rep(w)})"
    a, b = w
    if isinstance(b, Rep):
        return f"({format_rep(a)})({format_rep(b)})"
    return f"({format_rep(a)})j{b}"


def format_verdict(v: Verdict) -> str:
    return f"answer={v.answer} witness={_fmt_witness(v.witness)} depth={v.depth}"


# ---------------------------------------------------------------------------
# C^0 data with exact tails
# ---------------------------------------------------------------------------

class _Tail:
    """Level-0 coefficients over R_{m+1} plus the per-leaf slopes."""

    def __init__(self, f: CnCombo):
        self.f = f
        self.params = f.params
        self.depth = f.depth + 1
        self.table = expand_c0(f, self.depth)
        self.slopes = []
        for s in enumerate_reps(f.params.p, f.depth):
            poly = f.local_poly(s)
            if poly.degree > 1:
                raise UnsupportedDegree(
                    f"leaf {format_rep(s)} has degree {poly.degree}; the classifiers need leaf degree <= 1")
            self.slopes.append((s, poly.coeffs[1] if len(poly.coeffs) > 1 else self.params.zero()))

    def ratios(self):
        """(r, b_r gamma_r^-1) over R_+ cut to length m+1, canonical order."""
        for r in enumerate_reps(self.params.p, self.depth)[1:]:
            yield r, self.table.ratio(r, 0)

    def deep_rep(self, s: Rep) -> Rep:
        """A representative below leaf s of length m+1."""
        return Rep(tuple(s.digits) + (0,) * (self.f.depth - len(s.digits)) + (1,))


def monotone_type(f: CnCombo, s) -> Verdict:
    """Monotone of type sgn(s): |s^-1 b_r gamma_r^-1 - 1| < 1 for every r in R_+."""
    s = f.params.coerce(s)
    if s.is_zero:
        raise ValueError("s must be nonzero")
    tail = _Tail(f)
    one = f.params.one()
    for r, q in tail.ratios():
        if (q / s - one).valuation() <= 0:
            return Verdict("no", r, tail.depth)
    for leaf_, c in tail.slopes:
        if (c / s - one).valuation() <= 0:
            return Verdict("no", tail.deep_rep(leaf_), tail.depth)
    return Verdict("yes", None, tail.depth)


def is_increasing(f: CnCombo) -> Verdict:
    return monotone_type(f, 1)


def is_pseudocontraction(f: CnCombo) -> Verdict:
    """|b_r gamma_r^-1| < 1 for every r in R_+."""
    tail = _Tail(f)
    for r, q in tail.ratios():
        if q.valuation() <= 0:
            return Verdict("no", r, tail.depth)
    for leaf_, c in tail.slopes:
        if c.valuation() <= 0:
            return Verdict("no", tail.deep_rep(leaf_), tail.depth)
    return Verdict("yes", None, tail.depth)


def is_isometry(f: CnCombo) -> Verdict:
    """|b_r gamma_r^-1| = 1 on R_+ and |b_r1 - b_r2| = |pi^(l-1)| for siblings.

    Siblings are distinct representatives of equal length with a common
    predecessor; pairs of unequal length satisfy the condition automatically
    once the first one holds.
    """
    tail = _Tail(f)
    for r, q in tail.ratios():
        if q.valuation() != 0:
            return Verdict("no", r, tail.depth)
    p = f.params.p
    for r in enumerate_reps(p, tail.depth)[1:]:
        if r.top_digit != 1:
            continue
        head = r.digits[:-1]
        sibs = [Rep(head + (a,)) for a in range(1, p)]
        for i in range(len(sibs)):
            for k in range(i + 1, len(sibs)):
                d = tail.table.get(sibs[i], 0) - tail.table.get(sibs[k], 0)
                if d.valuation() != len(r) - 1:
                    return Verdict("no", (sibs[i], sibs[k]), tail.depth)
    for leaf_, c in tail.slopes:
        if c.valuation() != 0:
            return Verdict("no", tail.deep_rep(leaf_), tail.depth)
    return Verdict("yes", None, tail.depth)


def is_derivative_zero(f: CnCombo, n: int = 1) -> Verdict:
    """f' = 0, i.e. b_r gamma_r^-n -> 0: every leaf polynomial is constant."""
    if n < 1:
        raise ValueError("n must be >= 1")
    f.params.check_order(n, "order")
    for s in enumerate_reps(f.params.p, f.depth):
        if f.local_poly(s).degree > 0:
            return Verdict("no", s, f.depth)
    return Verdict("yes", None, f.depth)


# ---------------------------------------------------------------------------
# limit criterion on coefficient streams
# ---------------------------------------------------------------------------

def approach_chain(a: Rep, m0: int, m1: int) -> List[Tuple[int, Rep]]:
    """(d, a + pi^d) for d from max(m0, l(a)) to m1: distinct points of R_+ tending to a."""
    out = []
    for d in range(max(m0, len(a)), m1 + 1):
        digits = tuple(a.digits) + (0,) * (d - len(a.digits)) + (1,)
        out.append((d, Rep(digits)))
    return out


def cnplus1_limit_test(stream: CoeffStream, a: Rep, m0: int, m1: int, tol: int) -> Verdict:
    """Finite-depth test of the C^{n+1} criterion at a.

    Each sequence b_r^{n,j} gamma_r^-1 along r = a + pi^d must settle to
    within q^-tol, and the settled values must satisfy
    L_j = C(n+1, j) L_0 to the same tolerance.
    """
    params = stream.params
    n = stream.level
    chain = approach_chain(a, m0, m1)
    if len(chain) < 2:
        return Verdict("inconclusive", None, m1, {"reason": "window shorter than two points"})
    seqs = []
    for j in range(n + 1):
        seqs.append([stream(r, j) / r.gamma(params) for _, r in chain])
    limits = []
    for j, seq in enumerate(seqs):
        diffs = [(seq[i + 1] - seq[i]).valuation() for i in range(len(seq) - 1)]
        settle = None
        for i in range(len(diffs)):
            if all(d >= tol for d in diffs[i:]):
                settle = i
                break
        if settle is None:
            growing = len(diffs) >= 2 and all(diffs[i + 1] <= diffs[i] for i in range(len(diffs) - 1))
            if growing:
                return Verdict("no", (chain[-2][1], chain[-1][1]), m1,
                               {"j": j, "reason": "consecutive differences do not shrink"})
            return Verdict("inconclusive", None, m1, {"j": j, "reason": "not settled within the window"})
        limits.append((seq[-1], chain[settle][0]))
    base = limits[0][0]
    for j in range(1, n + 1):
        gap = (limits[j][0] - base * math.comb(n + 1, j)).with_absolute_precision(tol)
        if gap.valuation() < tol:
            return Verdict("no", (chain[-1][1], j), m1, {"reason": f"L_{j} != C({n + 1},{j}) L_0"})
    detail = {
        "limits": [format_scalar(L) for L, _ in limits],
        "settled_at": [d for _, d in limits],
        "tolerance": tol,
    }
    return Verdict("yes", None, m1, detail)
