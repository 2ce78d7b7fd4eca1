"""Seeded randomized checks of the identities behind the expansion theorems.

Each suite draws its own instances from a generator seeded by
``(seed, suite name)``, so adding or reordering suites never changes the
instances another suite sees, and the report is identical for any thread
count.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import bruteforce, calculus, classify
from .errors import WaveletError
from .field import Backend, FieldParams, RingElem, Scalar, format_scalar
from .funcspace import CnCombo
from .reps import ZERO, Rep, enumerate_reps, format_rep

FIELDS = [("zp", 2), ("zp", 3), ("zp", 5), ("fpt", 2), ("fpt", 3), ("fpt", 5)]
DEFAULT_PREC = 40


# ---------------------------------------------------------------------------
# instance generators
# ---------------------------------------------------------------------------

def suite_rng(seed: int, name: str) -> random.Random:
    return random.Random(f"{seed}:{name}")


def max_level(params: FieldParams, cap: int = 3) -> int:
    return min(cap, params.p - 1) if params.backend is Backend.FPT else cap


def random_params(rng: random.Random, prec: int = DEFAULT_PREC, fields=FIELDS) -> FieldParams:
    backend, p = rng.choice(fields)
    return FieldParams(Backend(backend), p, prec)


def random_scalar(params: FieldParams, rng: random.Random, vmin: int = -1, vmax: int = 2,
                  zero_prob: float = 0.0) -> Scalar:
    if rng.random() < zero_prob:
        return params.zero()
    v = rng.randint(vmin, vmax)
    digits = [rng.randrange(1, params.p)] + [rng.randrange(params.p) for _ in range(params.prec - 1)]
    return params.from_digits(digits, v=v)


def random_combo(params: FieldParams, level: int, depth: int, rng: random.Random,
                 density: float = 0.5, vmin: int = 0, vmax: int = 1) -> CnCombo:
    terms = {}
    for r in enumerate_reps(params.p, depth):
        for j in range(level + 1):
            if rng.random() < density:
                terms[(r, j)] = random_scalar(params, rng, vmin, vmax)
    return CnCombo(params, level, depth, terms)


def random_point(params: FieldParams, rng: random.Random) -> RingElem:
    return RingElem(params, [rng.randrange(params.p) for _ in range(params.prec)])


def random_distinct_points(params: FieldParams, k: int, rng: random.Random, max_prefix: int = 4) -> List[RingElem]:
    """k distinct points that tend to share prefixes (so differences have varied valuations)."""
    pts: List[Tuple[int, ...]] = []
    while len(pts) < k:
        if pts and rng.random() < 0.8:
            base = rng.choice(pts)
            cut = rng.randint(0, max_prefix)
            head = list(base[:cut])
            head.append((base[cut] + rng.randrange(1, params.p)) % params.p)
            tail = [rng.randrange(params.p) for _ in range(params.prec - len(head))]
            cand = tuple(head + tail)
        else:
            cand = tuple(rng.randrange(params.p) for _ in range(params.prec))
        if cand not in pts:
            pts.append(cand)
    return [RingElem(params, d) for d in pts]


def random_chain(params: FieldParams, length: int, rng: random.Random, max_gap: int = 2) -> List[Rep]:
    """t_1, ..., t_length with (t_j)_- = t_{j-1}."""
    t = Rep(tuple(rng.randrange(params.p) for _ in range(rng.randint(0, 2))))
    out = [t]
    while len(out) < length:
        gap = rng.randint(0, max_gap)
        digits = tuple(t.digits) + (0,) * gap + (rng.randrange(1, params.p),)
        t = Rep(digits)
        out.append(t)
    return out


def describe(f: CnCombo) -> str:
    terms = " ".join(f"[{format_rep(r)}|{j}|{format_scalar(c)}]" for (r, j), c in f.terms.items())
    return f"{f.params.backend.value} p={f.params.p} level={f.level} depth={f.depth} terms={terms or 'none'}"


def _pt(x) -> str:
    if isinstance(x, Rep):
        return f"r=({format_rep(x)})"
    d = list(x.digits)
    while d and d[-1] == 0:
        d.pop()
    return "(" + ",".join(map(str, d[:8])) + (",..." if len(d) > 8 else "") + ")"


# ---------------------------------------------------------------------------
# suites: each trial returns None on success or a counterexample string
# ---------------------------------------------------------------------------

@dataclass
class Context:
    prec: int = DEFAULT_PREC
    threads: int = 1
    budget: int = bruteforce.DEFAULT_BUDGET
    seed: int = 0
    fields: tuple = tuple(FIELDS)
    level: Optional[int] = None


def _field_and_level(rng, ctx, lo=1, cap=3, fields=None):
    fields = fields or ctx.fields
    if ctx.level is not None:
        return random_params(rng, ctx.prec, fields), max(lo, ctx.level)
    params = random_params(rng, ctx.prec, fields)
    top = max_level(params, cap)
    while top < lo:
        params = random_params(rng, ctx.prec, fields)
        top = max_level(params, cap)
    return params, rng.randint(lo, top)


def trial_orthonormality(rng, ctx):
    params, n = _field_and_level(rng, ctx)
    depth = rng.randint(0, 2 if params.p <= 3 else 1)
    terms = {}
    for r in enumerate_reps(params.p, depth):
        for j in range(n + 1):
            if rng.random() < 0.6:
                terms[(r, j)] = random_scalar(params, rng, -2, 3)
    f = CnCombo(params, n, depth, terms)
    expect = max((abs(c) for c in f.terms.values()), default=Fraction(0))
    got = calculus.norm_n(f, n)
    if got != expect:
        return f"{describe(f)}: norm_{n}={got} expected {expect}"
    return None


def trial_reconstruction(rng, ctx, points: int = 20):
    params, n = _field_and_level(rng, ctx, lo=0)
    depth = rng.randint(0, 2)
    f = random_combo(params, n, depth, rng, vmin=-1, vmax=2)
    g = calculus.extract_bnj(f, n).rebuild()
    for _ in range(points):
        x = random_point(params, rng)
        if f(x) != g(x):
            return f"{describe(f)}: rebuild differs at x={_pt(x)}"
    return None


def trial_deep_vanishing(rng, ctx):
    params, n = _field_and_level(rng, ctx, lo=0)
    depth = rng.randint(0, 1)
    f = random_combo(params, rng.randint(0, n), depth, rng)
    t = calculus.extract_bnj(f, n, depth=depth + 2)
    for (r, j), b in t.items():
        if len(r) > depth:
            return f"{describe(f)}: b_{format_rep(r)}^{{{n},{j}}}={format_scalar(b)} below the stored depth"
    return None


def trial_symmetry(rng, ctx):
    params, n = _field_and_level(rng, ctx, lo=0)
    f = random_combo(params, n, rng.randint(0, 2), rng)
    k = rng.randint(1, 3)
    pts = random_distinct_points(params, k + 1, rng)
    ref = calculus.phi(f, pts)
    for perm in itertools.permutations(range(k + 1)):
        if calculus.phi(f, [pts[i] for i in perm]) != ref:
            return f"{describe(f)}: Phi_{k} not symmetric, order {perm}"
    return None


def trial_derivative(rng, ctx):
    params, n = _field_and_level(rng, ctx)
    f = random_combo(params, n, rng.randint(0, 2), rng, vmin=-1, vmax=2)
    j = rng.randint(0, n)
    lhs = calculus.derivative_D(calculus.derivative_D(f, n - j), j)
    rhs = calculus.derivative_D(f, n).scale(math.comb(n, j))
    if lhs != rhs:
        return f"{describe(f)}: D_{j} D_{n - j} f != C({n},{j}) D_{n} f"
    return None


def trial_lemlem1(rng, ctx):
    params, n = _field_and_level(rng, ctx, lo=0)
    f = random_combo(params, min(n + rng.randint(0, 1), max_level(params)), rng.randint(0, 2), rng)
    x, y, z = random_distinct_points(params, 3, rng)
    xs, ys, zs = (u.scalar() for u in (x, y, z))
    lhs = calculus.psi(f, n, x, y)
    rhs = ((xs - zs) / (xs - ys)) ** (n + 1) * calculus.psi(f, n, x, z)
    for l in range(n + 1):
        rhs = rhs - ((ys - zs) / (xs - ys)) ** (n + 1 - l) * calculus.psi_of_derivative(f, n - l, l, y, z)
    if lhs != rhs:
        return f"{describe(f)}: n={n} x={_pt(x)} y={_pt(y)} z={_pt(z)}"
    return None


def trial_lemlem2(rng, ctx):
    params, n = _field_and_level(rng, ctx, lo=0)
    f = random_combo(params, min(n + rng.randint(0, 1), max_level(params)), rng.randint(0, 2), rng)
    m = rng.randint(2, 5)
    if rng.random() < 0.7:
        ts = random_chain(params, m, rng)
    else:
        ts = random_distinct_points(params, m, rng)
    T = [t.scalar(params) for t in ts]
    span = (T[-1] - T[0]) ** (n + 1)
    lam = {j: ((T[j] - T[j - 1]) ** (n + 1)) / span for j in range(1, m)}
    mu = {(l, j): (T[j] - T[j - 1]) ** l * (T[j - 1] - T[0]) ** (n + 1 - l) / span
          for l in range(1, n + 1) for j in range(2, m)}
    total = sum(lam.values(), params.zero())
    for (l, j), v in mu.items():
        total = total + v * math.comb(n + 1, l)
    if total != 1:
        return f"{describe(f)}: partition of unity fails, n={n} t={[_pt(t) for t in ts]}"
    lhs = calculus.psi(f, n, ts[-1], ts[0])
    rhs = params.zero()
    for j in range(1, m):
        rhs = rhs + lam[j] * calculus.psi(f, n, ts[j], ts[j - 1])
    for (l, j), v in mu.items():
        rhs = rhs + v * calculus.psi_of_derivative(f, n - l, l, ts[j - 1], ts[0])
    if lhs != rhs:
        return f"{describe(f)}: chain identity fails, n={n} t={[_pt(t) for t in ts]}"
    return None


def trial_lem78_3(rng, ctx):
    params, n = _field_and_level(rng, ctx, lo=0)
    f = random_combo(params, n, rng.randint(0, 2), rng)
    j = rng.randint(0, n)
    x, y = random_distinct_points(params, 2, rng)
    lhs = calculus.psi_of_derivative(f, n - j, j, x, y)
    rhs = params.zero()
    for i in range(1, j + 2):
        rhs = rhs + calculus.psi_nj(f, n, i, x, y) * math.comb(n + 1 - i, n - j)
    if lhs != rhs:
        return f"{describe(f)}: j={j} x={_pt(x)} y={_pt(y)}"
    return None


def trial_basis_change(rng, ctx):
    params, n = _field_and_level(rng, ctx)
    depth = rng.randint(0, 2)
    f = random_combo(params, n, depth, rng, vmin=-1, vmax=2)
    t = calculus.extract_bnj(f, n)
    lowered = calculus.lower_basis(t)
    direct = calculus.extract_bnj(f, n - 1, depth=depth + 1)
    if lowered != direct:
        return f"{describe(f)}: lower_basis disagrees with the level-{n - 1} coefficients"
    dn = calculus.expand_c0(calculus.derivative_D(f, n), depth + 1)
    back = calculus.raise_basis(lowered, dn)
    if back != calculus.extract_bnj(f, n, depth=depth + 1):
        return f"{describe(f)}: raise_basis(lower_basis(t)) != t"
    return None


def trial_antiderivation(rng, ctx):
    params, n = _field_and_level(rng, ctx)
    depth = rng.randint(0, 2)
    f = random_combo(params, n - 1, depth, rng, vmin=-1, vmax=2)
    F = calculus.antiderive(f, n)
    for _ in range(3):
        x = random_point(params, rng)
        if F(x) != calculus.antiderive_digit_sum(f, n, x):
            return f"{describe(f)}: P_{n} closed form != digit sum at {_pt(x)}"
    if calculus.derivative_D(F, 1) != f.with_level(n - 1):
        return f"{describe(f)}: D_1 P_{n} f != f"
    for r in enumerate_reps(params.p, depth + 1)[1:]:
        rm = r.predecessor()
        g = r.gamma(params)
        rhs = params.zero()
        for j in range(1, n + 1):
            # f^(j-1)(r_-) / j! = D_{j-1} f(r_-) (j-1)! / j! = D_{j-1} f(r_-) / j
            rhs = rhs + g ** j * f.taylor(rm, j - 1) / j
        if F(r) - F(rm) != rhs:
            return f"{describe(f)}: telescope fails at r=({format_rep(r)})"
    if n >= 2:
        bound = calculus.norm_n(f.scale(params.one() / params.factorial(n)), n - 1)
        if calculus.norm_n(F, n) > bound:
            return f"{describe(f)}: |P_n f|_n > |f/n!|_(n-1)"
    return None


def trial_t_n(rng, ctx):
    params, n = _field_and_level(rng, ctx)
    depth = rng.randint(0, 2)
    r0 = rng.choice(enumerate_reps(params.p, depth))
    chi = CnCombo.chi(params, r0, 0, depth)
    T = calculus.t_n(chi, n)
    if T != CnCombo(params, n, depth, {(r0, n): 1}):
        return f"T_{n} chi_({format_rep(r0)}) is not (x-r0)^{n} chi_r0"
    lower = calculus.extract_bnj(T, n - 1, depth=depth + 2)
    for r in enumerate_reps(params.p, depth + 2)[1:]:
        if not r0.precedes(r.predecessor()):
            continue
        for j in range(n):
            if lower.get(r, j) != r.gamma(params) * math.comb(n, j):
                return f"T_{n} chi_({format_rep(r0)}): b_({format_rep(r)})^{{{n - 1},{j}}} off pattern"
    f = random_combo(params, 0, depth, rng, vmin=-1, vmax=2)
    if calculus.norm_n(calculus.t_n(f, n), n) != calculus.sup_norm(f):
        return f"{describe(f)}: |T_{n} f|_{n} != |f|_sup"
    return None


def trial_sup_k(rng, ctx):
    params, k = _field_and_level(rng, ctx)
    depth = rng.randint(0, 2)
    f = random_combo(params, k, depth, rng, vmin=-1, vmax=2)
    d = calculus.sup_norm(calculus.derivative_D(f, k))
    mid = Fraction(0)
    for r in enumerate_reps(params.p, depth + 1)[1:]:
        mid = max(mid, abs(calculus.psi(f, k - 1, r, r.predecessor())))
    top = calculus.norm_n(f, k)
    if not d <= mid <= top:
        return f"{describe(f)}: {d} <= {mid} <= {top} fails"
    return None


def trial_samenorm(rng, ctx):
    fields = [f for f in ctx.fields if f[1] <= 3] or ctx.fields
    params, n = _field_and_level(rng, ctx, lo=1, cap=2, fields=fields)
    depth = rng.randint(0, 1)
    if math.comb(params.p ** (depth + 2), n + 1) > ctx.budget:
        depth = 0
    f = random_combo(params, n, depth, rng, vmin=-1, vmax=2)
    want = calculus.norm_n(f, n)
    prev, exhaustive = Fraction(0), True
    for probe in range(depth, depth + 3):
        res = bruteforce.norm_cn_bruteforce(f, n, probe, budget=ctx.budget, seed=ctx.seed, threads=ctx.threads)
        if res.value > want:
            return f"{describe(f)}: probe {probe} gives {res.value} > norm {want}"
        # a sampled maximum is only a lower bound, so monotonicity and
        # attainment are checked on exhaustive scans only
        exhaustive = not res.sampled
        if exhaustive and res.value < prev:
            return f"{describe(f)}: probe {probe} gives {res.value} < {prev} at the previous depth"
        prev = res.value
    if exhaustive and prev != want:
        return f"{describe(f)}: brute force {prev} != norm {want} at probe {depth + 2}"
    return None


def _pairs_ok(f: CnCombo, probe: int, test) -> Optional[Tuple[Rep, Rep]]:
    pts = enumerate_reps(f.params.p, probe)
    vals = {r: f(r) for r in pts}
    for a, b in itertools.combinations(pts, 2):
        if not test(vals[a], vals[b], a.scalar(f.params), b.scalar(f.params)):
            return a, b
    return None


def trial_classify(rng, ctx):
    fields = [f for f in ctx.fields if f[1] <= 3] or ctx.fields
    params = random_params(rng, ctx.prec, fields)
    depth = rng.randint(0, 1)
    one = params.one()
    slope = one + random_scalar(params, rng, 1, 2) if rng.random() < 0.6 else random_scalar(params, rng, 0, 1)
    base = CnCombo.polynomial(params, [random_scalar(params, rng, 0, 1), slope], depth=depth)
    f = base + random_combo(params, 1, depth, rng, density=0.3, vmin=0, vmax=2)
    probe = depth + 2
    inc = classify.is_increasing(f)
    iso = classify.is_isometry(f)
    pc = classify.is_pseudocontraction(f)

    def incr(fa, fb, a, b):
        return ((fa - fb) / (a - b) - one).valuation() > 0

    def isom(fa, fb, a, b):
        return (fa - fb).valuation() == (a - b).valuation()

    def contr(fa, fb, a, b):
        return (fa - fb).valuation() > (a - b).valuation()

    for verdict, test, name in ((inc, incr, "increasing"), (iso, isom, "isometry"), (pc, contr, "pseudocontraction")):
        bad = _pairs_ok(f, probe, test)
        if verdict.answer == "yes" and bad is not None:
            return f"{describe(f)}: {name} says yes but pair {_pt(bad[0])},{_pt(bad[1])} fails"
        if verdict.answer == "no" and bad is None and verdict.depth <= probe:
            return f"{describe(f)}: {name} says no but every pair in R_{probe} passes"
    if inc.answer == "yes" and iso.answer != "yes":
        return f"{describe(f)}: increasing but not an isometry"
    return None


SUITES: Dict[str, Callable] = {
    "orthonormality": trial_orthonormality,
    "reconstruction": trial_reconstruction,
    "deep_vanishing": trial_deep_vanishing,
    "symmetry": trial_symmetry,
    "derivative_D": trial_derivative,
    "lemlem1": trial_lemlem1,
    "lemlem2": trial_lemlem2,
    "lem78_3": trial_lem78_3,
    "basis_change": trial_basis_change,
    "antiderivation": trial_antiderivation,
    "t_n": trial_t_n,
    "sup_k": trial_sup_k,
    "samenorm": trial_samenorm,
    "classify": trial_classify,
}


@dataclass
class SuiteResult:
    name: str
    trials: int
    passed: int
    counterexample: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.passed == self.trials


def run_suite(name: str, trials: int, ctx: Context) -> SuiteResult:
    fn = SUITES[name]
    rng = suite_rng(ctx.seed, name)
    passed, first = 0, None
    for i in range(trials):
        try:
            msg = fn(rng, ctx)
        except WaveletError as exc:
            msg = f"{type(exc).__name__}: {exc}"
        if msg is None:
            passed += 1
        elif first is None:
            first = f"trial {i}: {msg}"
    return SuiteResult(name, trials, passed, first)


def run(trials: int, ctx: Context, names: Optional[Sequence[str]] = None) -> List[SuiteResult]:
    names = list(SUITES) if not names else list(names)
    for n in names:
        if n not in SUITES:
            raise KeyError(f"unknown suite {n!r}; choose from {', '.join(SUITES)}")
    return [run_suite(n, trials, ctx) for n in names]


def report(results: List[SuiteResult], ctx: Context) -> str:
    lines = [f"verify seed={ctx.seed} prec={ctx.prec}"]
    total = sum(r.trials for r in results)
    if total == 0:
        lines.append("warning: no trials were run")
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        line = f"{status} {r.name}: {r.passed}/{r.trials}"
        if r.counterexample:
            line += f" first counterexample: {r.counterexample}"
        lines.append(line)
    failed = sum(1 for r in results if not r.ok)
    lines.append(f"summary: {len(results)} suites, {total} trials, {failed} failing suites")
    return "\n".join(lines) + "\n"
