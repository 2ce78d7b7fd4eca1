"""Brute-force suprema of |Phi_j f| over pairwise-distinct tuples.

Tuples are enumerated as k-subsets (Phi_j is symmetric, so one ordering of
each set suffices).  The point geometry is precomputed once: valuations of
pairwise differences and inverses of their unit parts modulo pi^A.  The
inner loop lives in :mod:`wavelet_cn.kernels`.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .errors import BudgetExceeded, PrecisionExhausted
from .field import Backend, FieldParams, Scalar
from .reps import Rep, enumerate_reps

DEFAULT_BUDGET = 10 ** 6
_FPT_MAX_A = 64


@dataclass
class SupResult:
    """max |Phi_j f| found, with the tuple attaining it.

    ``floor`` bounds |Phi_j| on tuples whose value vanished at the working
    precision; it is 0 when every tuple was determined.
    """

    value: Fraction
    witness: Optional[Tuple[Rep, ...]]
    order: int
    count: int
    sampled: bool
    seed: Optional[int]
    floor: Fraction = Fraction(0)


class PointTable:
    """Pairwise difference data for a fixed list of representatives."""

    def __init__(self, params: FieldParams, points: Sequence[Rep], A: int):
        self.params = params
        self.points = list(points)
        self.A = A
        P = len(self.points)
        p = params.p
        V = np.zeros((P, P), dtype=np.int32)
        if params.backend is Backend.ZP:
            M = p ** A
            ints = [r.to_int(p) for r in self.points]
            U = np.zeros((P, P), dtype=np.uint64)
            for i in range(P):
                for l in range(i + 1, P):
                    d = ints[i] - ints[l]
                    v = 0
                    while d % p == 0:
                        d //= p
                        v += 1
                    inv = pow(d, -1, M)
                    V[i, l] = V[l, i] = v
                    U[i, l] = inv
                    U[l, i] = (-inv) % M
        else:
            ring = params.ring
            U = np.zeros((P, P, A), dtype=np.uint8)
            digs = [r.digits for r in self.points]
            for i in range(P):
                for l in range(i + 1, P):
                    a, b = digs[i], digs[l]
                    n = max(len(a), len(b))
                    d = [((a[t] if t < len(a) else 0) - (b[t] if t < len(b) else 0)) % p for t in range(n)]
                    v = next(t for t, c in enumerate(d) if c)
                    inv = ring.inv(tuple(d[v:]), A)
                    V[i, l] = V[l, i] = v
                    U[i, l] = inv
                    U[l, i] = [(-c) % p for c in inv]
        self.V = V
        self.U = U


@functools.lru_cache(maxsize=32)
def probe_table(params: FieldParams, probe: int, A: int) -> PointTable:
    """Cached point table for all of R_probe."""
    return PointTable(params, enumerate_reps(params.p, probe), A)


def _value_precision(values: Sequence[Scalar], params: FieldParams) -> int:
    scaled = _scaled_values(values, params, _max_A(params))
    return 1 if scaled is None else scaled[1]


def _max_A(params: FieldParams) -> int:
    if params.backend is Backend.ZP:
        A = 1
        while params.p ** (A + 1) < 2 ** 63:
            A += 1
        return A
    return _FPT_MAX_A


def _scaled_values(values: Sequence[Scalar], params: FieldParams, A_cap: int):
    """(shift s, A, integral payloads) with g_i = f_i pi^-s known mod pi^A."""
    nonzero = [x for x in values if not x.is_zero]
    if not nonzero:
        return None
    s = min(x.v for x in nonzero)
    A = A_cap
    for x in values:
        if not x.is_exact_zero:
            A = min(A, x.absolute_precision - s)
    if A < 1:
        raise PrecisionExhausted("function values carry no digits beyond their common valuation")
    p = params.p
    if params.backend is Backend.ZP:
        M = p ** A
        g = np.zeros(len(values), dtype=np.uint64)
        for i, x in enumerate(values):
            if x.unit is not None:
                g[i] = (x.unit * p ** (x.v - s)) % M
    else:
        g = np.zeros((len(values), A), dtype=np.uint8)
        for i, x in enumerate(values):
            if x.unit is not None:
                off = x.v - s
                ds = x.unit_digits()[: max(A - off, 0)]
                g[i, off:off + len(ds)] = ds
    return s, A, g


def _chunks(P: int, k: int, parts: int):
    """Split first indices [0, P) into contiguous ranges of similar work."""
    weights = [math.comb(P - 1 - i, k - 1) for i in range(P)]
    total = sum(weights)
    if total == 0:
        return [(0, P)]
    target = total / parts
    out, lo, acc = [], 0, 0
    for i, w in enumerate(weights):
        acc += w
        if acc >= target * (len(out) + 1) and i + 1 < P:
            out.append((lo, i + 1))
            lo = i + 1
    out.append((lo, P))
    return [c for c in out if c[0] < c[1]]


def sample_tuples(P: int, k: int, count: int, seed: int) -> np.ndarray:
    """``count`` uniformly random k-subsets of range(P), sorted rows, seeded."""
    rng = np.random.default_rng(seed)
    rows = np.empty((0, k), dtype=np.int64)
    while len(rows) < count:
        need = count - len(rows)
        cand = np.sort(rng.integers(0, P, size=(need, k), dtype=np.int64), axis=1)
        ok = np.all(np.diff(cand, axis=1) > 0, axis=1) if k > 1 else np.ones(need, dtype=bool)
        rows = np.concatenate([rows, cand[ok]])
    return np.ascontiguousarray(rows[:count])


def _combine(results):
    best, wit, und = kernels.BIG, None, kernels.BIG
    for b, w, u in results:
        if b < best:
            best, wit = b, w
        und = min(und, u)
    return best, wit, und


def phi_sup(f, j: int, points: Sequence[Rep], *, budget: int = DEFAULT_BUDGET, seed: int = 0,
            sampling: bool = True, threads: int = 1, impl=None, table: PointTable = None,
            values: Sequence[Scalar] = None) -> SupResult:
    """max of |Phi_j f| over pairwise-distinct (j+1)-subsets of ``points``."""
    params = f.params
    k = j + 1
    P = len(points)
    if k > P:
        return SupResult(Fraction(0), None, j, 0, False, None)
    if values is None:
        values = [f(x) for x in points]
    A_cap = table.A if table is not None else _max_A(params)
    scaled = _scaled_values(values, params, A_cap)
    total = math.comb(P, k)
    sampled = total > budget
    if sampled and not sampling:
        raise BudgetExceeded(f"{total} tuples exceed the budget of {budget} and sampling is off")
    count = budget if sampled else total
    if scaled is None:
        return SupResult(Fraction(0), None, j, count, sampled, seed if sampled else None)
    s, A, g = scaled
    if table is None or table.A < A:
        table = PointTable(params, points, A)
    U = table.U if table.A == A else (table.U % (params.p ** A) if params.backend is Backend.ZP else table.U[:, :, :A])
    mod = impl or kernels.active
    scan = mod.zp_scan if params.backend is Backend.ZP else mod.fpt_scan
    p = params.p
    tuples = sample_tuples(P, k, budget, seed) if sampled else None
    if sampled:
        step = -(-budget // max(threads * 4, 1))
        ranges = [(lo, min(lo + step, budget)) for lo in range(0, budget, step)]
    else:
        ranges = _chunks(P, k, max(threads * 4, 1))
    job = lambda rg: scan(g, table.V, U, p, A, k, rg[0], rg[1], tuples)
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(job, ranges))
    else:
        results = [job(rg) for rg in ranges]
    best, wit, und = _combine(results)
    value = Fraction(0) if best >= kernels.BIG else Fraction(p) ** -(best + s)
    floor = Fraction(0) if und >= kernels.BIG else Fraction(p) ** -(und + s)
    witness = None if wit is None else tuple(points[i] for i in wit)
    return SupResult(value, witness, j, count, sampled, seed if sampled else None, floor)


def _settle(results: List[SupResult]) -> SupResult:
    best = max(results, key=lambda r: (r.value, -r.order))
    top = max(r.floor for r in results)
    if top > best.value:
        raise PrecisionExhausted(
            f"quotients vanishing at the working precision could exceed the maximum {best.value}; raise prec")
    return best


def norm_cn_bruteforce(f, n: int, probe: int, *, budget: int = DEFAULT_BUDGET, seed: int = 0,
                       sampling: bool = True, threads: int = 1, impl=None) -> SupResult:
    """|f|_{C^n} restricted to R_{m'}: max over j <= n of sup |Phi_j f|."""
    from .calculus import check_precision

    params = f.params
    if probe < getattr(f, "depth", 0):
        raise ValueError(f"probe depth {probe} is below the function depth {f.depth}")
    check_precision(params, n, probe)
    points = enumerate_reps(params.p, probe)
    values = [f(x) for x in points]
    table = probe_table(params, probe, _value_precision(values, params))
    results = [phi_sup(f, j, points, budget=budget, seed=seed + j, sampling=sampling, threads=threads,
                       impl=impl, table=table, values=values) for j in range(n + 1)]
    best = _settle(results)
    sampled = any(r.sampled for r in results)
    # order j is sampled with seed + j; report the base seed
    return dataclasses.replace(best, count=sum(r.count for r in results), sampled=sampled,
                               seed=seed if sampled else None)


def lipschitz_bruteforce(f, n: int, probe: int, *, budget: int = DEFAULT_BUDGET, seed: int = 0,
                         sampling: bool = True, threads: int = 1, impl=None) -> SupResult:
    """max |Phi_n f| over pairwise-distinct (n+1)-subsets of R_{m'}."""
    from .calculus import check_precision

    params = f.params
    check_precision(params, n, probe)
    points = enumerate_reps(params.p, probe)
    values = [f(x) for x in points]
    table = probe_table(params, probe, _value_precision(values, params))
    return phi_sup(f, n, points, budget=budget, seed=seed, sampling=sampling, threads=threads, impl=impl,
                   table=table, values=values)
