"""Pure-Python difference-quotient scans (fallback for the compiled kernels).

Both scans evaluate Phi_{k-1} on k-subsets of a fixed point list in
Lagrange form.  With points x_i, integral scaled values g_i and
``w_i = sum_{l != i} v(x_i - x_l)``::

    S = sum_i g_i * prod_{l != i} u_il^{-1} * pi^(W - w_i)    (mod pi^A)

where ``W = max_i w_i`` and ``u_il`` is the unit part of ``x_i - x_l``.
Then ``v(Phi) = v(S) - W + shift``.  A tuple whose S vanishes mod pi^A
only tells us ``v(Phi) >= A - W + shift``.

Every scan returns ``(best, witness, undetermined)``: the least
``v(S) - W`` over determined tuples, the first tuple (in scan order)
attaining it, and the least ``A - W`` over undetermined tuples.  ``BIG``
stands in for "none".
"""

from itertools import combinations, islice

import numpy as np

BIG = 1 << 30


def _zp_tuple(idx, g, V, U, p, A, M, pw):
    k = len(idx)
    w = [0] * k
    for a in range(k):
        i = idx[a]
        s = 0
        for b in range(k):
            if a != b:
                s += V[i][idx[b]]
        w[a] = s
    W = max(w)
    S = 0
    for a in range(k):
        i = idx[a]
        e = W - w[a]
        if e >= A:
            continue
        t = g[i] * pw[e] % M
        for b in range(k):
            if a != b:
                t = t * U[i][idx[b]] % M
        S += t
    S %= M
    if S == 0:
        return None, A - W
    v = 0
    while S % p == 0:
        S //= p
        v += 1
    return v - W, None


def _fpt_mul(a, b, p, A):
    return np.convolve(a, b)[:A] % p


def _fpt_tuple(idx, g, V, U, p, A):
    k = len(idx)
    w = [0] * k
    for a in range(k):
        i = idx[a]
        w[a] = sum(V[i][idx[b]] for b in range(k) if b != a)
    W = max(w)
    S = np.zeros(A, dtype=np.int64)
    for a in range(k):
        i = idx[a]
        e = W - w[a]
        if e >= A:
            continue
        t = g[i]
        for b in range(k):
            if a != b:
                t = _fpt_mul(t, U[i][idx[b]], p, A)
        S[e:] += t[:A - e]
    S %= p
    nz = np.flatnonzero(S)
    if nz.size == 0:
        return None, A - W
    return int(nz[0]) - W, None


def _combos_from(P, k, lo, hi):
    for i0 in range(lo, hi):
        for rest in combinations(range(i0 + 1, P), k - 1):
            yield (i0,) + rest


def _scan(tuple_fn, idx_iter):
    best, wit, und = BIG, None, BIG
    for idx in idx_iter:
        v, bound = tuple_fn(idx)
        if v is None:
            if bound < und:
                und = bound
        elif v < best:
            best, wit = v, tuple(idx)
    return best, wit, und


def zp_scan(g, V, U, p, A, k, lo, hi, tuples=None):
    """Scan k-subsets with first index in [lo, hi), or rows lo..hi of ``tuples``."""
    g = [int(x) for x in g]
    V = [[int(x) for x in row] for row in V]
    U = [[int(x) for x in row] for row in U]
    M = p ** A
    pw = [pow(p, e, M) for e in range(A)]
    fn = lambda idx: _zp_tuple(idx, g, V, U, p, A, M, pw)
    if tuples is None:
        it = _combos_from(len(g), k, lo, hi)
    else:
        it = (tuple(int(i) for i in row) for row in islice(tuples, lo, hi))
    return _scan(fn, it)


def fpt_scan(g, V, U, p, A, k, lo, hi, tuples=None):
    g = [np.asarray(x, dtype=np.int64) for x in g]
    V = [[int(x) for x in row] for row in V]
    U = [[np.asarray(x, dtype=np.int64) for x in row] for row in U]
    fn = lambda idx: _fpt_tuple(idx, g, V, U, p, A)
    if tuples is None:
        it = _combos_from(len(g), k, lo, hi)
    else:
        it = (tuple(int(i) for i in row) for row in islice(tuples, lo, hi))
    return _scan(fn, it)
