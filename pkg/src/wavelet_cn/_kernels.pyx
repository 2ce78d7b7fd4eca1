# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled difference-quotient scans.  Same contract as ``_kernels_py``."""

from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t, uint64_t, int32_t, uint8_t

cdef extern from *:
    """
    static inline unsigned long long wcn_mulmod(unsigned long long a, unsigned long long b,
                                                unsigned long long m) {
        return (unsigned long long)(((unsigned __int128)a * b) % m);
    }
    """
    unsigned long long wcn_mulmod(unsigned long long a, unsigned long long b, unsigned long long m) nogil

cdef enum:
    MAXK = 16
BIG = 1 << 30
cdef int64_t C_BIG = 1 << 30


cdef inline bint _next_combo(int64_t* idx, int k, int64_t P) noexcept nogil:
    """Advance idx[1..k-1] (idx[0] fixed) to the next combination."""
    cdef int t = k - 1
    cdef int u
    while t >= 1 and idx[t] >= P - (k - t):
        t -= 1
    if t < 1:
        return False
    idx[t] += 1
    for u in range(t + 1, k):
        idx[u] = idx[u - 1] + 1
    return True


cdef inline void _zp_tuple(const int64_t* idx, int k, const uint64_t[:] g, const int32_t[:, :] V,
                           const uint64_t[:, :] U, uint64_t p, int A, uint64_t M,
                           const uint64_t* pw, int64_t* out_v, int64_t* out_bound) noexcept nogil:
    cdef int64_t w[MAXK]
    cdef int64_t W = -1
    cdef int a, b
    cdef int64_t s, e, i, v
    cdef uint64_t S = 0, t
    for a in range(k):
        i = idx[a]
        s = 0
        for b in range(k):
            if a != b:
                s += V[i, idx[b]]
        w[a] = s
        if s > W:
            W = s
    for a in range(k):
        i = idx[a]
        e = W - w[a]
        if e >= A:
            continue
        t = wcn_mulmod(g[i], pw[e], M)
        for b in range(k):
            if a != b:
                t = wcn_mulmod(t, U[i, idx[b]], M)
        S += t
        if S >= M:
            S -= M
    if S == 0:
        out_v[0] = C_BIG
        out_bound[0] = A - W
        return
    v = 0
    while S % p == 0:
        S //= p
        v += 1
    out_v[0] = v - W
    out_bound[0] = C_BIG


def zp_scan(g, V, U, uint64_t p, int A, int k, int64_t lo, int64_t hi, tuples=None):
    cdef const uint64_t[:] gv = g
    cdef const int32_t[:, :] Vv = V
    cdef const uint64_t[:, :] Uv = U
    cdef const int64_t[:, :] Tv
    cdef int64_t P = gv.shape[0]
    cdef uint64_t M = 1
    cdef uint64_t* pw = <uint64_t*> malloc(A * sizeof(uint64_t))
    cdef int64_t idx[MAXK]
    cdef int64_t wit[MAXK]
    cdef int64_t best = C_BIG, und = C_BIG, v, bound, i0, row
    cdef int a, e
    cdef bint have = False, use_rows = tuples is not None
    if k < 1 or k > MAXK:
        free(pw)
        raise ValueError("tuple size out of range")
    for e in range(A):
        pw[e] = M
        M *= p
    if use_rows:
        Tv = tuples
    try:
        with nogil:
            if use_rows:
                for row in range(lo, hi):
                    for a in range(k):
                        idx[a] = Tv[row, a]
                    _zp_tuple(idx, k, gv, Vv, Uv, p, A, M, pw, &v, &bound)
                    if v < best:
                        best = v
                        have = True
                        for a in range(k):
                            wit[a] = idx[a]
                    if bound < und:
                        und = bound
            else:
                for i0 in range(lo, hi):
                    idx[0] = i0
                    for a in range(1, k):
                        idx[a] = i0 + a
                    if idx[k - 1] >= P:
                        continue
                    while True:
                        _zp_tuple(idx, k, gv, Vv, Uv, p, A, M, pw, &v, &bound)
                        if v < best:
                            best = v
                            have = True
                            for a in range(k):
                                wit[a] = idx[a]
                        if bound < und:
                            und = bound
                        if not _next_combo(idx, k, P):
                            break
    finally:
        free(pw)
    witness = tuple(wit[a] for a in range(k)) if have else None
    return best, witness, und


cdef inline void _fpt_mul(const uint8_t* a, const uint8_t* b, uint8_t* out, int A, int p) noexcept nogil:
    cdef int i, j
    cdef int64_t acc
    for i in range(A):
        acc = 0
        for j in range(i + 1):
            acc += a[j] * b[i - j]
        out[i] = <uint8_t>(acc % p)


cdef inline void _fpt_tuple(const int64_t* idx, int k, const uint8_t[:, :] g, const int32_t[:, :] V,
                            const uint8_t[:, :, :] U, int p, int A, uint8_t* t1, uint8_t* t2,
                            int64_t* S, int64_t* out_v, int64_t* out_bound) noexcept nogil:
    cdef int64_t w[MAXK]
    cdef int64_t W = -1
    cdef int a, b, c
    cdef int64_t s, e, i
    cdef uint8_t* cur
    cdef uint8_t* nxt
    cdef uint8_t* tmp
    for a in range(k):
        i = idx[a]
        s = 0
        for b in range(k):
            if a != b:
                s += V[i, idx[b]]
        w[a] = s
        if s > W:
            W = s
    for c in range(A):
        S[c] = 0
    for a in range(k):
        i = idx[a]
        e = W - w[a]
        if e >= A:
            continue
        cur = t1
        nxt = t2
        for c in range(A):
            cur[c] = g[i, c]
        for b in range(k):
            if a != b:
                _fpt_mul(cur, &U[i, idx[b], 0], nxt, A, p)
                tmp = cur
                cur = nxt
                nxt = tmp
        for c in range(A - e):
            S[c + e] += cur[c]
    for c in range(A):
        if S[c] % p:
            out_v[0] = c - W
            out_bound[0] = C_BIG
            return
    out_v[0] = C_BIG
    out_bound[0] = A - W


def fpt_scan(g, V, U, int p, int A, int k, int64_t lo, int64_t hi, tuples=None):
    cdef const uint8_t[:, :] gv = g
    cdef const int32_t[:, :] Vv = V
    cdef const uint8_t[:, :, :] Uv = U
    cdef const int64_t[:, :] Tv
    cdef int64_t P = gv.shape[0]
    cdef uint8_t* t1 = <uint8_t*> malloc(A)
    cdef uint8_t* t2 = <uint8_t*> malloc(A)
    cdef int64_t* S = <int64_t*> malloc(A * sizeof(int64_t))
    cdef int64_t idx[MAXK]
    cdef int64_t wit[MAXK]
    cdef int64_t best = C_BIG, und = C_BIG, v, bound, i0, row
    cdef int a
    cdef bint have = False, use_rows = tuples is not None
    if k < 1 or k > MAXK:
        free(t1); free(t2); free(S)
        raise ValueError("tuple size out of range")
    if use_rows:
        Tv = tuples
    try:
        with nogil:
            if use_rows:
                for row in range(lo, hi):
                    for a in range(k):
                        idx[a] = Tv[row, a]
                    _fpt_tuple(idx, k, gv, Vv, Uv, p, A, t1, t2, S, &v, &bound)
                    if v < best:
                        best = v
                        have = True
                        for a in range(k):
                            wit[a] = idx[a]
                    if bound < und:
                        und = bound
            else:
                for i0 in range(lo, hi):
                    idx[0] = i0
                    for a in range(1, k):
                        idx[a] = i0 + a
                    if idx[k - 1] >= P:
                        continue
                    while True:
                        _fpt_tuple(idx, k, gv, Vv, Uv, p, A, t1, t2, S, &v, &bound)
                        if v < best:
                            best = v
                            have = True
                            for a in range(k):
                                wit[a] = idx[a]
                        if bound < und:
                            und = bound
                        if not _next_combo(idx, k, P):
                            break
    finally:
        free(t1); free(t2); free(S)
    witness = tuple(wit[a] for a in range(k)) if have else None
    return best, witness, und
