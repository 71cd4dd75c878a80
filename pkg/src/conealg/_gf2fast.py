"""Numba kernels for bulk row reduction over GF(2^64).

Only the degree-64 binary field gets a fast path; it is the default scalar
field and the only one that shows up in large eliminations.  Elements are
uint64 bit polynomials, reduced modulo x^64 + x^4 + x^3 + x + 1 (feedback
mask 0x1b).  Per eliminated row we build a 256-entry carry-less multiple
table of the factor, so the inner loop is eight table lookups per matrix
entry.

Everything here is cross-checked against the pure-Python field in the test
suite.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency
    HAVE_NUMBA = False

    def njit(*a, **k):
        def wrap(f):
            return f

        return wrap

FEEDBACK = np.uint64(0x1B)

_U0 = np.uint64(0)
_U1 = np.uint64(1)


@njit(cache=True)
def _mulred(a, b, fb):
    # carry-less multiply into (hi, lo), then fold mod x^64 + fb
    hi = _U0
    lo = _U0
    aa = a
    for t in range(64):
        if (b >> np.uint64(t)) & _U1:
            lo ^= aa << np.uint64(t)
            if t > 0:
                hi ^= aa >> np.uint64(64 - t)
    # value = hi*x^64 + lo = clmul(hi, fb) + lo
    l2 = _U0
    h2 = _U0
    for e in range(5):
        if (fb >> np.uint64(e)) & _U1:
            l2 ^= hi << np.uint64(e)
            if e > 0:
                h2 ^= hi >> np.uint64(64 - e)
    t2 = _U0
    for e in range(5):
        if (fb >> np.uint64(e)) & _U1:
            t2 ^= h2 << np.uint64(e)
    return lo ^ l2 ^ t2


@njit(cache=True)
def _inv(a, fb):
    # a^(2^64 - 2) by square-and-multiply
    r = _U1
    s = a
    # exponent 2^64-2 = 0b111...10 (63 ones then a zero)
    for _ in range(63):
        s = _mulred(s, s, fb)
        r = _mulred(r, s, fb)
    return r


@njit(cache=True)
def _build_table(f, t_lo, t_hi):
    # t[v] = clmul(f, v) for byte v, as (hi, lo) with hi < 2^8
    t_lo[0] = _U0
    t_hi[0] = _U0
    for v in range(1, 256):
        if v & 1:
            t_lo[v] = t_lo[v - 1] ^ f
            t_hi[v] = t_hi[v - 1]
        else:
            w = v >> 1
            t_lo[v] = t_lo[w] << _U1
            t_hi[v] = (t_hi[w] << _U1) | (t_lo[w] >> np.uint64(63))


@njit(cache=True)
def _table_mulred(t_lo, t_hi, x, fb):
    lo = _U0
    hi = _U0
    b = x & np.uint64(0xFF)
    lo ^= t_lo[b]
    hi ^= t_hi[b]
    for k in range(1, 8):
        s = np.uint64(8 * k)
        b = (x >> s) & np.uint64(0xFF)
        if b:
            lo ^= t_lo[b] << s
            hi ^= (t_hi[b] << s) | (t_lo[b] >> (np.uint64(64) - s))
    l2 = _U0
    h2 = _U0
    for e in range(5):
        if (fb >> np.uint64(e)) & _U1:
            l2 ^= hi << np.uint64(e)
            if e > 0:
                h2 ^= hi >> np.uint64(64 - e)
    t2 = _U0
    for e in range(5):
        if (fb >> np.uint64(e)) & _U1:
            t2 ^= h2 << np.uint64(e)
    return lo ^ l2 ^ t2


@njit(cache=True)
def echelon64(M, fb):
    """In-place row echelon form with pivots normalized to 1.

    Returns the array of pivot column indices (one per pivot row; rows are
    permuted so pivot r sits in row r).
    """
    R, C = M.shape
    t_lo = np.empty(256, np.uint64)
    t_hi = np.empty(256, np.uint64)
    piv = np.empty(min(R, C), np.int64)
    r = 0
    for c in range(C):
        pr = -1
        for i in range(r, R):
            if M[i, c]:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(c, C):
                tmp = M[pr, j]
                M[pr, j] = M[r, j]
                M[r, j] = tmp
        pv = M[r, c]
        if pv != _U1:
            ip = _inv(pv, fb)
            _build_table(ip, t_lo, t_hi)
            M[r, c] = _U1
            for j in range(c + 1, C):
                if M[r, j]:
                    M[r, j] = _table_mulred(t_lo, t_hi, M[r, j], fb)
        for i in range(r + 1, R):
            f = M[i, c]
            if f:
                M[i, c] = _U0
                _build_table(f, t_lo, t_hi)
                for j in range(c + 1, C):
                    x = M[r, j]
                    if x:
                        M[i, j] ^= _table_mulred(t_lo, t_hi, x, fb)
        piv[r] = c
        r += 1
        if r == R:
            break
    return piv[:r]


@njit(cache=True)
def eliminate64(E, piv, V, fb):
    """Reduce the rows of V in place against echelon rows E (pivots = 1)."""
    n = piv.shape[0]
    C = E.shape[1]
    t_lo = np.empty(256, np.uint64)
    t_hi = np.empty(256, np.uint64)
    for i in range(V.shape[0]):
        for r in range(n):
            c = piv[r]
            f = V[i, c]
            if f:
                V[i, c] = _U0
                _build_table(f, t_lo, t_hi)
                for j in range(c + 1, C):
                    x = E[r, j]
                    if x:
                        V[i, j] ^= _table_mulred(t_lo, t_hi, x, fb)
