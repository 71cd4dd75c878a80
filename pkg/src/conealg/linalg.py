"""Exact dense linear algebra over the scalar contexts of :mod:`fields`.

Straight Gaussian elimination with field inverses; pivoting picks the first
invertible entry in a column (over jets "invertible" means the constant
term is nonzero).  Matrices are lists of row lists of raw scalars.  For
GF(2^64) the echelon step dispatches to the numba kernels when the matrix
is large enough to care.
"""

from __future__ import annotations

import numpy as np

from . import _gf2fast
from .fields import BinaryField, JetContext

__all__ = [
    "Echelon",
    "LinearAlgebraError",
    "jet_solve_unique",
    "kernel_basis",
    "matrix_inverse",
    "matrix_rank",
    "solve_unique",
]

_FAST_THRESHOLD = 4096  # rows * cols above which the uint64 kernel pays off


class LinearAlgebraError(ValueError):
    pass


def _use_fast(ring, nrows: int, ncols: int) -> bool:
    return (
        _gf2fast.HAVE_NUMBA
        and isinstance(ring, BinaryField)
        and ring.degree == 64
        and nrows * ncols >= _FAST_THRESHOLD
    )


class Echelon:
    """Row echelon form of a matrix, reusable for many reductions.

    Rows are normalized so every pivot entry is one.  `reduce` eliminates
    the pivot coordinates of a vector, leaving its class supported on the
    non-pivot columns (the quotient basis, which by the left-to-right pivot
    scan over sorted columns is the lexicographically last choice).
    """

    def __init__(self, ring, ncols: int):
        self.ring = ring
        self.ncols = ncols
        self.pivots: list[int] = []
        self._rows: list[list] = []
        self._np = None  # uint64 matrix when the fast path was used

    @classmethod
    def build(cls, rows, ncols: int, ring) -> "Echelon":
        ech = cls(ring, ncols)
        if not rows:
            return ech
        if _use_fast(ring, len(rows), ncols):
            M = np.array(rows, dtype=np.uint64)
            piv = _gf2fast.echelon64(M, _gf2fast.FEEDBACK)
            ech.pivots = [int(c) for c in piv]
            ech._np = M[: len(ech.pivots)]
            return ech
        work = [list(r) for r in rows]
        ech._rows, ech.pivots = _echelon_generic(work, ncols, ring)
        return ech

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def nonpivot_columns(self) -> list[int]:
        ps = set(self.pivots)
        return [c for c in range(self.ncols) if c not in ps]

    def reduce(self, vec):
        """Return the vector reduced modulo the row space (a new list)."""
        R = self.ring
        if self._np is not None:
            V = np.array([vec], dtype=np.uint64)
            piv = np.array(self.pivots, dtype=np.int64)
            _gf2fast.eliminate64(self._np, piv, V, _gf2fast.FEEDBACK)
            return [int(x) for x in V[0]]
        out = list(vec)
        for r, c in enumerate(self.pivots):
            f = out[c]
            if R.is_zero(f):
                continue
            row = self._rows[r]
            out[c] = R.zero
            for j in range(c + 1, self.ncols):
                x = row[j]
                if not R.is_zero(x):
                    out[j] = R.sub(out[j], R.mul(f, x))
        return out

    def reduce_many(self, vecs):
        if self._np is not None and vecs:
            V = np.array(vecs, dtype=np.uint64)
            piv = np.array(self.pivots, dtype=np.int64)
            _gf2fast.eliminate64(self._np, piv, V, _gf2fast.FEEDBACK)
            return [[int(x) for x in row] for row in V]
        return [self.reduce(v) for v in vecs]


def _echelon_generic(rows, ncols, ring):
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        pr = -1
        for i in range(r, nrows):
            if ring.is_unit(rows[i][c]):
                pr = i
                break
        if pr < 0:
            # a column of pure non-units (possible over jets) is a genuine
            # failure for the solves we run; callers treat it as a bad
            # specialization
            if any(not ring.is_zero(rows[i][c]) for i in range(r, nrows)):
                raise LinearAlgebraError(f"no invertible pivot in column {c}")
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = ring.inv(rows[r][c])
        rows[r] = [ring.mul(inv, x) for x in rows[r]]
        for i in range(r + 1, nrows):
            f = rows[i][c]
            if ring.is_zero(f):
                continue
            ri, rr = rows[i], rows[r]
            rows[i] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(ri, rr)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows[:r], pivots


def matrix_rank(rows, ncols, ring) -> int:
    return Echelon.build(rows, ncols, ring).rank


def solve_unique(rows, rhs, ring):
    """Solve A x = b when the solution exists and is unique.

    Raises LinearAlgebraError on rank deficiency or inconsistency.
    """
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    ech = Echelon.build(aug, ncols + 1, ring)
    if ncols in ech.pivots:
        raise LinearAlgebraError("inconsistent linear system")
    if ech.rank < ncols:
        raise LinearAlgebraError(
            f"rank deficient: rank {ech.rank} < {ncols} unknowns"
        )
    # back substitution against the echelon rows
    if ech._np is not None:
        erows = [[int(x) for x in row] for row in ech._np]
    else:
        erows = ech._rows
    x = [ring.zero] * ncols
    for r in range(len(ech.pivots) - 1, -1, -1):
        c = ech.pivots[r]
        acc = erows[r][ncols]
        row = erows[r]
        for j in range(c + 1, ncols):
            xj = x[j]
            if not ring.is_zero(xj):
                acc = ring.sub(acc, ring.mul(row[j], xj))
        x[c] = acc
    return x


def kernel_basis(rows, ncols, ring):
    """Basis of the right kernel, one vector per non-pivot column."""
    ech = Echelon.build(rows, ncols, ring)
    if ech._np is not None:
        erows = [[int(x) for x in row] for row in ech._np]
    else:
        erows = ech._rows
    basis = []
    for free in ech.nonpivot_columns():
        v = [ring.zero] * ncols
        v[free] = ring.one
        for r in range(len(ech.pivots) - 1, -1, -1):
            c = ech.pivots[r]
            acc = ring.zero
            row = erows[r]
            for j in range(c + 1, ncols):
                if not ring.is_zero(v[j]):
                    acc = ring.add(acc, ring.mul(row[j], v[j]))
            v[c] = ring.neg(acc)
        basis.append(v)
    return basis


def matrix_inverse(rows, ring):
    """Inverse of a square matrix by Gauss-Jordan on [A | I]."""
    n = len(rows)
    aug = [list(r) + [ring.one if i == j else ring.zero for j in range(n)]
           for i, r in enumerate(rows)]
    work, pivots = _echelon_generic(aug, 2 * n, ring)
    if len(pivots) != n or pivots != list(range(n)):
        raise LinearAlgebraError("singular matrix")
    for r in range(n - 1, -1, -1):
        c = pivots[r]
        for i in range(r):
            f = work[i][c]
            if ring.is_zero(f):
                continue
            wi, wr = work[i], work[r]
            work[i] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(wi, wr)]
    return [row[n:] for row in work[:n]]


def jet_solve_unique(rows, rhs, jets: JetContext, a0_inverse=None):
    """Solve a linear system with jet entries by Taylor-mode recursion.

    Writing A = sum_T v^T A_T with field coefficient matrices A_T, the
    coefficient vectors of the solution satisfy

        A_0 x_E = b_E - sum_{0 != T <= E} A_T x_{E-T},

    so one factorization of the constant-part system serves every
    multi-index.  Equivalent to Gaussian elimination over the jet ring
    (cross-checked in the tests), but much faster.  `a0_inverse` lets the
    caller reuse the inverse of the constant-part matrix across instances.
    """
    F = jets.base
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    nvars = len(jets.variables)
    zero_e = (0,) * nvars

    # split the matrix by exponent
    by_exp: dict[tuple, dict] = {}
    for i, row in enumerate(rows):
        for j, a in enumerate(row):
            for e, c in a.items():
                by_exp.setdefault(e, {})[(i, j)] = c
    rhs_by_exp: dict[tuple, dict] = {}
    for i, a in enumerate(rhs):
        for e, c in a.items():
            rhs_by_exp.setdefault(e, {})[i] = c

    a0 = [[by_exp.get(zero_e, {}).get((i, j), F.zero) for j in range(ncols)] for i in range(nrows)]
    nz_exps = sorted((e for e in by_exp if e != zero_e), key=lambda e: (sum(e), e))

    # enumerate target exponents within caps, by total degree
    targets = [zero_e]
    seen = {zero_e}
    frontier = [zero_e]
    while frontier:
        nxt = []
        for e in frontier:
            for i in range(nvars):
                e2 = list(e)
                e2[i] += 1
                e2 = tuple(e2)
                if e2 in seen or e2[i] > jets.caps[i] or sum(e2) > jets.total_cap:
                    continue
                seen.add(e2)
                nxt.append(e2)
        nxt.sort()
        targets.extend(nxt)
        frontier = nxt

    if a0_inverse is None:
        a0_inverse = matrix_inverse(a0, F)

    def base_solve(b):
        return [F.dot(row, b) for row in a0_inverse]

    sols: dict[tuple, list] = {}
    for e in targets:
        b = [rhs_by_exp.get(e, {}).get(i, F.zero) for i in range(nrows)]
        for t in nz_exps:
            if any(ti > ei for ti, ei in zip(t, e)):
                continue
            rem = tuple(ei - ti for ei, ti in zip(e, t))
            if rem not in sols:
                continue
            x = sols[rem]
            for (i, j), c in by_exp[t].items():
                xj = x[j]
                if xj != F.zero:
                    b[i] = F.sub(b[i], F.mul(c, xj))
        sols[e] = base_solve(b)

    out = []
    for j in range(ncols):
        val = {}
        for e, x in sols.items():
            if x[j] != F.zero:
                val[e] = x[j]
        out.append(val)
    return out
