"""The normalized volume functional on the top graded piece.

For a d-dimensional ball (or polytope) the functional lives on the
interior height-(d+1) elements of the pair module; for a sphere, on all
height-(d+1) elements.  It is cut out by the balancing relations

    sum_p theta_{i,p} vol(x_A x_p) = 0

over all rows i and all height-d elements A of the space, together with
one affine normalization: fixing a full flag (tau_i), the coherent subsets
sigma of the flag's cell (|sigma . tau_i| = i+1) contribute

    sum_sigma det(Theta|sigma) vol(x_sigma) = 1.

The normalization is independent of the flag; that is a verified property,
not an assumption.  Solving is a rank-checked exact linear solve over the
scalar ring of Theta (finite field, univariate rational functions, or
jets; jets go through the Taylor-mode solver with a cached base
factorization).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Optional, Sequence

from .algebra import Space, SpecializationError, ThetaAssignment, pair_space
from .complexes import LatticeComplex, monomial_sum, one_cell_complex
from .fields import JetContext, RationalFunctionField
from .geometry import ConeElement, Polytope
from .linalg import Echelon, LinearAlgebraError, jet_solve_unique, matrix_inverse, solve_unique

__all__ = [
    "VolumeFunctional",
    "VolumeSolver",
    "check_flag_independence",
    "check_locality",
    "coherent_sets",
    "deformed_volume_coarse",
    "deformed_volume_cut",
    "km_normalization_row",
    "solve_volume",
    "volume_of",
]


def _det(ring, M):
    n = len(M)
    out = ring.zero
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = ring.one
        for i in range(n):
            term = ring.mul(term, M[i][perm[i]])
        out = ring.add(out, term if sign > 0 else ring.neg(term))
    return out


def coherent_sets(cell: Polytope, flag: Sequence) -> list[tuple]:
    """Subsets of the cell's lattice points meeting the i-th flag face in
    exactly i+1 points; each is returned as a sorted point tuple."""
    pts = cell.lattice_points()
    d = cell.dim
    face_pts = [set(f.points) for f in flag]
    out = []
    for sigma in combinations(pts, d + 1):
        if all(sum(1 for s in sigma if s in face_pts[i]) == i + 1 for i in range(d + 1)):
            out.append(tuple(sorted(sigma)))
    return out


def km_normalization_row(space: Space, theta: ThetaAssignment, flag: Sequence) -> dict:
    """The normalization element as a formal sum over top-degree monomials.

    Coefficient det(Theta|sigma) accumulates onto the monomial sum(sigma).
    Raises SpecializationError when every determinant vanishes.
    """
    X = space.X
    cell = X.flag_cell(flag)
    R = theta.ring
    d = X.dim
    out: dict = {}
    for sigma in coherent_sets(cell, flag):
        cols = [theta.col_index[ConeElement(p, 1)] for p in sigma]
        M = [[theta.entries[i][j] for j in cols] for i in range(theta.rows)]
        if len(M) != len(sigma):
            raise ValueError("Theta row count does not match the flag's cell dimension")
        det = _det(R, M)
        if R.is_zero(det):
            continue
        mono = ConeElement(tuple(sum(c) for c in zip(*sigma)), d + 1)
        cur = R.add(out.get(mono, R.zero), det)
        if R.is_zero(cur):
            out.pop(mono, None)
        else:
            out[mono] = cur
    if not out:
        raise SpecializationError("all coherent determinants vanish; re-seed")
    for mono in out:
        if not space.is_member(mono):
            raise ValueError(f"normalization monomial {mono} lies on the boundary")
    return out


@dataclass
class VolumeFunctional:
    space: Space
    theta: ThetaAssignment
    flag: tuple
    values: dict  # interior top-degree ConeElement -> raw scalar

    def __call__(self, formal) -> object:
        return volume_of(self, formal)


def volume_of(vf: VolumeFunctional, formal) -> object:
    """Linear extension; monomials without a value (boundary, out of cone,
    or plain missing) contribute zero."""
    R = vf.theta.ring
    if isinstance(formal, ConeElement):
        formal = {formal: R.one}
    acc = R.zero
    for e, c in formal.items():
        v = vf.values.get(e)
        if v is not None:
            acc = R.add(acc, R.mul(c, v))
    return acc


class VolumeSolver:
    """Reusable structure for solving the volume system on one space.

    The monomial indexing and the positions of the balancing entries do
    not depend on Theta, so repeated solves (deformations, jet lifts,
    many seeds) share them.  For jet-valued Theta the solver selects a
    square subsystem and factors its constant part once per base point.
    """

    def __init__(self, space: Space, flag: Optional[Sequence] = None):
        if not space.relative:
            raise ValueError("the volume functional lives on a pair space")
        self.space = space
        X = space.X
        d = X.dim
        self.top = d + 1
        self.monomials = space.monomials(d + 1)
        if not self.monomials:
            raise ValueError("empty top graded piece")
        self.index = {e: j for j, e in enumerate(self.monomials)}
        self.flag = tuple(flag) if flag is not None else X.full_flags()[0]
        # balancing row structure: (row i, [(theta column point, monomial col)])
        self.balance: list[tuple[int, list]] = []
        cols = None
        for A in space.monomials(d):
            pairs = []
            for p0 in X.lattice_points():
                s = monomial_sum(X, (A, p0))
                if s is None:
                    continue
                j = self.index.get(s)
                if j is None:
                    raise RuntimeError(f"interior element {A} + {p0} left the module")
                pairs.append((p0, j))
            self.balance.append(pairs)
        self._jet_cache: dict = {}

    def assemble(self, theta: ThetaAssignment):
        R = theta.ring
        n = len(self.monomials)
        rows = []
        for pairs in self.balance:
            for i in range(theta.rows):
                vec = [R.zero] * n
                any_nz = False
                for p0, j in pairs:
                    c = theta.entry(i, p0)
                    if not R.is_zero(c):
                        vec[j] = R.add(vec[j], c)
                        any_nz = True
                if any_nz:
                    rows.append(vec)
        km = km_normalization_row(self.space, theta, self.flag)
        kmvec = [R.zero] * n
        for e, c in km.items():
            kmvec[self.index[e]] = c
        return rows, kmvec

    def solve(self, theta: ThetaAssignment) -> VolumeFunctional:
        R = theta.ring
        n = len(self.monomials)
        rows, kmvec = self.assemble(theta)
        if isinstance(R, JetContext):
            sol = self._solve_jets(theta, rows, kmvec)
        else:
            bal = Echelon.build(rows, n, R)
            if bal.rank < n - 1:
                raise SpecializationError(
                    f"balancing rank {bal.rank} < {n - 1}; re-seed"
                )
            if bal.rank == n:
                raise SpecializationError("balancing rows have full rank; re-seed")
            full = Echelon.build(rows + [kmvec], n, R)
            if full.rank != n:
                raise ValueError(
                    "normalization row lies in the balancing span: "
                    "the affine condition is contradictory"
                )
            rhs = [R.zero] * len(rows) + [R.one]
            sol = solve_unique(rows + [kmvec], rhs, R)
        values = {e: sol[j] for j, e in enumerate(self.monomials)}
        return VolumeFunctional(self.space, theta, self.flag, values)

    def _solve_jets(self, theta, rows, kmvec):
        J: JetContext = theta.ring
        F = J.base
        n = len(self.monomials)
        base_rows = [[J.constant_part(x) for x in row] for row in rows]
        base_km = [J.constant_part(x) for x in kmvec]
        key = tuple(tuple(r) for r in base_rows) + (tuple(base_km),)
        cached = self._jet_cache.get(key)
        if cached is None:
            sel: list[int] = []
            ech = []
            for i, row in enumerate(base_rows):
                trial = ech + [list(row)]
                e = Echelon.build(trial, n, F)
                if e.rank == len(sel) + 1:
                    sel.append(i)
                    ech = [list(base_rows[j]) for j in sel]
                if len(sel) == n - 1:
                    break
            if len(sel) < n - 1:
                raise SpecializationError("balancing rank dropped at the base point")
            square = [base_rows[i] for i in sel] + [base_km]
            try:
                inv = matrix_inverse(square, F)
            except LinearAlgebraError as exc:
                raise SpecializationError(f"singular base system: {exc}") from exc
            cached = (sel, inv)
            self._jet_cache[key] = cached
        sel, inv = cached
        jrows = [rows[i] for i in sel] + [kmvec]
        rhs = [J.zero] * (len(sel)) + [J.one]
        return jet_solve_unique(jrows, rhs, J, a0_inverse=inv)


def solve_volume(space_or_complex, theta: ThetaAssignment,
                 flag: Optional[Sequence] = None) -> VolumeFunctional:
    """Solve for the normalized volume functional.

    Accepts a pair Space, a complex (its boundary pair; spheres have empty
    boundary and everything counts as interior), or a polytope.
    """
    space = _coerce_pair(space_or_complex)
    return VolumeSolver(space, flag).solve(theta)


def _coerce_pair(obj) -> Space:
    if isinstance(obj, Space):
        if not obj.relative:
            raise ValueError("volume needs the pair space")
        return obj
    if isinstance(obj, Polytope):
        return pair_space(obj)
    if isinstance(obj, LatticeComplex):
        return pair_space(obj)
    raise TypeError(f"cannot interpret {obj!r} as a pair space")


# ---------------------------------------------------------------------------
# verified properties
# ---------------------------------------------------------------------------

def check_flag_independence(space_or_complex, theta: ThetaAssignment,
                            flags: Optional[Sequence] = None) -> dict:
    """Solve with one flag; every other flag's normalization sum must be 1.

    Exact equality; failures are returned as counterexample indices.
    """
    space = _coerce_pair(space_or_complex)
    all_flags = list(flags) if flags is not None else space.X.full_flags()
    vf = VolumeSolver(space, all_flags[0]).solve(theta)
    R = theta.ring
    bad = []
    for fi, flag in enumerate(all_flags[1:], start=1):
        km = km_normalization_row(space, theta, flag)
        total = volume_of(vf, km)
        if total != R.one:
            bad.append(fi)
    return {
        "flags": len(all_flags),
        "independent": not bad,
        "counterexamples": bad,
    }


def facet_subcomplex(X: LatticeComplex, cell_indices: Sequence[int]) -> LatticeComplex:
    """The ball induced by a subset of X's top cells, with its own boundary."""
    cells = [X.cells[i] for i in cell_indices]
    probe = LatticeComplex(cells, (), name=f"{X.name}|sub")
    return LatticeComplex(cells, probe.compute_boundary(), name=f"{X.name}|sub")


def check_locality(X: LatticeComplex, sub: LatticeComplex, theta: ThetaAssignment) -> dict:
    """vol on (sub, bd sub) with restricted Theta equals vol on X at sub's
    interior monomials, exactly.  The flag is chosen inside sub."""
    sub_keys = {c.key() for c in sub.cells}
    flag = next(f for f in X.full_flags()
                if tuple(sorted(f[-1].vertices)) in sub_keys)
    vf_big = VolumeSolver(pair_space(X), flag).solve(theta)
    theta_sub = theta.restrict_columns(sub)
    sub_flag = next(f for f in sub.full_flags()
                    if tuple(f_.key() for f_ in f) == tuple(f_.key() for f_ in flag))
    vf_sub = VolumeSolver(pair_space(sub), sub_flag).solve(theta_sub)
    R = theta.ring
    mism = []
    for e, v in sorted(vf_sub.values.items()):
        if vf_big.values.get(e, R.zero) != v:
            mism.append(e)
    return {
        "monomials": len(vf_sub.values),
        "local": not mism,
        "counterexamples": [[list(e.point), e.height] for e in mism],
    }


# ---------------------------------------------------------------------------
# deformations
# ---------------------------------------------------------------------------

def _common_flag(P: Polytope, Q: Polytope):
    """A full flag of P whose faces cut Q in a full flag of Q."""
    qpts = set(Q.lattice_points())
    qfaces = {i: {f.key(): f for f in fs} for i, fs in Q.faces().items()}
    for flag in P.full_flags():
        qchain = []
        ok = True
        for i, f in enumerate(flag):
            cut = tuple(sorted(p for p in f.points if p in qpts))
            cand = qfaces.get(i, {}).get(cut)
            if cand is None:
                ok = False
                break
            qchain.append(cand)
        if ok:
            return flag, tuple(qchain)
    raise ValueError("no common flag between the polytope and its cut")


def deformed_volume_cut(P: Polytope, Q: Polytope, m: ConeElement,
                        theta: ThetaAssignment, rational: RationalFunctionField):
    """vol_P of a top-degree monomial of Q, with the parameters of the
    points outside Q scaled by t.

    Returns (rational function of t, its value at t = 0, vol_Q(m) computed
    independently).  A pole at t = 0 is a hard failure.
    """
    V = [p for p in P.lattice_points() if p not in set(Q.lattice_points())]
    flag_p, flag_q = _common_flag(P, Q)
    theta_t = theta.t_scaled(V, rational)
    vf_t = VolumeSolver(pair_space(P), flag_p).solve(theta_t)
    val_t = vf_t.values.get(m, rational.zero)
    if rational.has_pole_at_zero(val_t):
        raise ValueError(f"deformed volume has a pole at t=0 for {m}")
    at0 = rational.evaluate(val_t, rational.base.zero)
    # independent solve on Q over the base field with the restricted columns
    qcomplex = one_cell_complex(Q)
    theta_q = theta.restrict_columns(qcomplex)
    vf_q = VolumeSolver(pair_space(qcomplex), flag_q).solve(theta_q)
    ref = vf_q.values.get(m, theta.ring.zero)
    return val_t, at0, ref


def deformed_volume_coarse(P: Polytope, N: int, m: ConeElement,
                           theta: ThetaAssignment, rational: RationalFunctionField):
    """vol_P over the fine lattice with fine-not-coarse parameters scaled
    by t.

    Returns (rational function, value at 0, coarse reference): the
    reference is vol of the corresponding coarse monomial when the point
    sum lies on the coarse lattice, and zero otherwise.
    """
    from .geometry import sublattice_view

    coarse, V = sublattice_view(P, N)
    theta_t = theta.t_scaled(V, rational)
    vf_t = VolumeSolver(pair_space(P)).solve(theta_t)
    val_t = vf_t.values.get(m, rational.zero)
    if rational.has_pole_at_zero(val_t):
        raise ValueError(f"deformed volume has a pole at t=0 for {m}")
    at0 = rational.evaluate(val_t, rational.base.zero)
    F = theta.ring
    if any(x % N for x in m.point):
        return val_t, at0, F.zero
    # transport Theta to the coarse polytope: column q/N takes the value
    # of column q
    ccomplex = one_cell_complex(coarse)
    ccols = ccomplex.lattice_points()
    entries = []
    for row_i in range(theta.rows):
        row = []
        for e in ccols:
            fine = ConeElement(tuple(N * x for x in e.point), 1)
            row.append(theta.entry(row_i, fine))
        entries.append(row)
    theta_c = ThetaAssignment(ccomplex, F, entries, mode="coarse", seed=theta.seed)
    vf_c = VolumeSolver(pair_space(ccomplex)).solve(theta_c)
    cm = ConeElement(tuple(x // N for x in m.point), m.height)
    return val_t, at0, vf_c.values.get(cm, F.zero)
