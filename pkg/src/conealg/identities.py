"""Machine verification of the identities the volume functional satisfies.

Every check here demands exact equality in the scalar field; randomness
only picks instances and specializations, never tolerances.  The quadratic
identity sums over ordered tuples of height-1 elements; a term contributes
zero unless the halved point is a semigroup element of some single cell
(the recorded convention for glued complexes).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations_with_replacement, product
from typing import Optional, Sequence

from .algebra import (
    Space,
    ThetaAssignment,
    formal_product,
    graded_piece,
    pair_space,
)
from .complexes import half_point, monomial_sum
from .fields import JetContext
from .geometry import ConeElement
from .linalg import kernel_basis
from .volume import VolumeFunctional, VolumeSolver, volume_of

__all__ = [
    "IdentityReport",
    "check_balancing",
    "check_differential",
    "check_euler_homogeneity",
    "check_parseval_char2",
    "check_parseval_char_p",
    "check_parseval_general",
    "isotropy_dichotomy",
]

TERM_BUDGET = 10**7


class BudgetError(RuntimeError):
    pass


@dataclass
class IdentityReport:
    identity: str
    instance: str
    passed: bool
    lhs: object = None
    rhs: object = None
    detail: dict = dc_field(default_factory=dict)

    def as_json(self, ring=None) -> dict:
        out = {"identity": self.identity, "instance": self.instance, "passed": self.passed}
        if ring is not None and self.lhs is not None:
            out["lhs"] = ring.to_json(self.lhs)
            out["rhs"] = ring.to_json(self.rhs)
        out.update(self.detail)
        return out


def _theta_tuple_weight(theta: ThetaAssignment, beta: Sequence[ConeElement]):
    R = theta.ring
    w = R.one
    for i, b in enumerate(beta):
        w = R.mul(w, theta.entry(i, b))
    return w


def check_parseval_char2(vf: VolumeFunctional, alpha: ConeElement) -> IdentityReport:
    """vol(x_alpha) against the squared-half expansion over ordered tuples.

    alpha is a top-degree element of the space (interior for pairs).
    """
    space, theta = vf.space, vf.theta
    X = space.X
    R = theta.ring
    if R.characteristic != 2:
        raise ValueError("the quadratic identity in this form needs characteristic 2")
    pts = X.lattice_points()
    d1 = X.dim + 1
    if len(pts) ** d1 > TERM_BUDGET:
        raise BudgetError("tuple enumeration exceeds the term budget")
    lhs = volume_of(vf, alpha)
    rhs = R.zero
    for beta in product(pts, repeat=d1):
        coords = tuple(alpha.point[i] + sum(b.point[i] for b in beta)
                       for i in range(X.ambient_dim))
        tot = ConeElement(coords, 2 * d1)
        half = half_point(X, tot)
        if half is None:
            continue
        v = volume_of(vf, half)
        if R.is_zero(v):
            continue
        rhs = R.add(rhs, R.mul(R.mul(v, v), _theta_tuple_weight(theta, beta)))
    return IdentityReport(
        "parseval", f"alpha={alpha.point}@{alpha.height} on {space.tag}",
        lhs == rhs, lhs, rhs,
    )


def check_parseval_general(vf: VolumeFunctional, sigma: Sequence[ConeElement],
                           u: dict) -> IdentityReport:
    """vol(x_sigma u^2) = sum_beta vol(u x_{(sigma+beta)/2})^2 theta^beta.

    u is a formal sum of height-((d+1-#sigma)/2) monomials; legality (pair
    element, or ring element for interior sigma) is the caller's choice of
    sampling space.
    """
    space, theta = vf.space, vf.theta
    X = space.X
    R = theta.ring
    if R.characteristic != 2:
        raise ValueError("needs characteristic 2")
    d1 = X.dim + 1
    j = len(sigma)
    if (d1 + j) % 2:
        raise ValueError(f"parity violation: d+1+#sigma = {d1 + j} must be even")
    pts = X.lattice_points()
    if len(pts) ** d1 * max(1, len(u)) > TERM_BUDGET:
        raise BudgetError("tuple enumeration exceeds the term budget")
    sig_formal = [{s: R.one} for s in sigma]
    lhs = volume_of(vf, formal_product(X, R, sig_formal + [u, u]))
    sig_coords = tuple(sum(s.point[i] for s in sigma) for i in range(X.ambient_dim))
    rhs = R.zero
    for beta in product(pts, repeat=d1):
        coords = tuple(sig_coords[i] + sum(b.point[i] for b in beta)
                       for i in range(X.ambient_dim))
        half = half_point(X, ConeElement(coords, d1 + j))
        if half is None:
            continue
        inner = R.zero
        for m, c in u.items():
            s = monomial_sum(X, (m, half))
            if s is None:
                continue
            v = vf.values.get(s)
            if v is not None:
                inner = R.add(inner, R.mul(c, v))
        if R.is_zero(inner):
            continue
        rhs = R.add(rhs, R.mul(R.mul(inner, inner), _theta_tuple_weight(theta, beta)))
    return IdentityReport(
        "parseval-general",
        f"sigma={[s.point for s in sigma]}, |supp u|={len(u)} on {space.tag}",
        lhs == rhs, lhs, rhs,
    )


def check_parseval_char_p(vf: VolumeFunctional, alpha: ConeElement) -> IdentityReport:
    """The characteristic-p generalization with matrix exponents.

    beta runs over nonnegative matrices (d+1 rows, columns the height-1
    elements) with every row summing to p-1; the term is
    vol(x_{(alpha+beta)/p})^p theta^beta / beta!.  At p = 2 this is the
    quadratic identity again (a consistency test).
    """
    space, theta = vf.space, vf.theta
    X = space.X
    R = theta.ring
    p = R.characteristic
    pts = X.lattice_points()
    d1 = X.dim + 1
    from math import comb, factorial

    per_row = comb(len(pts) + p - 2, p - 1)
    if per_row ** d1 > TERM_BUDGET:
        raise BudgetError("matrix enumeration exceeds the term budget")
    lhs = volume_of(vf, alpha)
    rhs = R.zero
    row_choices = list(combinations_with_replacement(pts, p - 1))
    for rows in product(row_choices, repeat=d1):
        coords = list(alpha.point)
        weight = R.one
        fact = 1
        for i, multiset in enumerate(rows):
            counts: dict = {}
            for b in multiset:
                counts[b] = counts.get(b, 0) + 1
                weight = R.mul(weight, theta.entry(i, b))
                for t in range(X.ambient_dim):
                    coords[t] += b.point[t]
            for c in counts.values():
                fact = (fact * factorial(c)) % p
        half = half_point(X, ConeElement(tuple(coords), p * d1), p)
        if half is None:
            continue
        v = volume_of(vf, half)
        if R.is_zero(v):
            continue
        term = R.mul(R.pow(v, p), R.mul(weight, R.inv(R.from_int(fact))))
        rhs = R.add(rhs, term)
    return IdentityReport(
        "parseval-p", f"p={p}, alpha={alpha.point}@{alpha.height} on {space.tag}",
        lhs == rhs, lhs, rhs,
    )


def check_balancing(vf: VolumeFunctional) -> IdentityReport:
    """Exhaustive balancing: for every row i and every height-d element A
    of the space, sum_p theta_{i,p} vol(x_A x_p) = 0 exactly."""
    space, theta = vf.space, vf.theta
    X = space.X
    R = theta.ring
    d = X.dim
    bad = []
    for A in space.monomials(d):
        for i in range(theta.rows):
            acc = R.zero
            for p0 in X.lattice_points():
                s = monomial_sum(X, (A, p0))
                if s is None:
                    continue
                v = vf.values.get(s)
                if v is not None:
                    acc = R.add(acc, R.mul(theta.entry(i, p0), v))
            if not R.is_zero(acc):
                bad.append((i, A))
    return IdentityReport(
        "balancing", f"all rows x height-{d} elements on {space.tag}",
        not bad, detail={"violations": len(bad)},
    )


# ---------------------------------------------------------------------------
# differential identity via jets
# ---------------------------------------------------------------------------

def differential_instance(space: Space, theta: ThetaAssignment,
                          F: Sequence[ConeElement], sigma_positions: Sequence[int],
                          u: dict, solver: Optional[VolumeSolver] = None,
                          G: Optional[Sequence[ConeElement]] = None,
                          vf_base: Optional[VolumeFunctional] = None) -> IdentityReport:
    """d_F vol_sigma(u^2) = (vol_sigma(u x_G))^2, checked through jets.

    F assigns one differentiated coefficient per Theta row: position i
    differentiates theta_{i, F[i]}.  sigma is the subsequence of F at the
    given positions, and x_G (equivalently x_{(sigma+F)/2}) is the half of
    sigma + F; when G is passed explicitly its doubled sum must match
    F - sigma.  u's coefficients must not involve the differentiated
    variables; here they are plain field constants, lifted to constant
    jets.
    """
    X = space.X
    R = theta.ring
    if R.characteristic != 2:
        raise ValueError("needs characteristic 2")
    d1 = X.dim + 1
    if len(F) != d1 or len(F) != theta.rows:
        raise ValueError(f"F must assign one point per Theta row ({theta.rows})")
    sigma = tuple(F[i] for i in sigma_positions)
    j = len(sigma)
    if (d1 - j) % 2:
        raise ValueError("parity violation: |F| - |sigma| must halve")
    k = (d1 - j) // 2
    if k < 1:
        raise ValueError("need k >= 1")
    # the half point (sigma + F)/2 at height k + j
    coords = tuple(
        sum(s.point[t] for s in sigma) + sum(w.point[t] for w in F)
        for t in range(X.ambient_dim)
    )
    half = half_point(X, ConeElement(coords, 2 * (k + j)))
    if G is not None:
        gsum = tuple(2 * sum(g.point[t] for g in G) + sum(s.point[t] for s in sigma)
                     for t in range(X.ambient_dim))
        if gsum != coords:
            raise ValueError("2|G| does not match |F| - |sigma|")
        if monomial_sum(X, tuple(G)) is None:
            raise ValueError("G's entries do not lie in a single cell")
    tags = tuple(f"r{i}" for i in range(d1))
    jets = JetContext(R, tags, 1, total_cap=d1)
    var_at = {(i, F[i].point): tags[i] for i in range(d1)}
    theta_jet = theta.jet_lifted(var_at, jets)
    solver = solver or VolumeSolver(space)
    vf_jet = solver.solve(theta_jet)
    sig_formal = [{s: R.one} for s in sigma]
    lhs_formal = formal_product(X, R, sig_formal + [u, u])
    lhs_jet = volume_of(vf_jet, {e: jets.lift(c) for e, c in lhs_formal.items()})
    lhs = jets.partial(lhs_jet, {t: 1 for t in tags})
    # right side at the base point
    if vf_base is None:
        vf_base = solver.solve(theta)
    inner = R.zero
    if half is not None:
        for m, c in u.items():
            s = monomial_sum(X, (m, half))
            if s is None:
                continue
            v = vf_base.values.get(s)
            if v is not None:
                inner = R.add(inner, R.mul(c, v))
    rhs = R.mul(inner, inner)
    return IdentityReport(
        "differential",
        f"F={[w.point for w in F]}, sigma at {tuple(sigma_positions)}, "
        f"|supp u|={len(u)} on {space.tag}",
        lhs == rhs, lhs, rhs,
    )


check_differential = differential_instance


# ---------------------------------------------------------------------------
# Euler homogeneity
# ---------------------------------------------------------------------------

def check_euler_homogeneity(space: Space, theta: ThetaAssignment,
                            monomials: Optional[Sequence[ConeElement]] = None,
                            solver: Optional[VolumeSolver] = None) -> list[IdentityReport]:
    """Row-wise degree -1 homogeneity: f = sum_z z d_z f / E_z!.

    z runs over monomials in the theta entries of per-row degree exactly
    p-1.  Iterating the degree-(-1) Euler relation row by row gives, with
    s = p-1 and Wilson's theorem, the divided-power form above: the
    per-row factors (s!)^-1 m(m-1)...(m-s+1) are all 1 mod p, so no global
    sign survives (in characteristic 2 there is nothing to cancel).  The
    divided mixed partial d_z/E_z! is exactly the jet coefficient at the
    exponent of z.  Each requested vol entry yields one report.
    """
    R = theta.ring
    p = R.characteristic
    r = theta.rows
    cols = theta.columns
    tags = tuple(f"v{i}_{j}" for i in range(r) for j in range(len(cols)))
    tag_of = {(i, j): tags[i * len(cols) + j] for i in range(r) for j in range(len(cols))}
    jets = JetContext(R, tags, p - 1, total_cap=r * (p - 1))
    var_at = {(i, cols[j].point): tag_of[(i, j)] for i in range(r) for j in range(len(cols))}
    theta_jet = theta.jet_lifted(var_at, jets)
    solver = solver or VolumeSolver(space)
    vf_jet = solver.solve(theta_jet)
    tag_index = {t: i for i, t in enumerate(tags)}
    targets = list(monomials) if monomials is not None else sorted(vf_jet.values)
    row_monos = list(combinations_with_replacement(range(len(cols)), p - 1))
    reports = []
    for m in targets:
        f_jet = vf_jet.values[m]
        base = jets.constant_part(f_jet)
        rhs = R.zero
        for choice in product(row_monos, repeat=r):
            zval = R.one
            exp = [0] * len(tags)
            for i, multiset in enumerate(choice):
                for j in multiset:
                    zval = R.mul(zval, theta.entries[i][j])
                    exp[tag_index[tag_of[(i, j)]]] += 1
            dz = f_jet.get(tuple(exp), R.zero)  # the divided partial d_z/E_z!
            if not R.is_zero(dz):
                rhs = R.add(rhs, R.mul(zval, dz))
        reports.append(IdentityReport(
            "euler", f"p={p}, vol({m.point}@{m.height}) on {space.tag}",
            base == rhs, base, rhs,
        ))
    return reports


# ---------------------------------------------------------------------------
# (an)isotropy dichotomy
# ---------------------------------------------------------------------------

def isotropy_dichotomy(space: Space, theta: ThetaAssignment,
                       vf: Optional[VolumeFunctional] = None,
                       trials: int = 20, stream=None) -> dict:
    """For odd d and k = (d+1)/2: u pairs with some degree-one-generated
    half point iff u^2 != 0.

    The kernel of the half-point pairing is computed by a linear solve;
    every kernel element must square to zero (checked both through vol and
    through the top-piece reduction), and every element with a nonzero
    pairing must square to a nonzero class.
    """
    X = space.X
    d = X.dim
    if d % 2 == 0:
        raise ValueError("the dichotomy needs odd complex dimension")
    k = (d + 1) // 2
    R = theta.ring
    vf = vf or VolumeSolver(space).solve(theta)
    piece = graded_piece(space, theta, k)
    top = graded_piece(space, theta, d + 1)
    pts = X.lattice_points()
    if len(pts) ** (d + 1) > TERM_BUDGET:
        raise BudgetError("half-point enumeration exceeds the budget")
    halves = set()
    for beta in product(pts, repeat=d + 1):
        coords = tuple(sum(b.point[t] for b in beta) for t in range(X.ambient_dim))
        h = half_point(X, ConeElement(coords, 2 * k))
        if h is not None:
            halves.add(h)
    halves = sorted(halves)
    # pairing matrix: rows = halves, cols = basis of A^k
    M = []
    for h in halves:
        row = []
        for b in piece.basis:
            s = monomial_sum(X, (b, h))
            v = vf.values.get(s) if s is not None else None
            row.append(v if v is not None else R.zero)
        M.append(row)
    n = piece.dim
    ker = kernel_basis(M, n, R) if M else [[R.one if i == j else R.zero for i in range(n)] for j in range(n)]

    def formal_of(coeffs):
        return {b: c for b, c in zip(piece.basis, coeffs) if not R.is_zero(c)}

    def square_is_zero(u_formal):
        sq = formal_product(X, R, [u_formal, u_formal])
        vol_zero = R.is_zero(volume_of(vf, sq))
        class_zero = top.is_zero_class(sq)
        return vol_zero, class_zero

    failures = []
    for v in ker:
        u = formal_of(v)
        if not u:
            continue
        vz, cz = square_is_zero(u)
        if not (vz and cz):
            failures.append("kernel element with nonzero square")
    paired_checked = 0
    stream = stream or iter(())
    candidates = []
    for i, b in enumerate(piece.basis):
        coeffs = [R.one if i == jdx else R.zero for jdx in range(n)]
        candidates.append(coeffs)
    if hasattr(stream, "randrange"):
        for _ in range(trials):
            candidates.append([R.sample(stream) for _ in range(n)])
    for coeffs in candidates:
        pairs = [R.dot(row, coeffs) for row in M]
        if all(R.is_zero(x) for x in pairs):
            continue
        u = formal_of(coeffs)
        if not u:
            continue
        vz, cz = square_is_zero(u)
        if vz or cz:
            failures.append("paired element with zero square")
        paired_checked += 1
    return {
        "space": space.tag,
        "k": k,
        "half_points": len(halves),
        "dim": n,
        "kernel_dim": len(ker),
        "paired_checked": paired_checked,
        "consistent": not failures,
        "failures": failures,
    }
