"""Artinian reductions of semigroup algebras of lattice complexes.

The linear system of parameters is a coefficient matrix Theta with one row
per Krull dimension (complex dimension + 1) and one column per height-1
element.  A graded piece of the ring, or of a relative module, is stored
as its monomial basis plus the row echelon of the relation space
{theta_i * m}; quotient coordinates live on the non-pivot monomials.

Random specializations occasionally drop rank; callers detect that against
the Ehrhart oracle and re-seed, counting retries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .complexes import LatticeComplex, monomial_sum, one_cell_complex
from .fields import JetContext, RationalFunctionField, substream
from .geometry import ConeElement, Polytope
from .linalg import Echelon

__all__ = [
    "GradedPiece",
    "Space",
    "SpecializationError",
    "ThetaAssignment",
    "graded_piece",
    "hilbert_dims",
    "make_theta",
    "mult_operator",
    "natural_map",
    "pair_space",
    "ring_space",
]


class SpecializationError(RuntimeError):
    """The random Theta landed on a bad variety; re-seed and retry."""


# ---------------------------------------------------------------------------
# spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Space:
    """A ring A^*(X) or a relative module A^*(X, Y).

    `rel_cells` lists the top cells of Y; the module's monomials at each
    height are the elements of X not lying in the cone of any Y cell.  A
    sphere's pair space has no rel cells and coincides with its ring.
    """

    X: LatticeComplex
    relative: bool
    rel_cells: tuple = ()

    @property
    def tag(self) -> str:
        if not self.relative:
            return f"A({self.X.name})"
        return f"A({self.X.name}, rel {len(self.rel_cells)} cells)"

    def is_member(self, e: ConeElement) -> bool:
        if not self.X.contains(e):
            return False
        if not self.relative:
            return True
        return not any(b.contains(e.point, e.height) for b in self.rel_cells)

    def monomials(self, k: int) -> tuple[ConeElement, ...]:
        if not self.relative:
            return self.X.points_at_height(k)
        if self.rel_cells == self.X.boundary_cells:
            return self.X.interior_points_at_height(k)
        return tuple(
            e for e in self.X.points_at_height(k)
            if not any(b.contains(e.point, e.height) for b in self.rel_cells)
        )


def ring_space(X: LatticeComplex | Polytope) -> Space:
    X = _as_complex(X)
    return Space(X, relative=False)


def pair_space(X: LatticeComplex | Polytope, rel_cells: Optional[Sequence[Polytope]] = None) -> Space:
    """The module relative to a subcomplex (default: the boundary)."""
    X = _as_complex(X)
    cells = tuple(rel_cells) if rel_cells is not None else X.boundary_cells
    return Space(X, relative=True, rel_cells=cells)


def _as_complex(X) -> LatticeComplex:
    if isinstance(X, Polytope):
        return one_cell_complex(X)
    return X


# ---------------------------------------------------------------------------
# linear systems of parameters
# ---------------------------------------------------------------------------

class ThetaAssignment:
    """Coefficient matrix of the linear system of parameters.

    rows x columns over a scalar ring; columns are indexed by the height-1
    elements of the complex, in sorted order.
    """

    def __init__(self, X: LatticeComplex, ring, entries, mode: str = "generic",
                 seed: Optional[int] = None):
        self.X = X
        self.ring = ring
        self.columns = X.lattice_points()
        self.col_index = {e: i for i, e in enumerate(self.columns)}
        self.entries = entries  # rows x len(columns), raw scalars
        self.rows = len(entries)
        self.mode = mode
        self.seed = seed

    def entry(self, i: int, e: ConeElement):
        return self.entries[i][self.col_index[e]]

    def row_restriction(self, rows: int) -> "ThetaAssignment":
        """First `rows` rows (the base system of a pyramid assignment)."""
        return ThetaAssignment(self.X, self.ring, [r[:] for r in self.entries[:rows]],
                               mode=self.mode + "|restricted", seed=self.seed)

    def restrict_columns(self, Y: LatticeComplex) -> "ThetaAssignment":
        """Restriction to a subcomplex: keep the columns of Y's points."""
        sub = ThetaAssignment.__new__(ThetaAssignment)
        sub.X = Y
        sub.ring = self.ring
        sub.columns = Y.lattice_points()
        missing = [e for e in sub.columns if e not in self.col_index]
        if missing:
            raise ValueError(f"subcomplex points not in Theta: {missing[:3]}")
        sub.col_index = {e: i for i, e in enumerate(sub.columns)}
        sub.entries = [[row[self.col_index[e]] for e in sub.columns] for row in self.entries]
        sub.rows = self.rows
        sub.mode = self.mode + "|subcomplex"
        sub.seed = self.seed
        return sub

    def t_scaled(self, V: Sequence[tuple], rational: RationalFunctionField) -> "ThetaAssignment":
        """Entries on the columns of V multiplied by t, over rational functions."""
        vset = {tuple(v) for v in V}
        t = rational.t()
        out = []
        for row in self.entries:
            new = []
            for e, val in zip(self.columns, row):
                c = rational.constant(val)
                new.append(rational.mul(t, c) if e.point in vset else c)
            out.append(new)
        th = ThetaAssignment(self.X, rational, out, mode=f"t-scaled({len(vset)})", seed=self.seed)
        return th

    def jet_lifted(self, var_at: dict, jets: JetContext) -> "ThetaAssignment":
        """First-order jet variables attached at positions (row, point)."""
        out = []
        for i, row in enumerate(self.entries):
            new = []
            for e, val in zip(self.columns, row):
                tag = var_at.get((i, e.point))
                new.append(jets.lift(val, tag))
            out.append(new)
        return ThetaAssignment(self.X, jets, out, mode="jet-lifted", seed=self.seed)

    def extra_row(self, stream) -> list:
        """A fresh generic linear form (for Lefschetz elements)."""
        return [self.ring.sample(stream) for _ in self.columns]


def make_theta(X: LatticeComplex | Polytope, field, seed: int, rows: Optional[int] = None,
               mode: str = "generic", tags: tuple = ()) -> ThetaAssignment:
    """Random Theta over a finite field, deterministic in (seed, tags).

    mode "pyramid" pins the apex column to (0, ..., 0, 1): the apex is the
    fresh unit point introduced by the pyramid construction, and the extra
    last row is its special parameter.
    """
    X = _as_complex(X)
    r = rows if rows is not None else X.dim + 1
    stream = substream(seed, "theta", *tags)
    cols = X.lattice_points()
    entries = [[field.sample(stream) for _ in cols] for _ in range(r)]
    if mode == "pyramid":
        apex = (0,) * (X.ambient_dim - 1) + (1,)
        idx = next((j for j, e in enumerate(cols) if e.point == apex), None)
        if idx is None:
            raise ValueError("pyramid mode: no apex point (0,...,0,1) in the complex")
        for i in range(r):
            entries[i][idx] = field.one if i == r - 1 else field.zero
    elif mode != "generic":
        raise ValueError(f"unknown theta mode {mode!r}")
    return ThetaAssignment(X, field, entries, mode=mode, seed=seed)


# ---------------------------------------------------------------------------
# graded pieces
# ---------------------------------------------------------------------------

@dataclass
class GradedPiece:
    space: Space
    theta: ThetaAssignment
    k: int
    monomials: tuple
    index: dict
    ech: Echelon
    basis: tuple  # non-pivot monomials, the quotient coordinates

    @property
    def dim(self) -> int:
        return len(self.basis)

    def zero_vector(self) -> list:
        return [self.theta.ring.zero] * len(self.monomials)

    def vector_of(self, formal: dict) -> list:
        """Coefficient vector of a formal sum {ConeElement: raw}; monomials
        outside the space contribute zero (the module convention)."""
        vec = self.zero_vector()
        R = self.theta.ring
        for e, c in formal.items():
            j = self.index.get(e)
            if j is not None:
                vec[j] = R.add(vec[j], c)
        return vec

    def reduce(self, vec: Sequence) -> list:
        """Quotient coordinates (on all monomials; support is the basis)."""
        return self.ech.reduce(list(vec))

    def reduce_formal(self, formal: dict) -> list:
        return self.reduce(self.vector_of(formal))

    def is_zero_class(self, formal_or_vec) -> bool:
        vec = (self.reduce_formal(formal_or_vec) if isinstance(formal_or_vec, dict)
               else self.reduce(formal_or_vec))
        R = self.theta.ring
        return all(R.is_zero(x) for x in vec)

    def basis_coords(self, reduced: Sequence) -> list:
        return [reduced[self.index[b]] for b in self.basis]

    def random_element(self, stream) -> dict:
        """Random class, returned as a formal sum supported on the basis."""
        R = self.theta.ring
        out = {}
        for b in self.basis:
            c = R.sample(stream)
            if not R.is_zero(c):
                out[b] = c
        return out


def graded_piece(space: Space, theta: ThetaAssignment, k: int,
                 expected_dim: Optional[int] = None) -> GradedPiece:
    """Monomial basis and relation echelon of A^k(space) at this Theta.

    Relations are theta_i * m over all rows i and all height-(k-1)
    monomials m of the same space.  `expected_dim` turns a rank drop into
    a SpecializationError (re-seed signal).
    """
    X = space.X
    monos = space.monomials(k)
    index = {e: j for j, e in enumerate(monos)}
    R = theta.ring
    rows = []
    if k >= 1:
        for m in space.monomials(k - 1):
            sums = {}
            for p in theta.columns:
                s = monomial_sum(X, (m, p))
                if s is not None:
                    sums[p] = index[s]
            for i in range(theta.rows):
                vec = [R.zero] * len(monos)
                nonzero = False
                for p, j in sums.items():
                    c = theta.entry(i, p)
                    if not R.is_zero(c):
                        vec[j] = R.add(vec[j], c)
                        nonzero = True
                if nonzero:
                    rows.append(vec)
    ech = Echelon.build(rows, len(monos), R)
    nonpiv = ech.nonpivot_columns()
    piece = GradedPiece(space, theta, k, monos, index, ech,
                        tuple(monos[j] for j in nonpiv))
    if expected_dim is not None and piece.dim != expected_dim:
        raise SpecializationError(
            f"dim A^{k} = {piece.dim}, expected {expected_dim} (bad specialization)"
        )
    return piece


def hilbert_dims(space: Space, theta: ThetaAssignment, kmax: int) -> tuple[int, ...]:
    return tuple(graded_piece(space, theta, k).dim for k in range(kmax + 1))


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def _formal_mul(X: LatticeComplex, ring, f: dict, g: dict) -> dict:
    out: dict = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            s = monomial_sum(X, (e1, e2))
            if s is None:
                continue
            v = ring.add(out.get(s, ring.zero), ring.mul(c1, c2))
            if ring.is_zero(v):
                out.pop(s, None)
            else:
                out[s] = v
    return out


def formal_product(space_X: LatticeComplex, ring, factors: Sequence[dict]) -> dict:
    out = None
    for f in factors:
        out = dict(f) if out is None else _formal_mul(space_X, ring, out, f)
    return out if out is not None else {}


def linear_form_formal(theta_row: Sequence, columns: Sequence[ConeElement], ring) -> dict:
    return {e: c for e, c in zip(columns, theta_row) if not ring.is_zero(c)}


def mult_operator(src: GradedPiece, multiplier: dict, dst: GradedPiece) -> list[list]:
    """Matrix of multiplication by a formal sum, in quotient coordinates.

    Columns run over src's basis monomials, rows over dst's basis.  Heights
    must satisfy src.k + deg(multiplier) = dst.k.
    """
    if not multiplier:
        return [[dst.theta.ring.zero] * src.dim for _ in range(dst.dim)]
    heights = {e.height for e in multiplier}
    if len(heights) != 1 or src.k + heights.pop() != dst.k:
        raise ValueError("multiplier height does not match source and target")
    R = dst.theta.ring
    cols = []
    X = dst.space.X
    for b in src.basis:
        prod = _formal_mul(X, R, {b: R.one}, multiplier)
        red = dst.reduce_formal(prod)
        cols.append(dst.basis_coords(red))
    return [[cols[j][i] for j in range(len(cols))] for i in range(dst.dim)]


def power_multiplier(X: LatticeComplex, ring, form: dict, power: int) -> dict:
    """form^power as a formal sum (power 0 is the height-0 unit)."""
    if power == 0:
        origin = ConeElement((0,) * X.ambient_dim, 0)
        return {origin: ring.one}
    return formal_product(X, ring, [form] * power)


def natural_map(pair_piece: GradedPiece, ring_piece: GradedPiece) -> list[list]:
    """Matrix of A^k(X, Y) -> A^k(X), inclusion then reduction."""
    if pair_piece.k != ring_piece.k:
        raise ValueError("natural map needs equal degrees")
    R = ring_piece.theta.ring
    cols = []
    for b in pair_piece.basis:
        red = ring_piece.reduce_formal({b: R.one})
        cols.append(ring_piece.basis_coords(red))
    return [[cols[j][i] for j in range(len(cols))] for i in range(ring_piece.dim)]
