"""Lattice polytopes with exact integer arithmetic, at desk scale.

Facets are found by exhaustive search over point subsets spanning candidate
hyperplanes; lattice points by a bounding-box scan filtered through the
facet inequalities.  Everything runs in coordinates on the saturated
direction lattice of the affine hull, so lower-dimensional polytopes
(faces, cells of complexes) get the correct lattice structure for free.

All arithmetic is on Python ints and Fractions; nothing here ever rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd
from typing import NamedTuple, Optional, Sequence

__all__ = [
    "ConeElement",
    "Face",
    "GeometryError",
    "IdpCertificate",
    "Polytope",
    "build_polytope",
    "dilate",
    "interior_generation_height",
    "is_idp",
    "is_reflexive",
    "pyramid",
    "sublattice_view",
]

POINT_BUDGET = 10**8  # bounding-box scan guard


class GeometryError(ValueError):
    pass


class ConeElement(NamedTuple):
    """A lattice point of the cone over a polytope, tagged with its height."""

    point: tuple
    height: int


# ---------------------------------------------------------------------------
# integer linear algebra
# ---------------------------------------------------------------------------

def _int_kernel(rows: Sequence[Sequence[int]], d: int) -> list[tuple]:
    """Basis of {x in Z^d : A x = 0}; saturated since it comes from
    unimodular column operations."""
    cols = [[1 if i == j else 0 for i in range(d)] for j in range(d)]
    active = list(range(d))
    for row in rows:
        vals = {j: sum(r * c for r, c in zip(row, cols[j])) for j in active}
        nz = [j for j in active if vals[j]]
        while len(nz) > 1:
            nz.sort(key=lambda j: abs(vals[j]))
            j0 = nz[0]
            for j in nz[1:]:
                q = vals[j] // vals[j0]
                if q:
                    vals[j] -= q * vals[j0]
                    cols[j] = [a - q * b for a, b in zip(cols[j], cols[j0])]
            nz = [j for j in nz if vals[j]]
        if nz:
            active.remove(nz[0])
    return [tuple(cols[j]) for j in active]


def _identity_rows(d: int) -> list[tuple]:
    return [tuple(int(i == j) for i in range(d)) for j in range(d)]


def _rank(rows: Sequence[Sequence[int]], d: int) -> int:
    return d - len(_int_kernel(rows, d))


def _frac_inverse(M: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    A = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next(i for i in range(c, n) if A[i][c] != 0)
        A[c], A[p] = A[p], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [row[n:] for row in A]


class _Hull:
    """Affine hull of a point set with coordinates on its direction lattice."""

    def __init__(self, points: Sequence[tuple]):
        self.v0 = points[0]
        d = len(self.v0)
        diffs = [tuple(a - b for a, b in zip(p, self.v0)) for p in points[1:]]
        self.equations = _int_kernel(diffs, d) if diffs else _identity_rows(d)
        self.basis = _int_kernel(self.equations, d)
        self.dim = len(self.basis)
        self._solver = None
        if self.dim:
            B = self.basis
            cols: list[int] = []
            for j in range(d):
                trial = [[B[i][c] for i in range(self.dim)] for c in cols + [j]]
                if _rank(trial, self.dim) == len(cols) + 1:
                    cols.append(j)
                if len(cols) == self.dim:
                    break
            M = [[Fraction(B[i][j]) for i in range(self.dim)] for j in cols]
            self._solver = (cols, _frac_inverse(M))

    def coords(self, point: tuple, height: int = 1) -> Optional[tuple]:
        """Integer coordinates of `point` on the height-`height` copy of the
        hull, or None when the point is off the hull or off the lattice."""
        y = tuple(a - height * b for a, b in zip(point, self.v0))
        if self.dim == 0:
            return () if not any(y) else None
        cols, Minv = self._solver
        rhs = [Fraction(y[j]) for j in cols]
        c = [sum(Minv[i][k] * rhs[k] for k in range(self.dim)) for i in range(self.dim)]
        if any(x.denominator != 1 for x in c):
            return None
        ci = [int(x) for x in c]
        for j in range(len(y)):
            if sum(ci[i] * self.basis[i][j] for i in range(self.dim)) != y[j]:
                return None
        return tuple(ci)

    def embed(self, coords: Sequence[int], height: int = 1) -> tuple:
        return tuple(
            height * self.v0[j] + sum(c * b[j] for c, b in zip(coords, self.basis))
            for j in range(len(self.v0))
        )


# ---------------------------------------------------------------------------
# faces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    """A face of a polytope: vertex subset plus its lattice points."""

    vertices: frozenset  # ambient vertex tuples
    dim: int
    facet_ids: frozenset
    points: tuple  # ambient lattice points on the face

    def key(self) -> tuple:
        return tuple(sorted(self.points))


class Polytope:
    """A lattice polytope given by vertices in some ambient Z^d.

    Derived data (facets, lattice points, face lattice) is computed lazily
    and cached; instances are immutable afterwards.
    """

    def __init__(self, vertices: Sequence[Sequence[int]], name: str = ""):
        if not vertices:
            raise GeometryError("empty vertex list")
        pts = sorted({tuple(int(x) for x in v) for v in vertices})
        if len({len(p) for p in pts}) != 1:
            raise GeometryError("inconsistent ambient dimensions")
        self.name = name
        self.ambient_dim = len(pts[0])
        self._input_points = pts
        self.hull = _Hull(pts)
        self.dim = self.hull.dim
        self._facets_h: Optional[list] = None  # inequalities in hull coords
        self._vertices: Optional[tuple] = None
        self._points_cache: dict[int, tuple] = {}
        self._faces: Optional[dict] = None
        self._flags: Optional[list] = None

    # -- basic structure ----------------------------------------------------

    def __repr__(self):
        tag = self.name or f"{len(self.vertices)} vertices"
        return f"Polytope({tag}, dim {self.dim} in Z^{self.ambient_dim})"

    def key(self) -> tuple:
        return tuple(sorted(self.vertices))

    @property
    def facets_h(self) -> list:
        """Facet inequalities (normal, offset) in hull coordinates:
        n . x + offset * h >= 0 on the height-h dilate."""
        if self._facets_h is None:
            self._compute_facets()
        return self._facets_h

    @property
    def vertices(self) -> tuple:
        if self._vertices is None:
            self._compute_facets()
        return self._vertices

    def _compute_facets(self):
        r = self.dim
        pts_h = [self.hull.coords(p) for p in self._input_points]
        if r == 0:
            self._facets_h = []
            self._vertices = (self._input_points[0],)
            return
        seen = {}
        for S in combinations(range(len(pts_h)), r):
            base = pts_h[S[0]]
            diffs = [tuple(a - b for a, b in zip(pts_h[i], base)) for i in S[1:]]
            ker = _int_kernel(diffs, r)
            if len(ker) != 1:
                continue
            n = ker[0]
            c = -sum(a * b for a, b in zip(n, base))
            vals = [sum(a * b for a, b in zip(n, p)) + c for p in pts_h]
            if all(v >= 0 for v in vals):
                seen[(n, c)] = True
            elif all(v <= 0 for v in vals):
                seen[(tuple(-x for x in n), -c)] = True
        self._facets_h = sorted(seen)
        if not self._facets_h:
            raise GeometryError("facet enumeration failed")
        # vertices: points whose tight facet normals span the hull
        verts = []
        for i, p in enumerate(pts_h):
            tight = [n for (n, c) in self._facets_h
                     if sum(a * b for a, b in zip(n, p)) + c == 0]
            if _rank(tight, r) == r:
                verts.append(self._input_points[i])
        self._vertices = tuple(sorted(verts))

    # -- membership and point enumeration -----------------------------------

    def contains(self, point: Sequence[int], height: int = 1, strict: bool = False) -> bool:
        """Whether (point, height) lies in the cone over the polytope, i.e.
        point in height*P; `strict` asks for the relative interior."""
        point = tuple(point)
        if height == 0:
            return not strict and not any(point)
        if height < 0:
            return False
        c = self.hull.coords(point, height)
        if c is None:
            return False
        for n, off in self.facets_h:
            v = sum(a * b for a, b in zip(n, c)) + off * height
            if v < 0 or (strict and v == 0):
                return False
        return True

    def points_at_height(self, h: int) -> tuple:
        """All lattice points of h*P as ambient tuples."""
        if h < 0:
            raise GeometryError("negative height")
        if h == 0:
            return ((0,) * self.ambient_dim,)
        if h not in self._points_cache:
            self._points_cache[h] = tuple(self._scan(h, strict=False))
        return self._points_cache[h]

    def interior_points_at_height(self, h: int) -> tuple:
        """Lattice points of the relative interior of h*P (h >= 1)."""
        if h < 1:
            raise GeometryError("interior needs height >= 1")
        return tuple(self._scan(h, strict=True))

    def _scan(self, h: int, strict: bool):
        r = self.dim
        if r == 0:
            # the relative interior of a point is the point
            yield self.hull.embed((), h)
            return
        vcoords = [self.hull.coords(v) for v in self.vertices]
        lo = [min(h * v[i] for v in vcoords) for i in range(r)]
        hi = [max(h * v[i] for v in vcoords) for i in range(r)]
        budget = 1
        for a, b in zip(lo, hi):
            budget *= (b - a + 1)
            if budget > POINT_BUDGET:
                raise GeometryError("lattice point scan exceeds budget")
        facets = self.facets_h
        for c in product(*(range(a, b + 1) for a, b in zip(lo, hi))):
            ok = True
            for n, off in facets:
                v = sum(x * y for x, y in zip(n, c)) + off * h
                if v < 0 or (strict and v == 0):
                    ok = False
                    break
            if ok:
                yield self.hull.embed(c, h)

    def lattice_points(self) -> tuple:
        return self.points_at_height(1)

    def cone_points(self, h: int) -> list[ConeElement]:
        return [ConeElement(p, h) for p in self.points_at_height(h)]

    def interior_cone_points(self, h: int) -> list[ConeElement]:
        return [ConeElement(p, h) for p in self.interior_points_at_height(h)]

    # -- face lattice ---------------------------------------------------------

    def faces(self) -> dict[int, list[Face]]:
        """All nonempty faces grouped by dimension (the polytope included).

        Faces are exactly the subsets cut out by intersections of facets,
        enumerated over facet subsets (desk scale keeps these tiny).
        """
        if self._faces is not None:
            return self._faces
        verts = self.vertices
        pts = self.lattice_points()
        facets = self.facets_h
        nf = len(facets)
        if nf > 16:
            raise GeometryError("too many facets for exhaustive face search")
        tight = {}
        for p in pts:
            c = self.hull.coords(p)
            tight[p] = frozenset(
                i for i, (n, off) in enumerate(facets)
                if sum(a * b for a, b in zip(n, c)) + off == 0
            )
        faces_by_dim: dict[int, list[Face]] = {}
        seen_vsets = set()
        for mask in range(1 << nf):
            fs = frozenset(i for i in range(nf) if (mask >> i) & 1)
            fverts = frozenset(v for v in verts if fs <= tight[v])
            if not fverts or fverts in seen_vsets:
                continue
            seen_vsets.add(fverts)
            full_fs = frozenset(
                i for i in range(nf) if all(i in tight[v] for v in fverts)
            )
            fpts = tuple(sorted(p for p in pts if full_fs <= tight[p]))
            fdim = _Hull(sorted(fverts)).dim
            faces_by_dim.setdefault(fdim, []).append(
                Face(fverts, fdim, full_fs, fpts)
            )
        for lst in faces_by_dim.values():
            lst.sort(key=lambda f: f.key())
        self._faces = faces_by_dim
        return faces_by_dim

    def top_face(self) -> Face:
        return self.faces()[self.dim][0]

    def facet_faces(self) -> list[Face]:
        return self.faces().get(self.dim - 1, [])

    def full_flags(self) -> list[tuple]:
        """All maximal chains (tau_0 < ... < tau_dim = P) of the face lattice."""
        if self._flags is not None:
            return self._flags
        faces = self.faces()
        flags = []

        def extend(chain):
            top = chain[0]
            if top.dim == 0:
                flags.append(tuple(chain))
                return
            for f in faces.get(top.dim - 1, []):
                if f.vertices < top.vertices:
                    extend([f] + chain)

        extend([self.top_face()])
        flags.sort(key=lambda fl: tuple(f.key() for f in fl))
        self._flags = flags
        return flags

    def face_polytope(self, face: Face) -> "Polytope":
        return Polytope(sorted(face.vertices), name=f"{self.name}.face")


def build_polytope(vertices, name: str = "") -> Polytope:
    """Construct a polytope; redundant input points are demoted."""
    return Polytope(vertices, name)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def dilate(P: Polytope, n: int) -> Polytope:
    if n < 1:
        raise GeometryError("dilation factor must be >= 1")
    return Polytope([tuple(n * x for x in v) for v in P.vertices],
                    name=f"{n}*{P.name}" if P.name else "")


def pyramid(P: Polytope, name: str = "") -> Polytope:
    """Convex hull of P x {0} and the fresh unit apex (0, ..., 0, 1)."""
    verts = [tuple(v) + (0,) for v in P.vertices]
    apex = (0,) * P.ambient_dim + (1,)
    return Polytope(verts + [apex], name=name or (f"pyr({P.name})" if P.name else "pyr"))


def pyramid_apex(P: Polytope) -> tuple:
    return (0,) * (P.ambient_dim - 1) + (1,)


def sublattice_view(P: Polytope, N: int):
    """Reinterpret P over the coarser lattice N*Z^d.

    Returns (coarse polytope with vertices divided by N, V) where V lists
    the fine lattice points of P that are not coarse-lattice points; V is
    what gets t-scaled in the deformation arguments.
    """
    if N < 1:
        raise GeometryError("lattice scale must be >= 1")
    for v in P.vertices:
        if any(x % N for x in v):
            raise GeometryError(f"vertex {v} not in {N}*Z^d")
    coarse = Polytope([tuple(x // N for x in v) for v in P.vertices],
                      name=f"{P.name}/{N}" if P.name else "")
    V = tuple(p for p in P.lattice_points() if any(x % N for x in p))
    return coarse, V


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdpCertificate:
    idp: bool
    certified_height: int
    witness: Optional[ConeElement] = None


def is_idp(P: Polytope, certify_height: Optional[int] = None) -> IdpCertificate:
    """Bounded integer-decomposition check: every height-h cone point up to
    the certificate height splits off a height-1 point."""
    H = certify_height if certify_height is not None else P.dim + 1
    gens = set(P.points_at_height(1))
    prev = gens
    for h in range(2, H + 1):
        cur = P.points_at_height(h)
        prev_set = set(P.points_at_height(h - 1))
        for x in sorted(cur):
            if not any(tuple(a - b for a, b in zip(x, g)) in prev_set for g in gens):
                return IdpCertificate(False, H, ConeElement(x, h))
    return IdpCertificate(True, H)


def is_reflexive(P: Polytope, certify_height: Optional[int] = None):
    """Return the shifting interior point at height 1, or None.

    Checks interior(k+1) == p + points(k) for k up to the certificate
    height (default dim + 1)."""
    if P.dim != P.ambient_dim:
        raise GeometryError("reflexivity needs a full-dimensional polytope")
    H = certify_height if certify_height is not None else P.dim + 1
    inner = P.interior_points_at_height(1)
    if len(inner) != 1:
        return None
    p = inner[0]
    for k in range(H + 1):
        shifted = sorted(tuple(a + b for a, b in zip(p, q)) for q in P.points_at_height(k))
        if shifted != sorted(P.interior_points_at_height(k + 1)):
            return None
    return ConeElement(p, 1)


def interior_generation_height(P: Polytope, bound: Optional[int] = None):
    """Largest height of a minimal generator of the interior-cone ideal,
    certified up to `bound` (default dim + 1).

    A height-h interior point is decomposable when it is an interior point
    of smaller positive height plus a cone point of positive height.
    """
    if P.dim != P.ambient_dim:
        raise GeometryError("generation height needs a full-dimensional polytope")
    H = bound if bound is not None else P.dim + 1
    interior = {h: set(P.interior_points_at_height(h)) for h in range(1, H + 1)}
    gens = []
    for h in range(1, H + 1):
        for x in sorted(interior[h]):
            decomposable = False
            for hy in range(1, h):
                for y in interior[hy]:
                    z = tuple(a - b for a, b in zip(x, y))
                    if P.contains(z, h - hy):
                        decomposable = True
                        break
                if decomposable:
                    break
            if not decomposable:
                gens.append(ConeElement(x, h))
    j = max((g.height for g in gens), default=0)
    return j, tuple(gens), H
