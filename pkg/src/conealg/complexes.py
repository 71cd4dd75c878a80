"""Lattice complexes: glued cells, relative pairs, and their semigroups.

Cells are polytopes in a shared ambient lattice; identification of
semigroup elements across cells is by ambient coordinates.  A product of
monomials is nonzero exactly when all factors lie in the cone of a common
cell, in which case it is their coordinate sum there.

A complex carries an optional boundary subcomplex (as a list of top
boundary cells); "interior" elements are those not lying in the cone of
any boundary cell.  A sphere is a complex with empty boundary, so the
relative and absolute cases share one code path throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from .geometry import ConeElement, GeometryError, Polytope, pyramid

__all__ = [
    "ComplexError",
    "LatticeComplex",
    "boundary_complex",
    "half_point",
    "monomial_sum",
    "one_cell_complex",
    "porcupine",
    "pyramid_complex",
    "sphere_closure",
]


class ComplexError(ValueError):
    pass


def _embed(P: Polytope, ambient: int) -> Polytope:
    if P.ambient_dim == ambient:
        return P
    pad = (0,) * (ambient - P.ambient_dim)
    return Polytope([tuple(v) + pad for v in P.vertices], name=P.name)


class LatticeComplex:
    """A polytopal complex of lattice polytopes with explicit gluing.

    `cells` are the top cells; `boundary_cells` generate the designated
    boundary subcomplex (they need not appear in `cells`; for a polytope
    pair they are its facets).
    """

    def __init__(self, cells: Sequence[Polytope], boundary_cells: Sequence[Polytope] = (),
                 name: str = ""):
        if not cells:
            raise ComplexError("complex needs at least one cell")
        ambient = max(c.ambient_dim for c in list(cells) + list(boundary_cells))
        self.cells = tuple(_embed(c, ambient) for c in cells)
        self.boundary_cells = tuple(_embed(c, ambient) for c in boundary_cells)
        self.ambient_dim = ambient
        self.dim = max(c.dim for c in self.cells)
        self.name = name
        self._points_cache: dict[tuple, tuple] = {}
        self._cells_of: dict[ConeElement, frozenset] = {}
        self._boundary_flag: dict[ConeElement, bool] = {}

    def __repr__(self):
        return f"LatticeComplex({self.name or len(self.cells)} cells, dim {self.dim})"

    # -- elements -------------------------------------------------------------

    def points_at_height(self, h: int) -> tuple[ConeElement, ...]:
        """U^h: the deduplicated union of the cells' height-h cone points."""
        key = ("all", h)
        if key not in self._points_cache:
            pts = set()
            for c in self.cells:
                pts.update(c.points_at_height(h))
            self._points_cache[key] = tuple(ConeElement(p, h) for p in sorted(pts))
        return self._points_cache[key]

    def interior_points_at_height(self, h: int) -> tuple[ConeElement, ...]:
        key = ("int", h)
        if key not in self._points_cache:
            self._points_cache[key] = tuple(
                e for e in self.points_at_height(h) if not self.on_boundary(e)
            )
        return self._points_cache[key]

    def lattice_points(self) -> tuple[ConeElement, ...]:
        return self.points_at_height(1)

    def cells_of(self, e: ConeElement) -> frozenset:
        """Indices of the cells whose cone contains the element."""
        if e not in self._cells_of:
            self._cells_of[e] = frozenset(
                i for i, c in enumerate(self.cells) if c.contains(e.point, e.height)
            )
        return self._cells_of[e]

    def contains(self, e: ConeElement) -> bool:
        return bool(self.cells_of(e))

    def on_boundary(self, e: ConeElement) -> bool:
        if e not in self._boundary_flag:
            self._boundary_flag[e] = any(
                b.contains(e.point, e.height) for b in self.boundary_cells
            )
        return self._boundary_flag[e]

    # -- flags ----------------------------------------------------------------

    def full_flags(self) -> list[tuple]:
        """Full flags of the complex: per-cell maximal face chains."""
        flags = []
        for c in sorted(self.cells, key=lambda c: c.key()):
            flags.extend(c.full_flags())
        return flags

    def flag_cell(self, flag) -> Polytope:
        top = flag[-1]
        for c in self.cells:
            if frozenset(c.vertices) == top.vertices:
                return c
        raise ComplexError("flag does not end at a cell")

    # -- validation -------------------------------------------------------------

    def validate(self) -> list[str]:
        """Check the gluing and (for pure complexes) ball/sphere shape.

        Returns a list of violation strings; empty means valid.
        """
        issues = []
        for (i, a), (j, b) in combinations(enumerate(self.cells), 2):
            w = frozenset(a.vertices) & frozenset(b.vertices)
            shared_pts = set(a.lattice_points()) & set(b.lattice_points())
            if not w:
                if shared_pts:
                    issues.append(f"cells {i},{j} share points but no face")
                continue
            fa = [f for fs in a.faces().values() for f in fs if f.vertices == w]
            fb = [f for fs in b.faces().values() for f in fs if f.vertices == w]
            if not fa or not fb:
                issues.append(f"cells {i},{j} intersect in a non-face")
                continue
            if fa[0].points != fb[0].points:
                issues.append(f"cells {i},{j} disagree on shared lattice points")
            if set(fa[0].points) != shared_pts:
                issues.append(f"cells {i},{j} overlap beyond their common face")
            for h in (2,):
                pa = set(a.points_at_height(h)) & set(b.points_at_height(h))
                fp = Polytope(sorted(w))
                if pa != set(fp.points_at_height(h)):
                    issues.append(f"cells {i},{j} cones overlap beyond the face at height {h}")
        if len({c.dim for c in self.cells}) > 1:
            issues.append("complex is not pure")
            return issues
        issues.extend(self._check_shape())
        return issues

    def _check_shape(self):
        issues = []
        ridge_count: dict[tuple, int] = {}
        for c in self.cells:
            for f in c.faces().get(c.dim - 1, []):
                ridge_count[f.key()] = ridge_count.get(f.key(), 0) + 1
        boundary_keys = {tuple(sorted(b.lattice_points())) for b in self.boundary_cells}
        for key, cnt in sorted(ridge_count.items()):
            if cnt > 2:
                issues.append(f"ridge in {cnt} cells")
            elif cnt == 1 and self.boundary_cells and key not in boundary_keys:
                issues.append("free ridge not declared on the boundary")
            elif cnt == 1 and not self.boundary_cells:
                issues.append("sphere has a free ridge")
        # facet adjacency connectivity
        n = len(self.cells)
        if n > 1:
            adj = {i: set() for i in range(n)}
            ridge_cells: dict[tuple, list] = {}
            for i, c in enumerate(self.cells):
                for f in c.faces().get(c.dim - 1, []):
                    ridge_cells.setdefault(f.key(), []).append(i)
            for lst in ridge_cells.values():
                for i, j in combinations(lst, 2):
                    adj[i].add(j)
                    adj[j].add(i)
            seen = {0}
            stack = [0]
            while stack:
                for j in adj[stack.pop()]:
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
            if len(seen) != n:
                issues.append("facet adjacency graph disconnected")
        return issues

    # -- derived complexes -------------------------------------------------------

    def boundary_subcomplex(self) -> "LatticeComplex":
        if not self.boundary_cells:
            raise ComplexError("complex has empty boundary")
        return LatticeComplex(self.boundary_cells, (), name=f"bd({self.name})")

    def compute_boundary(self) -> list[Polytope]:
        """Top cells of the topological boundary (ridges in a single cell)."""
        ridge_faces: dict[tuple, list] = {}
        for c in self.cells:
            for f in c.faces().get(c.dim - 1, []):
                ridge_faces.setdefault(f.key(), []).append(f)
        out = []
        for key, fs in sorted(ridge_faces.items()):
            if len(fs) == 1:
                out.append(Polytope(sorted(fs[0].vertices)))
        return out


def one_cell_complex(P: Polytope, relative: bool = True) -> LatticeComplex:
    """A polytope as a complex; `relative` designates its boundary."""
    boundary = [P.face_polytope(f) for f in P.facet_faces()] if relative else []
    return LatticeComplex([P], boundary, name=P.name or "cell")


# ---------------------------------------------------------------------------
# monomial arithmetic
# ---------------------------------------------------------------------------

def monomial_sum(X: LatticeComplex, elements: Sequence[ConeElement]) -> Optional[ConeElement]:
    """Sum of semigroup elements, or None (the zero of the face ring) when
    they have no cell in common."""
    elements = list(elements)
    if not elements:
        return None
    common = None
    for e in elements:
        cs = X.cells_of(e)
        common = cs if common is None else (common & cs)
        if not common:
            return None
    total = tuple(sum(e.point[i] for e in elements) for i in range(X.ambient_dim))
    h = sum(e.height for e in elements)
    return ConeElement(total, h)


def half_point(X: LatticeComplex, e: ConeElement, p: int = 2) -> Optional[ConeElement]:
    """The element with coordinates and height divided by p, or None when
    that is not a semigroup element of any cell.  Height must be divisible."""
    if e.height % p:
        raise ComplexError(f"height {e.height} not divisible by {p}")
    if any(x % p for x in e.point):
        return None
    cand = ConeElement(tuple(x // p for x in e.point), e.height // p)
    return cand if X.contains(cand) else None


# ---------------------------------------------------------------------------
# standard constructions
# ---------------------------------------------------------------------------

def boundary_complex(P: Polytope) -> LatticeComplex:
    """The boundary sphere of a full-dimensional polytope."""
    if P.dim < 1:
        raise GeometryError("boundary needs dimension >= 1")
    cells = [P.face_polytope(f) for f in P.facet_faces()]
    return LatticeComplex(cells, (), name=f"bd({P.name})" if P.name else "boundary")


def pyramid_complex(X: LatticeComplex, name: str = "") -> LatticeComplex:
    """Pyramid ball over a complex: one fresh apex coordinate, cells coned.

    The boundary is X itself together with the pyramids over X's boundary
    cells.
    """
    amb = X.ambient_dim
    apex = (0,) * amb + (1,)
    cells = [Polytope([tuple(v) + (0,) for v in c.vertices] + [apex], name=f"pyr({c.name})")
             for c in X.cells]
    boundary = [Polytope([tuple(v) + (0,) for v in c.vertices], name=c.name) for c in X.cells]
    boundary += [Polytope([tuple(v) + (0,) for v in b.vertices] + [apex]) for b in X.boundary_cells]
    return LatticeComplex(cells, boundary, name=name or f"pyr({X.name})")


def sphere_closure(X: LatticeComplex, name: str = "") -> LatticeComplex:
    """Close a ball into a sphere by gluing the pyramid over its boundary.

    For a one-cell ball this is the boundary sphere of the pyramid.
    """
    if not X.boundary_cells:
        raise ComplexError("sphere closure needs a ball with boundary")
    amb = X.ambient_dim
    apex = (0,) * amb + (1,)
    cells = [Polytope([tuple(v) + (0,) for v in c.vertices], name=c.name) for c in X.cells]
    cells += [Polytope([tuple(v) + (0,) for v in b.vertices] + [apex], name=f"pyr({b.name})")
              for b in X.boundary_cells]
    return LatticeComplex(cells, (), name=name or f"closure({X.name})")


def porcupine(P: Polytope, k: int) -> LatticeComplex:
    """The k-th generation porcupine ball over P.

    Cells are iterated pyramids over the faces of partial flags
    G_i < G_{i+1} < ... < P with i >= dim(P) - k + 1; every apex gets a
    fresh unit coordinate, which keeps each cell a free pyramid tower and
    makes all attachments exact face identifications.
    """
    d = P.dim
    if not (1 <= k <= d + 1):
        raise GeometryError(f"porcupine generation must be in 1..{d + 1}")
    if d > 2:
        raise GeometryError("porcupine is desk-scale: dim <= 2")
    faces = P.faces()
    # apex slots: generation l apexes sit over faces of dimension d - l
    apex_faces = []
    for l in range(k):
        for f in faces.get(d - l, []):
            apex_faces.append((l, f.key()))
    slot = {key: i for i, key in enumerate(sorted(apex_faces))}
    namb = P.ambient_dim + len(slot)

    def apex_vec(l, fkey):
        v = [0] * namb
        v[P.ambient_dim + slot[(l, fkey)]] = 1
        return tuple(v)

    def lift(pt):
        return tuple(pt) + (0,) * len(slot)

    cells = []

    def chains(top_face, length):
        # descending chains (G, ...) below top_face with `length` further steps
        if length == 0:
            return [[top_face]]
        out = []
        for f in faces.get(top_face.dim - 1, []):
            if f.vertices < top_face.vertices:
                for rest in chains(f, length - 1):
                    out.append([top_face] + rest)
        return out

    top = P.top_face()
    for depth in range(k):
        # flags P = G_d > G_{d-1} > ... > G_{d-depth}
        for chain in chains(top, depth):
            verts = [lift(v) for v in sorted(chain[-1].vertices)]
            poly_pts = list(verts)
            for l, f in enumerate(chain):
                poly_pts = poly_pts + [apex_vec(l, f.key())]
            cells.append(Polytope(poly_pts, name=f"porc{depth}"))
    ball = LatticeComplex(cells, (), name=f"porc_{k}({P.name})")
    boundary = ball.compute_boundary()
    return LatticeComplex(cells, boundary, name=f"porc_{k}({P.name})")


def from_json(data: dict) -> LatticeComplex:
    """Complex from {"points": {...}, "cells": [...], "boundary_cells": [...]}."""
    pts = {str(k): tuple(int(x) for x in v) for k, v in data["points"].items()}
    cells = [Polytope([pts[str(i)] for i in c["vertices"]]) for c in data["cells"]]
    bidx = data.get("boundary_cells", [])
    boundary = [cells[i] for i in bidx]
    top_dim = max(c.dim for c in cells)
    tops = [c for c in cells if c.dim == top_dim and c not in boundary]
    return LatticeComplex(tops or cells, boundary, name=data.get("name", ""))
