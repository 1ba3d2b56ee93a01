"""Fans of cyclic quotients C^3 / mu_r and their crepant toric resolutions.

The resolution fans are cones over unimodular triangulations of the junior
simplex, the triangle cut out of the positive orthant by the plane
``x + y + z = 1`` inside the overlattice ``L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

from .errors import BoundaryPointError, CrepancyError, FanError, SizeError
from .lattice_core import (
    Cone,
    Fan,
    Lattice,
    LatticePoint,
    _orient,
    _separated,
    check_fan_3d,
    det,
    interiors_disjoint,
    normalized_volume,
    standard_basis,
)

ResolutionFan = Fan

DEFAULT_POINT_CAP = 16


@dataclass(frozen=True)
class QuotientData:
    """mu_r acting diagonally on C^3 by ``diag(xi^a, xi^b, xi^c)``."""

    order: int
    weights: tuple[int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if self.order < 1:
            raise ValueError("order must be positive")
        if len(self.weights) != 3:
            raise ValueError("expected three weights")
        if any(not 0 <= w < self.order for w in self.weights):
            raise ValueError(f"weights must lie in [0, {self.order})")
        if math.gcd(self.order, *self.weights) != 1:
            raise ValueError("weights do not generate a faithful mu_r action")

    @property
    def is_calabi_yau(self) -> bool:
        return sum(self.weights) % self.order == 0

    def group_points(self) -> list[LatticePoint]:
        """The points (1/r)(ka, kb, kc) mod Z^3 for k = 1..r-1."""
        r = self.order
        return [LatticePoint(tuple(k * w % r for w in self.weights), r) for k in range(1, r)]


def build_lattice(q: QuotientData) -> Lattice:
    return Lattice(standard_basis(3) + q.group_points())


def junior_rays(q: QuotientData) -> list[LatticePoint]:
    """Group points with coordinate sum exactly 1, in order of k."""
    if not q.is_calabi_yau:
        raise CrepancyError(f"weights {q.weights} do not sum to 0 mod {q.order}")
    out: list[LatticePoint] = []
    for p in q.group_points():
        if sum(p.numerators) == q.order and p not in out:
            out.append(p)
    return out


@dataclass(frozen=True)
class Triangulation:
    """Triangles (index triples into ``points``) subdividing the junior simplex."""

    points: tuple[LatticePoint, ...]
    triangles: tuple[tuple[int, int, int], ...]
    quotient: QuotientData | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        tris = tuple(sorted(tuple(sorted(t)) for t in self.triangles))
        object.__setattr__(self, "triangles", tris)

    def triangle_points(self) -> set[frozenset[LatticePoint]]:
        """Index-free form, for comparing triangulations with different point orders."""
        return {frozenset(self.points[i] for i in t) for t in self.triangles}


def junior_points(q: QuotientData) -> list[LatticePoint]:
    """Junior rays followed by the corners e1, e2, e3."""
    return junior_rays(q) + standard_basis(3)


def _unimodular_triangles(vecs, basis_det):
    """Positively oriented index triples whose cone has normalized volume 1."""
    n = len(vecs)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                d = det((vecs[i], vecs[j], vecs[k]))
                if abs(d) == basis_det:
                    out.append((i, j, k) if d > 0 else (i, k, j))
    return out


def enumerate_unimodular_triangulations(
    q: QuotientData, cap: int = DEFAULT_POINT_CAP
) -> list[Triangulation]:
    """Every unimodular triangulation of the junior simplex using all junior points.

    Backtracks over directed frontier edges: the smallest open edge must be
    closed by some unimodular triangle on its inner side, and each choice is
    checked for interior overlap with the triangles already placed.  Each
    triangulation is produced exactly once.
    """
    rays = junior_rays(q)
    points = rays + standard_basis(3)
    if len(points) > cap:
        raise SizeError(f"{len(points)} junior points exceed the cap of {cap}")
    for p in rays:
        if 0 in p.numerators:
            raise BoundaryPointError(f"junior point {p!r} lies on the simplex boundary")

    lattice = build_lattice(q)
    r = lattice.denominator
    vecs = [p.scaled(r) for p in points]
    basis_det = abs(det(lattice.basis))
    triangles = _unimodular_triangles(vecs, basis_det)
    by_edge: dict[tuple[int, int], list[int]] = {}
    for t in triangles:
        a, b, c = t
        for e, w in (((a, b), c), ((b, c), a), ((c, a), b)):
            by_edge.setdefault(e, []).append(w)
    for ws in by_edge.values():
        ws.sort()

    n = len(points)
    c1, c2, c3 = n - 3, n - 2, n - 1
    if _orient(vecs[c1], vecs[c2], vecs[c3]) < 0:
        c2, c3 = c3, c2
    boundary = {(c1, c2), (c2, c3), (c3, c1)}

    found: list[tuple[tuple[int, int, int], ...]] = []

    def extend(chosen: list[tuple[int, int, int]], open_edges: set[tuple[int, int]]):
        if not open_edges:
            found.append(tuple(sorted(tuple(sorted(t)) for t in chosen)))
            return
        u, v = min(open_edges)
        for w in by_edge.get((u, v), ()):
            tri = (u, v, w)
            if any(not (_separated(vecs, tri, t) or _separated(vecs, t, tri)) for t in chosen):
                continue
            nxt = set(open_edges)
            for a, b in ((u, v), (v, w), (w, u)):
                if (a, b) in nxt:
                    nxt.discard((a, b))
                else:
                    nxt.add((b, a))
            chosen.append(tri)
            extend(chosen, nxt)
            chosen.pop()

    extend([], set(boundary))
    found.sort()
    return [Triangulation(tuple(points), t, q) for t in found]


def resolution_fan(t: Triangulation, lattice: Lattice) -> Fan:
    """Fan whose maximal cones are the cones over the triangles of ``t``."""
    corners = standard_basis(3)
    if any(c not in t.points for c in corners):
        raise FanError("triangulation must contain the corners e1, e2, e3")
    for p in t.points:
        if not lattice.is_primitive(p):
            raise FanError(f"{p!r} is not a primitive vector of the lattice")
    r = lattice.denominator
    vecs = [p.scaled(r) for p in t.points]
    total = 0
    for tri in t.triangles:
        vol = normalized_volume([t.points[i] for i in tri], lattice)
        if vol != 1:
            raise FanError(f"triangle {tri} has normalized area {vol}")
        total += vol
    for i, a in enumerate(t.triangles):
        for b in t.triangles[i + 1 :]:
            if not interiors_disjoint(vecs, a, b):
                raise FanError(f"triangles {a} and {b} overlap")
    expected = normalized_volume(corners, lattice)
    if total != expected:
        raise FanError(f"triangles cover area {total}, the simplex has area {expected}")
    meta = {}
    if t.quotient is not None:
        meta = {"order": t.quotient.order, "weights": list(t.quotient.weights)}
    fan = Fan(t.points, tuple(Cone(tri) for tri in t.triangles), lattice, meta)
    problems = check_fan_3d(fan)
    if problems:
        raise FanError("; ".join(problems))
    return fan


def compact_rays(fan: Fan) -> list[int]:
    """Rays not among the coordinate rays: the compact exceptional divisors of a resolution."""
    corners = set(standard_basis(fan.dim))
    return [i for i, p in enumerate(fan.rays) if p not in corners]


def load_fixture(name: str = "a7_124") -> Fan:
    """A shipped fan document, e.g. the A-Hilb triangulation of 1/7(1,2,4)."""
    from .fan_io import FanDocument

    text = resources.files("qbraid").joinpath("fixtures", f"{name}.json").read_text()
    return FanDocument.from_json(text).to_fan()


def fixture_names() -> list[str]:
    root = resources.files("qbraid").joinpath("fixtures")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))
