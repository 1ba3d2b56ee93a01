"""Orbit closures of toric 3-folds read off from their fans.

A junior ray ``rho`` gives a compact toric surface ``V(rho)`` whose fan is the
star of ``rho`` pushed into the quotient lattice ``N / Z rho``.  For smooth
complete toric surfaces the cycle of self-intersection numbers of the boundary
curves is a complete invariant at the sizes used here, which is how surfaces
are classified.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import EmptyIntersection, FanError, NotCompactError, NotInFanError, SmoothnessError
from .lattice_core import (
    Cone,
    Fan,
    IntMatrix,
    Lattice,
    LatticePoint,
    det,
    integer_inverse,
    inverse,
    matvec,
    transpose,
    unimodular_completion,
)

Vec2 = tuple[int, int]

PROJECTIVE_PLANE = "ProjectivePlane"
HIRZEBRUCH = "Hirzebruch"
OTHER = "Other"


# ---------------------------------------------------------------------------
# 2D fans


def _half(v: Vec2) -> int:
    x, y = v
    return 0 if (y > 0 or (y == 0 and x > 0)) else 1


def _angle_cmp(a: Vec2, b: Vec2) -> int:
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return ha - hb
    cross = a[0] * b[1] - a[1] * b[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def cyclic_order(vectors: Sequence[Vec2]) -> list[int]:
    """Indices of ``vectors`` sorted counter-clockwise starting from the positive x-axis."""
    return sorted(range(len(vectors)), key=functools.cmp_to_key(lambda i, j: _angle_cmp(vectors[i], vectors[j])))


def _primitive2(v: Sequence[int]) -> Vec2:
    g = math.gcd(*v)
    return tuple(x // g for x in v)


@dataclass(frozen=True)
class StarFan2D:
    """A complete 2D fan with rays in counter-clockwise order.

    ``source_rays[i]`` is the 3D ray whose image is ``rays_2d[i]`` when the fan
    arises as a star; for abstract fans it is ``None``.
    """

    rays_2d: tuple[Vec2, ...]
    ambient_ray: int | None = None
    source_rays: tuple[int, ...] | None = None

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in v) for v in self.rays_2d)
        object.__setattr__(self, "rays_2d", rays)
        if self.source_rays is not None:
            object.__setattr__(self, "source_rays", tuple(self.source_rays))
            if len(self.source_rays) != len(rays):
                raise FanError("source_rays and rays_2d differ in length")
        if len(rays) < 3:
            raise NotCompactError("a complete 2D fan needs at least three rays")
        for v in rays:
            if math.gcd(*v) != 1:
                raise FanError(f"2D ray {v} is not primitive")
        n = len(rays)
        for i in range(n):
            a, b = rays[i], rays[(i + 1) % n]
            if a[0] * b[1] - a[1] * b[0] <= 0:
                raise NotCompactError("rays are not counter-clockwise with gaps below pi")
        # consecutive gaps < pi only close up after one full turn
        turns = sum(1 for i in range(n) if _angle_cmp(rays[i], rays[(i + 1) % n]) > 0)
        if turns != 1:
            raise NotCompactError("rays wind around the origin more than once")

    @classmethod
    def from_rays(cls, rays: Sequence[Sequence[int]], source_rays: Sequence[int] | None = None,
                  ambient_ray: int | None = None) -> "StarFan2D":
        """Build from rays in any order; the fan is the one with consecutive rays as cones."""
        vecs = [tuple(v) for v in rays]
        order = cyclic_order(vecs)
        src = None if source_rays is None else tuple(source_rays[i] for i in order)
        return cls(tuple(vecs[i] for i in order), ambient_ray, src)

    def __len__(self):
        return len(self.rays_2d)

    def labels(self) -> tuple[int, ...]:
        return self.source_rays if self.source_rays is not None else tuple(range(len(self.rays_2d)))

    def cones(self) -> list[tuple[int, int]]:
        n = len(self.rays_2d)
        return [(i, (i + 1) % n) for i in range(n)]

    def transformed(self, m: Sequence[Sequence[int]]) -> "StarFan2D":
        """Image under an integer 2x2 matrix of determinant +-1."""
        d = det(m)
        if abs(d) != 1:
            raise ValueError("frame change must be unimodular")
        vecs = [matvec(m, v) for v in self.rays_2d]
        return StarFan2D.from_rays(vecs, self.labels() if self.source_rays is not None else None,
                                   self.ambient_ray)


def hirzebruch_fan(e: int) -> StarFan2D:
    """The fan of F_e with rays v1=(1,0), v2=(0,-1), v3=(-1,-e), v4=(0,1)."""
    return StarFan2D.from_rays([(1, 0), (0, -1), (-1, -e), (0, 1)], source_rays=[1, 2, 3, 4])


def projective_plane_fan() -> StarFan2D:
    return StarFan2D.from_rays([(1, 0), (0, 1), (-1, -1)])


# ---------------------------------------------------------------------------
# orbits and stars


def _as_indices(cone) -> tuple[int, ...]:
    return cone.ray_indices if isinstance(cone, Cone) else tuple(sorted(cone))


def orbit_dim(fan: Fan, cone) -> int:
    """Dimension of the torus orbit O(cone): ambient dimension minus cone dimension."""
    idx = _as_indices(cone)
    if not fan.has_cone(idx):
        raise NotInFanError(f"cone {idx} is not in the fan")
    return fan.dim - len(idx)


def is_compact_orbit_closure(fan: Fan, cone) -> bool:
    """Whether V(cone) is complete, i.e. the star of the cone is a complete fan."""
    idx = _as_indices(cone)
    orbit_dim(fan, idx)
    k = len(idx)
    if k == fan.dim:
        return True
    if k == fan.dim - 1:
        return sum(1 for m in fan.maximal_cones if set(idx) <= set(m.ray_indices)) == 2
    if k == 1 and fan.dim == 3:
        try:
            star_fan(fan, idx[0])
        except NotCompactError:
            return False
        return True
    raise NotImplementedError("compactness test covers cones of codimension <= 2")


def quotient_map(lattice: Lattice, ray: LatticePoint) -> IntMatrix:
    """Integer matrix sending lattice coordinates onto N / Z ray (kernel exactly Z ray)."""
    u = unimodular_completion(lattice.coordinates(ray))
    return u[1:]


def star_fan(fan: Fan, ray: int) -> StarFan2D:
    """Fan of the toric surface V(ray): images of the cones through ``ray`` in N / Z ray."""
    if fan.dim != 3:
        raise FanError("star_fan expects a 3D fan")
    cones = fan.cones_containing(ray)
    if not cones:
        raise NotInFanError(f"ray {ray} is not in the fan")
    p = quotient_map(fan.lattice, fan.rays[ray])
    images: dict[int, Vec2] = {}
    pairs = set()
    for c in cones:
        others = [i for i in c if i != ray]
        if len(others) != 2:
            raise FanError("star_fan expects simplicial 3D maximal cones")
        for i in others:
            if i not in images:
                images[i] = _primitive2(matvec(p, fan.lattice.coordinates(fan.rays[i])))
        pairs.add(frozenset(others))
    if len(set(images.values())) != len(images):
        raise FanError(f"two rays of the star of {ray} have the same image")
    src = sorted(images)
    try:
        star = StarFan2D.from_rays([images[i] for i in src], src, ray)
    except NotCompactError as exc:
        raise NotCompactError(f"V(ray {ray}) is not compact: {exc}") from exc
    labels = star.labels()
    consecutive = {frozenset((labels[i], labels[j])) for i, j in star.cones()}
    if consecutive != pairs:
        raise NotCompactError(f"star of ray {ray} is not a complete fan")
    return star


def curve_self_intersection(star: StarFan2D, ray2d: int) -> int:
    """Self-intersection c of V(u) from the wall relation u_prev + u_next = -c u."""
    n = len(star.rays_2d)
    u = star.rays_2d[ray2d]
    a = star.rays_2d[(ray2d - 1) % n]
    b = star.rays_2d[(ray2d + 1) % n]
    if det((a, u)) != 1 or det((u, b)) != 1:
        raise SmoothnessError(f"cones at 2D ray {u} are not unimodular")
    s = (a[0] + b[0], a[1] + b[1])
    if s[0] * u[1] - s[1] * u[0] != 0:
        raise SmoothnessError("wall relation has no integer solution")
    num = s[0] * u[0] + s[1] * u[1]
    den = u[0] * u[0] + u[1] * u[1]
    if num % den:
        raise SmoothnessError("wall relation has no integer solution")
    return -num // den


def self_intersection_cycle(star: StarFan2D) -> tuple[int, ...]:
    return tuple(curve_self_intersection(star, i) for i in range(len(star.rays_2d)))


@dataclass(frozen=True)
class SurfaceReport:
    kind: str
    self_intersection_cycle: tuple[int, ...]
    role_table: dict[int, str] = field(hash=False)
    self_intersections: dict[int, int] = field(hash=False)
    e: int | None = None
    ray: int | None = None

    @property
    def label(self) -> str:
        if self.kind == PROJECTIVE_PLANE:
            return "P2"
        if self.kind == HIRZEBRUCH:
            return f"F{self.e}"
        return "Other"

    def to_dict(self) -> dict:
        return {
            "ray": self.ray,
            "kind": self.kind,
            "label": self.label,
            "e": self.e,
            "self_intersection_cycle": list(self.self_intersection_cycle),
            "roles": {str(k): v for k, v in sorted(self.role_table.items())},
            "self_intersections": {str(k): v for k, v in sorted(self.self_intersections.items())},
        }


def _hirzebruch_parameter(cycle: Sequence[int]) -> int | None:
    if len(cycle) != 4:
        return None
    c0, c1, c2, c3 = cycle
    if c0 == c2 == 0 and c1 == -c3:
        return abs(c1)
    if c1 == c3 == 0 and c0 == -c2:
        return abs(c0)
    return None


def classify_surface(star: StarFan2D, max_rays: int = 12) -> SurfaceReport:
    """Classify a smooth complete toric surface by its self-intersection cycle.

    Roles: on F_e with e > 0 the curve of square -e is the ``section`` and
    curves of square 0 are ``fibre``s; on F_0 every boundary curve is a fibre.
    Anything else is ``other``.
    """
    cycle = self_intersection_cycle(star)
    labels = star.labels()
    selfint = dict(zip(labels, cycle))
    kind, e = OTHER, None
    if len(cycle) <= max_rays:
        if len(cycle) == 3 and cycle == (1, 1, 1):
            kind = PROJECTIVE_PLANE
        else:
            e = _hirzebruch_parameter(cycle)
            if e is not None:
                kind = HIRZEBRUCH
    roles = {}
    for lab, c in selfint.items():
        if kind == HIRZEBRUCH and c == 0:
            roles[lab] = "fibre"
        elif kind == HIRZEBRUCH and e > 0 and c == -e:
            roles[lab] = "section"
        else:
            roles[lab] = "other"
    return SurfaceReport(kind, cycle, roles, selfint, e, star.ambient_ray)


@dataclass(frozen=True)
class CurveDescriptor:
    """The curve V(<k, l>) with its square and role inside each compact surface it lies on."""

    rays: tuple[int, int]
    orbit_dim: int
    compact: bool
    self_intersections: dict[int, int] = field(hash=False)
    roles: dict[int, str] = field(hash=False)

    def to_dict(self) -> dict:
        return {
            "rays": list(self.rays),
            "orbit_dim": self.orbit_dim,
            "compact": self.compact,
            "self_intersections": {str(k): v for k, v in sorted(self.self_intersections.items())},
            "roles": {str(k): v for k, v in sorted(self.roles.items())},
        }


def intersection_curve(fan: Fan, ray_k: int, ray_l: int, reports: Mapping[int, SurfaceReport] | None = None
                       ) -> CurveDescriptor:
    """V(ray_k) and V(ray_l) meet in the curve V(<ray_k, ray_l>) when that cone is in the fan."""
    if ray_k == ray_l:
        raise ValueError("need two distinct rays")
    pair = tuple(sorted((ray_k, ray_l)))
    if not fan.has_cone(pair):
        raise EmptyIntersection(f"V({ray_k}) and V({ray_l}) do not meet in a curve")
    selfint, roles = {}, {}
    for s, other in ((ray_k, ray_l), (ray_l, ray_k)):
        rep = None if reports is None else reports.get(s)
        if rep is None:
            try:
                rep = classify_surface(star_fan(fan, s))
            except NotCompactError:
                continue
        selfint[s] = rep.self_intersections[other]
        roles[s] = rep.role_table[other]
    return CurveDescriptor((ray_k, ray_l), orbit_dim(fan, pair), is_compact_orbit_closure(fan, pair), selfint, roles)


# ---------------------------------------------------------------------------
# line bundles


@dataclass(frozen=True)
class DivisorSpec:
    """Coefficients a_rho of a torus-invariant divisor; missing rays count as 0."""

    coefficients: dict[int, int] = field(default_factory=dict, hash=False)

    def __getitem__(self, ray: int) -> int:
        return self.coefficients.get(ray, 0)

    @classmethod
    def uniform(cls, rays: Sequence[int], a: int) -> "DivisorSpec":
        return cls({r: a for r in rays})


def line_bundle_fan(fan2d: StarFan2D, divisor: DivisorSpec) -> Fan:
    """Fan of the total space of O(D): rays (0,0,1) and (u_rho, -a_rho), cones over each 2D cone.

    Ray 0 is the fibre direction; ray i+1 lifts ``fan2d.rays_2d[i]``.  The
    divisor is indexed by position in ``fan2d.rays_2d``.
    """
    rays = [LatticePoint((0, 0, 1))]
    for i, (x, y) in enumerate(fan2d.rays_2d):
        rays.append(LatticePoint((x, y, -divisor[i])))
    cones = [Cone((0, i + 1, j + 1)) for i, j in fan2d.cones()]
    return Fan(tuple(rays), tuple(cones), Lattice.standard(3), {"line_bundle_over": [list(v) for v in fan2d.rays_2d]})


# ---------------------------------------------------------------------------
# isomorphism search


@dataclass(frozen=True)
class FanIsomorphism:
    """``matrix`` acts on lattice coordinates; ``ray_map[i]`` is the image of ray i."""

    matrix: IntMatrix
    ray_map: tuple[int, ...]


def _combinatorial(fan) -> tuple[list[tuple[int, ...]], set[frozenset[int]]]:
    if isinstance(fan, StarFan2D):
        return [tuple(v) for v in fan.rays_2d], {frozenset(c) for c in fan.cones()}
    return fan.lattice_coordinates(), {frozenset(c.ray_indices) for c in fan.maximal_cones}


def _anchor(coords: list[tuple[int, ...]], cones: set[frozenset[int]], d: int) -> tuple[int, ...] | None:
    for c in sorted(tuple(sorted(c)) for c in cones):
        if len(c) == d and abs(det([coords[i] for i in c])) == 1:
            return c
    for c in itertools.combinations(range(len(coords)), d):
        if det([coords[i] for i in c]) != 0:
            return c
    return None


def fan_isomorphism(fan_a, fan_b) -> FanIsomorphism | None:
    """Search for a lattice isomorphism carrying fan_a onto fan_b, or return None.

    Anchors on a basis-forming maximal cone of ``fan_a``, tries every ordered
    choice of image rays in ``fan_b`` (lexicographically), solves for the
    linear map exactly, and keeps the first one that is unimodular and maps
    rays and cones bijectively.
    """
    ca, cones_a = _combinatorial(fan_a)
    cb, cones_b = _combinatorial(fan_b)
    if not ca or len(ca) != len(cb) or len(cones_a) != len(cones_b):
        return None
    d = len(ca[0])
    if len(cb[0]) != d:
        return None
    anchor = _anchor(ca, cones_a, d)
    if anchor is None:
        return None
    a_inv = inverse(transpose([ca[i] for i in anchor]))
    index_b = {v: i for i, v in enumerate(cb)}
    for image in itertools.permutations(range(len(cb)), d):
        bm = transpose([cb[i] for i in image])
        m = [[sum(bm[i][k] * a_inv[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
        if any(x.denominator != 1 for row in m for x in row):
            continue
        m = tuple(tuple(int(x) for x in row) for row in m)
        if abs(det(m)) != 1:
            continue
        ray_map = []
        for v in ca:
            w = matvec(m, v)
            if w not in index_b:
                break
            ray_map.append(index_b[w])
        else:
            if len(set(ray_map)) != len(cb):
                continue
            if {frozenset(ray_map[i] for i in c) for c in cones_a} == cones_b:
                integer_inverse(m)
                return FanIsomorphism(m, tuple(ray_map))
    return None
