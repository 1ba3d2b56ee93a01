"""Hom dimensions between the objects E_k = O_{S_k} and their twists, at the level of K-theory.

Surfaces are indexed from 0 in the order their rays appear in the fan, so the
object E_1 of the usual numbering is index 0 here.  X is a Calabi-Yau 3-fold
and the E_k are 3-spherical: Hom(E_k, E_k) = C + C[-3].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .errors import ConfigError, EmptyIntersection, NotCompactError, UnsupportedError
from .fan_analysis import (
    CurveDescriptor,
    SurfaceReport,
    classify_surface,
    intersection_curve,
    star_fan,
)
from .lattice_core import Fan, IntMatrix, det, identity, integer_inverse, matmul, matvec

CY_DIMENSION = 3


@dataclass(frozen=True)
class GradedDims:
    """Dimensions of a graded vector space, degree -> dim (zeros dropped)."""

    dims: dict[int, int] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", {d: n for d, n in sorted(self.dims.items()) if n})

    def euler(self) -> int:
        return sum((-1) ** d * n for d, n in self.dims.items())

    def total(self) -> int:
        return sum(self.dims.values())

    def serre_dual(self, d: int = CY_DIMENSION) -> "GradedDims":
        """Dimensions of the dual space shifted by d: degree i goes to d - i."""
        return GradedDims({d - i: n for i, n in self.dims.items()})

    def to_dict(self) -> dict[str, int]:
        return {str(d): n for d, n in self.dims.items()}

    def __repr__(self):
        terms = [f"C^{n}[{-d}]" if n > 1 else f"C[{-d}]" for d, n in self.dims.items()]
        return "GradedDims(" + (" + ".join(terms) or "0") + ")"


def p1_cohomology(n: int) -> tuple[int, int]:
    """(h0, h1) of O(n) on P^1."""
    return max(n + 1, 0), max(-n - 1, 0)


# ---------------------------------------------------------------------------
# configurations


@dataclass(frozen=True)
class CurveData:
    """C_kl = S_k cap S_l, with its square and role inside each of the two surfaces."""

    surfaces: tuple[int, int]
    self_intersection: dict[int, int] = field(hash=False)
    roles: dict[int, str] = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class ConfigData:
    surfaces: tuple[SurfaceReport, ...]
    curves: dict[tuple[int, int], CurveData] = field(hash=False)
    triple_point: bool
    rays: tuple[int, ...] = ()

    def __len__(self):
        return len(self.surfaces)

    def curve(self, k: int, l: int) -> CurveData | None:
        return self.curves.get(tuple(sorted((k, l))))

    def without_surface(self, k: int) -> "ConfigData":
        keep = [i for i in range(len(self.surfaces)) if i != k]
        new = {old: i for i, old in enumerate(keep)}
        curves = {}
        for (a, b), c in self.curves.items():
            if k in (a, b):
                continue
            curves[(new[a], new[b])] = CurveData(
                (new[a], new[b]),
                {new[s]: v for s, v in c.self_intersection.items()},
                {new[s]: v for s, v in c.roles.items()},
            )
        return ConfigData(
            tuple(self.surfaces[i] for i in keep),
            curves,
            False,
            tuple(self.rays[i] for i in keep) if self.rays else (),
        )

    def with_self_intersection(self, k: int, l: int, surface: int, value: int) -> "ConfigData":
        """Copy with the square of C_kl inside S_surface replaced (for negative controls)."""
        key = tuple(sorted((k, l)))
        c = self.curves[key]
        curves = dict(self.curves)
        curves[key] = replace(c, self_intersection={**c.self_intersection, surface: value})
        return replace(self, curves=curves)

    def to_dict(self) -> dict:
        return {
            "surfaces": [s.to_dict() for s in self.surfaces],
            "curves": [
                {
                    "surfaces": list(k),
                    "self_intersection": {str(s): v for s, v in sorted(c.self_intersection.items())},
                    "roles": {str(s): v for s, v in sorted(c.roles.items())},
                }
                for k, c in sorted(self.curves.items())
            ],
            "triple_point": self.triple_point,
            "rays": list(self.rays),
        }


def compact_surface_rays(fan: Fan) -> list[int]:
    """Rays whose orbit closure is a compact surface (complete star)."""
    out = []
    for i in range(len(fan.rays)):
        try:
            star_fan(fan, i)
        except NotCompactError:
            continue
        out.append(i)
    return out


def configuration(fan: Fan) -> ConfigData:
    """Exceptional surfaces of a 3D fan, their pairwise curves, and the triple point."""
    rays = compact_surface_rays(fan)
    reports = {r: classify_surface(star_fan(fan, r)) for r in rays}
    curves = {}
    for a, b in itertools.combinations(range(len(rays)), 2):
        try:
            cd: CurveDescriptor = intersection_curve(fan, rays[a], rays[b], reports)
        except EmptyIntersection:
            continue
        curves[(a, b)] = CurveData(
            (a, b),
            {a: cd.self_intersections[rays[a]], b: cd.self_intersections[rays[b]]},
            {a: cd.roles[rays[a]], b: cd.roles[rays[b]]},
        )
    triple = len(rays) == 3 and any(set(rays) == set(c.ray_indices) for c in fan.maximal_cones)
    return ConfigData(tuple(reports[r] for r in rays), curves, triple, tuple(rays))


# ---------------------------------------------------------------------------
# Hom spaces and the Euler form


def graded_hom(config: ConfigData, k: int, l: int) -> GradedDims:
    """Hom^*(E_k, E_l).

    For k != l this is the cohomology of O_C(c)[-1] on C = C_kl = P^1, where c
    is the square of C inside S_l.  For k == l the spherical answer C + C[-3]
    is used.
    """
    if k == l:
        return GradedDims({0: 1, CY_DIMENSION: 1})
    curve = config.curve(k, l)
    if curve is None:
        return GradedDims({})
    h0, h1 = p1_cohomology(curve.self_intersection[l])
    return GradedDims({1: h0, 2: h1})


@dataclass(frozen=True)
class EulerMatrix:
    """chi[i][j] = sum_d (-1)^d dim Hom^d(E_i, E_j)."""

    chi: IntMatrix

    def __getitem__(self, i):
        return self.chi[i]

    def __len__(self):
        return len(self.chi)

    @property
    def zero_diagonal(self) -> bool:
        return all(self.chi[i][i] == 0 for i in range(len(self.chi)))

    @property
    def antisymmetric(self) -> bool:
        n = len(self.chi)
        return all(self.chi[i][j] == -self.chi[j][i] for i in range(n) for j in range(n))

    def pair(self, x: Sequence[int], y: Sequence[int]) -> int:
        """Bilinear extension chi(x, y) to K-classes written in the basis [E_i]."""
        n = len(self.chi)
        return sum(x[i] * self.chi[i][j] * y[j] for i in range(n) for j in range(n))


def euler_matrix(config: ConfigData) -> EulerMatrix:
    n = len(config.surfaces)
    return EulerMatrix(tuple(tuple(graded_hom(config, i, j).euler() for j in range(n)) for i in range(n)))


@dataclass(frozen=True)
class TwistMatrix:
    """Action of the twist T_k on K-classes in the basis [E_0], ..., [E_{n-1}] (columns are images)."""

    m: IntMatrix
    index: int | None = None

    @property
    def det(self) -> int:
        return det(self.m)

    def is_transvection(self) -> bool:
        n = len(self.m)
        nil = tuple(tuple(self.m[i][j] - int(i == j) for j in range(n)) for i in range(n))
        return all(x == 0 for row in matmul(nil, nil) for x in row)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        return matvec(self.m, v)

    def inverse(self) -> "TwistMatrix":
        return TwistMatrix(integer_inverse(self.m), self.index)

    def __matmul__(self, other: "TwistMatrix") -> "TwistMatrix":
        return TwistMatrix(matmul(self.m, other.m))

    def __eq__(self, other):
        if not isinstance(other, TwistMatrix):
            return NotImplemented
        return self.m == other.m

    def __hash__(self):
        return hash(self.m)


def twist_matrix(k: int, chi: EulerMatrix) -> TwistMatrix:
    """T_k[x] = [x] - chi(E_k, x)[E_k]: column j is e_j - chi[k][j] e_k."""
    n = len(chi)
    return TwistMatrix(
        tuple(tuple(int(i == j) - (chi[k][j] if i == k else 0) for j in range(n)) for i in range(n)),
        k,
    )


def _product(*ms: TwistMatrix) -> IntMatrix:
    out = identity(len(ms[0].m))
    for m in ms:
        out = matmul(out, m.m)
    return out


@dataclass(frozen=True)
class RelationReport:
    relations: dict[str, bool] = field(hash=False)
    matrices: dict[str, IntMatrix] = field(hash=False)

    @property
    def all_pass(self) -> bool:
        return all(self.relations.values())

    def to_dict(self) -> dict:
        return {
            "relations": dict(self.relations),
            "matrices": {k: [list(r) for r in v] for k, v in self.matrices.items()},
            "all_pass": self.all_pass,
        }


def verify_twist_relations(t1: TwistMatrix, t2: TwistMatrix, t3: TwistMatrix) -> RelationReport:
    """Exact matrix checks of the braid, cycle and conjugated-cycle relations."""
    ts = {1: t1, 2: t2, 3: t3}
    rel: dict[str, bool] = {}
    for a, b in ((1, 2), (1, 3), (2, 3)):
        rel[f"braid_{a}{b}"] = _product(ts[a], ts[b], ts[a]) == _product(ts[b], ts[a], ts[b])
    rel["cycle"] = _product(t1, t2, t3, t1) == _product(t2, t3, t1, t2)
    t31 = t3 @ t1
    lhs = _product(t2.inverse(), t1, t2)
    rhs = _product(t31, t2, t31.inverse())
    rel["cycle_conjugate_form"] = lhs == rhs
    for k, t in ts.items():
        rel[f"det_T{k}"] = t.det == 1
        rel[f"transvection_T{k}"] = t.is_transvection()
    return RelationReport(rel, {f"T{k}": t.m for k, t in ts.items()})


def twisted_class_checks(chi: EulerMatrix) -> dict:
    """K-class identities behind the cycle relation, for three spherical classes.

    (a) T_1[E_2] = [E_1] + [E_2]; (b) T_2^{-1}[E_1] = T_1[E_2];
    (c) chi(E_3, T_1[E_2]) = 0 and T_3 fixes T_1[E_2];
    (d) chi(E_1, T_2[E_3]) = 0, so {E_1, E_2, T_2 E_3} pair like an A_3 chain.
    Indices here are 1-based to match the objects' names.
    """
    t1, t2, t3 = (twist_matrix(k, chi) for k in range(3))
    e1, e2, e3 = (tuple(int(i == k) for i in range(3)) for k in range(3))
    t1e2 = t1.apply(e2)
    t2inv_e1 = t2.inverse().apply(e1)
    t2e3 = t2.apply(e3)
    checks = {
        "T1E2_is_E1_plus_E2": t1e2 == (1, 1, 0),
        "T2inv_E1_equals_T1E2": t2inv_e1 == t1e2,
        "chi_E3_T1E2_zero": chi.pair(e3, t1e2) == 0,
        "T3_fixes_T1E2": t3.apply(t1e2) == t1e2,
        "chi_E1_T2E3_zero": chi.pair(e1, t2e3) == 0,
        "A3_chain_neighbours": abs(chi.pair(e1, e2)) == 1 and abs(chi.pair(e2, t2e3)) == 1,
    }
    return {
        "checks": checks,
        "all_pass": all(checks.values()),
        "classes": {"T1E2": list(t1e2), "T2invE1": list(t2inv_e1), "T2E3": list(t2e3)},
    }


# ---------------------------------------------------------------------------
# curves of P^1's and orthogonality


def _rank(rows: list[list[Fraction]]) -> int:
    m = [list(r) for r in rows]
    if not m:
        return 0
    rank, cols = 0, len(m[0])
    for c in range(cols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def nodal_chain_cohomology(degrees: Sequence[int], nodes: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """(h0, h1) of a line bundle on a tree of P^1's with the given component degrees.

    Sections on each component are polynomials of degree <= d in an affine
    coordinate; every node glues a value on one component to a value on the
    other.  h0 is the dimension of compatible tuples, and h1 = h0 - chi with
    chi = sum(degrees) + #components - #nodes.
    """
    n = len(degrees)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in nodes:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"node {(a, b)} refers to a missing component")
        ra, rb = find(a), find(b)
        if ra == rb:
            raise UnsupportedError("component graph has a cycle")
        parent[ra] = rb

    sizes = [max(d + 1, 0) for d in degrees]
    offsets = [sum(sizes[:i]) for i in range(n)]
    total = sum(sizes)
    used_points = [0] * n  # distinct node points t = 0, 1, 2, ... on each component
    rows = []
    for a, b in nodes:
        row = [Fraction(0)] * total
        for comp, sign in ((a, 1), (b, -1)):
            t = used_points[comp]
            used_points[comp] += 1
            for p in range(sizes[comp]):
                row[offsets[comp] + p] += sign * Fraction(t) ** p
        rows.append(row)
    h0 = total - _rank(rows) if total else 0
    chi = sum(degrees) + n - len(nodes)
    return h0, h0 - chi


@dataclass(frozen=True)
class OrthogonalityReport:
    holds: bool
    degrees: tuple[int, int] | None
    cohomology: tuple[int, int] | None
    note: str = ""

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "degrees": None if self.degrees is None else list(self.degrees),
            "cohomology": None if self.cohomology is None else list(self.cohomology),
            "note": self.note,
        }


def orthogonality_check(config: ConfigData, k: int = 0, l: int = 1, m: int = 2) -> OrthogonalityReport:
    """Whether Hom^*(E_m, T_k E_l) vanishes, with T_k E_l the pushforward of O_{S_k cup S_l}(C').

    C' is a fibre of S_l linearly equivalent to C_kl, over a point p' of
    C_lm other than the triple point.  The Hom reduces to the cohomology of a
    line bundle L on the chain C_km cup C_lm with
        deg L|C_km = (C_km)^2 in S_k            (C' misses C_km)
        deg L|C_lm = (C_lm)^2 in S_l + C'.C_lm  (C'.C_lm = C_kl.C_lm in S_l)
    """
    if len(config.surfaces) < 3:
        return OrthogonalityReport(True, None, None, "no third surface: Hom target is empty")
    if len(config.surfaces) != 3:
        raise ConfigError("orthogonality check expects exactly three surfaces")
    c_km, c_lm, c_kl = config.curve(k, m), config.curve(l, m), config.curve(k, l)
    if c_km is None or c_lm is None or c_kl is None:
        raise ConfigError("surfaces do not meet pairwise in curves")
    if not config.triple_point:
        raise ConfigError("the curves C_km and C_lm do not meet at a triple point")
    meet = 1  # C_kl and C_lm are distinct boundary curves of S_l through the triple point
    d_km = c_km.self_intersection[k]
    d_lm = c_lm.self_intersection[l] + meet
    coh = nodal_chain_cohomology([d_km, d_lm], [(0, 1)])
    return OrthogonalityReport(coh == (0, 0), (d_km, d_lm), coh)


def twists_from_fan(fan: Fan) -> tuple[ConfigData, EulerMatrix, list[TwistMatrix]]:
    """fan -> surfaces and curves -> graded Homs -> chi -> twist matrices."""
    config = configuration(fan)
    chi = euler_matrix(config)
    return config, chi, [twist_matrix(k, chi) for k in range(len(config.surfaces))]


def standard_twists() -> list[TwistMatrix]:
    """Twist matrices of the three exceptional surfaces of the shipped 1/7(1,2,4) fan."""
    from .quotient_fan import load_fixture

    return twists_from_fan(load_fixture("a7_124"))[2]
