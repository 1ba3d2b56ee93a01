"""Exact lattice arithmetic: overlattices of Z^d, Hermite bases, cones and fans.

Everything here works with Python integers and ``fractions.Fraction``; there is
no floating point.  Points of an overlattice ``L`` of ``Z^d`` are stored as
integer numerator vectors over a shared positive denominator ``r``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

from .errors import DimensionError, FanError, LatticeMembershipError, RankError

IntVec = tuple[int, ...]
IntMatrix = tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------------------
# small exact matrix helpers


def det(rows: Sequence[Sequence[int | Fraction]]) -> int | Fraction:
    """Exact determinant: closed forms up to 3x3, elimination over Q beyond."""
    n = len(rows)
    if n == 0:
        return 1
    if any(len(r) != n for r in rows):
        raise DimensionError("determinant of a non-square matrix")
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    m = [[Fraction(x) for x in r] for r in rows]
    sign = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            for j in range(k, n):
                m[i][j] -= f * m[k][j]
    out = Fraction(sign)
    for k in range(n):
        out *= m[k][k]
    return int(out) if out.denominator == 1 else out


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
        for i in range(len(a))
    )


def matvec(a: Sequence[Sequence[int]], v: Sequence[int]) -> IntVec:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def transpose(a: Sequence[Sequence[int]]) -> IntMatrix:
    return tuple(zip(*a))


def identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def inverse(a: Sequence[Sequence[int | Fraction]]) -> tuple[tuple[Fraction, ...], ...]:
    """Exact inverse over Q via Gauss-Jordan."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            raise RankError("singular matrix")
        m[k], m[piv] = m[piv], m[k]
        p = m[k][k]
        m[k] = [x / p for x in m[k]]
        for i in range(n):
            if i != k and m[i][k] != 0:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return tuple(tuple(row[n:]) for row in m)


def integer_inverse(a: Sequence[Sequence[int]]) -> IntMatrix:
    """Inverse of a unimodular integer matrix."""
    inv = inverse(a)
    if any(x.denominator != 1 for row in inv for x in row):
        raise RankError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


def solve_rational(columns: Sequence[Sequence[int | Fraction]], target: Sequence[int | Fraction]):
    """Solve ``sum c_i * columns[i] = target`` for linearly independent columns.

    Returns the coefficient list, or ``None`` when ``target`` is outside the span.
    """
    k = len(columns)
    n = len(target)
    # augmented n x (k+1) system
    m = [[Fraction(columns[j][i]) for j in range(k)] + [Fraction(target[i])] for i in range(n)]
    row = 0
    pivots = []
    for col in range(k):
        piv = next((i for i in range(row, n) if m[i][col] != 0), None)
        if piv is None:
            raise RankError("columns are linearly dependent")
        m[row], m[piv] = m[piv], m[row]
        p = m[row][col]
        m[row] = [x / p for x in m[row]]
        for i in range(n):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[row])]
        pivots.append(row)
        row += 1
    if any(m[i][k] != 0 for i in range(row, n)):
        return None
    return [m[i][k] for i in pivots]


def rank(rows: Sequence[Sequence[int]]) -> int:
    return sum(1 for r in hermite_normal_form(rows) if any(r))


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    The result is echelon with positive pivots, and every entry above a pivot
    is reduced into ``[0, pivot)``.  Zero rows are dropped, so the output is a
    basis of the row lattice and is unique for that lattice.
    """
    m = [list(r) for r in rows if any(r)]
    if not m:
        return ()
    ncols = len(m[0])
    out: list[list[int]] = []
    pivot_cols: list[int] = []
    for col in range(ncols):
        live = [r for r in m if r[col] != 0]
        rest = [r for r in m if r[col] == 0]
        if not live:
            continue
        # Euclid on the column entries, acting on whole rows
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            head = live[0]
            nxt = []
            for r in live[1:]:
                q = r[col] // head[col]
                r = [x - q * y for x, y in zip(r, head)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = [head] + nxt
        head = live[0]
        if head[col] < 0:
            head = [-x for x in head]
        out.append(head)
        pivot_cols.append(col)
        m = rest
    for i, col in enumerate(pivot_cols):
        p = out[i][col]
        for j in range(i):
            q = out[j][col] // p
            if q:
                out[j] = [x - q * y for x, y in zip(out[j], out[i])]
    return tuple(tuple(r) for r in out)


def unimodular_completion(v: Sequence[int]) -> IntMatrix:
    """A unimodular matrix ``U`` with ``U @ v = (1, 0, ..., 0)`` for primitive ``v``."""
    n = len(v)
    if math.gcd(*v) != 1:
        raise LatticeMembershipError(f"{tuple(v)} is not primitive")
    u = [list(r) for r in identity(n)]
    w = list(v)
    # Euclid between coordinate 0 and each other coordinate, tracking row ops
    for j in range(1, n):
        while w[j] != 0:
            q = w[0] // w[j]
            w[0] -= q * w[j]
            u[0] = [x - q * y for x, y in zip(u[0], u[j])]
            w[0], w[j] = w[j], w[0]
            u[0], u[j] = u[j], u[0]
    if w[0] == -1:
        u[0] = [-x for x in u[0]]
    return tuple(tuple(r) for r in u)


# ---------------------------------------------------------------------------
# points and lattices


@dataclass(frozen=True, eq=False)
class LatticePoint:
    """A rational point ``numerators / denominator`` in Q^d."""

    numerators: IntVec
    denominator: int = 1

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("denominator must be a positive integer")
        object.__setattr__(self, "numerators", tuple(int(x) for x in self.numerators))

    @classmethod
    def integral(cls, *coords: int) -> "LatticePoint":
        return cls(tuple(coords), 1)

    @property
    def dim(self) -> int:
        return len(self.numerators)

    @cached_property
    def reduced(self) -> tuple[IntVec, int]:
        g = reduce(math.gcd, self.numerators, self.denominator)
        return tuple(x // g for x in self.numerators), self.denominator // g

    def fractions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.denominator) for x in self.numerators)

    def scaled(self, r: int) -> IntVec:
        """Numerators over denominator ``r``; ``r`` must be a multiple of the reduced denominator."""
        nums, d = self.reduced
        if r % d:
            raise ValueError(f"denominator {r} does not clear {self}")
        return tuple(x * (r // d) for x in nums)

    def coordinate_sum(self) -> Fraction:
        return Fraction(sum(self.numerators), self.denominator)

    def __eq__(self, other):
        if not isinstance(other, LatticePoint):
            return NotImplemented
        return self.reduced == other.reduced

    def __hash__(self):
        return hash(self.reduced)

    def _common(self, other: "LatticePoint"):
        r = math.lcm(self.denominator, other.denominator)
        return r, self.scaled(r), other.scaled(r)

    def __add__(self, other: "LatticePoint") -> "LatticePoint":
        r, a, b = self._common(other)
        return LatticePoint(tuple(x + y for x, y in zip(a, b)), r)

    def __sub__(self, other: "LatticePoint") -> "LatticePoint":
        r, a, b = self._common(other)
        return LatticePoint(tuple(x - y for x, y in zip(a, b)), r)

    def __neg__(self) -> "LatticePoint":
        return LatticePoint(tuple(-x for x in self.numerators), self.denominator)

    def __mul__(self, k: int) -> "LatticePoint":
        return LatticePoint(tuple(k * x for x in self.numerators), self.denominator)

    __rmul__ = __mul__

    def __repr__(self):
        nums, d = self.reduced
        return f"LatticePoint({nums}/{d})" if d != 1 else f"LatticePoint({nums})"


def standard_basis(d: int = 3) -> list[LatticePoint]:
    return [LatticePoint(tuple(int(i == j) for j in range(d))) for i in range(d)]


class Lattice:
    """A full-rank lattice in Q^d given by generators.

    ``basis`` holds the canonical Hermite basis as numerator rows over
    ``denominator``; ``basis_matrix`` puts those vectors in columns.
    """

    def __init__(self, generators: Iterable[LatticePoint]):
        gens = tuple(generators)
        if not gens:
            raise RankError("a lattice needs at least one generator")
        self.dim = gens[0].dim
        self.denominator = reduce(math.lcm, (g.reduced[1] for g in gens), 1)
        self.generators = gens
        rows = hermite_normal_form([g.scaled(self.denominator) for g in gens])
        if len(rows) != self.dim:
            raise RankError(f"generators span rank {len(rows)} < {self.dim}")
        self.basis = rows

    @classmethod
    def standard(cls, d: int = 3) -> "Lattice":
        return cls(standard_basis(d))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def basis_points(self) -> list[LatticePoint]:
        return [LatticePoint(row, self.denominator) for row in self.basis]

    def basis_matrix(self) -> IntMatrix:
        """Basis vectors as columns, numerators over ``denominator``."""
        return transpose(self.basis)

    @cached_property
    def determinant(self) -> Fraction:
        """Covolume of the lattice relative to Z^d."""
        return abs(Fraction(det(self.basis), self.denominator**self.dim))

    @property
    def index_in_refinement(self) -> int | Fraction:
        """[L : Z^d] when L contains Z^d (an integer); 1/covolume in general."""
        idx = 1 / self.determinant
        return int(idx) if idx.denominator == 1 else idx

    def coordinates(self, point: LatticePoint) -> IntVec:
        """Integer coordinates of ``point`` in the canonical basis."""
        r = math.lcm(self.denominator, point.reduced[1])
        cols = [tuple(x * (r // self.denominator) for x in row) for row in self.basis]
        sol = solve_rational(cols, point.scaled(r))
        if sol is None or any(c.denominator != 1 for c in sol):
            raise LatticeMembershipError(f"{point!r} is not in the lattice")
        return tuple(int(c) for c in sol)

    def point_from_coordinates(self, coords: Sequence[int]) -> LatticePoint:
        nums = [sum(c * row[i] for c, row in zip(coords, self.basis)) for i in range(self.dim)]
        return LatticePoint(tuple(nums), self.denominator)

    def __contains__(self, point: LatticePoint) -> bool:
        try:
            self.coordinates(point)
        except LatticeMembershipError:
            return False
        return True

    def primitive(self, point: LatticePoint) -> LatticePoint:
        """First lattice point on the ray through ``point`` (which must be nonzero).

        ``point`` itself need not be in the lattice; only its direction matters.
        """
        if not any(point.numerators):
            raise ValueError("the zero vector spans no ray")
        r = math.lcm(self.denominator, point.reduced[1])
        cols = [tuple(x * (r // self.denominator) for x in row) for row in self.basis]
        sol = solve_rational(cols, point.scaled(r))
        den = reduce(math.lcm, (c.denominator for c in sol), 1)
        ints = [int(c * den) for c in sol]
        g = math.gcd(*ints)
        return self.point_from_coordinates([x // g for x in ints])

    def is_primitive(self, point: LatticePoint) -> bool:
        return point in self and self.primitive(point) == point

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        return (self.denominator, self.basis) == (other.denominator, other.basis)

    def __hash__(self):
        return hash((self.denominator, self.basis))

    def __repr__(self):
        return f"Lattice(basis={self.basis}, denominator={self.denominator})"


def basis_of(lattice: Lattice) -> IntMatrix:
    """Canonical basis of ``lattice``: Hermite columns over ``lattice.denominator``."""
    return lattice.basis_matrix()


# ---------------------------------------------------------------------------
# cones


class Containment(enum.Enum):
    OUTSIDE = "outside"
    BOUNDARY = "boundary"
    INTERIOR = "interior"

    def __bool__(self):
        return self is not Containment.OUTSIDE


def contains(generators: Sequence[LatticePoint], point: LatticePoint) -> Containment:
    """Exact membership of ``point`` in the simplicial cone over ``generators``.

    ``INTERIOR`` means the relative interior of the cone.
    """
    if not generators:
        return Containment.INTERIOR if not any(point.numerators) else Containment.OUTSIDE
    cols = [g.fractions() for g in generators]
    sol = solve_rational(cols, point.fractions())
    if sol is None or any(c < 0 for c in sol):
        return Containment.OUTSIDE
    return Containment.INTERIOR if all(c > 0 for c in sol) else Containment.BOUNDARY


def normalized_volume(generators: Sequence[LatticePoint], lattice: Lattice) -> int:
    """|det| of full-dimensional simplicial cone generators, in lattice coordinates.

    Each generator is first replaced by the primitive lattice vector on its ray.
    """
    if len(generators) != lattice.dim:
        raise DimensionError(f"need {lattice.dim} generators, got {len(generators)}")
    coords = [lattice.coordinates(lattice.primitive(g)) for g in generators]
    v = abs(det(coords))
    if v == 0:
        raise DimensionError("cone is not full-dimensional")
    return int(v)


@dataclass(frozen=True)
class Cone:
    """Indices into a fan's shared ray table."""

    ray_indices: tuple[int, ...]
    dimension: int = -1

    def __post_init__(self):
        object.__setattr__(self, "ray_indices", tuple(sorted(set(self.ray_indices))))
        if self.dimension < 0:
            # simplicial by construction throughout this package
            object.__setattr__(self, "dimension", len(self.ray_indices))

    def faces(self) -> list["Cone"]:
        out = []
        for k in range(len(self.ray_indices) + 1):
            out.extend(Cone(c) for c in itertools.combinations(self.ray_indices, k))
        return out

    def __contains__(self, ray: int) -> bool:
        return ray in self.ray_indices

    def __iter__(self):
        return iter(self.ray_indices)

    def __len__(self):
        return len(self.ray_indices)


def _orient(a: IntVec, b: IntVec, c: IntVec) -> int:
    d = det((a, b, c))
    return (d > 0) - (d < 0)


@dataclass(frozen=True)
class Fan:
    """A simplicial fan: primitive rays, maximal cones, and the ambient lattice."""

    rays: tuple[LatticePoint, ...]
    maximal_cones: tuple[Cone, ...]
    lattice: Lattice
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(self.rays))
        cones = tuple(c if isinstance(c, Cone) else Cone(tuple(c)) for c in self.maximal_cones)
        object.__setattr__(self, "maximal_cones", cones)
        for c in cones:
            if any(i < 0 or i >= len(self.rays) for i in c):
                raise FanError(f"cone {c.ray_indices} refers to a missing ray")

    @property
    def dim(self) -> int:
        return self.lattice.dim

    def points(self, cone: Cone | Iterable[int]) -> list[LatticePoint]:
        return [self.rays[i] for i in cone]

    def cones(self, dimension: int | None = None) -> list[Cone]:
        """All cones (faces of maximal cones), optionally of one dimension."""
        seen = set()
        for m in self.maximal_cones:
            for f in m.faces():
                seen.add(f.ray_indices)
        out = sorted(seen, key=lambda t: (len(t), t))
        return [Cone(t) for t in out if dimension is None or len(t) == dimension]

    def has_cone(self, rays: Iterable[int]) -> bool:
        s = set(rays)
        return any(s <= set(m.ray_indices) for m in self.maximal_cones)

    def cones_containing(self, ray: int) -> list[Cone]:
        return [m for m in self.maximal_cones if ray in m]

    def lattice_coordinates(self) -> list[IntVec]:
        return [self.lattice.coordinates(p) for p in self.rays]

    def scaled_rays(self) -> list[IntVec]:
        return [p.scaled(self.lattice.denominator) for p in self.rays]

    def subfan_star(self, ray: int) -> "Fan":
        """Open star of ``ray``: maximal cones containing it, rays re-indexed in order."""
        cones = self.cones_containing(ray)
        used = sorted({i for c in cones for i in c})
        remap = {old: new for new, old in enumerate(used)}
        return Fan(
            tuple(self.rays[i] for i in used),
            tuple(Cone(tuple(remap[i] for i in c)) for c in cones),
            self.lattice,
            {"source_rays": used, "star_of": ray},
        )


def check_fan_3d(fan: Fan) -> list[str]:
    """Exhaustive compatibility check for a 3D simplicial fan whose rays lie in an open half-space.

    Cones are compared through their radial sections: two maximal cones are
    compatible iff their sections have disjoint interiors and no ray of one
    lies in the other unless shared.  Returns a list of problems (empty when
    the collection is a fan).
    """
    if fan.dim != 3:
        raise DimensionError("check_fan_3d handles 3D fans only")
    vecs = fan.scaled_rays()
    problems = []
    tris = []
    for c in fan.maximal_cones:
        if len(c) != 3:
            problems.append(f"cone {c.ray_indices} is not 3-dimensional")
            continue
        a, b, d = c.ray_indices
        o = _orient(vecs[a], vecs[b], vecs[d])
        if o == 0:
            problems.append(f"cone {c.ray_indices} is degenerate")
            continue
        tris.append((a, b, d) if o > 0 else (a, d, b))
    for t1, t2 in itertools.combinations(tris, 2):
        if not _sections_compatible(vecs, t1, t2):
            problems.append(f"cones {tuple(sorted(t1))} and {tuple(sorted(t2))} overlap improperly")
    return problems


def _separated(vecs, t1, t2) -> bool:
    for i in range(3):
        u, v = vecs[t1[i]], vecs[t1[(i + 1) % 3]]
        if all(_orient(u, v, vecs[w]) <= 0 for w in t2):
            return True
    return False


def _point_in_closed(vecs, t, p) -> bool:
    return all(_orient(vecs[t[i]], vecs[t[(i + 1) % 3]], vecs[p]) >= 0 for i in range(3))


def _sections_compatible(vecs, t1, t2) -> bool:
    """t1, t2 positively oriented index triples."""
    if not (_separated(vecs, t1, t2) or _separated(vecs, t2, t1)):
        return False
    for p in t2:
        if p not in t1 and _point_in_closed(vecs, t1, p):
            return False
    for p in t1:
        if p not in t2 and _point_in_closed(vecs, t2, p):
            return False
    return True


def interiors_disjoint(vecs: Sequence[IntVec], t1: Sequence[int], t2: Sequence[int]) -> bool:
    """Whether the simplicial 3-cones over two index triples have disjoint interiors."""
    a = tuple(t1) if _orient(*(vecs[i] for i in t1)) > 0 else (t1[0], t1[2], t1[1])
    b = tuple(t2) if _orient(*(vecs[i] for i in t2)) > 0 else (t2[0], t2[2], t2[1])
    return _separated(vecs, a, b) or _separated(vecs, b, a)
