import pytest

from qbraid.errors import EmptyIntersection, FanError, NotCompactError, NotInFanError, SmoothnessError
from qbraid.fan_analysis import (
    HIRZEBRUCH,
    PROJECTIVE_PLANE,
    DivisorSpec,
    StarFan2D,
    classify_surface,
    curve_self_intersection,
    cyclic_order,
    fan_isomorphism,
    hirzebruch_fan,
    intersection_curve,
    is_compact_orbit_closure,
    line_bundle_fan,
    orbit_dim,
    projective_plane_fan,
    self_intersection_cycle,
    star_fan,
)
from qbraid.lattice_core import LatticePoint
from qbraid.quotient_fan import QuotientData, build_lattice, enumerate_unimodular_triangulations, resolution_fan


def _p2_resolution():
    q = QuotientData(3, (1, 1, 1))
    return resolution_fan(enumerate_unimodular_triangulations(q)[0], build_lattice(q))


def _wall_oracle(a, u, b):
    """c with a + b = -c u, solved coordinate-wise."""
    s = (a[0] + b[0], a[1] + b[1])
    k = 0 if u[0] != 0 else 1
    return -s[k] // u[k]


def test_orbit_dims(a7_fan):
    assert orbit_dim(a7_fan, [0]) == 2
    assert orbit_dim(a7_fan, [0, 1, 2]) == 0
    assert orbit_dim(a7_fan, [0, 1]) == 1
    with pytest.raises(NotInFanError):
        orbit_dim(a7_fan, [0, 5])


def test_compactness(a7_fan):
    assert is_compact_orbit_closure(a7_fan, [0])
    assert not is_compact_orbit_closure(a7_fan, [3])
    assert is_compact_orbit_closure(a7_fan, [0, 1])
    # a curve joining the compact surface S1 to a coordinate divisor is still complete
    assert is_compact_orbit_closure(a7_fan, [0, 3])
    assert not is_compact_orbit_closure(a7_fan, [3, 4])


def test_star_of_rho1_is_f2(a7_fan):
    star = star_fan(a7_fan, 0)
    assert len(star) == 4
    cycle = self_intersection_cycle(star)
    assert sorted(cycle) == [-2, 0, 0, 2]
    rep = classify_surface(star)
    assert (rep.kind, rep.e) == (HIRZEBRUCH, 2)


def test_rotational_symmetry(a7_fan):
    reports = [classify_surface(star_fan(a7_fan, k)) for k in range(3)]
    assert {r.label for r in reports} == {"F2"}
    assert len({tuple(sorted(r.self_intersection_cycle)) for r in reports}) == 1


def test_boundary_ray_not_compact(a7_fan):
    with pytest.raises(NotCompactError):
        star_fan(a7_fan, 5)


def test_p2_star():
    fan = _p2_resolution()
    (center,) = [i for i, p in enumerate(fan.rays) if p == LatticePoint((1, 1, 1), 3)]
    star = star_fan(fan, center)
    assert self_intersection_cycle(star) == (1, 1, 1)
    assert classify_surface(star).kind == PROJECTIVE_PLANE


def test_hirzebruch_self_intersections():
    f2 = hirzebruch_fan(2)
    pos = {lab: i for i, lab in enumerate(f2.labels())}
    assert curve_self_intersection(f2, pos[2]) == -2  # v2 = (0, -1)
    assert curve_self_intersection(f2, pos[1]) == 0  # v1 = (1, 0)
    p2 = projective_plane_fan()
    assert all(curve_self_intersection(p2, i) == 1 for i in range(3))


def test_self_intersection_matches_wall_oracle():
    for e in range(5):
        f = hirzebruch_fan(e)
        n = len(f)
        for i in range(n):
            a, u, b = f.rays_2d[i - 1], f.rays_2d[i], f.rays_2d[(i + 1) % n]
            assert curve_self_intersection(f, i) == _wall_oracle(a, u, b)


def test_classify_f1_and_f0():
    f1 = StarFan2D.from_rays([(1, 0), (0, -1), (-1, -1), (0, 1)])
    assert sorted(self_intersection_cycle(f1)) == [-1, 0, 0, 1]
    assert classify_surface(f1).label == "F1"
    assert classify_surface(hirzebruch_fan(0)).label == "F0"


def test_other_surface():
    blowup = StarFan2D.from_rays([(1, 0), (1, 1), (0, 1), (-1, 0), (0, -1)])
    rep = classify_surface(blowup)
    assert rep.label == "Other"
    assert set(rep.role_table.values()) == {"other"}


def test_nonsmooth_star():
    bad = StarFan2D.from_rays([(1, 0), (1, 2), (-1, 0), (0, -1)])
    with pytest.raises(SmoothnessError):
        self_intersection_cycle(bad)


def test_invalid_2d_fans():
    with pytest.raises(NotCompactError):
        StarFan2D(((1, 0), (0, 1)))
    with pytest.raises(FanError):
        StarFan2D.from_rays([(2, 0), (0, 1), (-1, -1)])
    with pytest.raises(NotCompactError):
        StarFan2D(((1, 0), (0, 1), (-1, 0), (0, -1), (1, 0), (0, 1), (-1, 0), (0, -1)))


def test_cyclic_order_exact():
    vecs = [(0, -1), (-1, 0), (1, 1), (1, 0), (-1, -2)]
    assert cyclic_order(vecs) == [3, 2, 1, 4, 0]


def test_roles_cyclic(a7_fan):
    reps = {k: classify_surface(star_fan(a7_fan, k)) for k in range(3)}
    assert reps[0].role_table[1] == "section"
    assert reps[0].role_table[2] == "fibre"
    for k in range(3):
        nxt = (k + 1) % 3
        assert reps[k].role_table[nxt] == "section"
        assert reps[nxt].role_table[k] == "fibre"


@pytest.mark.parametrize("k,l", [(0, 1), (1, 2), (2, 0)])
def test_intersection_curves(a7_fan, k, l):
    c = intersection_curve(a7_fan, k, l)
    assert c.orbit_dim == 1 and c.compact
    assert c.self_intersections == {k: -2, l: 0}
    assert c.roles == {k: "section", l: "fibre"}


def test_boundary_curve(a7_fan):
    # rho1 and rho6 share no cone; rho1 and rho4 give a curve on S1 only
    with pytest.raises(EmptyIntersection):
        intersection_curve(a7_fan, 0, 5)
    c = intersection_curve(a7_fan, 0, 3)
    assert c.compact
    assert set(c.self_intersections) == {0}
    assert c.roles[0] == "other"


def test_line_bundle_rays_and_relations():
    # v1..v4 of F2 with every coefficient of D equal to -1
    sigma_bar = StarFan2D(((0, -1), (1, 0), (0, 1), (-1, -2)))
    fan = line_bundle_fan(sigma_bar, DivisorSpec.uniform(range(4), -1))
    expected = [(0, 0, 1), (0, -1, 1), (1, 0, 1), (0, 1, 1), (-1, -2, 1)]
    assert [p.numerators for p in fan.rays] == expected
    r = fan.rays
    assert r[3] == r[0] * 2 - r[1]
    assert r[4] == r[1] * 2 - r[2]


def test_trivial_bundle_is_product():
    fan = line_bundle_fan(projective_plane_fan(), DivisorSpec())
    assert all(p.numerators[2] == 0 for p in fan.rays[1:])
    assert fan.rays[0].numerators == (0, 0, 1)


def test_zero_section_recovers_base():
    for base in (hirzebruch_fan(2), hirzebruch_fan(1), projective_plane_fan()):
        for a in (-1, 0, 2):
            fan = line_bundle_fan(base, DivisorSpec.uniform(range(len(base)), a))
            assert fan_isomorphism(star_fan(fan, 0), base) is not None


def test_isomorphism_star_subfan_to_line_bundle(a7_fan, rho):
    sigma1 = a7_fan.subfan_star(0)
    sigma_bar = StarFan2D(((0, -1), (1, 0), (0, 1), (-1, -2)))
    target = line_bundle_fan(sigma_bar, DivisorSpec.uniform(range(4), -1))
    iso = fan_isomorphism(sigma1, target)
    assert iso is not None
    # sigma1 keeps rho1..rho5 in order; target lists rho'1..rho'5 in order
    assert iso.ray_map == (0, 1, 2, 3, 4)


def test_isomorphism_self_and_mismatch(a7_fan):
    iso = fan_isomorphism(a7_fan, a7_fan)
    assert iso.ray_map == tuple(range(6))
    assert iso.matrix == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert fan_isomorphism(projective_plane_fan(), hirzebruch_fan(1)) is None
    assert fan_isomorphism(hirzebruch_fan(1), hirzebruch_fan(2)) is None
