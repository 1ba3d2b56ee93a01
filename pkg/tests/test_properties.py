"""Randomized invariants."""

from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import br3_trivial_table
from qbraid.braid_group import Word, braid_is_trivial, exponent_sum, free_reduce, permutation_of
from qbraid.fan_analysis import (
    StarFan2D,
    classify_surface,
    hirzebruch_fan,
    projective_plane_fan,
    self_intersection_cycle,
    star_fan,
)
from qbraid.fan_io import FanDocument
from qbraid.lattice_core import Lattice, LatticePoint, det, matmul, normalized_volume, standard_basis
from qbraid.quotient_fan import QuotientData, build_lattice, enumerate_unimodular_triangulations, resolution_fan

# ---------------------------------------------------------------------------
# unimodular matrices as products of elementary moves


def _elementary(n, i, j, c):
    m = [[int(a == b) for b in range(n)] for a in range(n)]
    m[i][j] = c
    return tuple(tuple(r) for r in m)


def _swap(n, i, j):
    m = [[int(a == b) for b in range(n)] for a in range(n)]
    m[i][i] = m[j][j] = 0
    m[i][j] = m[j][i] = 1
    return tuple(tuple(r) for r in m)


def gl_z(n, max_moves=8):
    idx = st.integers(0, n - 1)
    move = st.one_of(
        st.tuples(idx, idx, st.integers(-3, 3)).filter(lambda t: t[0] != t[1]).map(lambda t: _elementary(n, *t)),
        st.tuples(idx, idx).filter(lambda t: t[0] != t[1]).map(lambda t: _swap(n, *t)),
    )

    def product(ms):
        out = tuple(tuple(int(a == b) for b in range(n)) for a in range(n))
        for m in ms:
            out = matmul(out, m)
        return out

    return st.lists(move, min_size=1, max_size=max_moves).map(product)


L7 = Lattice(standard_basis() + [LatticePoint((1, 2, 4), 7)])


@settings(max_examples=60, deadline=None)
@given(gl_z(3), st.lists(st.tuples(*[st.integers(-4, 4)] * 3), min_size=3, max_size=3))
def test_volume_invariant_under_basis_change(g, coords):
    if det(coords) == 0:
        return
    pts = [L7.point_from_coordinates(c) for c in coords]
    moved = [L7.point_from_coordinates(tuple(sum(g[i][j] * c[j] for j in range(3)) for i in range(3)))
             for c in coords]
    assert normalized_volume(pts, L7) == normalized_volume(moved, L7)


@settings(max_examples=100, deadline=None)
@given(gl_z(2), st.sampled_from(["F0", "F1", "F2", "F3", "P2", "Other"]), st.integers(0, 7))
def test_classification_invariant_under_frame_change(g, which, rot):
    base = {
        "F0": hirzebruch_fan(0),
        "F1": hirzebruch_fan(1),
        "F2": hirzebruch_fan(2),
        "F3": hirzebruch_fan(3),
        "P2": projective_plane_fan(),
        "Other": StarFan2D.from_rays([(1, 0), (1, 1), (0, 1), (-1, 0), (0, -1)]),
    }[which]
    ref = classify_surface(base)
    moved = base.transformed(g)
    rep = classify_surface(moved)
    assert rep.label == ref.label == which
    assert sorted(rep.self_intersection_cycle) == sorted(ref.self_intersection_cycle)
    # relabelled rays: permuting the input order changes nothing
    k = rot % len(base)
    perm = StarFan2D.from_rays(list(base.rays_2d[k:] + base.rays_2d[:k]))
    assert classify_surface(perm).label == which


letters4 = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=14).map(lambda xs: Word(tuple(xs)))


@settings(max_examples=1000, deadline=None)
@given(letters4)
def test_braid_round_trip(w):
    assert braid_is_trivial(4, w * w.inverse())
    assert braid_is_trivial(4, w.inverse() * w)


@settings(max_examples=200, deadline=None)
@given(letters4)
def test_decider_respects_necessary_conditions(w):
    if braid_is_trivial(4, w):
        assert permutation_of(4, w) == (0, 1, 2, 3) and exponent_sum(w) == 0
    assert braid_is_trivial(4, w, method="garside") == braid_is_trivial(4, w, method="handle")


@settings(max_examples=200, deadline=None)
@given(letters4)
def test_free_reduce_idempotent(w):
    r = free_reduce(w)
    assert free_reduce(r) == r
    assert len(r) <= len(w)
    assert all(a != -b for a, b in zip(r.letters, r.letters[1:]))
    assert braid_is_trivial(4, w * r.inverse())


def test_br3_exhaustive_against_burau():
    table = br3_trivial_table(6)
    assert len(table) == sum(4**k for k in range(7))
    mismatches = [w for w, trivial in table.items() if braid_is_trivial(3, Word(w)) != trivial]
    assert mismatches == []


def _all_fans():
    fans = []
    for r, w in [(7, (1, 2, 4)), (3, (1, 1, 1)), (5, (1, 1, 3)), (11, (1, 3, 7)), (13, (1, 3, 9)), (1, (0, 0, 0))]:
        q = QuotientData(r, w)
        lat = build_lattice(q)
        for t in enumerate_unimodular_triangulations(q):
            fan = resolution_fan(t, lat)
            fans.append(fan)
            fans.extend(fan.subfan_star(i) for i in range(len(fan.rays)))
    return fans


def test_json_round_trip_all_produced_fans():
    fans = _all_fans()
    assert len(fans) > 50
    for fan in fans:
        doc = FanDocument.from_fan(fan)
        again = FanDocument.from_json(doc.to_json())
        assert again == doc
        back = again.to_fan()
        assert back.rays == fan.rays and back.maximal_cones == fan.maximal_cones and back.lattice == fan.lattice
        assert back.metadata == fan.metadata


def test_every_junior_star_complete_and_smooth():
    for r, w in [(7, (1, 2, 4)), (11, (1, 3, 7)), (13, (1, 3, 9))]:
        q = QuotientData(r, w)
        lat = build_lattice(q)
        for t in enumerate_unimodular_triangulations(q):
            fan = resolution_fan(t, lat)
            for k in range(len(t.points) - 3):
                self_intersection_cycle(star_fan(fan, k))
