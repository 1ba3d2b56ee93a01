import json

import pytest

from oracles import burau3
from qbraid.braid_group import (
    PHI_IMAGES,
    PSI_IMAGES,
    Derivation,
    NotFound,
    Presentation,
    Word,
    artin_braid_group,
    braid_is_trivial,
    budget_from_env,
    exponent_sum,
    free_reduce,
    garside_normal_form,
    handle_reduce,
    permutation_of,
    quiver_braid_group,
    relation_search,
    replay,
    rewriting_oracle,
    braid_oracle,
    substitute,
    verify_homomorphism,
    verify_iso_G_Br4,
    word_matrix,
)
from qbraid.errors import Inconclusive
from qbraid.lattice_core import identity
from qbraid.sheaf_calculus import standard_twists

G = quiver_braid_group()
BR4 = artin_braid_group(4)


def W(text):
    return Word.parse(text)


def test_word_text_round_trip():
    w = W("1 2 -1 3")
    assert str(w) == "1 2 -1 3"
    assert w.inverse() == W("-3 1 -2 -1")
    assert w.pairs() == [(1, 1), (2, 1), (1, -1), (3, 1)]
    assert Word.from_pairs(w.pairs()) == w
    with pytest.raises(ValueError):
        W("1 0")
    with pytest.raises(ValueError):
        W("1 a")


def test_free_reduce():
    assert free_reduce(W("2 -2 3")) == W("3")
    assert free_reduce(W("")) == W("")
    assert free_reduce(W("1 2 -2 -1 1")) == W("1")
    # psi(phi(g3)) = g2^-1 (g2 g3 g2^-1) g2
    assert substitute(PHI_IMAGES[2], PSI_IMAGES) == W("3")


def test_presentations():
    assert G.generator_count == 3 and len(G.relators) == 4
    assert BR4.generator_count == 3 and len(BR4.relators) == 3
    assert G.metadata["quiver"]["potential"] == "cba"
    with pytest.raises(ValueError):
        Presentation(2, (W("1 -1"),))
    with pytest.raises(ValueError):
        Presentation(2, (W("3"),))


@pytest.mark.parametrize(
    "n,word,expected",
    [
        (3, "1 2 1 -2 -1 -2", True),
        (4, "1 3 -1 -3", True),
        (2, "1 1", False),
        (4, "1 2 -1 -2", False),
        (4, "1 1", False),
        (4, "", True),
        (5, "1 2 3 4 1 2 3 1 2 1 -1 -2 -1 -3 -2 -1 -4 -3 -2 -1", True),
    ],
)
def test_braid_is_trivial(n, word, expected):
    w = W(word)
    assert braid_is_trivial(n, w) is expected
    assert braid_is_trivial(n, w, method="garside") is expected
    assert braid_is_trivial(n, w, method="handle") is expected


def test_index_out_of_range():
    with pytest.raises(IndexError):
        braid_is_trivial(3, W("3"))
    with pytest.raises(IndexError):
        braid_is_trivial(2, W("-2"))


def test_pure_braid_detected_by_decider_not_permutation():
    w = W("1 1")
    assert permutation_of(2, w) == (0, 1)
    assert exponent_sum(w) == 2
    w2 = W("1 1 -2 -2")
    assert permutation_of(3, w2) == (0, 1, 2) and exponent_sum(w2) == 0
    assert not braid_is_trivial(3, w2)
    assert burau3((1, 1, -2, -2)) != burau3(())


def test_handle_cap_falls_back():
    w = W("1 2 1 -2 -1 -2")
    assert handle_reduce(w, max_steps=0) is None
    assert braid_is_trivial(3, w, max_steps=0)
    with pytest.raises(Inconclusive):
        braid_is_trivial(3, w, method="handle", max_steps=0)


def test_garside_delta():
    inf, factors = garside_normal_form(3, W("1 2 1"))
    assert inf == 1 and factors == []
    inf, factors = garside_normal_form(3, W("-1"))
    assert inf == -1 and len(factors) == 1


def test_relator_is_one_step_derivation():
    d = relation_search(G, W("1 2 1 -2 -1 -2"))
    assert isinstance(d, Derivation) and len(d) == 1
    assert replay(G, d)


def test_braid_relation_for_conjugate_generator():
    s3 = "2 3 -2"
    target = free_reduce(W(f"2 {s3} 2") * W(f"{s3} 2 {s3}").inverse())
    d = relation_search(G, target)
    assert isinstance(d, Derivation)
    assert replay(G, d)


def test_commutation_derivation():
    target = free_reduce(W("1 2 3 -2 -1 2 -3 -2"))
    d = relation_search(G, target)
    assert isinstance(d, Derivation)
    assert replay(G, d)
    json.dumps(d.to_dict())


def test_replay_rejects_tampering():
    d = relation_search(G, free_reduce(W("1 2 3 -2 -1 2 -3 -2")))
    bad_step = d.steps[0].__class__(**{**d.steps[0].__dict__, "position": d.steps[0].position + 1})
    assert not replay(G, Derivation(d.target, (bad_step,) + d.steps[1:]))


def test_search_without_cycle_relator_is_inconclusive():
    g_minus = G.without_relator(0)
    res = relation_search(g_minus, free_reduce(W("1 2 3 -2 -1 2 -3 -2")), max_states=3000)
    assert isinstance(res, NotFound) and res.inconclusive and not res


def test_search_deterministic():
    target = free_reduce(W("1 2 3 -2 -1 2 -3 -2"))
    assert relation_search(G, target).to_dict() == relation_search(G, target).to_dict()


def test_budget_env(monkeypatch):
    monkeypatch.setenv("QBRAID_BUDGET", "10,500")
    assert budget_from_env() == (10, 500)
    monkeypatch.setenv("QBRAID_BUDGET", "700")
    assert budget_from_env() == (24, 700)
    assert budget_from_env(max_states=5) == (24, 5)
    monkeypatch.setenv("QBRAID_BUDGET", "x")
    with pytest.raises(ValueError):
        budget_from_env()


def test_verify_homomorphisms():
    assert verify_homomorphism(G, PHI_IMAGES, braid_oracle(4))
    assert verify_homomorphism(BR4, PSI_IMAGES, rewriting_oracle(G))
    naive = (W("1"), W("2"), W("3"))
    assert not verify_homomorphism(G, naive, braid_oracle(4))


def test_swapping_g1_g3_images_breaks_cycle_relator():
    swapped = (PHI_IMAGES[2], PHI_IMAGES[1], PHI_IMAGES[0])
    assert not verify_homomorphism(G, swapped, braid_oracle(4))
    # the cycle relator is the culprit; the three braid relators survive
    assert not braid_is_trivial(4, substitute(G.relators[0], swapped))
    assert all(braid_is_trivial(4, substitute(r, swapped)) for r in G.relators[1:])


def test_cyclic_relabelling_is_a_symmetry():
    rotated = (PHI_IMAGES[1], PHI_IMAGES[2], PHI_IMAGES[0])
    assert verify_homomorphism(G, rotated, braid_oracle(4))
    reversed_swap = tuple(PHI_IMAGES[i].inverse() for i in (2, 1, 0))
    assert verify_homomorphism(G, reversed_swap, braid_oracle(4))


def test_inconclusive_oracle():
    with pytest.raises(Inconclusive):
        verify_homomorphism(BR4, PSI_IMAGES, lambda w: None)


def test_matrix_image_of_every_G_relator_is_identity():
    mats = [t.m for t in standard_twists()]
    for r in G.relators:
        assert word_matrix(r, mats) == identity(3)


def test_iso_certificate():
    cert = verify_iso_G_Br4()
    assert cert.passed and cert.failing == []
    assert set(cert.parts) == {"phi", "psi", "composites", "k_theory"}
    assert len(cert.parts["phi"]["relators"]) == 4
    psi = cert.parts["psi"]["relators"]
    assert len(psi) == 3 and all(e["derived"] and e["replayed"] for e in psi)
    assert "g3 = g2^-1 (g2 g3 g2^-1) g2" in cert.parts["composites"]["g3_in_new_generators"]
    json.dumps(cert.to_dict())


def test_iso_without_cycle_relator():
    cert = verify_iso_G_Br4(presentation=G.without_relator(0), max_states=3000)
    assert not cert.passed
    assert "psi" in cert.failing
    assert cert.parts["psi"]["status"] in ("inconclusive", "fail")


def test_iso_with_wrong_phi():
    cert = verify_iso_G_Br4(phi_images=(W("1"), W("2"), W("3")))
    assert cert.status == "fail" and "phi" in cert.failing
