import itertools

import pytest

import oracles
from cechgroupoid.cech import Cover
from cechgroupoid.errors import InvalidError
from cechgroupoid.fixtures import pair_to_gauge, trivial_group_bundle, z2
from cechgroupoid.genmor import from_strict_morphism, unit_genmor, validate_genmor
from cechgroupoid.groupoid import GroupoidMorphism, cyclic_group, group_as_groupoid, pair_groupoid
from cechgroupoid.morita import (MoritaEquivalence, canonical_unit_iso, factorization_check, formal_inverse,
                                 gauge_bibundle, gauge_group_fixture, inverse_morita, left_division,
                                 left_division_table, local_morita_families, local_to_global, morita_criterion,
                                 validate_local_morita, validate_morita)
from cechgroupoid.samples import random_bibundle, rng_for


def collapse():
    K = z2()
    T = group_as_groupoid(cyclic_group(1))
    return from_strict_morphism(GroupoidMorphism(K, T, {g: "e" for g in K.arrows}, {"*": "*"}))


def test_unit_left_division():
    for G in (z2(), pair_groupoid("xyz")):
        P = unit_genmor(G)
        assert validate_morita(P) == []
        for (g1, g2), g in left_division_table(P).items():
            assert g == G.mul(g1, G.inv[g2])


def test_pair_to_gauge_left_division():
    """X x P solves p = g.q exactly when the P components agree, with g = (x1, x2).
    Equal momenta do not force equal P components, so it is not Morita."""
    A = pair_to_gauge(trivial_group_bundle(cyclic_group(2), ("x", "y")))
    brute = oracles.left_division_brute(A)
    for (x1, p), (x2, q) in itertools.product(A.bundle.total, repeat=2):
        if p == q:
            assert brute[(x1, p), (x2, q)] == [(x1, x2)]
        else:
            assert ((x1, p), (x2, q)) not in brute
    assert any("left transitivity" in r for r in validate_morita(A))


def test_pair_to_gauge_over_trivial_group_is_morita():
    A = pair_to_gauge(trivial_group_bundle(cyclic_group(1), ("x", "y", "z")))
    assert validate_morita(A) == []
    for (x1, p), (x2, q) in itertools.product(A.bundle.total, repeat=2):
        if A.bundle.momentum[x1, p] == A.bundle.momentum[x2, q]:
            assert left_division(A, (x1, p), (x2, q)) == (x1, x2)


def test_stabilizer_is_not_morita():
    P = collapse()
    assert validate_genmor(P) == []
    assert any("left freeness" in r for r in validate_morita(P))
    with pytest.raises(InvalidError):
        MoritaEquivalence(P)


def test_inverses():
    U = unit_genmor(z2())
    I = inverse_morita(U)
    assert I.source == U.target and I.phiL == MoritaEquivalence(U).phiR
    A = gauge_bibundle(trivial_group_bundle(cyclic_group(2), ("x", "y")))
    M = MoritaEquivalence(A)
    Inv = inverse_morita(M)
    assert validate_morita(Inv.underlying) == []
    back = formal_inverse(Inv.underlying)
    assert back.left == A.left and back.bundle.action == A.bundle.action


def test_canonical_unit_isos():
    for P in (unit_genmor(z2()), gauge_bibundle(trivial_group_bundle(cyclic_group(2), ("x", "y")))):
        out = canonical_unit_iso(P)
        for side in ("G", "H"):
            assert out[side]["report"] == []
            F = out[side]["iso"]
            assert len(set(F.mapping.values())) == len(F.mapping)
    U = unit_genmor(z2())
    iso = canonical_unit_iso(U)["H"]["iso"]
    K = z2()
    for c, h in iso.mapping.items():
        assert h == K.mul(K.inv[c[0]], c[1])


def test_factorization_unit_z2():
    K = z2()
    P = unit_genmor(K)
    rep = factorization_check(P)
    assert rep["ok"] and rep["checked_first"] == 16
    inv = K.inv
    for g1, g2, h1, h2 in itertools.product(K.arrows, repeat=4):
        lhs = K.mul(inv[g2], K.mul(K.mul(g1, inv[h1]), h2))
        rhs = K.mul(K.mul(inv[g2], g1), K.mul(inv[h1], h2))
        assert lhs == rhs


def test_factorization_gauge_and_corruption():
    A = gauge_bibundle(trivial_group_bundle(cyclic_group(2), ("x", "y")))
    rep = factorization_check(A)
    assert rep["ok"] and rep["checked_first"] > 0
    assert factorization_check(formal_inverse(A))["ok"]
    phiL = dict(left_division_table(A))
    G = A.source
    key = next(iter(phiL))
    g = phiL[key]
    phiL[key] = next(h for h in G.hom(G.src[g], G.tgt[g]) if h != g)
    bad = factorization_check(A, phiL=phiL)
    assert not bad["ok"] and (bad["first"] or bad["second"])


def test_criterion_cases():
    U = unit_genmor(z2())
    r = morita_criterion(U, U)
    assert r.certified
    K = z2()
    assert all(g == K.mul(a, K.inv[b]) for (a, b), g in r.phiL.items())
    A = gauge_bibundle(trivial_group_bundle(cyclic_group(2), ("x", "y")))
    r = morita_criterion(A, formal_inverse(A))
    assert r.certified and r.phiL == left_division_table(A)
    X = pair_to_gauge(trivial_group_bundle(cyclic_group(2), ("x", "y")))
    assert not morita_criterion(X, formal_inverse(X)).certified
    P = collapse()
    assert not morita_criterion(P, formal_inverse(P)).certified


def test_criterion_agrees_with_validation():
    for seed in range(60):
        P = random_bibundle(rng_for(seed), 8)
        if len(P.bundle.total) > 30:
            continue
        r = morita_criterion(P, formal_inverse(P))
        assert r.certified == (validate_morita(P) == [])


def test_gauge_fixture_z2():
    P = trivial_group_bundle(cyclic_group(2), (1, 2))
    M = gauge_group_fixture(P)
    assert validate_local_morita(M) == []
    assert len(M.meta["gauge"].arrows) == 8
    out = local_to_global(M)
    assert out["forward_criterion"].certified and out["backward_criterion"].certified
    assert out["forward_validate"] == [] and out["backward_validate"] == []


def test_gauge_fixture_other_choices():
    P = trivial_group_bundle(cyclic_group(3), (1, 2))
    assert validate_local_morita(gauge_group_fixture(P)) == []
    C = Cover((1, 2), [0, 1], {0: [1, 2], 1: [2]})
    sec = {0: {1: P.fiber(1)[1], 2: P.fiber(2)[2]}, 1: {2: P.fiber(2)[0]}}
    assert validate_local_morita(gauge_group_fixture(P, C, sec, P.fiber(2)[1])) == []


def test_gauge_fixture_single_point():
    P = trivial_group_bundle(cyclic_group(2), ("pt",))
    M = gauge_group_fixture(P)
    assert validate_local_morita(M) == []
    assert len(M.meta["gauge"].arrows) == 2


def test_gauge_fixture_injection():
    P = trivial_group_bundle(cyclic_group(2), (1, 2))
    M = gauge_group_fixture(P)
    GP = M.meta["gauge"]
    k = next(iter(M.phi_theta))
    x = next(iter(M.phi_theta[k]))
    g = M.phi_theta[k][x]
    M.phi_theta[k][x] = next(h for h in GP.hom(GP.src[g], GP.tgt[g]) if h != g)
    fam = local_morita_families(M)
    assert fam["source:conjugation"] or fam["source:coboundary"]
    with pytest.raises(InvalidError):
        local_to_global(M)


def test_gauge_bibundle_is_morita():
    P = trivial_group_bundle(cyclic_group(2), (1, 2))
    B = gauge_bibundle(P)
    assert validate_morita(B) == []
    assert factorization_check(B)["ok"]
