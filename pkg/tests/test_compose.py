import pytest

import oracles
from cechgroupoid.cech import Cover, whole_cover
from cechgroupoid.compose import (birefine, check_composite_division, check_local_global_compat, compose_global,
                                  compose_local, refine_local_genmor)
from cechgroupoid.errors import DomainError
from cechgroupoid.fixtures import action_to_gauge, pair_to_gauge, swap_action, trivial_group_bundle, z2
from cechgroupoid.genmor import (find_equivalence, from_strict_morphism, localize, unit_genmor, validate_genmor,
                                 validate_local_genmor)
from cechgroupoid.groupoid import cyclic_group, pair_groupoid, random_functor
from cechgroupoid.morita import formal_inverse, gauge_bibundle
from cechgroupoid.samples import (random_composable_pair, random_cover, random_groupoid, random_sections,
                                  rng_for)


def gauge_pair():
    P = trivial_group_bundle(cyclic_group(2), ("x", "y"))
    A = pair_to_gauge(P)
    return A, gauge_bibundle(P, A.target)


def test_unit_laws():
    for seed in range(10):
        P, Q = random_composable_pair(rng_for(seed))
        assert find_equivalence(compose_global(P, unit_genmor(P.target)), P) is not None
        assert find_equivalence(compose_global(unit_genmor(Q.source), Q), Q) is not None


def test_mismatched_middle():
    with pytest.raises(DomainError):
        compose_global(unit_genmor(z2()), unit_genmor(pair_groupoid("xy")))


def test_class_counts_match_orbits():
    A, B = gauge_pair()
    C = compose_global(A, B)
    assert len(C.bundle.total) == oracles.composite_class_count(A, B)
    assert validate_genmor(C) == [] and check_composite_division(C) == []
    for seed in range(20):
        P, Q = random_composable_pair(rng_for(seed))
        C = compose_global(P, Q)
        assert len(C.bundle.total) == oracles.composite_class_count(P, Q)
        assert validate_genmor(C) == [] and check_composite_division(C) == []


def test_associativity():
    A, B = gauge_pair()
    Binv = formal_inverse(B)
    left = compose_global(compose_global(A, B), Binv)
    right = compose_global(A, compose_global(B, Binv))
    assert find_equivalence(left, right) is not None
    for seed in range(8):
        rng = rng_for(seed)
        F = random_groupoid(rng, 6)
        G = random_groupoid(rng, 6)
        H = random_groupoid(rng, 6)
        K = random_groupoid(rng, 6)
        P, Q, R = (from_strict_morphism(random_functor(X, Y, rng)) for X, Y in ((F, G), (G, H), (H, K)))
        assert find_equivalence(compose_global(compose_global(P, Q), R),
                                compose_global(P, compose_global(Q, R))) is not None


def test_birefine_whole_middle_cover():
    B = pair_to_gauge(trivial_group_bundle(cyclic_group(2), ("x", "y")))
    U = Cover(("x", "y"), [0, 1], {0: ["x", "y"], 1: ["y"]})
    L = localize(B, U)
    V = whole_cover(B.target.objects)
    b = birefine(U, L.data.momenta, V)
    assert b.fine.indices == ((0, 0), (1, 0))
    assert [b.fine.sets[k] for k in b.fine.indices] == [U.sets[0], U.sets[1]]
    R = refine_local_genmor(L, b)
    assert validate_local_genmor(R) == []
    assert R.theta[(1, 0), (0, 0)] == L.theta[1, 0]


def test_birefine_split_over_action_fixture():
    K, X, act = swap_action()
    B = action_to_gauge(K, X, act)
    U = whole_cover(B.source.objects)
    L = localize(B, U)
    base = B.target.objects
    V = Cover(base, ["p", "q"], {"p": [base[0]], "q": list(base[1:])})
    b = birefine(U, L.data.momenta, V)
    for x in U.base:
        assert b.fine.indices_at(x)
    for k in b.fine.indices:
        assert all(V.contains(k[1], L.data.momenta[k[0]][x]) for x in b.fine.sets[k])
    assert validate_local_genmor(refine_local_genmor(L, b)) == []


def test_identity_composition_is_refinement():
    A, _ = gauge_pair()
    U = Cover(A.source.objects, [0, 1], {0: list(A.source.objects), 1: [A.source.objects[-1]]})
    L = localize(A, U)
    H = A.target
    ident = localize(unit_genmor(H), whole_cover(H.objects), {0: {x: H.unit[x] for x in H.objects}})
    C = compose_local(L, ident)
    for (bj, ai), vals in C.theta.items():
        assert vals == L.theta[bj[0], ai[0]]


def test_unit_then_arbitrary():
    A, _ = gauge_pair()
    G = A.source
    U = whole_cover(G.objects)
    ident = localize(unit_genmor(G), U, {0: {x: G.unit[x] for x in G.objects}})
    V = Cover(G.objects, [0, 1], {0: list(G.objects), 1: [G.objects[0]]})
    E = localize(A, V)
    C = compose_local(ident, E)
    for (bj, ai), vals in C.theta.items():
        assert all(h == E.theta[bj[1], ai[1]][f] for f, h in vals.items())


def test_local_global_compat_fixtures():
    A, B = gauge_pair()
    U = Cover(A.source.objects, [0, 1], {0: list(A.source.objects), 1: [A.source.objects[-1]]})
    V = whole_cover(B.source.objects)
    rep = check_local_global_compat(A, B, U, random_sections(rng_for(1), A.bundle, U), V,
                                    random_sections(rng_for(2), B.bundle, V))
    assert rep["ok"]


def test_local_global_compat_random():
    for seed in range(30):
        rng = rng_for(seed)
        P, Q = random_composable_pair(rng)
        if len(P.bundle.total) > 30 or len(Q.bundle.total) > 30:
            continue
        U = random_cover(rng, list(P.source.objects))
        V = random_cover(rng, list(Q.source.objects))
        rep = check_local_global_compat(P, Q, U, random_sections(rng, P.bundle, U), V,
                                        random_sections(rng, Q.bundle, V))
        assert rep["ok"], (seed, rep["momenta"][:1], rep["transition"][:1], rep["local"][:1])
