"""Named example instances, as Python objects and as JSON file bundles."""
from __future__ import annotations

from . import jsonio
from .bundle import trivial_bundle, unit_bundle
from .cech import Cover, LocalTrivData, product_space_bundle
from .errors import DomainError
from .genmor import GeneralizedMorphism, from_strict_morphism, unit_genmor
from .groupoid import (GroupoidMorphism, action_groupoid, cyclic_group, gauge_arrow, gauge_groupoid,
                       group_as_groupoid, pair_groupoid, random_functor)
from .morita import gauge_bibundle, gauge_group_fixture
from .samples import random_bibundle, random_groupoid, random_instance, random_trivdata, rng_for


def z2():
    return group_as_groupoid(cyclic_group(2))


def trivial_group_bundle(group, points=("x", "y")):
    K = group_as_groupoid(group)
    return trivial_bundle(K, {m: K.objects[0] for m in points}, points)


def product_gauge_bibundle(A, P, GP=None):
    """X x P over X = objects(A), momentum pi(p), right G(P)-action
    (x, p).[p1, p2] = (x, p2 phi(p1, p)) and left action a.(s a, p) = (t a, p)."""
    GP = GP or gauge_groupoid(P)
    if tuple(A.objects) != tuple(P.base):
        raise DomainError("the groupoid must have the base of P as objects")
    B = product_space_bundle(P, GP)
    total = B.total
    left = {(a, (x, p)): (A.tgt[a], p) for x, p in total for a in A.arrows_from(x)}
    return GeneralizedMorphism(A, B, left, meta={"kind": "product-gauge", "bundle": P})


def pair_to_gauge(P):
    """pair(X) -> G(P) through X x P with (x, y).(y, p) = (x, p)."""
    return product_gauge_bibundle(pair_groupoid(P.base), P)


def swap_action():
    K = cyclic_group(2)
    X = (0, 1)
    act = {(g, x): (x if g == "e" else 1 - x) for g in K.elements for x in X}
    return K, X, act


def action_to_gauge(group, X, act, P=None):
    """G x| X -> G(P) through X x P with (g, x).(x, p) = (g x, p)."""
    P = P or trivial_group_bundle(cyclic_group(2), X)
    return product_gauge_bibundle(action_groupoid(group, X, act), P)


def strict_pair_to_gauge(P):
    """The strict version: (x, y) -> [sigma x, sigma y] for the first global section."""
    GP = gauge_groupoid(P)
    sig = {m: P.fiber(m)[0] for m in P.base}
    M = pair_groupoid(P.base)
    amap = {a: gauge_arrow(GP, sig[a[0]], sig[a[1]]) for a in M.arrows}
    return from_strict_morphism(GroupoidMorphism(M, GP, amap, {m: m for m in P.base}))


def strict_fixture(seed=0):
    rng = rng_for(seed)
    G, H = random_groupoid(rng, 8), random_groupoid(rng, 8)
    return from_strict_morphism(random_functor(G, H, rng))


def z2_two_set_data():
    """Z2 data over two points, sets {x, y} and {y} with the non-unit transition at y."""
    K = z2()
    U = Cover(("x", "y"), [0, 1], {0: ["x", "y"], 1: ["y"]})
    mom = {0: {"x": "*", "y": "*"}, 1: {"y": "*"}}
    coc = {(0, 0): {"x": "e", "y": "e"}, (0, 1): {"y": "a1"}, (1, 0): {"y": "a1"}, (1, 1): {"y": "e"}}
    return LocalTrivData(U, K, mom, coc)


def two_point_cover(points=("x", "y")):
    return Cover(points, [0, 1], {0: list(points), 1: [points[-1]]})


def descent_map():
    X, Y = (1, 2, 3, 4), (1, 2)
    return {1: 1, 2: 1, 3: 2, 4: 2}, X, Y


NAMES = ("pair-groupoid", "action-swap", "gauge-z2", "descent-2x2", "gauge-morita", "unit",
         "random-trivdata", "random-bibundle")


def fixture_files(name, seed=0):
    """File name -> JSON document."""
    J = jsonio
    if name == "unit":
        return {"z2.json": J.groupoid_to_json(z2()), "unit.json": J.genmor_to_json(unit_genmor(z2())),
                "unit-bundle.json": J.bundle_to_json(unit_bundle(z2()))}
    if name == "pair-groupoid":
        M = pair_groupoid(("x", "y", "z"))
        U = Cover(M.objects, [0, 1], {0: ["x", "y"], 1: ["y", "z"]})
        d = random_trivdata(rng_for(seed), M, U)
        P = trivial_group_bundle(cyclic_group(2), ("x", "y", "z"))
        return {"pair3.json": J.groupoid_to_json(M), "cover.json": J.cover_to_json(U),
                "pair-data.json": J.trivdata_to_json(d), "pair-to-gauge.json": J.genmor_to_json(pair_to_gauge(P))}
    if name == "action-swap":
        K, X, act = swap_action()
        A = action_groupoid(K, X, act)
        U = Cover(("m0", "m1"), [0, 1], {0: ["m0", "m1"], 1: ["m1"]})
        d = random_trivdata(rng_for(seed), A, U)
        return {"action.json": J.groupoid_to_json(A), "action-data.json": J.trivdata_to_json(d),
                "action-to-gauge.json": J.genmor_to_json(action_to_gauge(K, X, act))}
    if name == "gauge-z2":
        P = trivial_group_bundle(cyclic_group(2))
        GP = gauge_groupoid(P)
        return {"bundle.json": J.bundle_to_json(P), "gauge.json": J.groupoid_to_json(GP),
                "gauge-bibundle.json": J.genmor_to_json(gauge_bibundle(P, GP)),
                "cover.json": J.cover_to_json(two_point_cover()),
                "z2cover.json": J.trivdata_to_json(z2_two_set_data())}
    if name == "descent-2x2":
        f, X, Y = descent_map()
        return {"f.json": J.map_to_json(f, X, Y), "z2.json": J.group_to_json(cyclic_group(2)),
                "z3.json": J.group_to_json(cyclic_group(3))}
    if name == "gauge-morita":
        P = trivial_group_bundle(cyclic_group(2))
        M = gauge_group_fixture(P, two_point_cover())
        return {"local-morita.json": J.local_morita_to_json(M), "bundle.json": J.bundle_to_json(P),
                "cover.json": J.cover_to_json(two_point_cover())}
    if name == "random-trivdata":
        return {"trivdata.json": J.trivdata_to_json(random_instance(rng_for(seed)))}
    if name == "random-bibundle":
        return {"bibundle.json": J.genmor_to_json(random_bibundle(rng_for(seed)))}
    raise DomainError(f"unknown fixture {name!r}; known: {', '.join(NAMES)}")
