"""Seeded generators of small random instances."""
from __future__ import annotations

import random

from .cech import Cover, LocalTrivData, glue_bundle
from .genmor import from_strict_morphism, unit_genmor
from .groupoid import (GroupoidMorphism, cyclic_group, direct_product_group, disjoint_union, group_as_groupoid,
                       pair_groupoid, product_groupoid, random_functor, symmetric_group, build_groupoid)
from .morita import formal_inverse, gauge_bibundle

GROUPS = {
    "Z1": lambda: cyclic_group(1),
    "Z2": lambda: cyclic_group(2),
    "Z3": lambda: cyclic_group(3),
    "Z4": lambda: cyclic_group(4),
    "Z2xZ2": lambda: direct_product_group(cyclic_group(2), cyclic_group(2)),
    "S3": lambda: symmetric_group(3),
}


def rng_for(seed):
    return random.Random(seed)


def random_group(rng, max_order=6):
    names = [k for k, f in GROUPS.items() if len(f()) <= max_order]
    return GROUPS[rng.choice(names)]()


def random_groupoid(rng, max_arrows=12, max_components=3):
    """Disjoint union of pair(X) x K, at most max_arrows arrows in total."""
    comps, room = [], max_arrows
    for _ in range(rng.randint(1, max_components)):
        opts = [(n, k) for n in (1, 2, 3) for k, f in GROUPS.items() if n * n * len(f()) <= room]
        if not opts:
            break
        n, k = rng.choice(opts)
        K = group_as_groupoid(GROUPS[k]())
        comps.append(product_groupoid(pair_groupoid(list(range(n))), K) if n > 1 else K)
        room -= n * n * len(GROUPS[k]())
    if len(comps) == 1:
        return comps[0]
    return disjoint_union(*comps)


def random_cover(rng, base, max_sets=3):
    k = rng.randint(1, max_sets)
    while True:
        sets = {a: [] for a in range(k)}
        for m in base:
            chosen = [a for a in range(k) if rng.random() < 0.5] or [rng.randrange(k)]
            for a in chosen:
                sets[a].append(m)
        if all(sets.values()):
            return Cover(base, list(range(k)), sets)


def random_trivdata(rng, G, cover):
    """A uniformly random valid datum: eps and a row of arrows into one object per point."""
    mom = {a: {} for a in cover.indices}
    coc = {}
    for m in cover.base:
        idx = cover.indices_at(m)
        x = rng.choice(G.objects)
        row = {a: rng.choice(G.arrows_to(x)) for a in idx}
        row[idx[0]] = G.unit[x]
        for a in idx:
            mom[a][m] = G.src[row[a]]
        for a in idx:
            for b in idx:
                coc.setdefault((a, b), {})[m] = G.mul(G.inv[row[a]], row[b])
    return LocalTrivData(cover, G, mom, coc)


def random_instance(rng, max_points=5, max_sets=3, max_arrows=12):
    G = random_groupoid(rng, max_arrows)
    base = [f"m{i}" for i in range(rng.randint(1, max_points))]
    U = random_cover(rng, base, max_sets)
    return random_trivdata(rng, G, U)


def random_sections(rng, P, cover):
    return {a: {m: rng.choice(P.fiber(m)) for m in cover.sets[a]} for a in cover.indices}


def random_group_bundle(rng, max_points=3, max_order=4):
    K = group_as_groupoid(random_group(rng, max_order))
    base = [f"m{i}" for i in range(rng.randint(1, max_points))]
    return glue_bundle(random_trivdata(rng, K, random_cover(rng, base, 2)))


def relabel_groupoid(G, tag):
    """An isomorphic copy with every identifier wrapped as (tag, id)."""
    w = lambda x: (tag, x)
    return build_groupoid([w(x) for x in G.objects], [w(g) for g in G.arrows],
                          {w(g): w(G.src[g]) for g in G.arrows}, {w(g): w(G.tgt[g]) for g in G.arrows},
                          {w(x): w(G.unit[x]) for x in G.objects}, lambda a, b: w(G.comp[a[1], b[1]]),
                          {w(g): w(G.inv[g]) for g in G.arrows})


def random_bibundle(rng, max_arrows=12):
    """A random bibundle from a mix of Morita and non-Morita families."""
    kind = rng.choice(["unit", "gauge", "gauge-inverse", "relabel", "functor", "collapse", "functor"])
    if kind == "unit":
        return unit_genmor(random_groupoid(rng, max_arrows))
    if kind in ("gauge", "gauge-inverse"):
        P = gauge_bibundle(random_group_bundle(rng))
        return formal_inverse(P) if kind == "gauge-inverse" else P
    G = random_groupoid(rng, max_arrows)
    if kind == "relabel":
        H = relabel_groupoid(G, "r")
        F = GroupoidMorphism(G, H, {g: ("r", g) for g in G.arrows}, {x: ("r", x) for x in G.objects})
        return from_strict_morphism(F)
    H = group_as_groupoid(cyclic_group(1)) if kind == "collapse" else random_groupoid(rng, max_arrows)
    return from_strict_morphism(random_functor(G, H, rng))


def random_composable_pair(rng, max_arrows=8):
    """(P: F -> G, Q: G -> H) drawn from strict, gauge and unit bibundles."""
    kind = rng.choice(["strict-strict", "strict-gauge", "gauge-strict", "gauge-unit", "unit-gauge"])
    if kind == "strict-strict":
        F, G, H = (random_groupoid(rng, max_arrows) for _ in range(3))
        return from_strict_morphism(random_functor(F, G, rng)), from_strict_morphism(random_functor(G, H, rng))
    B = random_group_bundle(rng, 3, 3)
    Q = gauge_bibundle(B)
    if kind == "strict-gauge":
        F = random_groupoid(rng, max_arrows)
        return from_strict_morphism(random_functor(F, Q.source, rng)), Q
    if kind == "unit-gauge":
        return unit_genmor(Q.source), Q
    if kind == "gauge-unit":
        return Q, unit_genmor(Q.target)
    H = random_groupoid(rng, max_arrows)
    return Q, from_strict_morphism(random_functor(Q.target, H, rng))
