"""Generalized morphisms G -> H as bibundles, and their local description.

A generalized morphism is a right principal H-bundle over objects(G) with a
commuting left G-action g.p, defined when src(g) == pi(p).
"""
from __future__ import annotations

import itertools

from .bundle import (BundleMorphism, division_table, trivial_bundle, unit_bundle, validate_bundle,
                     validate_bundle_morphism)
from .cech import (AssociatedBundle, LocalMorphismData, build_bundle_morphism, classify_action_data,
                   extract_trivdata, first_sections, glue_bundle, glue_canon, validate_local_morphism,
                   validate_trivdata)
from .errors import DomainError, InvalidError, StructureError
from .groupoid import GroupoidAction, GroupoidMorphism, fmt, full_subgroupoid


class GeneralizedMorphism:
    def __init__(self, source, bundle, left, meta=None):
        self.source = source
        self.bundle = bundle
        self.left = dict(left)
        self.meta = dict(meta or {})

    @property
    def target(self):
        return self.bundle.structure

    def lact(self, g, p):
        try:
            return self.left[g, p]
        except KeyError:
            raise DomainError(f"left action undefined at ({fmt(g)},{fmt(p)})") from None

    def ract(self, p, h):
        return self.bundle.act(p, h)

    def as_left_action(self):
        return GroupoidAction(self.source, self.bundle.total, self.bundle.proj, "left", self.left)

    def __repr__(self):
        return f"GeneralizedMorphism({len(self.bundle.total)} elements)"


def validate_genmor(P):
    G, B = P.source, P.bundle
    out = ["bundle: " + r for r in validate_bundle(B)]
    if set(B.base) != set(G.objects):
        return out + ["bundle base is not the object set of the source groupoid"]
    tot = set(B.total)
    for (g, p), q in P.left.items():
        if g not in G.apos or p not in tot or q not in tot:
            raise StructureError(f"left action: unknown identifier in ({fmt(g)},{fmt(p)})")
        if G.src[g] != B.proj[p]:
            out.append(f"left action defined off its domain at ({fmt(g)},{fmt(p)})")
    H = B.structure
    for p in B.total:
        for g in G.arrows_from(B.proj[p]):
            q = P.left.get((g, p))
            if q is None:
                out.append(f"left action undefined at ({fmt(g)},{fmt(p)})")
                continue
            if B.proj[q] != G.tgt[g]:
                out.append(f"left momentum fails at ({fmt(g)},{fmt(p)})")
            if B.momentum[q] != B.momentum[p]:
                out.append(f"right momentum not invariant at ({fmt(g)},{fmt(p)})")
            for h in H.arrows_to(B.momentum[p]):
                if B.action.get((q, h)) != P.left.get((g, B.action.get((p, h)))):
                    out.append(f"actions do not commute at ({fmt(g)},{fmt(p)},{fmt(h)})")
        if P.left.get((G.unit[B.proj[p]], p)) != p:
            out.append(f"left unit acts nontrivially at {fmt(p)}")
        for g2 in G.arrows_from(B.proj[p]):
            q = P.left.get((g2, p))
            for g1 in G.arrows_from(G.tgt[g2]):
                if q is None or P.left.get((g1, q)) != P.left.get((G.comp[g1, g2], p)):
                    out.append(f"left associativity fails at ({fmt(g1)},{fmt(g2)},{fmt(p)})")
    return out


def require_genmor(P, what="generalized morphism"):
    rep = validate_genmor(P)
    if rep:
        raise InvalidError(f"invalid {what}: {rep[0]}", rep)
    return P


def from_strict_morphism(F):
    """phi*U_H with g.(x, h) = (t g, Phi(g) h)."""
    G, H = F.domain, F.codomain
    B = trivial_bundle(H, F.object_map, G.objects)
    left = {}
    for x, h in B.total:
        for g in G.arrows_from(x):
            left[g, (x, h)] = (G.tgt[g], H.comp[F.arrow_map[g], h])
    return GeneralizedMorphism(G, B, left, meta={"kind": "strict", "morphism": F})


def strict_section(P):
    """sigma(x) = (x, unit(phi x)) for a bibundle built by from_strict_morphism."""
    F = P.meta["morphism"]
    return {x: (x, F.codomain.unit[F.object_map[x]]) for x in F.domain.objects}


def check_intertwining(P):
    """g.sigma(s g) == sigma(t g).Phi(g)"""
    F, sig, out = P.meta["morphism"], strict_section(P), []
    for g in F.domain.arrows:
        if P.left[g, sig[F.domain.src[g]]] != P.bundle.action[sig[F.domain.tgt[g]], F.arrow_map[g]]:
            out.append(f"intertwining fails at {fmt(g)}")
    return out


def unit_genmor(G):
    """U_G with left and right multiplication: the identity generalized morphism."""
    B = unit_bundle(G)
    left = {(g, h): G.comp[g, h] for h in G.arrows for g in G.arrows_from(G.tgt[h])}
    return GeneralizedMorphism(G, B, left, meta={"kind": "unit"})


# -- local form -------------------------------------------------------------

class LocalGeneralizedMorphism:
    """theta[(b, a)][g] for g with src in U_a and tgt in U_b."""

    def __init__(self, source, data, theta):
        self.source = source
        self.data = data
        self.theta = {k: dict(v) for k, v in theta.items()}

    @property
    def target(self):
        return self.data.structure

    @property
    def cover(self):
        return self.data.cover

    def __eq__(self, other):
        return (isinstance(other, LocalGeneralizedMorphism) and self.source == other.source
                and self.data == other.data and self.theta == other.theta)

    __hash__ = None


def component_arrows(G, cover, a, b):
    """Arrows of the local component G_{a,b}: src in U_a, tgt in U_b."""
    return [g for g in G.arrows if cover.contains(a, G.src[g]) and cover.contains(b, G.tgt[g])]


def localize(P, cover, sections=None):
    """theta_ba(g) = phi(sigma_b(t g), g.sigma_a(s g))."""
    G, B = P.source, P.bundle
    if sections is None:
        sections = first_sections(B, cover)
    data = extract_trivdata(B, cover, sections)
    div = division_table(B)
    theta = {}
    for a in cover.indices:
        for b in cover.indices:
            theta[b, a] = {g: div[sections[b][G.tgt[g]], P.left[g, sections[a][G.src[g]]]]
                           for g in component_arrows(G, cover, a, b)}
    return LocalGeneralizedMorphism(G, data, theta)


def _theta_structural(L):
    G, C, H = L.source, L.cover, L.target
    if C.base != G.objects and set(C.base) != set(G.objects):
        raise StructureError("cover base is not the object set of the source groupoid")
    for a in C.indices:
        for b in C.indices:
            dom = set(component_arrows(G, C, a, b))
            got = L.theta.get((b, a), {})
            if set(got) != dom:
                raise StructureError(f"theta ({fmt(b)},{fmt(a)}) not defined exactly on its local component")
            for g, h in got.items():
                if h not in H.apos:
                    raise StructureError(f"theta ({fmt(b)},{fmt(a)}) value at {fmt(g)} is unknown arrow {fmt(h)}")


def local_genmor_families(L):
    """Violations grouped as momentum (diagrams), homomorphism, transition."""
    G, C, H, d = L.source, L.cover, L.target, L.data
    fam = {"trivdata": validate_trivdata(d), "momentum": [], "homomorphism": [], "transition": []}
    _theta_structural(L)
    th = L.theta
    at = C.indices_at
    for g in G.arrows:
        s, t = G.src[g], G.tgt[g]
        for a in at(s):
            for b in at(t):
                h = th[b, a][g]
                if H.src[h] != d.momenta[a][s] or H.tgt[h] != d.momenta[b][t]:
                    fam["momentum"].append(f"momentum diagram fails at ({fmt(b)},{fmt(a)},{fmt(g)})")
    for a in C.indices:
        for x in C.sets[a]:
            if th[a, a][G.unit[x]] != H.unit[d.momenta[a][x]]:
                fam["momentum"].append(f"unit diagram fails at ({fmt(a)},{fmt(x)})")
    for (g1, g2), g12 in G.comp.items():
        for a in at(G.src[g2]):
            for b in at(G.tgt[g2]):
                for c in at(G.tgt[g1]):
                    if H.comp.get((th[c, b][g1], th[b, a][g2])) != th[c, a][g12]:
                        fam["homomorphism"].append(
                            f"homomorphism fails at ({fmt(c)},{fmt(b)},{fmt(a)},{fmt(g1)},{fmt(g2)})")
    for g in G.arrows:
        s, t = G.src[g], G.tgt[g]
        for a, c in itertools.product(at(s), repeat=2):
            for b, dd in itertools.product(at(t), repeat=2):
                rhs = H.comp.get((d.cocycle[b, dd][t], th[dd, c][g]))
                rhs = None if rhs is None else H.comp.get((rhs, d.cocycle[c, a][s]))
                if rhs != th[b, a][g]:
                    fam["transition"].append(
                        f"transition relation fails at ({fmt(a)},{fmt(b)},{fmt(c)},{fmt(dd)},{fmt(g)})")
    return fam


def validate_local_genmor(L):
    fam = local_genmor_families(L)
    return [r for k in ("trivdata", "momentum", "homomorphism", "transition") for r in fam[k]]


def diagonal_morphism(L, a):
    """Theta_aa as a strict morphism from the restriction of G to U_a."""
    Ga = full_subgroupoid(L.source, L.cover.sets[a])
    return GroupoidMorphism(Ga, L.target, {g: L.theta[a, a][g] for g in Ga.arrows},
                            {x: L.data.momenta[a][x] for x in Ga.objects})


def globalize(L):
    """g.[a, x, h] = [b, t g, theta_ba(g) h], checked for every representative and b."""
    rep = validate_local_genmor(L)
    if rep:
        raise InvalidError("invalid local generalized morphism: " + rep[0], rep)
    G, d, C, H = L.source, L.data, L.cover, L.target
    B = glue_bundle(d)
    left, problems = {}, []
    for p in B.total:
        a0, x, h = p
        for g in G.arrows_from(x):
            t = G.tgt[g]
            b0 = C.first_index(t)
            q = glue_canon(d, b0, t, H.mul(L.theta[b0, a0][g], h))
            for a in C.indices_at(x):
                ha = H.mul(d.cocycle[a, a0][x], h)
                for b in C.indices_at(t):
                    if glue_canon(d, b, t, H.mul(L.theta[b, a][g], ha)) != q:
                        problems.append(f"left action not well defined at ({fmt(g)},{fmt(p)},{fmt(a)},{fmt(b)})")
            left[g, p] = q
    if problems:
        raise InvalidError(problems[0], problems)
    return GeneralizedMorphism(G, B, left, meta={"kind": "globalized", "local": L})


# -- equivalences -----------------------------------------------------------

def left_equivariance_failures(F, P, Q):
    out = []
    for (g, p), q in P.left.items():
        if Q.left.get((g, F.mapping[p])) != F.mapping[q]:
            out.append(f"not left-equivariant at ({fmt(g)},{fmt(p)})")
    return out


def validate_equivalence(F, P, Q):
    return validate_bundle_morphism(F) + left_equivariance_failures(F, P, Q)


def find_equivalence(P, Q):
    """A bundle isomorphism P -> Q commuting with both actions, or None.

    Fibers are assigned in base order; each fiber map is fixed by the image of its
    first element and checked against the left action of already assigned fibers."""
    B1, B2 = P.bundle, Q.bundle
    if P.source != Q.source or B1.structure != B2.structure or set(B1.base) != set(B2.base):
        return None
    if len(B1.total) != len(B2.total):
        return None
    G = P.source
    div = division_table(B1)
    base = [m for m in B1.base if B1.fiber(m)]
    options = []
    for m in base:
        fib = B1.fiber(m)
        p0 = fib[0]
        opts = []
        for q0 in B2.fiber(m):
            if B2.momentum[q0] != B1.momentum[p0]:
                continue
            cand = {}
            for p in fib:
                q = B2.action.get((q0, div[p0, p]))
                if q is None:
                    break
                cand[p] = q
            else:
                if len(set(cand.values())) == len(fib) == len(B2.fiber(m)):
                    opts.append(cand)
        if not opts:
            return None
        options.append(opts)
    pos = {m: i for i, m in enumerate(base)}
    tau = {}

    def consistent(i):
        m = base[i]
        for p in B1.fiber(m):
            for g in G.arrows_from(m):
                if pos[G.tgt[g]] <= i and Q.left.get((g, tau[p])) != tau[P.left[g, p]]:
                    return False
        for g in G.arrows_to(m):
            n = G.src[g]
            if pos[n] < i:
                for p in B1.fiber(n):
                    if Q.left.get((g, tau[p])) != tau[P.left[g, p]]:
                        return False
        return True

    def search(i):
        if i == len(base):
            return True
        for cand in options[i]:
            tau.update(cand)
            if consistent(i) and search(i + 1):
                return True
            for p in cand:
                del tau[p]
        return False

    if not search(0):
        return None
    F = BundleMorphism(B1, B2, dict(tau))
    if validate_equivalence(F, P, Q):
        return None
    return F


class LocalEquivalence:
    """sigma[a][x]: arrow of H from eps1_a(x) to eps2_a(x)."""

    def __init__(self, source, target, sigma):
        self.source = source
        self.target = target
        self.sigma = {a: dict(v) for a, v in sigma.items()}

    def morphism_data(self):
        return LocalMorphismData(self.source.data, self.target.data, self.sigma)


def validate_local_equivalence(E):
    L1, L2 = E.source, E.target
    if L1.source != L2.source or L1.cover != L2.cover:
        return ["local generalized morphisms live on different covers"]
    out = validate_local_morphism(E.morphism_data())
    G, H = L1.source, L1.target
    for (b, a), vals in L1.theta.items():
        for g, h in vals.items():
            s, t = G.src[g], G.tgt[g]
            rhs = H.comp.get((H.inv[E.sigma[b][t]], L2.theta[b, a][g]))
            rhs = None if rhs is None else H.comp.get((rhs, E.sigma[a][s]))
            if rhs != h:
                out.append(f"second coboundary relation fails at ({fmt(b)},{fmt(a)},{fmt(g)})")
    return out


def localize_equivalence(F, P, Q, cover, sections1=None, sections2=None):
    """sigma_a(x) = phi_Q(sigma2_a(x), F(sigma1_a(x)))."""
    sections1 = sections1 or first_sections(P.bundle, cover)
    sections2 = sections2 or first_sections(Q.bundle, cover)
    div = division_table(Q.bundle)
    sigma = {a: {x: div[sections2[a][x], F.mapping[sections1[a][x]]] for x in cover.sets[a]}
             for a in cover.indices}
    return LocalEquivalence(localize(P, cover, sections1), localize(Q, cover, sections2), sigma)


def globalize_equivalence(E, P=None, Q=None):
    """[a, x, h] -> [a, x, sigma_a(x) h] between globalized bibundles."""
    P = P or globalize(E.source)
    Q = Q or globalize(E.target)
    F = build_bundle_morphism(E.morphism_data(), P.bundle, Q.bundle)
    bad = left_equivariance_failures(F, P, Q)
    if bad:
        raise InvalidError(bad[0], bad)
    return F


def compose_local_equivalences(E2, E1):
    H = E1.source.target
    sigma = {a: {x: H.mul(E2.sigma[a][x], g) for x, g in v.items()} for a, v in E1.sigma.items()}
    return LocalEquivalence(E1.source, E2.target, sigma)


# -- action groupoids -------------------------------------------------------

def classify_equivariant(P, cover, sections=None):
    """Read a bibundle G|X -> H|Y as an H-bundle with lifted G-action and an
    equivariant section of the associated Y-bundle."""
    G, H = P.source, P.target
    if G.meta.get("kind") != "action" or H.meta.get("kind") != "action":
        raise DomainError("classify_equivariant needs action groupoids on both sides")
    L = localize(P, cover, sections)
    report = {"lift_identity": [], "cocycle_identity": [], "transition_identity": [], "section": []}
    split = classify_action_data(L.data)
    gd, eps = split.group_data, split.section
    Hgrp, Hact = H.meta["group"], H.meta["act"]
    Gact = G.meta["act"]
    theta = {}
    for (b, a), vals in L.theta.items():
        theta[b, a] = {}
        for (g, x), (th, y) in vals.items():
            if y != eps[a][x]:
                report["lift_identity"].append(f"space component at ({fmt(b)},{fmt(a)},{fmt((g, x))})")
            if eps[b][Gact[g, x]] != Hact[th, eps[a][x]]:
                report["lift_identity"].append(f"eps_b(gx) != theta eps_a(x) at ({fmt(b)},{fmt(a)},{fmt((g, x))})")
            theta[b, a][g, x] = th
    C, Ggrp = cover, G.meta["group"]
    for (g1, g2x), (g2, x) in ((k[0], k[1]) for k in G.comp):
        if g2x != Gact[g2, x]:
            continue
        for a in C.indices_at(x):
            for b in C.indices_at(g2x):
                for c in C.indices_at(Gact[g1, g2x]):
                    lhs = theta[c, a][Ggrp.mul(g1, g2), x]
                    if lhs != Hgrp.mul(theta[c, b][g1, g2x], theta[b, a][g2, x]):
                        report["cocycle_identity"].append(f"at ({fmt(c)},{fmt(b)},{fmt(a)},{fmt(g1)},{fmt(g2)},{fmt(x)})")
    for (g, x) in G.arrows:
        gx = Gact[g, x]
        for a, c in itertools.product(C.indices_at(x), repeat=2):
            for b, dd in itertools.product(C.indices_at(gx), repeat=2):
                rhs = Hgrp.mul(Hgrp.mul(gd.cocycle[b, dd][gx], theta[dd, c][g, x]), gd.cocycle[c, a][x])
                if rhs != theta[b, a][g, x]:
                    report["transition_identity"].append(f"at ({fmt(a)},{fmt(b)},{fmt(c)},{fmt(dd)},{fmt((g, x))})")
    # the lifted action on the H-bundle and the equivariant section eta
    LH = LocalGeneralizedMorphism(G, gd, theta)
    lifted = globalize(LH)
    assoc = AssociatedBundle(lifted.bundle, H.meta["space"], Hact)
    eta, problems = assoc.section_from_momenta(gd, eps)
    report["section"] += problems
    for (g, x) in G.arrows:
        p, y = eta[x]
        moved = assoc.canon(lifted.left[(g, x), p], y)
        if moved != eta[Gact[g, x]]:
            report["section"].append(f"eta not equivariant at ({fmt(g)},{fmt(x)})")
    report["ok"] = not any(report[k] for k in ("lift_identity", "cocycle_identity", "transition_identity", "section"))
    report["h_data"] = gd
    report["theta"] = theta
    report["eta"] = eta
    return report
