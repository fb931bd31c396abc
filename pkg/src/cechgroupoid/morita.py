"""Morita equivalences: left division, inverses, factorization and the criterion."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .bundle import BundleMorphism, PrincipalBundle, division_table, validate_bundle_morphism
from .cech import Cover, LocalTrivData, first_sections, whole_cover
from .compose import birefine, compose_global, compose_local
from .errors import DomainError, InvalidError
from .genmor import (GeneralizedMorphism, LocalGeneralizedMorphism, component_arrows, find_equivalence,
                     globalize, left_equivariance_failures, localize, unit_genmor, validate_genmor,
                     validate_local_genmor)
from .groupoid import fmt, gauge_arrow, gauge_groupoid


def _left_division(P):
    """(table, problems): phi_L(g.p, p) = g over all admissible (g, p)."""
    G, B = P.source, P.bundle
    table, problems = {}, []
    for p in B.total:
        for g in G.arrows_from(B.proj[p]):
            q = P.left.get((g, p))
            if q is None:
                continue
            if (q, p) in table:
                problems.append(f"left freeness fails at {fmt(p)} ({fmt(table[q, p])} and {fmt(g)})")
            else:
                table[q, p] = g
    by_eps = {}
    for p in B.total:
        by_eps.setdefault(B.momentum[p], []).append(p)
    for fib in by_eps.values():
        for p in fib:
            for q in fib:
                if (p, q) not in table:
                    problems.append(f"left transitivity fails at ({fmt(p)},{fmt(q)})")
    return table, problems


def left_division_table(P):
    table, problems = _left_division(P)
    if problems:
        raise InvalidError("left action is not principal: " + problems[0], problems)
    return table


def left_division(P, p, q):
    B = P.bundle
    if B.momentum[p] != B.momentum[q]:
        raise DomainError(f"{fmt(p)} and {fmt(q)} have different momenta")
    return left_division_table(P)[p, q]


def twisted_injectivity_failures(P, phiL, cover=None, sections=None):
    """theta_ba(g1) == theta_ba(g2) iff phiL(s_b(t g2), s_b(t g1)) g1 == g2 phiL(s_a(s g2), s_a(s g1))."""
    G, B = P.source, P.bundle
    cover = cover or whole_cover(G.objects)
    sections = sections or first_sections(B, cover)
    L = localize(P, cover, sections)
    eps = L.data.momenta
    out = []
    for a in cover.indices:
        for b in cover.indices:
            comp = component_arrows(G, cover, a, b)
            th = L.theta[b, a]
            for g1, g2 in itertools.product(comp, repeat=2):
                if eps[b][G.tgt[g1]] != eps[b][G.tgt[g2]] or eps[a][G.src[g1]] != eps[a][G.src[g2]]:
                    continue
                l = phiL[sections[b][G.tgt[g2]], sections[b][G.tgt[g1]]]
                r = phiL[sections[a][G.src[g2]], sections[a][G.src[g1]]]
                lhs = G.comp.get((l, g1))
                rhs = G.comp.get((g2, r))
                if (th[g1] == th[g2]) != (lhs is not None and lhs == rhs):
                    out.append(f"twisted injectivity fails at ({fmt(b)},{fmt(a)},{fmt(g1)},{fmt(g2)})")
    return out


def validate_morita(P, cover=None, sections=None):
    out = validate_genmor(P)
    if out:
        return out
    G, B, H = P.source, P.bundle, P.target
    used = set(B.momentum.values())
    for y in H.objects:
        if y not in used:
            out.append(f"momentum not surjective at {fmt(y)}")
    table, problems = _left_division(P)
    out += problems
    if out:
        return out
    div = division_table(B)
    for (p, q), g in table.items():
        if G.tgt[g] != B.proj[p] or G.src[g] != B.proj[q]:
            out.append(f"left division endpoints fail at ({fmt(p)},{fmt(q)})")
        if G.inv[g] != table[q, p]:
            out.append(f"left division inversion fails at ({fmt(p)},{fmt(q)})")
        for g1 in G.arrows_from(B.proj[p]):
            for g2 in G.arrows_from(B.proj[q]):
                want = G.mul(G.mul(g1, g), G.inv[g2])
                if table.get((P.left[g1, p], P.left[g2, q])) != want:
                    out.append(f"left division equivariance fails at ({fmt(p)},{fmt(q)},{fmt(g1)},{fmt(g2)})")
        for h in H.arrows_to(B.momentum[p]):
            if table.get((B.action[p, h], B.action[q, h])) != g:
                out.append(f"left division not H-invariant at ({fmt(p)},{fmt(q)},{fmt(h)})")
    for p in B.total:
        if table[p, p] != G.unit[B.proj[p]]:
            out.append(f"left division diagonal fails at {fmt(p)}")
    for (p, q), h in div.items():
        for g in G.arrows_from(B.proj[p]):
            if div.get((P.left[g, p], P.left[g, q])) != h:
                out.append(f"right division not G-invariant at ({fmt(p)},{fmt(q)},{fmt(g)})")
    out += twisted_injectivity_failures(P, table, cover, sections)
    return out


class MoritaEquivalence:
    def __init__(self, P):
        rep = validate_morita(P)
        if rep:
            raise InvalidError("not a Morita equivalence: " + rep[0], rep)
        self.underlying = P
        self.phiL = left_division_table(P)
        self.phiR = division_table(P.bundle)

    @property
    def source(self):
        return self.underlying.source

    @property
    def target(self):
        return self.underlying.target


def formal_inverse(P):
    """Swap projection and momentum, h.p := p.h^-1 and p.g := g^-1.p.  Not validated."""
    G, H, B = P.source, P.target, P.bundle
    action = {}
    for p in B.total:
        for g in G.arrows_to(B.proj[p]):
            q = P.left.get((G.inv[g], p))
            if q is not None:
                action[p, g] = q
    left = {}
    for p in B.total:
        for h in H.arrows_from(B.momentum[p]):
            q = B.action.get((p, H.inv[h]))
            if q is not None:
                left[h, p] = q
    inv_bundle = PrincipalBundle(B.total, H.objects, B.momentum, B.proj, G, action)
    return GeneralizedMorphism(H, inv_bundle, left, meta={"kind": "inverse", "of": P})


def inverse_morita(M):
    if not isinstance(M, MoritaEquivalence):
        M = MoritaEquivalence(M)
    Inv = MoritaEquivalence(formal_inverse(M.underlying))
    if Inv.phiL != M.phiR or Inv.phiR != M.phiL:
        raise InvalidError("division maps of the inverse are not swapped")
    return Inv


def canonical_unit_iso(M):
    """P o P^-1 -> U_H by [p1,p2] -> phiR(p1,p2) and P^-1 o P -> U_G by phiL."""
    if not isinstance(M, MoritaEquivalence):
        M = MoritaEquivalence(M)
    P = M.underlying
    Pinv = formal_inverse(P)
    out = {}
    for name, C, table, U in (("H", compose_global(Pinv, P), M.phiR, unit_genmor(P.target)),
                              ("G", compose_global(P, Pinv), M.phiL, unit_genmor(P.source))):
        report = []
        mapping = {}
        for rep, mem in C.meta["members"].items():
            vals = {table[p1, p2] for p1, p2 in mem}
            if len(vals) != 1:
                report.append(f"not well defined on class {fmt(rep)}")
            mapping[rep] = table[rep]
        F = BundleMorphism(C.bundle, U.bundle, mapping)
        report += validate_bundle_morphism(F) + left_equivariance_failures(F, C, U)
        out[name] = {"composite": C, "iso": F, "report": report}
    return out


def factorization_check(P, phiL=None, phiR=None):
    """Both factorization formulas over all admissible quadruples."""
    G, H, B = P.source, P.target, P.bundle
    phiL = phiL if phiL is not None else left_division_table(P)
    phiR = phiR if phiR is not None else division_table(B)
    pi, eps = B.proj, B.momentum
    by_pi, by_eps = {}, {}
    for p in B.total:
        by_pi.setdefault(pi[p], []).append(p)
        by_eps.setdefault(eps[p], []).append(p)
    fact1, fact2, n1, n2 = [], [], 0, 0
    for p1 in B.total:
        for p2 in by_pi[pi[p1]]:
            for q1 in by_eps[eps[p1]]:
                for q2 in by_pi[pi[q1]]:
                    # phiR(p2, phiL(p1,q1).q2) = phiR(p2,p1) phiR(q1,q2)
                    n1 += 1
                    x = P.left.get((phiL.get((p1, q1)), q2))
                    lhs = phiR.get((p2, x))
                    rhs = H.comp.get((phiR.get((p2, p1)), phiR.get((q1, q2))))
                    if lhs is None or lhs != rhs:
                        fact1.append(f"first formula fails at ({fmt(p1)},{fmt(p2)},{fmt(q1)},{fmt(q2)})")
            for p2 in by_eps[eps[p1]]:
                for q1 in by_pi[pi[p1]]:
                    for q2 in by_eps[eps[q1]]:
                        # phiL(p2.phiR(p1,q1), q2) = phiL(p2,p1) phiL(q1,q2)
                        n2 += 1
                        x = B.action.get((p2, phiR.get((p1, q1))))
                        lhs = phiL.get((x, q2))
                        rhs = G.comp.get((phiL.get((p2, p1)), phiL.get((q1, q2))))
                        if lhs is None or lhs != rhs:
                            fact2.append(f"second formula fails at ({fmt(p1)},{fmt(p2)},{fmt(q1)},{fmt(q2)})")
    return {"ok": not fact1 and not fact2, "first": fact1, "second": fact2,
            "checked_first": n1, "checked_second": n2}


@dataclass
class CriterionResult:
    certified: bool
    reason: str = ""
    phiL: dict = None
    psi1: dict = None
    psi2: dict = None
    report: list = field(default_factory=list)


def _twisted_failures(P, Q, psi):
    """pi_Q psi = eps_P, eps_Q psi = pi_P, psi(p.h) = h^-1.psi(p), psi(g.p) = psi(p).g^-1"""
    BP, BQ, G, H = P.bundle, Q.bundle, P.source, P.target
    out = []
    for p, q in psi.items():
        if BQ.proj[q] != BP.momentum[p] or BQ.momentum[q] != BP.proj[p]:
            out.append(f"twisted map swaps projections incorrectly at {fmt(p)}")
        for h in H.arrows_to(BP.momentum[p]):
            if psi[BP.action[p, h]] != Q.left.get((H.inv[h], q)):
                out.append(f"twisted right equivariance fails at ({fmt(p)},{fmt(h)})")
        for g in G.arrows_from(BP.proj[p]):
            if psi[P.left[g, p]] != BQ.action.get((q, G.inv[g])):
                out.append(f"twisted left equivariance fails at ({fmt(p)},{fmt(g)})")
    return out


def morita_criterion(P, Q):
    """Certify P: G -> H as Morita from Q: H -> G with Q o P = U_G and P o Q = U_H."""
    for name, X in (("P", P), ("Q", Q)):
        rep = validate_genmor(X)
        if rep:
            return CriterionResult(False, f"{name} is not a generalized morphism: {rep[0]}", report=rep)
    G, H = P.source, P.target
    if Q.source != H or Q.target != G:
        return CriterionResult(False, "Q does not go back from the target of P to its source")
    C1, C2 = compose_global(P, Q), compose_global(Q, P)
    U1, U2 = unit_genmor(G), unit_genmor(H)
    F1 = find_equivalence(C1, U1)
    if F1 is None:
        return CriterionResult(False, "composite over the source is not isomorphic to its unit bundle")
    F2 = find_equivalence(C2, U2)
    if F2 is None:
        return CriterionResult(False, "composite over the target is not isomorphic to its unit bundle")
    BP, BQ = P.bundle, Q.bundle
    c1, c2 = C1.meta["canon"], C2.meta["canon"]
    report = []

    def phiL_c1(a, b):
        return G.mul(F1.mapping[a], G.inv[F1.mapping[b]])

    phiL = {}
    for p1 in BP.total:
        for p2 in BP.total:
            if BP.momentum[p1] != BP.momentum[p2]:
                continue
            vals = {phiL_c1(c1[p1, q], c1[p2, q]) for q in BQ.fiber(BP.momentum[p1])}
            if len(vals) != 1:
                report.append(f"left division depends on the auxiliary point at ({fmt(p1)},{fmt(p2)})")
            phiL[p1, p2] = min(vals, key=G.apos.__getitem__)
    for (p1, p2), g in phiL.items():
        if P.left.get((g, p2)) != p1:
            report.append(f"constructed left division does not solve p1 = g.p2 at ({fmt(p1)},{fmt(p2)})")
    psi1 = {}
    for p in BP.total:
        qs = [q for q in BQ.fiber(BP.momentum[p]) if F1.mapping[c1[p, q]] == G.unit[BP.proj[p]]]
        if len(qs) != 1:
            report.append(f"first twisted map not unique at {fmt(p)}")
            continue
        psi1[p] = qs[0]
    psi2 = {}
    for q in BQ.total:
        ps = [p for p in BP.fiber(BQ.momentum[q]) if F2.mapping[c2[q, p]] == H.unit[BQ.proj[q]]]
        if len(ps) != 1:
            report.append(f"second twisted map not unique at {fmt(q)}")
            continue
        psi2[q] = ps[0]
    if not report:
        report += _twisted_failures(P, Q, psi1) + _twisted_failures(Q, P, psi2)
        for X, f, g in ((P, psi1, psi2), (Q, psi2, psi1)):
            gauge = BundleMorphism(X.bundle, X.bundle, {x: g[f[x]] for x in X.bundle.total})
            report += validate_bundle_morphism(gauge) + left_equivariance_failures(gauge, X, X)
        _, problems = _left_division(P)
        report += problems
    if report:
        return CriterionResult(False, "internal consistency checks failed", report=report)
    return CriterionResult(True, "", phiL, psi1, psi2, [])


# -- local Morita equivalences ----------------------------------------------

class LocalMoritaEquivalence:
    """theta: G -> H, eta: H -> G with phi_theta[(a, i)][x] in G and phi_eta[(i, a)][y] in H."""

    def __init__(self, theta, eta, phi_theta, phi_eta, meta=None):
        self.theta = theta
        self.eta = eta
        self.phi_theta = {k: dict(v) for k, v in phi_theta.items()}
        self.phi_eta = {k: dict(v) for k, v in phi_eta.items()}
        self.meta = dict(meta or {})


def _local_morita_side(T, E, phi, tag):
    """Checks for E o T against the identity of T.source via the family phi."""
    ET = compose_local(T, E)
    G, V = T.source, ET.cover
    fam = {f"{tag}:cocycle": [], f"{tag}:coboundary": [], f"{tag}:conjugation": []}
    for k in V.indices:
        if k not in phi:
            fam[f"{tag}:cocycle"].append(f"family missing index {fmt(k)}")
            return fam, ET
        for x in V.sets[k]:
            g = phi[k].get(x)
            if g is None or G.tgt[g] != x or G.src[g] != ET.data.momenta[k][x]:
                fam[f"{tag}:cocycle"].append(f"endpoints fail at ({fmt(k)},{fmt(x)})")
    if fam[f"{tag}:cocycle"]:
        return fam, ET
    for (kb, ka), vals in ET.data.cocycle.items():
        for x, c in vals.items():
            if G.comp.get((phi[kb][x], c)) != phi[ka][x]:
                fam[f"{tag}:coboundary"].append(f"coboundary fails at ({fmt(ka)},{fmt(kb)},{fmt(x)})")
    for (kb, ka), vals in ET.theta.items():
        for g, h in vals.items():
            want = G.mul(G.mul(G.inv[phi[kb][G.tgt[g]]], g), phi[ka][G.src[g]])
            if want != h:
                fam[f"{tag}:conjugation"].append(f"conjugation fails at ({fmt(kb)},{fmt(ka)},{fmt(g)})")
    return fam, ET


def local_morita_families(M):
    fam = {"theta": validate_local_genmor(M.theta), "eta": validate_local_genmor(M.eta)}
    if fam["theta"] or fam["eta"]:
        return fam
    f1, _ = _local_morita_side(M.theta, M.eta, M.phi_theta, "source")
    f2, _ = _local_morita_side(M.eta, M.theta, M.phi_eta, "target")
    fam.update(f1)
    fam.update(f2)
    return fam


def validate_local_morita(M):
    return [r for v in local_morita_families(M).values() for r in v]


def local_to_global(M):
    """Globalize both sides and certify each direction with the criterion."""
    rep = validate_local_morita(M)
    if rep:
        raise InvalidError("invalid local Morita equivalence: " + rep[0], rep)
    PT, PE = globalize(M.theta), globalize(M.eta)
    return {
        "forward": PT, "backward": PE,
        "forward_criterion": morita_criterion(PT, PE),
        "backward_criterion": morita_criterion(PE, PT),
        "forward_validate": validate_morita(PT),
        "backward_validate": validate_morita(PE),
    }


def gauge_bibundle(P, GP=None):
    """P as a generalized morphism G(P) -> G with [p1, p2].p = p1 phi(p2, p)."""
    GP = GP or gauge_groupoid(P)
    div = division_table(P)
    left = {}
    for p in P.total:
        for a in GP.arrows_from(P.proj[p]):
            left[a, p] = P.action[a[0], div[a[1], p]]
    return GeneralizedMorphism(GP, P, left, meta={"kind": "gauge-bibundle"})


def gauge_group_fixture(P, cover=None, sections=None, p0=None):
    """Local Morita equivalence between the gauge groupoid of P and its group."""
    Grp = P.structure
    if not Grp.is_group:
        raise DomainError("gauge fixture needs a bundle with a group as structure groupoid")
    GP = gauge_groupoid(P)
    div = division_table(P)
    cover = cover or whole_cover(P.base)
    sections = sections or first_sections(P, cover)
    p0 = P.total[0] if p0 is None else p0
    x0, star = P.proj[p0], Grp.objects[0]

    mom = {a: {x: star for x in cover.sets[a]} for a in cover.indices}
    coc = {(a, b): {x: div[sections[a][x], sections[b][x]] for x in cover.overlap(a, b)}
           for a in cover.indices for b in cover.indices if cover.overlap(a, b)}
    theta = {}
    for a in cover.indices:
        for b in cover.indices:
            theta[b, a] = {}
            for arr in component_arrows(GP, cover, a, b):
                p1, p2 = arr
                theta[b, a][arr] = Grp.mul(div[sections[b][P.proj[p1]], p1], div[p2, sections[a][P.proj[p2]]])
    T = LocalGeneralizedMorphism(GP, LocalTrivData(cover, Grp, mom, coc), theta)

    W = Cover((star,), [0], {0: [star]})
    ed = LocalTrivData(W, GP, {0: {star: x0}}, {(0, 0): {star: GP.unit[x0]}})
    E = LocalGeneralizedMorphism(Grp, ed, {(0, 0): {g: gauge_arrow(GP, p0, P.action[p0, Grp.inv[g]])
                                                    for g in Grp.arrows}})

    bU = birefine(cover, mom, W)
    phi_theta = {k: {x: gauge_arrow(GP, sections[k[0]][x], p0) for x in bU.fine.sets[k]} for k in bU.fine.indices}
    bV = birefine(W, ed.momenta, cover)
    phi_eta = {k: {star: div[p0, sections[k[1]][x0]]} for k in bV.fine.indices}
    return LocalMoritaEquivalence(T, E, phi_theta, phi_eta,
                                  meta={"bundle": P, "gauge": GP, "p0": p0, "sections": sections, "cover": cover})
