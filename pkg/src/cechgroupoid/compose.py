"""Composition of generalized morphisms, globally and on local data."""
from __future__ import annotations

from dataclasses import dataclass

from .bundle import PrincipalBundle, division_table
from .cech import Cover, LocalTrivData, Refinement, refine_data
from .errors import DomainError, InvalidError
from .genmor import GeneralizedMorphism, LocalGeneralizedMorphism, component_arrows, localize, validate_local_genmor
from .groupoid import fmt


def compose_global(P, Q):
    """P: F -> G then Q: G -> H.  Classes [p, q] with eps_P(p) = pi_Q(q) modulo
    (p, q) ~ (p.g, g^-1.q); the representative is the least pair."""
    if P.target != Q.source:
        raise DomainError("middle groupoids do not match")
    BP, BQ, G, H = P.bundle, Q.bundle, P.target, Q.target
    key = lambda pr: (BP.pos[pr[0]], BQ.pos[pr[1]])
    canon, members = {}, {}
    for p in BP.total:
        for q in BQ.fiber(BP.momentum[p]):
            if (p, q) in canon:
                continue
            orbit = [(BP.action[p, g], Q.left[G.inv[g], q]) for g in G.arrows_to(BP.momentum[p])]
            rep = min(orbit, key=key)
            members[rep] = sorted(set(orbit), key=key)
            for pr in orbit:
                canon[pr] = rep
    total = sorted(members, key=key)
    proj = {c: BP.proj[c[0]] for c in total}
    mom = {c: BQ.momentum[c[1]] for c in total}
    action = {(c, h): canon[c[0], BQ.action[c[1], h]] for c in total for h in H.arrows_to(mom[c])}
    left = {(f, c): canon[P.left[f, c[0]], c[1]] for c in total for f in P.source.arrows_from(proj[c])}
    B = PrincipalBundle(total, P.source.objects, proj, mom, H, action)
    return GeneralizedMorphism(P.source, B, left,
                               meta={"kind": "composite", "factors": (P, Q), "canon": canon, "members": members})


def check_composite_division(C):
    """phi([p1,q1],[p2,q2]) = phi_Q(q1, phi_P(p1,p2).q2) on every representative."""
    P, Q = C.meta["factors"]
    dP, dQ, dC = division_table(P.bundle), division_table(Q.bundle), division_table(C.bundle)
    members, out = C.meta["members"], []
    for (c1, c2), h in dC.items():
        for p1, q1 in members[c1]:
            for p2, q2 in members[c2]:
                if dQ.get((q1, Q.left[dP[p1, p2], q2])) != h:
                    out.append(f"composite division fails at ({fmt((p1, q1))},{fmt((p2, q2))})")
    return out


@dataclass(frozen=True)
class Birefinement:
    coarse: Cover
    momenta: dict
    middle: Cover
    fine: Cover

    @property
    def refinement(self):
        return Refinement(self.coarse, self.fine, {k: k[0] for k in self.fine.indices})

    def proj1(self, k):
        return k[0]

    def proj2(self, k):
        return k[1]


def birefine(U, momenta, V):
    """Fine sets U_(a,i) = {x in U_a : eps_a(x) in V_i}, nonempty ones, a then i."""
    idx, sets = [], {}
    for a in U.indices:
        for i in V.indices:
            s = [x for x in U.sets[a] if V.contains(i, momenta[a][x])]
            if s:
                idx.append((a, i))
                sets[a, i] = s
    fine = Cover(U.base, idx, sets)
    for x in U.base:
        if not fine.indices_at(x):
            raise InvalidError(f"birefinement does not cover {fmt(x)}")
    return Birefinement(U, momenta, V, fine)


def refine_local_genmor(L, b):
    F, V = L.source, b.fine
    data = refine_data(L.data, b.refinement)
    theta = {}
    for ai in V.indices:
        for bj in V.indices:
            theta[bj, ai] = {f: L.theta[bj[0], ai[0]][f] for f in component_arrows(F, V, ai, bj)}
    return LocalGeneralizedMorphism(F, data, theta)


def compose_local(T, E, check=True):
    """T: F -> G, E: G -> H on the birefinement of T's cover along E's cover."""
    if T.target != E.source:
        raise DomainError("middle groupoids do not match")
    b = birefine(T.cover, T.data.momenta, E.cover)
    Tb = refine_local_genmor(T, b)
    V, H = b.fine, E.target
    d, e = Tb.data, E.data
    mom = {k: {x: e.momenta[k[1]][d.momenta[k][x]] for x in V.sets[k]} for k in V.indices}
    coc = {}
    for (ai, bj), vals in d.cocycle.items():
        coc[ai, bj] = {x: E.theta[ai[1], bj[1]][g] for x, g in vals.items()}
    theta = {(bj, ai): {f: E.theta[bj[1], ai[1]][g] for f, g in vals.items()}
             for (bj, ai), vals in Tb.theta.items()}
    out = LocalGeneralizedMorphism(T.source, LocalTrivData(V, H, mom, coc), theta)
    if check:
        rep = validate_local_genmor(out)
        if rep:
            raise InvalidError("composite local data is invalid: " + rep[0], rep)
    return out


def composite_sections(C, b, sections1, sections2):
    """sigma_(a,i)(x) = [sigma1_a(x), sigma2_i(eps1_a(x))]."""
    P, Q = C.meta["factors"]
    canon = C.meta["canon"]
    out = {}
    for a, i in b.fine.indices:
        out[a, i] = {}
        for x in b.fine.sets[a, i]:
            p = sections1[a][x]
            out[a, i][x] = canon[p, sections2[i][P.bundle.momentum[p]]]
    return out


def check_local_global_compat(P, Q, U, sections1, V, sections2, C=None):
    """Exact comparison of localize(compose_global) with compose_local(localize, localize)."""
    TP = localize(P, U, sections1)
    TQ = localize(Q, V, sections2)
    C = C or compose_global(P, Q)
    CL = compose_local(TP, TQ)
    b = birefine(U, TP.data.momenta, V)
    sig = composite_sections(C, b, sections1, sections2)
    TC = localize(C, b.fine, sig)
    report = {"momenta": [], "transition": [], "local": []}
    for k in b.fine.indices:
        for x in b.fine.sets[k]:
            if TC.data.momenta[k][x] != CL.data.momenta[k][x]:
                report["momenta"].append(f"momentum differs at ({fmt(k)},{fmt(x)})")
    for key, vals in CL.data.cocycle.items():
        for x, h in vals.items():
            if TC.data.cocycle[key][x] != h:
                report["transition"].append(f"transition differs at ({fmt(key)},{fmt(x)})")
    for key, vals in CL.theta.items():
        for f, h in vals.items():
            if TC.theta[key][f] != h:
                report["local"].append(f"local morphism differs at ({fmt(key)},{fmt(f)})")
    report["ok"] = not (report["momenta"] or report["transition"] or report["local"])
    report["composite_local"] = CL
    report["localized_composite"] = TC
    return report
