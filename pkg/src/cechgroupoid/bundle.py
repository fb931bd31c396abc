"""Principal bundles with a finite structure groupoid acting on the right."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .errors import DomainError, InvalidError, StructureError
from .groupoid import GroupoidAction, fmt, product_groupoid


class PrincipalBundle:
    """Total space P over base M with projection pi, momentum eps: P -> objects(G)
    and a right action p.g, defined when eps(p) == tgt(g)."""

    def __init__(self, total, base, proj, momentum, structure, action, meta=None):
        self.total = tuple(total)
        self.base = tuple(base)
        self.proj = dict(proj)
        self.momentum = dict(momentum)
        self.structure = structure
        self.action = dict(action)
        self.meta = dict(meta or {})
        self.pos = {p: i for i, p in enumerate(self.total)}
        self.fibers = defaultdict(list)
        for p in self.total:
            self.fibers[self.proj.get(p)].append(p)
        self._div = None

    def act(self, p, g):
        try:
            return self.action[p, g]
        except KeyError:
            raise DomainError(f"action undefined at ({fmt(p)},{fmt(g)})") from None

    def fiber(self, m):
        return self.fibers.get(m, [])

    def as_action(self):
        return GroupoidAction(self.structure, self.total, self.momentum, "right", self.action)

    def __repr__(self):
        return f"PrincipalBundle({len(self.total)} over {len(self.base)})"


def _structural(P):
    G = P.structure
    tot, base = set(P.total), set(P.base)
    if len(tot) != len(P.total) or len(base) != len(P.base):
        raise StructureError("duplicate identifiers in bundle")
    for p in P.total:
        if P.proj.get(p) not in base:
            raise StructureError(f"projection undefined or unknown at {fmt(p)}")
        if P.momentum.get(p) not in G.opos:
            raise StructureError(f"momentum undefined or unknown at {fmt(p)}")
    for (p, g), q in P.action.items():
        for z, ok in ((p, p in tot), (g, g in G.apos), (q, q in tot)):
            if not ok:
                raise StructureError(f"action: unknown identifier {fmt(z)}")
    if not P.base and P.total:
        raise StructureError("nonempty total space over an empty base")


def validate_bundle(P):
    _structural(P)
    G, out = P.structure, []
    for m in P.base:
        if not P.fiber(m):
            out.append(f"projection not surjective at {fmt(m)}")
    eps, pi = P.momentum, P.proj
    for p in P.total:
        for g in G.arrows_to(eps[p]):
            q = P.action.get((p, g))
            if q is None:
                out.append(f"action undefined at ({fmt(p)},{fmt(g)})")
                continue
            if eps[q] != G.src[g]:
                out.append(f"momentum fails at ({fmt(p)},{fmt(g)})")
            if pi[q] != pi[p]:
                out.append(f"projection not invariant at ({fmt(p)},{fmt(g)})")
        if P.action.get((p, G.unit[eps[p]])) != p:
            out.append(f"unit acts nontrivially at {fmt(p)}")
    for (p, g) in P.action:
        if G.tgt[g] != eps[p]:
            out.append(f"action defined off its domain at ({fmt(p)},{fmt(g)})")
    for p in P.total:
        for g1 in G.arrows_to(eps[p]):
            q = P.action.get((p, g1))
            if q is None:
                continue
            for g2 in G.arrows_to(G.src[g1]):
                if P.action.get((q, g2)) != P.action.get((p, G.comp[g1, g2])):
                    out.append(f"associativity fails at ({fmt(p)},{fmt(g1)},{fmt(g2)})")
    for p in P.total:
        seen = {}
        for g in G.arrows_to(eps[p]):
            q = P.action.get((p, g))
            if q is None:
                continue
            if q in seen:
                out.append(f"freeness fails at {fmt(p)} ({fmt(seen[q])} and {fmt(g)})")
            else:
                seen[q] = g
        for q in P.fiber(pi[p]):
            if q not in seen:
                out.append(f"transitivity fails at ({fmt(p)},{fmt(q)})")
    return out


def division_table(P):
    """phi(p, q) for every fiberwise pair: the arrow with q = p.phi(p, q)."""
    if P._div is None:
        G, table = P.structure, {}
        for p in P.total:
            for g in G.arrows_to(P.momentum[p]):
                q = P.action.get((p, g))
                if q is None:
                    continue
                if (p, q) in table:
                    raise InvalidError(f"division not unique at ({fmt(p)},{fmt(q)})")
                table[p, q] = g
            for q in P.fiber(P.proj[p]):
                if (p, q) not in table:
                    raise InvalidError(f"division has no solution at ({fmt(p)},{fmt(q)})")
        P._div = table
    return P._div


def division(P, p, q):
    if P.proj[p] != P.proj[q]:
        raise DomainError(f"{fmt(p)} and {fmt(q)} lie in different fibers")
    return division_table(P)[p, q]


def check_division_laws(P):
    """Properties i)-iii) of the division map together with q = p.phi(p, q)."""
    G, div, out = P.structure, division_table(P), []
    for (p, q), g in div.items():
        if P.action.get((p, g)) != q:
            out.append(f"defining relation fails at ({fmt(p)},{fmt(q)})")
        if G.tgt[g] != P.momentum[p] or G.src[g] != P.momentum[q]:
            out.append(f"endpoints fail at ({fmt(p)},{fmt(q)})")
        if G.inv[g] != div[q, p]:
            out.append(f"inversion fails at ({fmt(p)},{fmt(q)})")
    for p in P.total:
        if div[p, p] != G.unit[P.momentum[p]]:
            out.append(f"diagonal fails at {fmt(p)}")
    return out


def check_division_equivariance(P):
    """phi(p.g1, q.g2) == g1^-1 phi(p, q) g2, exhaustively."""
    G, div, out = P.structure, division_table(P), []
    for (p, q), g in div.items():
        for g1 in G.arrows_to(P.momentum[p]):
            pg1 = P.action[p, g1]
            left = G.mul(G.inv[g1], g)
            for g2 in G.arrows_to(P.momentum[q]):
                if div.get((pg1, P.action[q, g2])) != G.mul(left, g2):
                    out.append(f"equivariance fails at ({fmt(p)},{fmt(q)},{fmt(g1)},{fmt(g2)})")
    return out


def unit_bundle(G):
    action = {(h, g): G.comp[h, g] for h in G.arrows for g in G.arrows_to(G.src[h])}
    return PrincipalBundle(G.arrows, G.objects, dict(G.tgt), dict(G.src), G, action,
                           meta={"kind": "unit"})


def pullback_bundle(P, f, M=None):
    """f*P over M for f: M -> base(P); elements (m, p) with f(m) = pi(p)."""
    M = tuple(f) if M is None else tuple(M)
    total = [(m, p) for m in M for p in P.fiber(f[m])]
    proj = {e: e[0] for e in total}
    mom = {e: P.momentum[e[1]] for e in total}
    G = P.structure
    action = {((m, p), g): (m, P.action[p, g]) for m, p in total for g in G.arrows_to(P.momentum[p])}
    return PrincipalBundle(total, M, proj, mom, G, action, meta={"kind": "pullback"})


def trivial_bundle(G, alpha, M=None):
    """alpha*U_G: pairs (m, g) with alpha(m) = tgt(g)."""
    B = pullback_bundle(unit_bundle(G), alpha, M)
    B.meta["kind"] = "trivial"
    return B


def fibred_product(P, Q):
    if set(P.base) != set(Q.base):
        raise DomainError("fibred product needs a common base")
    G2 = product_groupoid(P.structure, Q.structure)
    total = [(p, q) for m in P.base for p in P.fiber(m) for q in Q.fiber(m)]
    proj = {e: P.proj[e[0]] for e in total}
    mom = {e: (P.momentum[e[0]], Q.momentum[e[1]]) for e in total}
    action = {}
    for p, q in total:
        for g in P.structure.arrows_to(P.momentum[p]):
            for h in Q.structure.arrows_to(Q.momentum[q]):
                action[(p, q), (g, h)] = (P.action[p, g], Q.action[q, h])
    return PrincipalBundle(total, P.base, proj, mom, G2, action, meta={"kind": "fibred"})


@dataclass(frozen=True)
class BundleMorphism:
    source: PrincipalBundle
    target: PrincipalBundle
    mapping: dict

    def __call__(self, p):
        return self.mapping[p]


def validate_bundle_morphism(F):
    P, Q, tau = F.source, F.target, F.mapping
    out = []
    if set(P.base) != set(Q.base):
        out.append("bases differ")
    if P.structure != Q.structure:
        out.append("structure groupoids differ")
    if out:
        return out
    for p in P.total:
        if tau.get(p) not in Q.pos:
            raise StructureError(f"morphism undefined or unknown at {fmt(p)}")
    for p in P.total:
        q = tau[p]
        if Q.proj[q] != P.proj[p]:
            out.append(f"not fiber-preserving at {fmt(p)}")
        if Q.momentum[q] != P.momentum[p]:
            out.append(f"not momentum-preserving at {fmt(p)}")
        for g in P.structure.arrows_to(P.momentum[p]):
            if Q.action.get((q, g)) != tau[P.action[p, g]]:
                out.append(f"not equivariant at ({fmt(p)},{fmt(g)})")
    if len(set(tau.values())) != len(Q.total) or len(P.total) != len(Q.total):
        out.append("not bijective")
    return out


def compose_bundle_morphisms(F2, F1):
    return BundleMorphism(F1.source, F2.target, {p: F2.mapping[F1.mapping[p]] for p in F1.source.total})


def find_isomorphism(P, Q):
    """First isomorphism P -> Q in the order of candidate images, or None."""
    if set(P.base) != set(Q.base) or P.structure != Q.structure:
        return None
    if len(P.total) != len(Q.total):
        return None
    div = division_table(P)
    tau = {}
    for m in P.base:
        fib = P.fiber(m)
        if not fib:
            continue
        p0 = fib[0]
        for q0 in Q.fiber(m):
            if Q.momentum[q0] != P.momentum[p0]:
                continue
            cand = {}
            for p in fib:
                q = Q.action.get((q0, div[p0, p]))
                if q is None:
                    break
                cand[p] = q
            else:
                if len(set(cand.values())) == len(Q.fiber(m)) == len(fib):
                    tau.update(cand)
                    break
        else:
            return None
    F = BundleMorphism(P, Q, tau)
    if validate_bundle_morphism(F):
        return None
    return F
