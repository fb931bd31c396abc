"""Covers, local trivializing data and the nonabelian Cech 1-cocycles they form.

A LocalTrivData stores momenta eps[a][m] and transition arrows phi[(a, b)][m]
pointwise.  The gluing relation is (a, m, g) ~ (b, m, phi[(b, a)][m] * g) and
the canonical representative of a class uses the least index containing m.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .bundle import BundleMorphism, PrincipalBundle, division_table
from .errors import BudgetExceeded, DomainError, InvalidError, StructureError
from .groupoid import fmt, gauge_arrow, gauge_groupoid, group_as_groupoid

DEFAULT_BUDGET = 10 ** 7


class Cover:
    def __init__(self, base, indices, sets):
        self.base = tuple(base)
        self.indices = tuple(indices)
        order = {m: i for i, m in enumerate(self.base)}
        self.sets = {}
        for a in self.indices:
            s = set(sets[a])
            for m in s:
                if m not in order:
                    raise StructureError(f"cover set {fmt(a)} contains unknown point {fmt(m)}")
            self.sets[a] = tuple(sorted(s, key=order.__getitem__))
        self._at = {m: tuple(a for a in self.indices if m in set(self.sets[a])) for m in self.base}
        self._members = {a: frozenset(self.sets[a]) for a in self.indices}

    def contains(self, a, m):
        return m in self._members[a]

    def indices_at(self, m):
        return self._at[m]

    def first_index(self, m):
        return self._at[m][0]

    def overlap(self, *idx):
        return tuple(m for m in self.sets[idx[0]] if all(m in self._members[b] for b in idx[1:]))

    def __eq__(self, other):
        return (isinstance(other, Cover) and self.base == other.base
                and self.indices == other.indices and self.sets == other.sets)

    def __hash__(self):
        return hash((self.base, self.indices))

    def __repr__(self):
        return "Cover(" + ", ".join(f"{fmt(a)}:{len(self.sets[a])}" for a in self.indices) + ")"


def validate_cover(C):
    out = []
    for m in C.base:
        if not C.indices_at(m):
            out.append(f"point {fmt(m)} is not covered")
    return out


def whole_cover(base, index=0):
    return Cover(base, [index], {index: base})


@dataclass(frozen=True)
class Refinement:
    coarse: Cover
    fine: Cover
    map: dict


def validate_refinement(r):
    out = []
    if r.coarse.base != r.fine.base:
        out.append("covers have different bases")
    for j in r.fine.indices:
        a = r.map.get(j)
        if a not in r.coarse.sets:
            out.append(f"refinement map undefined at {fmt(j)}")
            continue
        for m in r.fine.sets[j]:
            if not r.coarse.contains(a, m):
                out.append(f"set {fmt(j)} not contained in {fmt(a)} at {fmt(m)}")
    return out


def compose_refinements(r2, r1):
    """r1: V -> U, r2: W -> V gives W -> U."""
    return Refinement(r1.coarse, r2.fine, {k: r1.map[r2.map[k]] for k in r2.fine.indices})


class LocalTrivData:
    def __init__(self, cover, structure, momenta, cocycle):
        self.cover = cover
        self.structure = structure
        self.momenta = {a: dict(momenta[a]) for a in cover.indices}
        self.cocycle = {k: dict(v) for k, v in cocycle.items()}

    def eps(self, a, m):
        return self.momenta[a][m]

    def phi(self, a, b, m):
        return self.cocycle[a, b][m]

    def point_data(self, m):
        idx = self.cover.indices_at(m)
        return (tuple(self.momenta[a][m] for a in idx),
                tuple(self.cocycle[a, b][m] for a in idx for b in idx))

    def __eq__(self, other):
        return (isinstance(other, LocalTrivData) and self.cover == other.cover
                and self.structure == other.structure and self.momenta == other.momenta
                and self.cocycle == other.cocycle)

    __hash__ = None

    def __repr__(self):
        return f"LocalTrivData({self.cover!r})"


def _structural(d):
    C, G = d.cover, d.structure
    for a in C.indices:
        if a not in d.momenta or set(d.momenta[a]) != set(C.sets[a]):
            raise StructureError(f"momenta for {fmt(a)} not defined exactly on its set")
        for m, x in d.momenta[a].items():
            if x not in G.opos:
                raise StructureError(f"momentum at ({fmt(a)},{fmt(m)}) is unknown object {fmt(x)}")
    for a in C.indices:
        for b in C.indices:
            ov = C.overlap(a, b)
            if not ov:
                if (a, b) in d.cocycle and d.cocycle[a, b]:
                    raise StructureError(f"cocycle given on empty overlap ({fmt(a)},{fmt(b)})")
                continue
            if (a, b) not in d.cocycle or set(d.cocycle[a, b]) != set(ov):
                raise StructureError(f"cocycle ({fmt(a)},{fmt(b)}) not defined exactly on the overlap")
            for m, g in d.cocycle[a, b].items():
                if g not in G.apos:
                    raise StructureError(f"cocycle value at ({fmt(a)},{fmt(b)},{fmt(m)}) is unknown arrow {fmt(g)}")
    for k in d.cocycle:
        if k[0] not in C.sets or k[1] not in C.sets:
            raise StructureError(f"cocycle key {fmt(k)} uses an unknown index")


def validate_trivdata(d):
    _structural(d)
    C, G, out = d.cover, d.structure, []
    out += validate_cover(C)
    for (a, b), vals in d.cocycle.items():
        for m, g in vals.items():
            if G.tgt[g] != d.momenta[a][m] or G.src[g] != d.momenta[b][m]:
                out.append(f"momentum condition fails at ({fmt(a)},{fmt(b)},{fmt(m)})")
            if a == b and g != G.unit[d.momenta[a][m]]:
                out.append(f"diagonal condition fails at ({fmt(a)},{fmt(a)},{fmt(m)})")
    for m in C.base:
        idx = C.indices_at(m)
        for a, b, c in itertools.product(idx, repeat=3):
            ab, bc, ac = d.cocycle[a, b][m], d.cocycle[b, c][m], d.cocycle[a, c][m]
            if G.comp.get((ab, bc)) != ac:
                out.append(f"cocycle condition fails at ({fmt(a)},{fmt(b)},{fmt(c)},{fmt(m)})")
    return out


def _require(d):
    rep = validate_trivdata(d)
    if rep:
        raise InvalidError("invalid local trivializing data: " + rep[0], rep)


# -- gluing and extraction --------------------------------------------------

def glue_canon(d, a, m, g):
    a0 = d.cover.first_index(m)
    return (a0, m, d.structure.mul(d.cocycle[a0, a][m], g))


def glue_bundle(d):
    _require(d)
    G, C = d.structure, d.cover
    total = []
    for m in C.base:
        a0 = C.first_index(m)
        total += [(a0, m, g) for g in G.arrows_to(d.momenta[a0][m])]
    proj = {e: e[1] for e in total}
    mom = {e: G.src[e[2]] for e in total}
    action = {(e, h): (e[0], e[1], G.comp[e[2], h]) for e in total for h in G.arrows_to(G.src[e[2]])}
    return PrincipalBundle(total, C.base, proj, mom, G, action, meta={"kind": "glued", "data": d})


def canonical_sections(d):
    G = d.structure
    return {a: {m: glue_canon(d, a, m, G.unit[d.momenta[a][m]]) for m in d.cover.sets[a]}
            for a in d.cover.indices}


def check_sections(P, cover, sections):
    for a in cover.indices:
        for m in cover.sets[a]:
            p = sections.get(a, {}).get(m)
            if p is None or p not in P.pos:
                raise DomainError(f"section {fmt(a)} undefined at {fmt(m)}")
            if P.proj[p] != m:
                raise DomainError(f"section {fmt(a)} is not a section at {fmt(m)}")


def first_sections(P, cover):
    """sigma_a(m) = first element of the fiber over m, for every index."""
    return {a: {m: P.fiber(m)[0] for m in cover.sets[a]} for a in cover.indices}


def extract_trivdata(P, cover, sections=None):
    if sections is None:
        sections = first_sections(P, cover)
    check_sections(P, cover, sections)
    div = division_table(P)
    mom = {a: {m: P.momentum[sections[a][m]] for m in cover.sets[a]} for a in cover.indices}
    coc = {}
    for a in cover.indices:
        for b in cover.indices:
            ov = cover.overlap(a, b)
            if ov:
                coc[a, b] = {m: div[sections[a][m], sections[b][m]] for m in ov}
    return LocalTrivData(cover, P.structure, mom, coc)


# -- coboundaries -----------------------------------------------------------

class LocalMorphismData:
    """sigma[a][m]: arrow from eps1_a(m) to eps2_a(m)."""

    def __init__(self, source, target, sigma):
        self.source = source
        self.target = target
        self.sigma = {a: dict(v) for a, v in sigma.items()}


def validate_local_morphism(S):
    d1, d2, G, out = S.source, S.target, S.source.structure, []
    if d1.cover != d2.cover or d1.structure != d2.structure:
        return ["source and target use different covers or structure groupoids"]
    C = d1.cover
    for a in C.indices:
        for m in C.sets[a]:
            g = S.sigma.get(a, {}).get(m)
            if g is None or g not in G.apos:
                raise StructureError(f"sigma undefined at ({fmt(a)},{fmt(m)})")
            if G.src[g] != d1.momenta[a][m] or G.tgt[g] != d2.momenta[a][m]:
                out.append(f"momentum condition fails at ({fmt(a)},{fmt(m)})")
    for (a, b), vals in d1.cocycle.items():
        for m in vals:
            try:
                want = G.mul(G.mul(d2.cocycle[b, a][m], S.sigma[a][m]), d1.cocycle[a, b][m])
            except DomainError:
                want = None
            if want != S.sigma[b][m]:
                out.append(f"coboundary relation fails at ({fmt(a)},{fmt(b)},{fmt(m)})")
    return out


def apply_coboundary(sigma, d):
    """(sigma.phi)_ab = sigma_a phi_ab sigma_b^-1, momenta t(sigma_a)."""
    G, C = d.structure, d.cover
    for a in C.indices:
        for m in C.sets[a]:
            if G.src[sigma[a][m]] != d.momenta[a][m]:
                raise DomainError(f"cochain source mismatch at ({fmt(a)},{fmt(m)})")
    mom = {a: {m: G.tgt[sigma[a][m]] for m in C.sets[a]} for a in C.indices}
    coc = {(a, b): {m: G.mul(G.mul(sigma[a][m], g), G.inv[sigma[b][m]]) for m, g in vals.items()}
           for (a, b), vals in d.cocycle.items()}
    return LocalTrivData(C, G, mom, coc)


def _point_sigma(G, idx, e1, F1, e2, F2):
    """First family sigma_a (a in idx) at one point relating (e1,F1) to (e2,F2), or None.
    F1, F2 map (a, b) -> arrow."""
    a0 = idx[0]
    for s0 in G.hom(e2[a0], e1[a0]):
        sig = {a0: s0}
        for b in idx[1:]:
            sig[b] = G.comp.get((G.comp.get((F2[b, a0], s0)), F1[a0, b]))
        ok = True
        for a in idx:
            g = sig[a]
            if g is None or G.src[g] != e1[a] or G.tgt[g] != e2[a]:
                ok = False
                break
        if ok:
            for a in idx:
                for b in idx:
                    if G.comp.get((G.comp[F2[b, a], sig[a]], F1[a, b])) != sig[b]:
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            return sig
    return None


def are_cohomologous(d1, d2):
    if d1.cover != d2.cover or d1.structure != d2.structure:
        raise DomainError("cohomology is only compared on a common cover and structure groupoid")
    C, G = d1.cover, d1.structure
    sigma = {a: {} for a in C.indices}
    for m in C.base:
        idx = C.indices_at(m)
        e1 = {a: d1.momenta[a][m] for a in idx}
        e2 = {a: d2.momenta[a][m] for a in idx}
        F1 = {(a, b): d1.cocycle[a, b][m] for a in idx for b in idx}
        F2 = {(a, b): d2.cocycle[a, b][m] for a in idx for b in idx}
        sig = _point_sigma(G, idx, e1, F1, e2, F2)
        if sig is None:
            return None
        for a, g in sig.items():
            sigma[a][m] = g
    return LocalMorphismData(d1, d2, sigma)


def build_bundle_morphism(S, P=None, Q=None):
    """[a, x, g] -> [a, x, sigma_a(x) g] between the glued bundles."""
    P = P or glue_bundle(S.source)
    Q = Q or glue_bundle(S.target)
    G = S.source.structure
    tau = {}
    for e in P.total:
        a, m, g = e
        tau[e] = glue_canon(S.target, a, m, G.mul(S.sigma[a][m], g))
    return BundleMorphism(P, Q, tau)


# -- refinement -------------------------------------------------------------

def refine_data(d, r):
    rep = validate_refinement(r)
    if rep:
        raise InvalidError("invalid refinement: " + rep[0], rep)
    if r.coarse != d.cover:
        raise DomainError("refinement does not start at the data's cover")
    V, f = r.fine, r.map
    mom = {j: {m: d.momenta[f[j]][m] for m in V.sets[j]} for j in V.indices}
    coc = {}
    for j in V.indices:
        for k in V.indices:
            ov = V.overlap(j, k)
            if ov:
                coc[j, k] = {m: d.cocycle[f[j], f[k]][m] for m in ov}
    return LocalTrivData(V, d.structure, mom, coc)


def refinement_independence_witness(d, rf, rg):
    """Sigma(f, g)_j = phi_{f(j) g(j)}, a coboundary from g*d to f*d."""
    if rf.fine != rg.fine:
        raise DomainError("refinement maps must share the fine cover")
    V = rf.fine
    sigma = {j: {m: d.cocycle[rf.map[j], rg.map[j]][m] for m in V.sets[j]} for j in V.indices}
    return LocalMorphismData(refine_data(d, rg), refine_data(d, rf), sigma)


# -- cohomology at a cover --------------------------------------------------

def _point_choices(G, idx):
    """Every valid (eps, phi) at a point with index list idx, in lexicographic order."""
    a0, rest = idx[0], idx[1:]
    for x in G.objects:
        for arrows in itertools.product(G.arrows_to(x), repeat=len(rest)):
            row = dict(zip(rest, arrows))
            row[a0] = G.unit[x]
            eps = {a: G.src[row[a]] for a in idx}
            F = {}
            for a in idx:
                for b in idx:
                    F[a, b] = G.mul(G.inv[row[a]], row[b])
            yield eps, F


def _point_count(G, k):
    return sum(len(G.arrows_to(x)) ** (k - 1) for x in G.objects)


def h1_size(cover, G):
    n = 1
    for m in cover.base:
        n *= _point_count(G, len(cover.indices_at(m)))
    return n


def h1_at_cover(base, cover, G, budget=None):
    """Class representatives of all valid data on the cover, least member first."""
    budget = DEFAULT_BUDGET if budget is None else budget
    if tuple(base) != cover.base:
        raise DomainError("cover is not a cover of the given base")
    size = h1_size(cover, G)
    if size > budget:
        raise BudgetExceeded(f"enumeration size {size} exceeds budget {budget}")
    per_point = []
    work = 0
    for m in cover.base:
        idx = cover.indices_at(m)
        choices = list(_point_choices(G, idx))
        reps = []
        for i, (e, F) in enumerate(choices):
            for j in reps:
                work += 1
                if work > budget:
                    raise BudgetExceeded(f"pointwise comparison exceeds budget {budget}")
                ej, Fj = choices[j]
                if _point_sigma(G, idx, ej, Fj, e, F) is not None:
                    break
            else:
                reps.append(i)
        per_point.append((m, idx, [choices[i] for i in reps]))
    return list(_assemble(cover, G, per_point))


def _assemble(cover, G, per_point):
    for combo in itertools.product(*[r for _, _, r in per_point]):
        mom = {a: {} for a in cover.indices}
        coc = {}
        for (m, idx, _), (e, F) in zip(per_point, combo):
            for a in idx:
                mom[a][m] = e[a]
            for (a, b), g in F.items():
                coc.setdefault((a, b), {})[m] = g
        yield LocalTrivData(cover, G, mom, coc)


def enumerate_trivdata(cover, G, budget=None):
    """Every valid datum on the cover, lexicographic in the points."""
    budget = DEFAULT_BUDGET if budget is None else budget
    size = h1_size(cover, G)
    if size > budget:
        raise BudgetExceeded(f"enumeration size {size} exceeds budget {budget}")
    per_point = [(m, cover.indices_at(m), list(_point_choices(G, cover.indices_at(m)))) for m in cover.base]
    return _assemble(cover, G, per_point)


# -- the classification examples --------------------------------------------

def classify_group_data(d):
    G = d.structure
    out = {"momenta_trivial": True, "classical_cocycle": True, "violations": []}
    if not G.is_group:
        raise DomainError("structure groupoid is not a group")
    grp = G.meta.get("group")
    mul = grp.mul if grp else G.mul
    star = G.objects[0]
    for a, vals in d.momenta.items():
        for m, x in vals.items():
            if x != star:
                out["momenta_trivial"] = False
                out["violations"].append(f"momentum at ({fmt(a)},{fmt(m)})")
    C = d.cover
    for m in C.base:
        idx = C.indices_at(m)
        for a, b, c in itertools.product(idx, repeat=3):
            if mul(d.cocycle[a, b][m], d.cocycle[b, c][m]) != d.cocycle[a, c][m]:
                out["classical_cocycle"] = False
                out["violations"].append(f"cocycle at ({fmt(a)},{fmt(b)},{fmt(c)},{fmt(m)})")
    out["ordinary"] = out["momenta_trivial"] and out["classical_cocycle"]
    return out


@dataclass
class ActionSplit:
    group_data: LocalTrivData
    section: dict
    report: list = field(default_factory=list)


def classify_action_data(d):
    """Split data over an action groupoid into a group cocycle and a family eps_a in X."""
    G = d.structure
    if G.meta.get("kind") != "action":
        raise DomainError("structure groupoid is not an action groupoid")
    grp, act = G.meta["group"], G.meta["act"]
    report = []
    gcoc = {}
    for (a, b), vals in d.cocycle.items():
        gcoc[a, b] = {}
        for m, (g, x) in vals.items():
            if x != d.momenta[b][m]:
                report.append(f"space component differs from eps at ({fmt(a)},{fmt(b)},{fmt(m)})")
            if act[g, d.momenta[b][m]] != d.momenta[a][m]:
                report.append(f"eps_a != phi_ab eps_b at ({fmt(a)},{fmt(b)},{fmt(m)})")
            gcoc[a, b][m] = g
    if report:
        raise InvalidError("not action-groupoid data: " + report[0], report)
    GG = group_as_groupoid(grp)
    star = GG.objects[0]
    gmom = {a: {m: star for m in d.cover.sets[a]} for a in d.cover.indices}
    gd = LocalTrivData(d.cover, GG, gmom, gcoc)
    return ActionSplit(gd, {a: dict(v) for a, v in d.momenta.items()}, validate_trivdata(gd))


class AssociatedBundle:
    """P x_G X: classes of (p, x) under (p, x).g = (p.g, g^-1 x)."""

    def __init__(self, P, X, act):
        G = P.structure
        if not G.is_group:
            raise DomainError("associated bundles need a group")
        self.P, self.X, self.act = P, tuple(X), act
        self.group = G
        self.first = {m: P.fiber(m)[0] for m in P.base}
        self.elements = tuple((self.first[m], x) for m in P.base for x in self.X)
        self.proj = {e: P.proj[e[0]] for e in self.elements}

    def canon(self, p, x):
        p0 = self.first[self.P.proj[p]]
        return (p0, self.act[division_table(self.P)[p0, p], x])

    def section_from_momenta(self, d, eps):
        """Glue [sigma_a(m), eps_a(m)] with sigma_a the canonical sections of d."""
        sec, report = {}, []
        sig = canonical_sections(d)
        for a in d.cover.indices:
            for m in d.cover.sets[a]:
                v = self.canon(sig[a][m], eps[a][m])
                if sec.setdefault(m, v) != v:
                    report.append(f"section not well defined at {fmt(m)}")
        return sec, report


def associated_bundle(d, X, act):
    P = glue_bundle(d)
    return AssociatedBundle(P, X, act)


# -- the gauge groupoid cocycles --------------------------------------------

def transition_gauge(P, cover, sections):
    """tau_ba(p) = sigma_b(pi p) phi(sigma_a(pi p), p) on pi^-1(U_ab)."""
    div = division_table(P)
    tau = {}
    for a in cover.indices:
        for b in cover.indices:
            ov = cover.overlap(a, b)
            if ov:
                tau[b, a] = {p: P.action[sections[b][m], div[sections[a][m], p]]
                             for m in ov for p in P.fiber(m)}
    return tau


def identity_gauge(P, cover):
    return {(b, a): {p: p for m in cover.overlap(a, b) for p in P.fiber(m)}
            for a in cover.indices for b in cover.indices if cover.overlap(a, b)}


def check_gauge_family(P, cover, tau):
    out = []
    G = P.structure
    for (b, a), t in tau.items():
        for p, q in t.items():
            if P.proj[q] != P.proj[p]:
                out.append(f"tau_{fmt(b)}{fmt(a)} moves {fmt(p)} off its fiber")
            for g in G.arrows_to(P.momentum[p]):
                if t.get(P.action[p, g]) != P.action.get((q, g)):
                    out.append(f"tau_{fmt(b)}{fmt(a)} not equivariant at ({fmt(p)},{fmt(g)})")
    for a, b, c in itertools.product(cover.indices, repeat=3):
        for m in cover.overlap(a, b, c):
            for p in P.fiber(m):
                if tau[c, b][tau[b, a][p]] != tau[c, a][p]:
                    out.append(f"tau cocycle fails at ({fmt(a)},{fmt(b)},{fmt(c)},{fmt(p)})")
    return out


def gauge_cocycles(P, cover, sections, tau, GP=None):
    """phi_ab(x) = [sigma_a(x), tau_ba(sigma_a(x))] over the gauge groupoid."""
    rep = check_gauge_family(P, cover, tau)
    if rep:
        raise InvalidError("local gauge family fails: " + rep[0], rep)
    GP = GP or gauge_groupoid(P)
    mom = {a: {x: x for x in cover.sets[a]} for a in cover.indices}
    coc = {}
    for a in cover.indices:
        for b in cover.indices:
            ov = cover.overlap(a, b)
            if ov:
                coc[a, b] = {x: gauge_arrow(GP, sections[a][x], tau[b, a][sections[a][x]]) for x in ov}
    return LocalTrivData(cover, GP, mom, coc)


def product_space_bundle(P, GP=None):
    """X x P over X with momentum pi o pr2 and (x, p).[p1, p2] = (x, p2 phi(p1, p))."""
    GP = GP or gauge_groupoid(P)
    div = division_table(P)
    total = [(x, p) for x in P.base for p in P.total]
    action = {}
    for x, p in total:
        for g in GP.arrows_to(P.proj[p]):
            p1, p2 = g
            action[(x, p), g] = (x, P.action[p2, div[p1, p]])
    return PrincipalBundle(total, P.base, {e: e[0] for e in total},
                           {e: P.proj[e[1]] for e in total}, GP, action)
