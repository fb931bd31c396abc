"""The nerve of a finite groupoid, induced covers and descent.

An n-simplex is a composable tuple (g1, ..., gn) with src(g_i) == tgt(g_{i+1}).
Its vertices are x_0 = src(g_n), x_1 = tgt(g_n), ..., x_n = tgt(g_1); face k
drops x_k.  In degree 2 the faces 0, 1, 2 are pr1, mu and pr2.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from networkx.utils import UnionFind

from .bundle import PrincipalBundle, find_isomorphism, pullback_bundle, validate_bundle
from .cech import (DEFAULT_BUDGET, Cover, LocalTrivData, Refinement, enumerate_trivdata, glue_bundle, glue_canon,
                   h1_at_cover, refine_data, whole_cover)
from .errors import BudgetExceeded, DomainError
from .genmor import GeneralizedMorphism, LocalGeneralizedMorphism, find_equivalence, globalize, validate_genmor
from .groupoid import build_groupoid, fmt, functors, group_as_groupoid

MAX_DEGREE = 3


def vertices(G, z):
    if not isinstance(z, tuple) or not z:
        return (z,)
    path = z[::-1]
    return (G.src[path[0]],) + tuple(G.tgt[a] for a in path)


def face(G, z, k):
    n = len(z)
    if n == 1:
        return G.tgt[z[0]] if k == 0 else G.src[z[0]]
    path = list(z[::-1])
    if k == 0:
        path = path[1:]
    elif k == n:
        path = path[:-1]
    else:
        path = path[:k - 1] + [G.mul(path[k], path[k - 1])] + path[k + 1:]
    return tuple(path[::-1])


@dataclass(frozen=True)
class NerveLevel:
    groupoid: object
    degree: int
    tuples: tuple

    def face_maps(self):
        if self.degree == 0:
            return []
        return [{z: face(self.groupoid, z, k) for z in self.tuples} for k in range(self.degree + 1)]


def nerve(G, n, cap=MAX_DEGREE):
    if n > cap:
        raise DomainError(f"nerve degree {n} exceeds the cap {cap}")
    if n == 0:
        return NerveLevel(G, 0, G.objects)
    level = [(g,) for g in G.arrows]
    for _ in range(n - 1):
        level = [z + (g,) for z in level for g in G.arrows_to(G.src[z[-1]])]
    return NerveLevel(G, n, tuple(level))


def face_identity_failures(G):
    """t pr1 = t mu, s pr2 = s mu, t pr2 = s pr1 on every composable pair."""
    out = []
    for z in nerve(G, 2).tuples:
        p1, m, p2 = (face(G, z, k)[0] for k in range(3))
        if G.tgt[p1] != G.tgt[m]:
            out.append(f"t pr1 != t mu at {fmt(z)}")
        if G.src[p2] != G.src[m]:
            out.append(f"s pr2 != s mu at {fmt(z)}")
        if G.tgt[p2] != G.src[p1]:
            out.append(f"t pr2 != s pr1 at {fmt(z)}")
    return out


def simplicial_identity_failures(G, n):
    """d_i d_j = d_{j-1} d_i for i < j on degree n."""
    out = []
    for z in nerve(G, n).tuples:
        for j in range(n + 1):
            for i in range(j):
                a, b = face(G, z, j), face(G, z, i)
                lhs = face(G, a, i) if isinstance(a, tuple) else None
                rhs = face(G, b, j - 1) if isinstance(b, tuple) else None
                if n > 1 and lhs != rhs:
                    out.append(f"simplicial identity d{i}d{j} fails at {fmt(z)}")
    return out


def simplicial_cover(G, U, n):
    """Sets U_(a_1..a_{n+1}) of n-simplices whose k-th vertex lies in U_{a_{k+1}}."""
    level = nerve(G, n).tuples
    idx = list(itertools.product(U.indices, repeat=n + 1))
    sets = {I: [z for z in level if all(U.contains(a, x) for a, x in zip(I, vertices(G, z)))]
            for I in idx}
    return Cover(level, idx, sets)


def source_cover(G, U):
    level = nerve(G, 1).tuples
    return Cover(level, U.indices, {a: [z for z in level if U.contains(a, G.src[z[0]])] for a in U.indices})


def target_cover(G, U):
    level = nerve(G, 1).tuples
    return Cover(level, U.indices, {a: [z for z in level if U.contains(a, G.tgt[z[0]])] for a in U.indices})


def common_refinement_failures(G, U, n):
    """U^n refines each face pull-back of U^(n-1) by dropping index position k+1."""
    Un = simplicial_cover(G, U, n)
    lower = simplicial_cover(G, U, n - 1) if n > 1 else None
    out = []
    for I in Un.indices:
        for k in range(n + 1):
            J = I[:k] + I[k + 1:]
            for z in Un.sets[I]:
                y = face(G, z, k)
                ok = U.contains(J[0], y) if n == 1 else lower.contains(J, y)
                if not ok:
                    out.append(f"face {k} of {fmt(z)} leaves set {fmt(J)}")
    return out


# -- pull-backs -------------------------------------------------------------

def pullback_along(d, f, cover, index_map):
    """Data on `cover` with eps_j(z) = eps_{i(j)}(f z) and phi_jk(z) = phi_{i(j) i(k)}(f z)."""
    mom = {j: {z: d.momenta[index_map(j)][f(z)] for z in cover.sets[j]} for j in cover.indices}
    coc = {}
    for j in cover.indices:
        for k in cover.indices:
            ov = cover.overlap(j, k)
            if ov:
                coc[j, k] = {z: d.cocycle[index_map(j), index_map(k)][f(z)] for z in ov}
    return LocalTrivData(cover, d.structure, mom, coc)


def pullback_cocycle(d, m, domain):
    """Pull d back along m: domain -> base(d) onto the cover m^-1(U_a)."""
    C = Cover(domain, d.cover.indices, {a: [z for z in domain if d.cover.contains(a, m[z])]
                                        for a in d.cover.indices})
    return pullback_along(d, m.__getitem__, C, lambda a: a)


def pull_cochain(sig, f, cover, index_map):
    return {j: {z: sig[index_map(j)][f(z)] for z in cover.sets[j]} for j in cover.indices}


def theta_cochain(L, C1):
    """Theta as a 0-cochain on the source-target cover: index (a, b) holds theta_ba."""
    return {I: {z: L.theta[I[1], I[0]][z[0]] for z in C1.sets[I]} for I in C1.indices}


def _coboundary_failures(sig, d1, d2, tag):
    """sig . d1 == d2 with witnesses; endpoint problems listed separately."""
    H = d1.structure
    moms, cocs = [], []
    for j in d1.cover.indices:
        for z in d1.cover.sets[j]:
            h = sig[j][z]
            if H.src[h] != d1.momenta[j][z] or H.tgt[h] != d2.momenta[j][z]:
                moms.append(f"{tag}: endpoints fail at ({fmt(j)},{fmt(z)})")
    for (j, k), vals in d1.cocycle.items():
        for z, g in vals.items():
            x = H.comp.get((sig[j][z], g))
            x = None if x is None else H.comp.get((x, H.inv[sig[k][z]]))
            if x != d2.cocycle[j, k][z]:
                cocs.append(f"{tag}: cocycle fails at ({fmt(j)},{fmt(k)},{fmt(z)})")
    return moms, cocs


def _data_diff(d1, d2, tag):
    out = []
    for j in d1.cover.indices:
        for z in d1.cover.sets[j]:
            if d1.momenta[j][z] != d2.momenta[j][z]:
                out.append(f"{tag}: momenta differ at ({fmt(j)},{fmt(z)})")
    for key, vals in d1.cocycle.items():
        for z, g in vals.items():
            if d2.cocycle[key][z] != g:
                out.append(f"{tag}: cocycles differ at ({fmt(key)},{fmt(z)})")
    return out


def _raw_morphism(sig, d1, d2):
    """[j, z, h] -> [j, z, sig_j(z) h] without validity assumptions; None where undefined."""
    H = d1.structure
    out = {}
    for z in d1.cover.base:
        j0 = d1.cover.first_index(z)
        for h in H.arrows_to(d1.momenta[j0][z]):
            x = H.comp.get((sig[j0][z], h))
            out[j0, z, h] = None if x is None else glue_canon(d2, j0, z, x)
    return out


FAMILIES = ("restricted_momenta", "restricted_cohomology", "face_identities",
            "pulled_coboundaries", "composition_cochain", "global_composition")


def check_theta_coherence(L):
    """The relations on the source-target covers of G_1 and G_2 equivalent to L
    being a local generalized morphism."""
    G, d, U = L.source, L.data, L.cover
    rep = {k: [] for k in FAMILIES}
    C1, C2 = simplicial_cover(G, U, 1), simplicial_cover(G, U, 2)
    s1 = lambda z: G.src[z[0]]
    t1 = lambda z: G.tgt[z[0]]
    sd = pullback_along(d, s1, C1, lambda I: I[0])
    td = pullback_along(d, t1, C1, lambda I: I[1])
    th = theta_cochain(L, C1)
    m, c = _coboundary_failures(th, sd, td, "degree 1")
    rep["restricted_momenta"] += m
    rep["restricted_cohomology"] += c

    faces = {"pr1": (0, lambda I: I[1:]), "mu": (1, lambda I: (I[0], I[2])), "pr2": (2, lambda I: I[:2])}
    pulled = {}
    for name, (k, imap) in faces.items():
        f = lambda z, k=k: face(G, z, k)
        pulled[name] = (pullback_along(sd, f, C2, imap), pullback_along(td, f, C2, imap),
                        pull_cochain(th, f, C2, imap))
    rep["face_identities"] += face_identity_failures(G)
    for (a, ea), (b, eb) in (((("pr1", 0), ("pr2", 1))), ((("pr1", 1), ("mu", 1))), ((("pr2", 0), ("mu", 0)))):
        rep["face_identities"] += _data_diff(pulled[a][ea], pulled[b][eb], f"{a}/{b}")
    for name, (ps, pt, pth) in pulled.items():
        m, c = _coboundary_failures(pth, ps, pt, name)
        rep["pulled_coboundaries"] += m + c
    # the three mixed relations, through the face identities
    for sig, src, dst, tag in ((pulled["pr2"][2], pulled["pr2"][0], pulled["pr1"][0], "pr2 into pr1 s"),
                               (pulled["pr1"][2], pulled["pr1"][0], pulled["mu"][1], "pr1 into mu t"),
                               (pulled["mu"][2], pulled["pr2"][0], pulled["mu"][1], "mu from pr2 s")):
        m, c = _coboundary_failures(sig, src, dst, tag)
        rep["pulled_coboundaries"] += m + c

    H = L.target
    for I in C2.indices:
        for z in C2.sets[I]:
            prod = H.comp.get((pulled["pr1"][2][I][z], pulled["pr2"][2][I][z]))
            if prod != pulled["mu"][2][I][z]:
                rep["composition_cochain"].append(f"mu* theta != pr1* theta pr2* theta at ({fmt(I)},{fmt(z)})")

    # mu*Theta = pr1*Theta o pr2*Theta as maps of glued bundles over G_2
    if rep["face_identities"]:
        rep["global_composition"].append("not evaluated: pulled-back bundles do not match")
    else:
        A = pulled["pr2"][0]
        M2 = _raw_morphism(pulled["pr2"][2], A, pulled["pr2"][1])
        M1 = _raw_morphism(pulled["pr1"][2], pulled["pr1"][0], pulled["pr1"][1])
        Mm = _raw_morphism(pulled["mu"][2], A, pulled["mu"][1])
        for e, y in M2.items():
            via = None if y is None else M1.get(y)
            if via is None or via != Mm[e]:
                rep["global_composition"].append(f"mu* theta != pr1* theta o pr2* theta at degree-2 simplex {fmt(e[1])}")
                rep.setdefault("witness", e[1])
    rep["ok"] = not any(rep[k] for k in FAMILIES)
    return rep


def simplicial_refinement_check(G, r, n, d=None):
    """V^n refines U^n through f^(n+1); refining and pulling back along any vertex commute."""
    U, V, f = r.coarse, r.fine, r.map
    Un, Vn = simplicial_cover(G, U, n), simplicial_cover(G, V, n)
    fn = lambda J: tuple(f[j] for j in J)
    out = []
    for J in Vn.indices:
        for z in Vn.sets[J]:
            if not Un.contains(fn(J), z):
                out.append(f"{fmt(z)} in V{fmt(J)} but not in U{fmt(fn(J))}")
    if d is not None and not out:
        rn = Refinement(Un, Vn, {J: fn(J) for J in Vn.indices})
        dV = refine_data(d, r)
        for k in range(n + 1):
            vk = lambda z, k=k: vertices(G, z)[k]
            a = pullback_along(dV, vk, Vn, lambda J, k=k: J[k])
            b = refine_data(pullback_along(d, vk, Un, lambda I, k=k: I[k]), rn)
            out += _data_diff(a, b, f"vertex {k}")
    return out


# -- descent ----------------------------------------------------------------

def fibred_product_groupoid(f, X):
    X = tuple(X)
    arrows = [(x1, x2) for x1 in X for x2 in X if f[x1] == f[x2]]
    return build_groupoid(X, arrows, {a: a[1] for a in arrows}, {a: a[0] for a in arrows},
                          {x: (x, x) for x in X}, lambda a, b: (a[0], b[1]),
                          {a: (a[1], a[0]) for a in arrows}, meta={"kind": "fibred", "map": dict(f)})


def descend(P, f, Y):
    """Quotient of a bibundle X x_Y X -> G by its left action: a G-bundle over Y."""
    B = P.bundle
    uf = UnionFind(B.total)
    for (k, p), q in P.left.items():
        uf.union(p, q)
    rep = {}
    for p in B.total:
        root = uf[p]
        rep.setdefault(root, p)
    cls = {p: rep[uf[p]] for p in B.total}
    total = [p for p in B.total if cls[p] == p]
    G = B.structure
    action = {(p, g): cls[B.action[p, g]] for p in total for g in G.arrows_to(B.momentum[p])}
    Q = PrincipalBundle(total, Y, {p: f[B.proj[p]] for p in total}, {p: B.momentum[p] for p in total}, G, action)
    return Q, cls


def pullback_genmor(Bun, f, X, K):
    """f*B with the canonical descent action (x1, x2).(x2, b) = (x1, b)."""
    PB = pullback_bundle(Bun, f, X)
    left = {(k, (x, b)): (K.tgt[k], b) for (x, b) in PB.total for k in K.arrows_from(x)}
    return GeneralizedMorphism(K, PB, left, meta={"kind": "descent-pullback"})


def descent_roundtrip(f, X, Y, group, budget=None, ycover=None):
    budget = DEFAULT_BUDGET if budget is None else budget
    X, Y = tuple(X), tuple(Y)
    if set(f[x] for x in X) != set(Y):
        raise DomainError("descent needs a surjective map")
    K = fibred_product_groupoid(f, X)
    GG = group_as_groupoid(group)
    star = GG.objects[0]
    W = whole_cover(X)
    dW = LocalTrivData(W, GG, {0: {x: star for x in X}}, {(0, 0): {x: GG.unit[star] for x in X}})
    report = {"bundle_on_X": [], "descent_cocycle": [], "descend_pullback": [],
              "pullback_descend": [], "class_check": []}

    funcs = []
    for F in functors(K, GG):
        funcs.append(F)
        if len(funcs) > budget:
            raise BudgetExceeded(f"more than {budget} generalized morphisms to enumerate")
    genmors = []
    for F in funcs:
        L = LocalGeneralizedMorphism(K, dW, {(0, 0): dict(F.arrow_map)})
        P = globalize(L)
        genmors.append((F, L, P))
        report["bundle_on_X"] += validate_genmor(P)
        coh = check_theta_coherence(L)
        report["descent_cocycle"] += coh["global_composition"] + coh["composition_cochain"]
        Bun, cls = descend(P, f, Y)
        bad = validate_bundle(Bun)
        if bad:
            report["descend_pullback"] += ["descended bundle invalid: " + bad[0]]
            continue
        back = pullback_genmor(Bun, f, X, K)
        explicit = {p: (P.bundle.proj[p], cls[p]) for p in P.bundle.total}
        for p, img in explicit.items():
            if img not in back.bundle.pos:
                report["descend_pullback"].append(f"comparison map undefined at {fmt(p)}")
        if find_equivalence(P, back) is None:
            report["descend_pullback"].append(f"pullback of the descended bundle differs for {fmt(tuple(F.arrow_map.values()))}")

    # classes of generalized morphisms: theta ~ sigma(t)^-1 theta sigma(s)
    work = len(funcs) * len(group) ** len(X)
    if work > budget:
        raise BudgetExceeded(f"class enumeration needs {work} steps, budget {budget}")
    keyf = lambda F: tuple(F.arrow_map[k] for k in K.arrows)
    index = {keyf(F): i for i, F in enumerate(funcs)}
    uf = UnionFind(range(len(funcs)))
    for i, F in enumerate(funcs):
        for sig in itertools.product(group.elements, repeat=len(X)):
            s = dict(zip(X, sig))
            img = tuple(GG.mul(GG.mul(GG.inv[s[K.tgt[k]]], F.arrow_map[k]), s[K.src[k]]) for k in K.arrows)
            uf.union(i, index[img])
    roots = sorted({uf[i] for i in range(len(funcs))})
    gm_reps = [min(i for i in range(len(funcs)) if uf[i] == r) for r in roots]
    for a, b in itertools.combinations(gm_reps, 2):
        if find_equivalence(genmors[a][2], genmors[b][2]) is not None:
            report["class_check"].append("two generalized morphism classes are equivalent")

    ycover = ycover or whole_cover(Y)
    reps = h1_at_cover(Y, ycover, GG, budget)
    glued = [glue_bundle(r) for r in reps]
    for a, b in itertools.combinations(range(len(glued)), 2):
        if find_isomorphism(glued[a], glued[b]) is not None:
            report["class_check"].append("two bundle classes on Y are isomorphic")
    n_instances = 0
    for d in enumerate_trivdata(ycover, GG, budget):
        n_instances += 1
        B0 = glue_bundle(d)
        P = pullback_genmor(B0, f, X, K)
        B1, _ = descend(P, f, Y)
        if find_isomorphism(B0, B1) is None:
            report["pullback_descend"].append(f"descent of a pulled-back bundle differs (instance {n_instances})")
    report["genmor_classes"] = len(gm_reps)
    report["bundle_classes"] = len(reps)
    report["n_genmors"] = len(funcs)
    report["n_bundle_instances"] = n_instances
    report["fibred_arrows"] = len(K.arrows)
    report["ok"] = (len(gm_reps) == len(reps)) and not any(
        report[k] for k in ("bundle_on_X", "descent_cocycle", "descend_pullback", "pullback_descend", "class_check"))
    return report
