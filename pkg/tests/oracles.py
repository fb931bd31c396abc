"""Brute-force references, written without the package's search code."""
import itertools


def groupoid_axioms_ok(objects, arrows, src, tgt, comp):
    for (a, b), c in comp.items():
        if src[a] != tgt[b] or src[c] != src[b] or tgt[c] != tgt[a]:
            return False
    for a, b in itertools.product(arrows, repeat=2):
        if (src[a] == tgt[b]) != ((a, b) in comp):
            return False
    return True


def composable_tuples(G, n):
    """All n-tuples of arrows, kept when neighbours compose."""
    out = []
    for z in itertools.product(G.arrows, repeat=n):
        if all(G.src[z[i]] == G.tgt[z[i + 1]] for i in range(n - 1)):
            out.append(z)
    return out


def gauge_arrow_count(P):
    """Orbits of P x P under the diagonal right action, by explicit orbit sets."""
    K = P.structure
    seen = set()
    for p1, p2 in itertools.product(P.total, repeat=2):
        seen.add(frozenset((P.action[p1, g], P.action[p2, g]) for g in K.arrows))
    return len(seen)


def left_division_brute(P):
    out = {}
    for p, q in itertools.product(P.bundle.total, repeat=2):
        sols = [g for g in P.source.arrows if P.left.get((g, q)) == p]
        if sols:
            out[p, q] = sols
    return out


def point_data_raw(G, idx):
    """Every (eps, phi) at one point passing the cocycle axioms, from raw assignments."""
    for eps in itertools.product(G.objects, repeat=len(idx)):
        e = dict(zip(idx, eps))
        pairs = [(a, b) for a in idx for b in idx]
        cands = [G.hom(e[a], e[b]) for a, b in pairs]
        for vals in itertools.product(*cands):
            F = dict(zip(pairs, vals))
            if all(F[a, a] == G.unit[e[a]] for a in idx) and all(
                    G.comp.get((F[a, b], F[b, c])) == F[a, c] for a in idx for b in idx for c in idx):
                yield e, F


def point_classes(G, idx):
    """Orbit count of pointwise data under every sigma family (sigma_a from eps_a to eps'_a)."""
    data = list(point_data_raw(G, idx))
    key = lambda e, F: (tuple(e[a] for a in idx), tuple(sorted(F.items(), key=repr)))
    index = {key(e, F): i for i, (e, F) in enumerate(data)}
    parent = list(range(len(data)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, (e, F) in enumerate(data):
        for sig in itertools.product(*[G.arrows_from(e[a]) for a in idx]):
            s = dict(zip(idx, sig))
            e2 = {a: G.tgt[s[a]] for a in idx}
            F2 = {(a, b): G.mul(G.mul(s[a], F[a, b]), G.inv[s[b]]) for a in idx for b in idx}
            j = index[key(e2, F2)]
            parent[find(i)] = find(j)
    return len({find(i) for i in range(len(data))})


def h1_count(G, cover):
    n = 1
    for m in cover.base:
        n *= point_classes(G, cover.indices_at(m))
    return n


def all_covers(base, max_sets):
    """Every cover of base by 1..max_sets nonempty subsets, as lists of point lists."""
    subsets = [list(c) for r in range(1, len(base) + 1) for c in itertools.combinations(base, r)]
    for k in range(1, max_sets + 1):
        for combo in itertools.combinations(subsets, k):
            if set().union(*map(set, combo)) == set(base):
                yield list(combo)


def descent_genmor_classes(K, group):
    """Functors X x_Y X -> G from raw assignments, then orbits under gauge maps X -> G."""
    arrows, X = K.arrows, K.objects
    funcs = []
    for vals in itertools.product(group.elements, repeat=len(arrows)):
        F = dict(zip(arrows, vals))
        if all(group.mul(F[a], F[b]) == F[c] for (a, b), c in K.comp.items()):
            funcs.append(tuple(vals))
    inv = group.inverse
    orbits = set()
    for f in funcs:
        F = dict(zip(arrows, f))
        orb = frozenset(tuple(group.mul(group.mul(inv[s[K.tgt[k]]], F[k]), s[K.src[k]]) for k in arrows)
                        for s in (dict(zip(X, sig)) for sig in itertools.product(group.elements, repeat=len(X))))
        orbits.add(orb)
    return len(funcs), len(orbits)


def torsor_classes(group):
    """Free transitive right actions on range(|G|), up to equivariant bijection."""
    n = len(group.elements)
    els = group.elements
    perms = list(itertools.permutations(range(n)))
    actions = []
    for imgs in itertools.product(perms, repeat=n):
        act = dict(zip(els, imgs))
        if act[group.identity] != tuple(range(n)):
            continue
        # right action: x.(ab) = (x.a).b
        if any(act[group.mul(a, b)][x] != act[b][act[a][x]] for a in els for b in els for x in range(n)):
            continue
        if all(len({act[g][x] for g in els}) == n for x in range(n)):
            actions.append(act)
    reps = []
    for act in actions:
        for r in reps:
            if any(all(f[act[g][x]] == r[g][f[x]] for g in els for x in range(n)) for f in perms):
                break
        else:
            reps.append(act)
    return len(reps)


def bundle_classes_on_set(Y, group):
    n = 1
    for _ in Y:
        n *= torsor_classes(group)
    return n


def composite_class_count(P, Q):
    """Orbits of {(p, q): eps(p) = pi(q)} under (p, q) ~ (p.g, g^-1.q), as explicit sets."""
    BP, BQ, G = P.bundle, Q.bundle, P.target
    orbits = set()
    for p in BP.total:
        for q in BQ.total:
            if BP.momentum[p] != BQ.proj[q]:
                continue
            orbits.add(frozenset((BP.action[p, g], Q.left[G.inv[g], q])
                                 for g in G.arrows if G.tgt[g] == BP.momentum[p]))
    return len(orbits)
