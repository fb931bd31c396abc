"""Finite groupoids and the standard constructions on them.

Composition follows the convention g1*g2 is defined when src(g1) == tgt(g2),
so arrows compose like functions: src(g1*g2) = src(g2), tgt(g1*g2) = tgt(g1).
Identifiers may be any hashable value; constructions build tuples out of the
identifiers they are given and `fmt` turns them into stable strings.
"""
from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass

from networkx.utils import UnionFind

from .errors import DomainError, InvalidError, StructureError


def fmt(x):
    if isinstance(x, tuple):
        return "(" + ",".join(fmt(y) for y in x) + ")"
    return str(x)


class FiniteGroup:
    """A group given by its full multiplication table."""

    def __init__(self, elements, table, name=None):
        self.elements = tuple(elements)
        self.table = dict(table)
        self.name = name
        self.identity = None
        self.inverse = {}
        problems = self._check()
        if problems:
            raise InvalidError("not a group: " + problems[0], problems)

    def _check(self):
        els = self.elements
        if not els:
            return ["empty element set"]
        if len(set(els)) != len(els):
            return ["duplicate elements"]
        for a in els:
            for b in els:
                if (a, b) not in self.table:
                    return [f"product undefined at ({fmt(a)},{fmt(b)})"]
                if self.table[a, b] not in self.elements:
                    return [f"product leaves the group at ({fmt(a)},{fmt(b)})"]
        for a, b, c in itertools.product(els, repeat=3):
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                return [f"associativity fails at ({fmt(a)},{fmt(b)},{fmt(c)})"]
        for e in els:
            if all(self.mul(e, a) == a == self.mul(a, e) for a in els):
                self.identity = e
                break
        else:
            return ["no unit element"]
        for a in els:
            inv = [b for b in els if self.mul(a, b) == self.identity]
            if not inv:
                return [f"no inverse for {fmt(a)}"]
            self.inverse[a] = inv[0]
        return []

    def mul(self, a, b):
        return self.table[a, b]

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FiniteGroup({self.name or len(self.elements)})"


def cyclic_group(n):
    names = ["e"] + [f"a{k}" for k in range(1, n)]
    table = {(names[i], names[j]): names[(i + j) % n] for i in range(n) for j in range(n)}
    return FiniteGroup(names, table, name=f"Z{n}")


def symmetric_group(n):
    perms = list(itertools.permutations(range(1, n + 1)))
    name = lambda p: "".join(map(str, p))
    # (a*b)(i) = a(b(i))
    table = {(name(a), name(b)): name(tuple(a[b[i] - 1] for i in range(n)))
             for a in perms for b in perms}
    return FiniteGroup([name(p) for p in perms], table, name=f"S{n}")


def direct_product_group(G, H):
    els = [(a, b) for a in G.elements for b in H.elements]
    table = {(x, y): (G.mul(x[0], y[0]), H.mul(x[1], y[1])) for x in els for y in els}
    return FiniteGroup(els, table, name=f"{G.name}x{H.name}")


class Groupoid:
    def __init__(self, objects, arrows, src, tgt, unit, inv, comp, meta=None):
        self.objects = tuple(objects)
        self.arrows = tuple(arrows)
        self.src = dict(src)
        self.tgt = dict(tgt)
        self.unit = dict(unit)
        self.inv = dict(inv)
        self.comp = dict(comp)
        self.meta = dict(meta or {})
        self.opos = {x: i for i, x in enumerate(self.objects)}
        self.apos = {g: i for i, g in enumerate(self.arrows)}
        self._hom = defaultdict(list)
        self._from = defaultdict(list)
        self._to = defaultdict(list)
        for g in self.arrows:
            s, t = self.src.get(g), self.tgt.get(g)
            self._hom[t, s].append(g)
            self._from[s].append(g)
            self._to[t].append(g)

    def s(self, g):
        return self.src[g]

    def t(self, g):
        return self.tgt[g]

    def mul(self, a, b):
        try:
            return self.comp[a, b]
        except KeyError:
            raise DomainError(f"arrows {fmt(a)} and {fmt(b)} are not composable") from None

    def mul3(self, a, b, c):
        return self.mul(self.mul(a, b), c)

    def hom(self, tgt, src):
        """Arrows src -> tgt."""
        return self._hom.get((tgt, src), [])

    def arrows_from(self, x):
        return self._from.get(x, [])

    def arrows_to(self, x):
        return self._to.get(x, [])

    @property
    def is_group(self):
        return len(self.objects) == 1

    def __len__(self):
        return len(self.arrows)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Groupoid):
            return NotImplemented
        return (self.objects == other.objects and self.arrows == other.arrows
                and self.src == other.src and self.tgt == other.tgt
                and self.unit == other.unit and self.inv == other.inv
                and self.comp == other.comp)

    def __hash__(self):
        return hash((self.objects, self.arrows))

    def __repr__(self):
        return f"Groupoid({len(self.objects)} objects, {len(self.arrows)} arrows)"


def build_groupoid(objects, arrows, src, tgt, unit, mulfn, inv=None, meta=None):
    """Assemble a Groupoid from a product function defined on composable pairs."""
    comp = {}
    by_tgt = defaultdict(list)
    for b in arrows:
        by_tgt[tgt[b]].append(b)
    for a in arrows:
        for b in by_tgt[src[a]]:
            comp[a, b] = mulfn(a, b)
    if inv is None:
        inv = {}
        hom = defaultdict(list)
        for g in arrows:
            hom[tgt[g], src[g]].append(g)
        for g in arrows:
            u = unit[tgt[g]]
            cands = [h for h in hom[src[g], tgt[g]] if comp.get((g, h)) == u]
            if cands:
                inv[g] = cands[0]
    return Groupoid(objects, arrows, src, tgt, unit, inv, comp, meta)


def validate_groupoid(G):
    """Every violated axiom, in a fixed order.  Unknown identifiers raise."""
    objs, arrs = set(G.objects), set(G.arrows)
    if len(objs) != len(G.objects) or len(arrs) != len(G.arrows):
        raise StructureError("duplicate identifiers")
    for name, m, dom, cod in (("src", G.src, arrs, objs), ("tgt", G.tgt, arrs, objs),
                              ("unit", G.unit, objs, arrs), ("inv", G.inv, arrs, arrs)):
        for k, v in m.items():
            if k not in dom:
                raise StructureError(f"{name}: unknown identifier {fmt(k)}")
            if v not in cod:
                raise StructureError(f"{name}: unknown identifier {fmt(v)}")
        for k in (G.arrows if dom is arrs else G.objects):
            if k not in m:
                raise StructureError(f"{name}: not defined at {fmt(k)}")
    for (a, b), c in G.comp.items():
        for z in (a, b, c):
            if z not in arrs:
                raise StructureError(f"comp: unknown identifier {fmt(z)}")

    out = []
    for x in G.objects:
        u = G.unit[x]
        if G.src[u] != x or G.tgt[u] != x:
            out.append(f"unit axiom fails at {fmt(x)}")
    for a in G.arrows:
        for b in G.arrows:
            composable = G.src[a] == G.tgt[b]
            defined = (a, b) in G.comp
            if composable and not defined:
                out.append(f"composition undefined at ({fmt(a)},{fmt(b)})")
            elif defined and not composable:
                out.append(f"composition defined on non-composable ({fmt(a)},{fmt(b)})")
            elif defined:
                c = G.comp[a, b]
                if G.src[c] != G.src[b] or G.tgt[c] != G.tgt[a]:
                    out.append(f"composite endpoints fail at ({fmt(a)},{fmt(b)})")
    for a in G.arrows:
        for b in G.arrows_to(G.src[a]):
            ab = G.comp.get((a, b))
            if ab is None:
                continue
            for c in G.arrows_to(G.src[b]):
                bc = G.comp.get((b, c))
                if bc is None:
                    continue
                if G.comp.get((ab, c)) != G.comp.get((a, bc)):
                    out.append(f"associativity fails at ({fmt(a)},{fmt(b)},{fmt(c)})")
    for g in G.arrows:
        if G.comp.get((G.unit[G.tgt[g]], g)) != g or G.comp.get((g, G.unit[G.src[g]])) != g:
            out.append(f"unit law fails at {fmt(g)}")
    for g in G.arrows:
        h = G.inv[g]
        if G.comp.get((g, h)) != G.unit[G.tgt[g]] or G.comp.get((h, g)) != G.unit[G.src[g]]:
            out.append(f"inverse axiom fails at {fmt(g)}")
    return out


def _require_valid(G, what="groupoid"):
    rep = validate_groupoid(G)
    if rep:
        raise InvalidError(f"invalid {what}: {rep[0]}", rep)
    return G


def pair_groupoid(X):
    X = tuple(X)
    if not X:
        raise DomainError("pair groupoid of an empty set")
    arrows = [(x, y) for x in X for y in X]
    src = {a: a[1] for a in arrows}
    tgt = {a: a[0] for a in arrows}
    unit = {x: (x, x) for x in X}
    inv = {a: (a[1], a[0]) for a in arrows}
    return build_groupoid(X, arrows, src, tgt, unit, lambda a, b: (a[0], b[1]), inv,
                          meta={"kind": "pair"})


def discrete_groupoid(X):
    X = tuple(X)
    arrows = [("1", x) for x in X]
    m = {a: a[1] for a in arrows}
    return build_groupoid(X, arrows, m, m, {x: ("1", x) for x in X}, lambda a, b: a,
                          {a: a for a in arrows}, meta={"kind": "discrete"})


def group_as_groupoid(group, obj="*"):
    if not isinstance(group, FiniteGroup):
        els, table = group
        group = FiniteGroup(els, table)
    els = group.elements
    src = {g: obj for g in els}
    return build_groupoid([obj], els, src, src, {obj: group.identity}, group.mul,
                          dict(group.inverse), meta={"kind": "group", "group": group})


def action_groupoid(group, X, act):
    """Arrows (g, x) from x to g.x; (g1, g2.x)(g2, x) = (g1 g2, x)."""
    X = tuple(X)
    for x in X:
        for g in group.elements:
            if act.get((g, x)) not in X:
                raise InvalidError(f"action undefined at ({fmt(g)},{fmt(x)})")
        if act[group.identity, x] != x:
            raise InvalidError(f"unit does not act trivially at {fmt(x)}")
    for g1, g2, x in itertools.product(group.elements, group.elements, X):
        if act[group.mul(g1, g2), x] != act[g1, act[g2, x]]:
            raise InvalidError(f"action axiom fails at ({fmt(g1)},{fmt(g2)},{fmt(x)})")
    arrows = [(g, x) for g in group.elements for x in X]
    src = {a: a[1] for a in arrows}
    tgt = {a: act[a] for a in arrows}
    unit = {x: (group.identity, x) for x in X}
    inv = {(g, x): (group.inverse[g], act[g, x]) for g, x in arrows}
    return build_groupoid(X, arrows, src, tgt, unit, lambda a, b: (group.mul(a[0], b[0]), b[1]),
                          inv, meta={"kind": "action", "group": group, "space": X, "act": dict(act)})


def gauge_groupoid(P):
    """Quotient (P x P)/G for a principal bundle P whose structure groupoid is a group."""
    from .bundle import division_table, validate_bundle
    G = P.structure
    if not G.is_group:
        raise DomainError("gauge groupoid needs a bundle with a group as structure groupoid")
    rep = validate_bundle(P)
    if rep:
        raise InvalidError("gauge groupoid of an invalid bundle: " + rep[0], rep)
    div = division_table(P)
    pos = {p: i for i, p in enumerate(P.total)}
    els = G.arrows

    canon = {}
    for p1 in P.total:
        for p2 in P.total:
            if (p1, p2) in canon:
                continue
            orbit = [(P.act(p1, g), P.act(p2, g)) for g in els]
            best = min(orbit, key=lambda pr: pos[pr[0]])
            for pr in orbit:
                canon[pr] = best
    arrows = sorted(set(canon.values()), key=lambda pr: (pos[pr[0]], pos[pr[1]]))
    src = {a: P.proj[a[1]] for a in arrows}
    tgt = {a: P.proj[a[0]] for a in arrows}
    first = {}
    for p in P.total:
        first.setdefault(P.proj[p], p)
    unit = {x: canon[first[x], first[x]] for x in P.base}
    inv = {a: canon[a[1], a[0]] for a in arrows}

    def mul(a, b):
        return canon[P.act(a[0], div[a[1], b[0]]), b[1]]

    return build_groupoid(P.base, arrows, src, tgt, unit, mul, inv,
                          meta={"kind": "gauge", "bundle": P, "canon": canon})


def gauge_arrow(G, p1, p2):
    """The canonical arrow [p1, p2] of a gauge groupoid."""
    return G.meta["canon"][p1, p2]


def product_groupoid(G, H):
    objects = [(x, y) for x in G.objects for y in H.objects]
    arrows = [(g, h) for g in G.arrows for h in H.arrows]
    src = {a: (G.src[a[0]], H.src[a[1]]) for a in arrows}
    tgt = {a: (G.tgt[a[0]], H.tgt[a[1]]) for a in arrows}
    unit = {o: (G.unit[o[0]], H.unit[o[1]]) for o in objects}
    inv = {a: (G.inv[a[0]], H.inv[a[1]]) for a in arrows}
    return build_groupoid(objects, arrows, src, tgt, unit,
                          lambda a, b: (G.comp[a[0], b[0]], H.comp[a[1], b[1]]), inv,
                          meta={"kind": "product", "factors": (G, H)})


def disjoint_union(*Gs):
    """Identifiers become (k, id) for the k-th summand."""
    objects = [(k, x) for k, G in enumerate(Gs) for x in G.objects]
    arrows = [(k, g) for k, G in enumerate(Gs) for g in G.arrows]
    src = {(k, g): (k, Gs[k].src[g]) for k, g in arrows}
    tgt = {(k, g): (k, Gs[k].tgt[g]) for k, g in arrows}
    unit = {(k, x): (k, Gs[k].unit[x]) for k, x in objects}
    inv = {(k, g): (k, Gs[k].inv[g]) for k, g in arrows}
    return build_groupoid(objects, arrows, src, tgt, unit,
                          lambda a, b: (a[0], Gs[a[0]].comp[a[1], b[1]]), inv,
                          meta={"kind": "union", "summands": Gs})


def full_subgroupoid(G, A):
    A = [x for x in G.objects if x in set(A)]
    keep = set(A)
    arrows = [g for g in G.arrows if G.src[g] in keep and G.tgt[g] in keep]
    ks = set(arrows)
    return Groupoid(A, arrows, {g: G.src[g] for g in arrows}, {g: G.tgt[g] for g in arrows},
                    {x: G.unit[x] for x in A}, {g: G.inv[g] for g in arrows},
                    {k: v for k, v in G.comp.items() if k[0] in ks and k[1] in ks})


@dataclass(frozen=True)
class LocalComponent:
    parent: Groupoid
    src_objects: frozenset
    tgt_objects: frozenset
    arrows: tuple

    def restrict(self):
        if self.src_objects != self.tgt_objects:
            raise DomainError("only a diagonal local component is a subgroupoid")
        return full_subgroupoid(self.parent, self.src_objects)


def local_component(G, A, B):
    A, B = frozenset(A), frozenset(B)
    arrows = tuple(g for g in G.arrows if G.src[g] in A and G.tgt[g] in B)
    return LocalComponent(G, A, B, arrows)


def connected_components(G):
    uf = UnionFind(G.objects)
    for g in G.arrows:
        uf.union(G.src[g], G.tgt[g])
    blocks = defaultdict(list)
    for x in G.objects:
        blocks[uf[x]].append(x)
    return sorted(blocks.values(), key=lambda b: G.opos[b[0]])


# -- morphisms --------------------------------------------------------------

@dataclass(frozen=True)
class GroupoidMorphism:
    domain: Groupoid
    codomain: Groupoid
    arrow_map: dict
    object_map: dict

    def __call__(self, g):
        return self.arrow_map[g]


def validate_morphism(F):
    G, H = F.domain, F.codomain
    out = []
    for g in G.arrows:
        if g not in F.arrow_map or F.arrow_map[g] not in H.apos:
            raise StructureError(f"arrow map undefined or unknown at {fmt(g)}")
    for x in G.objects:
        if x not in F.object_map or F.object_map[x] not in H.opos:
            raise StructureError(f"object map undefined or unknown at {fmt(x)}")
    Fa, Fo = F.arrow_map, F.object_map
    for g in G.arrows:
        if H.src[Fa[g]] != Fo[G.src[g]]:
            out.append(f"source compatibility fails at {fmt(g)}")
        if H.tgt[Fa[g]] != Fo[G.tgt[g]]:
            out.append(f"target compatibility fails at {fmt(g)}")
    for x in G.objects:
        if Fa[G.unit[x]] != H.unit[Fo[x]]:
            out.append(f"unit compatibility fails at {fmt(x)}")
    for (a, b), c in G.comp.items():
        if H.comp.get((Fa[a], Fa[b])) != Fa[c]:
            out.append(f"homomorphism property fails at ({fmt(a)},{fmt(b)})")
    return out


def identity_morphism(G):
    return GroupoidMorphism(G, G, {g: g for g in G.arrows}, {x: x for x in G.objects})


def compose_morphisms(F2, F1):
    """F2 after F1."""
    return GroupoidMorphism(F1.domain, F2.codomain,
                            {g: F2.arrow_map[F1.arrow_map[g]] for g in F1.domain.arrows},
                            {x: F2.object_map[F1.object_map[x]] for x in F1.domain.objects})


# -- actions ----------------------------------------------------------------

@dataclass(frozen=True)
class GroupoidAction:
    actor: Groupoid
    carrier: tuple
    momentum: dict
    side: str
    act: dict

    def apply(self, a, b):
        """left: apply(g, p) = g.p; right: apply(p, g) = p.g"""
        try:
            return self.act[a, b]
        except KeyError:
            raise DomainError(f"action undefined at ({fmt(a)},{fmt(b)})") from None


def validate_action(A):
    G, J = A.actor, A.momentum
    out = []
    for p in A.carrier:
        if J.get(p) not in G.opos:
            raise StructureError(f"momentum undefined at {fmt(p)}")
    left = A.side == "left"
    for p in A.carrier:
        for g in (G.arrows_from(J[p]) if left else G.arrows_to(J[p])):
            key = (g, p) if left else (p, g)
            if key not in A.act:
                out.append(f"action undefined at ({fmt(key[0])},{fmt(key[1])})")
                continue
            q = A.act[key]
            if J.get(q) != (G.tgt[g] if left else G.src[g]):
                out.append(f"momentum fails at ({fmt(key[0])},{fmt(key[1])})")
        u = G.unit[J[p]]
        if A.act.get((u, p) if left else (p, u)) != p:
            out.append(f"unit acts nontrivially at {fmt(p)}")
    for p in A.carrier:
        if left:
            for g2 in G.arrows_from(J[p]):
                q = A.act.get((g2, p))
                for g1 in G.arrows_from(G.tgt[g2]):
                    if q is None or A.act.get((G.comp[g1, g2], p)) != A.act.get((g1, q)):
                        out.append(f"associativity fails at ({fmt(g1)},{fmt(g2)},{fmt(p)})")
        else:
            for g1 in G.arrows_to(J[p]):
                q = A.act.get((p, g1))
                for g2 in G.arrows_to(G.src[g1]):
                    if q is None or A.act.get((p, G.comp[g1, g2])) != A.act.get((q, g2)):
                        out.append(f"associativity fails at ({fmt(p)},{fmt(g1)},{fmt(g2)})")
    return out


def generalized_conjugation(G, side="left"):
    """(g1, g2; g3) -> g1 g3 g2^-1 on the left, g1^-1 g3 g2 on the right; J(g) = (t g, s g)."""
    G2 = product_groupoid(G, G)
    J = {g: (G.tgt[g], G.src[g]) for g in G.arrows}
    act = {}
    for g3 in G.arrows:
        if side == "left":
            for g1 in G.arrows_from(G.tgt[g3]):
                for g2 in G.arrows_from(G.src[g3]):
                    act[(g1, g2), g3] = G.mul(G.mul(g1, g3), G.inv[g2])
        else:
            for g1 in G.arrows_to(G.tgt[g3]):
                for g2 in G.arrows_to(G.src[g3]):
                    act[g3, (g1, g2)] = G.mul(G.mul(G.inv[g1], g3), g2)
    return GroupoidAction(G2, G.arrows, J, side, act)


# -- homomorphism and isomorphism search ------------------------------------

def _generators(G, x):
    els = G.hom(x, x)
    gens, closure = [], {G.unit[x]}
    for g in els:
        if g in closure:
            continue
        gens.append(g)
        frontier = deque(closure)
        closure = set(closure)
        while frontier:
            a = frontier.popleft()
            for k in gens:
                b = G.comp[a, k]
                if b not in closure:
                    closure.add(b)
                    frontier.append(b)
    return gens


def _extend(G, x, H, y, gens, images):
    f = {G.unit[x]: H.unit[y]}
    queue = deque([G.unit[x]])
    while queue:
        a = queue.popleft()
        for k, fk in zip(gens, images):
            b, fb = G.comp[a, k], H.comp[f[a], fk]
            if b in f:
                if f[b] != fb:
                    return None
            else:
                f[b] = fb
                queue.append(b)
    return f


def group_homs(G, x, H, y):
    """All homomorphisms between the vertex groups G_x -> H_y."""
    gens = _generators(G, x)
    targets = H.hom(y, y)
    out = []
    for images in itertools.product(targets, repeat=len(gens)):
        f = _extend(G, x, H, y, gens, images)
        if f is None:
            continue
        if all(H.comp[f[a], f[b]] == f[G.comp[a, b]] for a in f for b in f):
            out.append(f)
    return out


def _spanning(G, comp):
    b = comp[0]
    return b, {x: G.hom(x, b)[0] for x in comp}


def _functor_from(G, H, pieces):
    """pieces: per component (comp, b, tau, object_map, psi, tau_images)"""
    amap, omap = {}, {}
    for comp, b, tau, om, psi, timg in pieces:
        omap.update(om)
        for x in comp:
            for y in comp:
                for g in G.hom(y, x):
                    k = G.mul(G.mul(G.inv[tau[y]], g), tau[x])
                    amap[g] = H.mul(H.mul(timg[y], psi[k]), H.inv[timg[x]])
    return GroupoidMorphism(G, H, amap, omap)


def functors(G, H):
    """Generate every strict morphism G -> H."""
    comps = connected_components(G)
    per_comp = []
    for comp in comps:
        b, tau = _spanning(G, comp)
        choices = []
        for hc in connected_components(H):
            for om_vals in itertools.product(hc, repeat=len(comp)):
                om = dict(zip(comp, om_vals))
                c = om[b]
                for psi in group_homs(G, b, H, c):
                    others = [x for x in comp if x != b]
                    for imgs in itertools.product(*[H.hom(om[x], c) for x in others]):
                        timg = dict(zip(others, imgs))
                        timg[b] = H.unit[c]
                        choices.append((comp, b, tau, om, psi, timg))
        per_comp.append(choices)
    for pieces in itertools.product(*per_comp):
        yield _functor_from(G, H, pieces)


def random_functor(G, H, rng):
    pieces = []
    hcomps = connected_components(H)
    for comp in connected_components(G):
        b, tau = _spanning(G, comp)
        hc = rng.choice(hcomps)
        om = {x: rng.choice(hc) for x in comp}
        c = om[b]
        psi = rng.choice(group_homs(G, b, H, c))
        timg = {x: rng.choice(H.hom(om[x], c)) for x in comp if x != b}
        timg[b] = H.unit[c]
        pieces.append((comp, b, tau, om, psi, timg))
    return _functor_from(G, H, pieces)


def find_groupoid_isomorphism(G, H):
    """An isomorphism G -> H or None.  Matches components by size and vertex group."""
    gcomps, hcomps = connected_components(G), connected_components(H)
    if len(gcomps) != len(hcomps):
        return None
    used = set()
    pieces = []
    for comp in gcomps:
        b, tau = _spanning(G, comp)
        found = None
        for j, hc in enumerate(hcomps):
            if j in used or len(hc) != len(comp):
                continue
            c = hc[0]
            if len(G.hom(b, b)) != len(H.hom(c, c)):
                continue
            isos = [f for f in group_homs(G, b, H, c) if len(set(f.values())) == len(f)]
            if isos:
                found = (j, hc, isos[0])
                break
        if found is None:
            return None
        j, hc, psi = found
        used.add(j)
        om = dict(zip(comp, hc))
        timg = {x: H.hom(om[x], hc[0])[0] for x in comp}
        timg[b] = H.unit[hc[0]]
        pieces.append((comp, b, tau, om, psi, timg))
    F = _functor_from(G, H, pieces)
    assert not validate_morphism(F)
    return F
