"""JSON schemas for groupoids, bundles, covers, local data and bibundles.

Identifiers are strings, integers or arrays of identifiers (decoded as tuples).
Tables are lists of entries; a duplicated entry is a schema error.  Wherever an
embedded object is expected a string may be given instead: a path relative to
the file that mentions it.
"""
from __future__ import annotations

import hashlib
import json
import os

from .bundle import PrincipalBundle
from .cech import Cover, LocalTrivData
from .errors import CechError
from .genmor import GeneralizedMorphism, LocalGeneralizedMorphism
from .groupoid import FiniteGroup, Groupoid


class SchemaError(CechError, ValueError):
    def __init__(self, path, msg):
        super().__init__(f"{path}: {msg}")
        self.path = path


def _no_dup_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise SchemaError("$", f"duplicate key {k!r}")
        out[k] = v
    return out


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh, object_pairs_hook=_no_dup_keys)
    except SchemaError as e:
        raise SchemaError(f"{path}", str(e).split(": ", 1)[1]) from None
    except OSError as e:
        raise SchemaError(path, f"cannot read file ({e.strerror})") from None
    except json.JSONDecodeError as e:
        raise SchemaError(path, f"not valid JSON ({e.msg} at line {e.lineno})") from None


def digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- identifiers ------------------------------------------------------------

def enc(x):
    if isinstance(x, tuple):
        return [enc(y) for y in x]
    return x


def dec(x, path="$"):
    if isinstance(x, list):
        return tuple(dec(y, f"{path}[{i}]") for i, y in enumerate(x))
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise SchemaError(path, f"identifier must be a string, integer or array, got {type(x).__name__}")
    return x


class _Ctx:
    def __init__(self, doc, path, base_dir):
        self.doc, self.path, self.base_dir = doc, path, base_dir

    def field(self, key, kind=None, optional=False):
        if not isinstance(self.doc, dict):
            raise SchemaError(self.path, "expected an object")
        if key not in self.doc:
            if optional:
                return None
            raise SchemaError(f"{self.path}.{key}", "missing field")
        v = self.doc[key]
        if kind is list and not isinstance(v, list):
            raise SchemaError(f"{self.path}.{key}", "expected an array")
        return v

    def sub(self, key, optional=False):
        v = self.field(key, optional=optional)
        if v is None:
            return None
        if isinstance(v, str):
            p = os.path.join(self.base_dir, v)
            return _Ctx(read_json(p), f"{p}:$", os.path.dirname(p))
        return _Ctx(v, f"{self.path}.{key}", self.base_dir)

    def ids(self, key):
        vals = self.field(key, list)
        out, seen = [], set()
        for i, v in enumerate(vals):
            x = dec(v, f"{self.path}.{key}[{i}]")
            if x in seen:
                raise SchemaError(f"{self.path}.{key}[{i}]", f"duplicate identifier {v!r}")
            seen.add(x)
            out.append(x)
        return out

    def table(self, key, width, optional=False):
        """Entries of `width` identifiers; keyed on all but the last, no duplicates."""
        vals = self.field(key, list, optional)
        if vals is None:
            return None
        out = {}
        for i, row in enumerate(vals):
            p = f"{self.path}.{key}[{i}]"
            if not isinstance(row, list) or len(row) != width:
                raise SchemaError(p, f"expected an array of {width} identifiers")
            row = [dec(v, f"{p}[{j}]") for j, v in enumerate(row)]
            k = tuple(row[:-1]) if width > 2 else row[0]
            if k in out:
                raise SchemaError(p, "duplicate entry")
            out[k] = row[-1]
        return out


def _ctx(src, path="$"):
    if isinstance(src, _Ctx):
        return src
    if isinstance(src, str):
        return _Ctx(read_json(src), f"{src}:$", os.path.dirname(src))
    return _Ctx(src, path, ".")


def _known(path, x, universe, what):
    if x not in universe:
        raise SchemaError(path, f"unknown {what} {enc(x)!r}")


# -- groups and groupoids ---------------------------------------------------

def group_to_json(K):
    return {"elements": [enc(a) for a in K.elements],
            "table": [[enc(a), enc(b), enc(K.table[a, b])] for a in K.elements for b in K.elements]}


def load_group(src):
    c = _ctx(src)
    els = c.ids("elements")
    table = c.table("table", 3)
    for (a, b), v in table.items():
        for x in (a, b, v):
            _known(f"{c.path}.table", x, set(els), "element")
    return FiniteGroup(els, table, name=c.field("name", optional=True))


def groupoid_to_json(G):
    return {
        "objects": [enc(x) for x in G.objects],
        "arrows": [{"id": enc(g), "src": enc(G.src[g]), "tgt": enc(G.tgt[g])} for g in G.arrows],
        "units": [[enc(x), enc(G.unit[x])] for x in G.objects],
        "inv": [[enc(g), enc(G.inv[g])] for g in G.arrows],
        "comp": [[enc(a), enc(b), enc(c)] for (a, b), c in G.comp.items()],
    }


def load_groupoid(src):
    c = _ctx(src)
    objs = c.ids("objects")
    oset = set(objs)
    arrows, sfn, tfn = [], {}, {}
    for i, a in enumerate(c.field("arrows", list)):
        p = f"{c.path}.arrows[{i}]"
        ac = _Ctx(a, p, c.base_dir)
        g = dec(ac.field("id"), p + ".id")
        if g in sfn:
            raise SchemaError(p, f"duplicate arrow {enc(g)!r}")
        sfn[g] = dec(ac.field("src"), p + ".src")
        tfn[g] = dec(ac.field("tgt"), p + ".tgt")
        _known(p + ".src", sfn[g], oset, "object")
        _known(p + ".tgt", tfn[g], oset, "object")
        arrows.append(g)
    aset = set(arrows)
    units = c.table("units", 2)
    inv = c.table("inv", 2)
    comp = c.table("comp", 3)
    for name, tab in (("units", units), ("inv", inv)):
        for k, v in tab.items():
            _known(f"{c.path}.{name}", k, oset if name == "units" else aset, "object" if name == "units" else "arrow")
            _known(f"{c.path}.{name}", v, aset, "arrow")
    for (a, b), v in comp.items():
        for x in (a, b, v):
            _known(f"{c.path}.comp", x, aset, "arrow")
    for x in objs:
        if x not in units:
            raise SchemaError(f"{c.path}.units", f"no unit for object {enc(x)!r}")
    for g in arrows:
        if g not in inv:
            raise SchemaError(f"{c.path}.inv", f"no inverse for arrow {enc(g)!r}")
    return Groupoid(objs, arrows, sfn, tfn, units, inv, comp)


# -- bundles and covers -----------------------------------------------------

def bundle_to_json(P, embed=True):
    doc = {
        "total": [enc(p) for p in P.total],
        "base": [enc(m) for m in P.base],
        "proj": [[enc(p), enc(P.proj[p])] for p in P.total],
        "momentum": [[enc(p), enc(P.momentum[p])] for p in P.total],
        "action": [[enc(p), enc(g), enc(q)] for (p, g), q in P.action.items()],
    }
    if embed:
        doc["groupoid"] = groupoid_to_json(P.structure)
    return doc


def load_bundle(src, G=None):
    c = _ctx(src)
    G = G or load_groupoid(c.sub("groupoid"))
    total = c.ids("total")
    base = c.ids("base")
    tset, bset = set(total), set(base)
    proj, mom, act = c.table("proj", 2), c.table("momentum", 2), c.table("action", 3)
    for p in total:
        if p not in proj or p not in mom:
            raise SchemaError(c.path, f"element {enc(p)!r} lacks a projection or momentum")
    for p, m in proj.items():
        _known(f"{c.path}.proj", p, tset, "element")
        _known(f"{c.path}.proj", m, bset, "base point")
    for p, x in mom.items():
        _known(f"{c.path}.momentum", p, tset, "element")
        _known(f"{c.path}.momentum", x, set(G.objects), "object")
    for (p, g), q in act.items():
        _known(f"{c.path}.action", p, tset, "element")
        _known(f"{c.path}.action", g, set(G.arrows), "arrow")
        _known(f"{c.path}.action", q, tset, "element")
    return PrincipalBundle(total, base, proj, mom, G, act)


def cover_to_json(U):
    return {"base": [enc(m) for m in U.base], "indices": [enc(a) for a in U.indices],
            "sets": [[enc(a), [enc(m) for m in U.sets[a]]] for a in U.indices]}


def load_cover(src, base=None):
    c = _ctx(src)
    b = c.ids("base")
    if base is not None and tuple(b) != tuple(base):
        raise SchemaError(f"{c.path}.base", "does not match the base it is meant to cover")
    idx = c.ids("indices")
    sets = {}
    for i, row in enumerate(c.field("sets", list)):
        p = f"{c.path}.sets[{i}]"
        if not isinstance(row, list) or len(row) != 2 or not isinstance(row[1], list):
            raise SchemaError(p, "expected [index, [points]]")
        a = dec(row[0], p + "[0]")
        _known(p, a, set(idx), "index")
        if a in sets:
            raise SchemaError(p, "duplicate entry")
        pts = [dec(v, f"{p}[1][{j}]") for j, v in enumerate(row[1])]
        if len(set(pts)) != len(pts):
            raise SchemaError(p, "duplicate point")
        for m in pts:
            _known(p, m, set(b), "point")
        sets[a] = pts
    for a in idx:
        sets.setdefault(a, [])
    return Cover(b, idx, sets)


def sections_to_json(sec):
    return [[enc(a), enc(m), enc(p)] for a, vals in sec.items() for m, p in vals.items()]


def load_sections(rows, path="$.sections"):
    tab = _Ctx({"s": rows}, path, ".").table("s", 3)
    out = {}
    for (a, m), p in tab.items():
        out.setdefault(a, {})[m] = p
    return out


def trivdata_to_json(d, embed=True):
    doc = {
        "cover": cover_to_json(d.cover),
        "momenta": [[enc(a), enc(m), enc(x)] for a in d.cover.indices for m, x in d.momenta[a].items()],
        "cocycle": [[enc(a), enc(b), enc(m), enc(g)] for (a, b), vals in d.cocycle.items() for m, g in vals.items()],
    }
    if embed:
        doc["groupoid"] = groupoid_to_json(d.structure)
    return doc


def load_trivdata(src, G=None):
    c = _ctx(src)
    G = G or load_groupoid(c.sub("groupoid"))
    U = load_cover(c.sub("cover"))
    mom = {a: {} for a in U.indices}
    for (a, m), x in c.table("momenta", 3).items():
        _known(f"{c.path}.momenta", a, set(U.indices), "index")
        _known(f"{c.path}.momenta", x, set(G.objects), "object")
        mom[a][m] = x
    coc = {}
    for (a, b, m), g in c.table("cocycle", 4).items():
        _known(f"{c.path}.cocycle", g, set(G.arrows), "arrow")
        coc.setdefault((a, b), {})[m] = g
    return LocalTrivData(U, G, mom, coc)


# -- bibundles and local data -----------------------------------------------

def genmor_to_json(P):
    return {"source": groupoid_to_json(P.source), "bundle": bundle_to_json(P.bundle),
            "left": [[enc(g), enc(p), enc(q)] for (g, p), q in P.left.items()]}


def load_genmor(src):
    c = _ctx(src)
    G = load_groupoid(c.sub("source"))
    B = load_bundle(c.sub("bundle"))
    left = c.table("left", 3)
    for (g, p), q in left.items():
        _known(f"{c.path}.left", g, set(G.arrows), "arrow")
        _known(f"{c.path}.left", p, set(B.total), "element")
        _known(f"{c.path}.left", q, set(B.total), "element")
    if tuple(B.base) != tuple(G.objects):
        raise SchemaError(f"{c.path}.bundle.base", "must list the objects of the source groupoid")
    return GeneralizedMorphism(G, B, left)


def locgenmor_to_json(L):
    return {"source": groupoid_to_json(L.source), "data": trivdata_to_json(L.data),
            "theta": [[enc(b), enc(a), enc(g), enc(h)] for (b, a), vals in L.theta.items() for g, h in vals.items()]}


def load_locgenmor(src):
    c = _ctx(src)
    G = load_groupoid(c.sub("source"))
    d = load_trivdata(c.sub("data"))
    theta = {(b, a): {} for a in d.cover.indices for b in d.cover.indices}
    for (b, a, g), h in c.table("theta", 4).items():
        _known(f"{c.path}.theta", g, set(G.arrows), "arrow")
        _known(f"{c.path}.theta", h, set(d.structure.arrows), "arrow")
        if (b, a) not in theta:
            raise SchemaError(f"{c.path}.theta", f"unknown index pair {enc((b, a))!r}")
        theta[b, a][g] = h
    return LocalGeneralizedMorphism(G, d, theta)


def local_morita_to_json(M):
    fam = lambda phi: [[enc(k), enc(x), enc(g)] for k, vals in phi.items() for x, g in vals.items()]
    return {"theta": locgenmor_to_json(M.theta), "eta": locgenmor_to_json(M.eta),
            "phi_theta": fam(M.phi_theta), "phi_eta": fam(M.phi_eta)}


def load_local_morita(src):
    from .morita import LocalMoritaEquivalence
    c = _ctx(src)
    T, E = load_locgenmor(c.sub("theta")), load_locgenmor(c.sub("eta"))
    fams = []
    for key in ("phi_theta", "phi_eta"):
        out = {}
        for (k, x), g in c.table(key, 3).items():
            out.setdefault(k, {})[x] = g
        fams.append(out)
    return LocalMoritaEquivalence(T, E, *fams)


def map_to_json(f, X, Y):
    return {"domain": [enc(x) for x in X], "codomain": [enc(y) for y in Y], "map": [[enc(x), enc(f[x])] for x in X]}


def load_map(src):
    c = _ctx(src)
    X, Y = c.ids("domain"), c.ids("codomain")
    f = c.table("map", 2)
    for x in X:
        if x not in f:
            raise SchemaError(f"{c.path}.map", f"no image for {enc(x)!r}")
    for x, y in f.items():
        _known(f"{c.path}.map", x, set(X), "domain point")
        _known(f"{c.path}.map", y, set(Y), "codomain point")
    return f, X, Y
