"""Command line: load JSON inputs, run checks and constructions, print a JSON report.

Exit codes: 0 all checks pass, 1 some check fails, 2 input or schema error,
3 enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import os
import sys
import time

from . import jsonio as J
from .bundle import validate_bundle
from .cech import (DEFAULT_BUDGET, are_cohomologous, canonical_sections, check_sections, extract_trivdata,
                   first_sections, glue_bundle, h1_at_cover, validate_cover, validate_trivdata, whole_cover)
from .compose import check_composite_division, check_local_global_compat, compose_global, compose_local
from .errors import BudgetExceeded, DomainError, InvalidError, StructureError
from .fixtures import NAMES, fixture_files
from .genmor import find_equivalence, globalize, local_genmor_families, localize, validate_genmor
from .groupoid import validate_groupoid
from .morita import (factorization_check, gauge_group_fixture, local_morita_families, local_to_global,
                     morita_criterion, validate_morita)
from .nerve import (FAMILIES, MAX_DEGREE, check_theta_coherence, descent_roundtrip, face_identity_failures,
                    simplicial_identity_failures)


class Run:
    def __init__(self, argv):
        self.report = {"command": list(argv), "inputs": {}, "checks": [], "result": {}}

    def load(self, loader, path, *args):
        if path is None:
            return None
        self.report["inputs"][path] = J.digest(path) if os.path.exists(path) else None
        return loader(path, *args)

    def check(self, name, failures):
        entry = {"name": name, "status": "fail" if failures else "pass"}
        if failures:
            entry["witness"] = failures[0]
            entry["failures"] = len(failures)
        self.report["checks"].append(entry)
        return not failures

    def emit(self, key, doc, out=None):
        if out:
            with open(out, "w") as fh:
                fh.write(J.dumps(doc))
            self.report["result"][key] = {"written": out}
        else:
            self.report["result"][key] = doc

    @property
    def ok(self):
        return all(c["status"] == "pass" for c in self.report["checks"])


def budget(args):
    if getattr(args, "budget", None) is not None:
        return args.budget
    raw = os.environ.get("CECHG_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise J.SchemaError("CECHG_BUDGET", f"not an integer: {raw!r}") from None


def _bundle_extras(path):
    """Cover and sections stored alongside a bundle document, if any."""
    doc = J.read_json(path)
    cover = sections = None
    if "cover" in doc:
        cover = J.load_cover(J._Ctx(doc["cover"], f"{path}.cover", os.path.dirname(path)))
    if "sections" in doc:
        sections = J.load_sections(doc["sections"], f"{path}.sections")
    return cover, sections


# -- verbs ------------------------------------------------------------------

def cmd_validate(args, run):
    if not any((args.group, args.groupoid, args.bundle, args.cover, args.trivdata, args.genmor, args.locgenmor)):
        raise J.SchemaError("arguments", "nothing to validate")
    if args.group:
        K = run.load(J.load_group, args.group)
        run.check("group", [])
        run.report["result"]["order"] = len(K)
    if args.groupoid:
        G = run.load(J.load_groupoid, args.groupoid)
        run.check("groupoid", validate_groupoid(G))
        run.report["result"]["groupoid"] = {"objects": len(G.objects), "arrows": len(G.arrows)}
    if args.bundle:
        run.check("bundle", validate_bundle(run.load(J.load_bundle, args.bundle)))
    if args.cover:
        run.check("cover", validate_cover(run.load(J.load_cover, args.cover)))
    if args.trivdata:
        run.check("trivdata", validate_trivdata(run.load(J.load_trivdata, args.trivdata)))
    if args.genmor:
        run.check("generalized-morphism", validate_genmor(run.load(J.load_genmor, args.genmor)))
    if args.locgenmor:
        fam = local_genmor_families(run.load(J.load_locgenmor, args.locgenmor))
        for k, v in fam.items():
            run.check(f"local-generalized-morphism:{k}", v)


def cmd_glue(args, run):
    d = run.load(J.load_trivdata, args.trivdata)
    if not run.check("trivdata", validate_trivdata(d)):
        return
    P = glue_bundle(d)
    run.check("glued-bundle", validate_bundle(P))
    sec = canonical_sections(d)
    run.check("round-trip", [] if extract_trivdata(P, d.cover, sec) == d else ["extract(glue(d)) differs from d"])
    doc = J.bundle_to_json(P)
    doc["cover"], doc["sections"] = J.cover_to_json(d.cover), J.sections_to_json(sec)
    run.report["result"]["total"] = len(P.total)
    run.emit("bundle", doc, args.out)


def cmd_extract(args, run):
    P = run.load(J.load_bundle, args.bundle)
    if not run.check("bundle", validate_bundle(P)):
        return
    cover, sections = _bundle_extras(args.bundle)
    if args.cover:
        cover, sections = run.load(J.load_cover, args.cover, P.base), None
    if args.sections:
        sections = J.load_sections(run.load(J.read_json, args.sections), args.sections)
    cover = cover or whole_cover(P.base)
    sections = sections or first_sections(P, cover)
    check_sections(P, cover, sections)
    d = extract_trivdata(P, cover, sections)
    run.check("extracted-trivdata", validate_trivdata(d))
    if args.compare:
        d0 = run.load(J.load_trivdata, args.compare)
        run.check("round-trip-equality", [] if d0 == d else ["extracted data differs from the reference"])
    run.emit("trivdata", J.trivdata_to_json(d), args.out)


def cmd_cohomologous(args, run):
    d1, d2 = run.load(J.load_trivdata, args.a), run.load(J.load_trivdata, args.b)
    for name, d in (("a", d1), ("b", d2)):
        if not run.check(f"trivdata:{name}", validate_trivdata(d)):
            return
    S = are_cohomologous(d1, d2)
    run.check("cohomologous", [] if S else ["no local morphism exists between the two data"])
    if S:
        run.report["result"]["sigma"] = [[J.enc(a), J.enc(m), J.enc(g)] for a, v in S.sigma.items() for m, g in v.items()]


def cmd_h1(args, run):
    G = run.load(J.load_groupoid, args.groupoid)
    if not run.check("groupoid", validate_groupoid(G)):
        return
    U = run.load(J.load_cover, args.cover)
    reps = h1_at_cover(U.base, U, G, budget(args))
    run.report["result"]["classes"] = len(reps)
    if args.representatives:
        run.report["result"]["representatives"] = [J.trivdata_to_json(d, embed=False) for d in reps]


def cmd_localize(args, run):
    P = run.load(J.load_genmor, args.genmor)
    if not run.check("generalized-morphism", validate_genmor(P)):
        return
    U = run.load(J.load_cover, args.cover, P.source.objects) if args.cover else whole_cover(P.source.objects)
    sec = J.load_sections(run.load(J.read_json, args.sections), args.sections) if args.sections else None
    L = localize(P, U, sec)
    for k, v in local_genmor_families(L).items():
        run.check(f"local-generalized-morphism:{k}", v)
    run.emit("locgenmor", J.locgenmor_to_json(L), args.out)


def cmd_globalize(args, run):
    L = run.load(J.load_locgenmor, args.locgenmor)
    fam = local_genmor_families(L)
    for k, v in fam.items():
        run.check(f"local-generalized-morphism:{k}", v)
    if not run.ok:
        return
    P = globalize(L)
    run.check("generalized-morphism", validate_genmor(P))
    if args.compare:
        Q = run.load(J.load_genmor, args.compare)
        run.check("equivalent-to-reference", [] if find_equivalence(P, Q) else ["no equivalence to the reference bibundle"])
    run.emit("genmor", J.genmor_to_json(P), args.out)


def cmd_compose_global(args, run):
    P, Q = run.load(J.load_genmor, args.p), run.load(J.load_genmor, args.q)
    for name, X in (("p", P), ("q", Q)):
        if not run.check(f"generalized-morphism:{name}", validate_genmor(X)):
            return
    C = compose_global(P, Q)
    run.check("composite", validate_genmor(C))
    run.check("composite-division", check_composite_division(C))
    run.emit("genmor", J.genmor_to_json(C), args.out)


def cmd_compose_local(args, run):
    T, E = run.load(J.load_locgenmor, args.t), run.load(J.load_locgenmor, args.e)
    for name, X in (("t", T), ("e", E)):
        fam = local_genmor_families(X)
        if not run.check(f"local-generalized-morphism:{name}", [r for v in fam.values() for r in v]):
            return
    C = compose_local(T, E, check=False)
    for k, v in local_genmor_families(C).items():
        run.check(f"composite:{k}", v)
    run.emit("locgenmor", J.locgenmor_to_json(C), args.out)


def cmd_compat(args, run):
    P, Q = run.load(J.load_genmor, args.p), run.load(J.load_genmor, args.q)
    for name, X in (("p", P), ("q", Q)):
        if not run.check(f"generalized-morphism:{name}", validate_genmor(X)):
            return
    U = run.load(J.load_cover, args.u, P.source.objects) if args.u else whole_cover(P.source.objects)
    V = run.load(J.load_cover, args.v, Q.source.objects) if args.v else whole_cover(Q.source.objects)
    s1 = J.load_sections(run.load(J.read_json, args.s1), args.s1) if args.s1 else first_sections(P.bundle, U)
    s2 = J.load_sections(run.load(J.read_json, args.s2), args.s2) if args.s2 else first_sections(Q.bundle, V)
    rep = check_local_global_compat(P, Q, U, s1, V, s2)
    for k in ("momenta", "transition", "local"):
        run.check(f"compatibility:{k}", rep[k])


def cmd_morita_validate(args, run):
    P = run.load(J.load_genmor, args.genmor)
    run.check("morita", validate_morita(P))


def cmd_morita_criterion(args, run):
    P, Q = run.load(J.load_genmor, args.p), run.load(J.load_genmor, args.q)
    res = morita_criterion(P, Q)
    run.check("certified", [] if res.certified else [res.reason] + list(res.report))
    run.report["result"]["certified"] = res.certified
    if res.certified:
        run.report["result"]["left_division"] = [[J.enc(p), J.enc(q), J.enc(g)] for (p, q), g in res.phiL.items()]


def cmd_factorization(args, run):
    P = run.load(J.load_genmor, args.genmor)
    if not run.check("morita", validate_morita(P)):
        return
    rep = factorization_check(P)
    run.check("first-formula", rep["first"])
    run.check("second-formula", rep["second"])
    run.report["result"]["quadruples"] = {"first": rep["checked_first"], "second": rep["checked_second"]}


def cmd_local_morita(args, run):
    M = run.load(J.load_local_morita, args.local_morita)
    for k, v in local_morita_families(M).items():
        run.check(f"local-morita:{k}", v)
    if run.ok and not args.no_globalize:
        r = local_to_global(M)
        run.check("forward-certified", [] if r["forward_criterion"].certified else [r["forward_criterion"].reason])
        run.check("backward-certified", [] if r["backward_criterion"].certified else [r["backward_criterion"].reason])
        run.check("forward-morita", r["forward_validate"])
        run.check("backward-morita", r["backward_validate"])


def cmd_gauge_fixture(args, run):
    P = run.load(J.load_bundle, args.bundle)
    if not run.check("bundle", validate_bundle(P)):
        return
    U = run.load(J.load_cover, args.cover, P.base) if args.cover else None
    M = gauge_group_fixture(P, U)
    run.report["result"]["gauge_arrows"] = len(M.meta["gauge"].arrows)
    for k, v in local_morita_families(M).items():
        run.check(f"local-morita:{k}", v)
    doc = J.local_morita_to_json(M)
    doc["gauge"] = J.groupoid_to_json(M.meta["gauge"])
    run.emit("local_morita", doc, args.out)


def cmd_nerve(args, run):
    if bool(args.locgenmor) == bool(args.groupoid):
        raise J.SchemaError("arguments", "give exactly one of --locgenmor and --groupoid")
    if args.degree > MAX_DEGREE or args.degree < 2:
        raise DomainError(f"degree must lie between 2 and {MAX_DEGREE}")
    L = run.load(J.load_locgenmor, args.locgenmor) if args.locgenmor else None
    G = L.source if L else run.load(J.load_groupoid, args.groupoid)
    if not run.check("groupoid", validate_groupoid(G)):
        return
    run.check("face-identities", face_identity_failures(G))
    for n in range(2, args.degree + 1):
        run.check(f"simplicial-identities:{n}", simplicial_identity_failures(G, n))
    if L:
        rep = check_theta_coherence(L)
        for k in FAMILIES:
            run.check(f"coherence:{k}", rep[k])
        if "witness" in rep:
            run.report["result"]["degree2_witness"] = J.enc(rep["witness"])


def cmd_descent(args, run):
    f, X, Y = run.load(J.load_map, args.map)
    K = run.load(J.load_group, args.group)
    yc = run.load(J.load_cover, args.ycover, Y) if args.ycover else None
    rep = descent_roundtrip(f, X, Y, K, budget(args), yc)
    for k in ("bundle_on_X", "descent_cocycle", "descend_pullback", "pullback_descend", "class_check"):
        run.check(k.replace("_", "-"), rep[k])
    run.check("class-counts-agree", [] if rep["genmor_classes"] == rep["bundle_classes"] else
              [f"{rep['genmor_classes']} generalized morphism classes, {rep['bundle_classes']} bundle classes"])
    for k in ("genmor_classes", "bundle_classes", "n_genmors", "n_bundle_instances", "fibred_arrows"):
        run.report["result"][k] = rep[k]


def cmd_fixture(args, run):
    files = fixture_files(args.name, args.seed)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for name, doc in files.items():
            with open(os.path.join(args.out, name), "w") as fh:
                fh.write(J.dumps(doc))
        run.report["result"]["written"] = sorted(os.path.join(args.out, n) for n in files)
    else:
        run.report["result"]["files"] = files


# -- parser -----------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="cechg", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized fixtures")
    ap.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    ap.add_argument("--report", help="write the report here instead of stdout")
    sub = ap.add_subparsers(dest="verb", required=True)

    def verb(name, fn, *opts, **kw):
        p = sub.add_parser(name, **kw)
        for o in opts:
            p.add_argument(f"--{o}")
        p.set_defaults(fn=fn)
        return p

    verb("validate", cmd_validate, "group", "groupoid", "bundle", "cover", "trivdata", "genmor", "locgenmor")
    verb("glue", cmd_glue, "out").add_argument("--trivdata", required=True)
    p = verb("extract", cmd_extract, "cover", "sections", "compare", "out")
    p.add_argument("--bundle", required=True)
    p = verb("cohomologous", cmd_cohomologous)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p = verb("h1", cmd_h1)
    p.add_argument("--groupoid", required=True)
    p.add_argument("--cover", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--representatives", action="store_true")
    verb("genmor-localize", cmd_localize, "cover", "sections", "out").add_argument("--genmor", required=True)
    verb("genmor-globalize", cmd_globalize, "compare", "out").add_argument("--locgenmor", required=True)
    p = verb("compose-global", cmd_compose_global, "out")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p = verb("compose-local", cmd_compose_local, "out")
    p.add_argument("--t", required=True)
    p.add_argument("--e", required=True)
    p = verb("compat-check", cmd_compat, "u", "v", "s1", "s2")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    verb("morita-validate", cmd_morita_validate).add_argument("--genmor", required=True)
    p = verb("morita-criterion", cmd_morita_criterion)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    verb("factorization-check", cmd_factorization).add_argument("--genmor", required=True)
    p = verb("local-morita-validate", cmd_local_morita)
    p.add_argument("--local-morita", required=True)
    p.add_argument("--no-globalize", action="store_true")
    verb("gauge-fixture", cmd_gauge_fixture, "cover", "out").add_argument("--bundle", required=True)
    p = verb("nerve-check", cmd_nerve, "locgenmor", "groupoid")
    p.add_argument("--degree", type=int, default=2)
    p = verb("descent", cmd_descent, "ycover")
    p.add_argument("--map", required=True)
    p.add_argument("--group", required=True)
    p.add_argument("--budget", type=int)
    p = verb("fixture", cmd_fixture, "out")
    p.add_argument("name", choices=NAMES)
    return ap


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    run = Run(argv)
    t0 = time.perf_counter()
    code = None
    try:
        args.fn(args, run)
    except J.SchemaError as e:
        run.report["error"] = {"kind": "schema", "path": e.path, "message": str(e)}
        code = 2
    except (StructureError, DomainError) as e:
        run.report["error"] = {"kind": "input", "message": str(e)}
        code = 2
    except BudgetExceeded as e:
        run.report["error"] = {"kind": "budget", "message": str(e)}
        code = 3
    except InvalidError as e:
        run.check("construction", [str(e)])
    if code is None:
        code = 0 if run.ok else 1
    run.report["status"] = {0: "pass", 1: "fail", 2: "input-error", 3: "budget-exceeded"}[code]
    if args.timing:
        run.report["timing_seconds"] = round(time.perf_counter() - t0, 6)
    text = J.dumps(run.report)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def entry():
    sys.exit(main())
