"""Command-line entry point: ``reconkit <command> ...``.

Each command builds a JSON-ready report; the text output is rendered from
that report.  The exit status is 0 unless an exact check failed or the
command errored.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .errors import ReconkitError
from .exaut import EMPIRICAL_FAIL, EMPIRICAL_PASS, EXACT_FAIL, EXACT_PASS, build_exaut, verify_all, verify_equivariance
from .fingroup import FiniteGroup, format_table, group_isomorphic, named_group, parse_table
from .fraisse import (
    ClassSpec,
    builtin_spec,
    check_amalgamation,
    extension_property_check,
    gamma_class,
    generic_build,
    parse_spec,
    signature_symmetry_group,
)
from .frucht import frucht_graph, out_pipeline, verify_frucht
from .homomorphism import GroupIso
from .perm import GeneratedGroup, Permutation, all_subgroups, orbits, parse_group
from .reconstruct import exceptional_s6_automorphism, induced_bijection, reconstruct, scramble_harness
from .structures import (
    FinStructure,
    automorphism_group,
    canonical_relational,
    acl_threshold,
    dcl,
    format_structure,
    is_homogeneous,
    parse_structure,
    playground,
)

SCHEMA = "reconkit.report/1"

EXPLAIN = {
    "group": "Permutation groups from generators: order, base and orbits via a stabilizer chain; "
    "every subgroup by joining cyclic subgroups; isomorphism of Cayley tables by generator-image search.",
    "struct": "Finite relational structures: automorphisms by colour refinement and individualization, "
    "homogeneity by comparing embeddings with tuple orbits, closures from stabilizer orbits, "
    "and the orbit structure of a permutation group on tuples.",
    "class": "Classes given by sort, symmetry and forbidden-substructure constraints: exhaustive "
    "amalgamation checks up to a size bound, seeded generic structures with one-point extension "
    "properties, and the permutations of the signature that preserve the class.",
    "exaut": "Pairs of a closed set K and a group L of automorphisms of K, sent to the subgroup of Aut(M) "
    "stabilizing K with restriction in L; checks that quotient, normality, order and action "
    "identities hold on the finite model, separating exact identities from empirical ones.",
    "frucht": "A graph whose automorphism group is a given finite group: the Cayley colour graph with "
    "each coloured arc replaced by a path carrying pendant paths of colour-specific lengths.",
    "outpipe": "Group to graph to sorted class to signature symmetries, checking that the symmetries "
    "of the class form a group isomorphic to the one we started from.",
    "reconstruct": "Given an isomorphism between automorphism groups, match images of point stabilizers "
    "with point stabilizers, confirm the isomorphism is conjugation by the resulting bijection, "
    "and compare orbits on tuples.",
}


# -- input helpers ----------------------------------------------------------------------


def _read(arg: str) -> str | None:
    p = Path(arg)
    return p.read_text() if p.is_file() else None


def load_structure(arg: str) -> FinStructure:
    text = _read(arg)
    return parse_structure(text) if text is not None else playground(arg)


def load_finite_group(arg: str) -> FiniteGroup:
    text = _read(arg)
    return parse_table(text) if text is not None else named_group(arg)


def load_perm_group(arg: str) -> GeneratedGroup:
    """A generator file, ``sym:n``, ``cyclic:n`` or ``aut:<playground>``."""
    text = _read(arg)
    if text is not None:
        return parse_group(text)
    head, _, rest = arg.partition(":")
    if head == "sym":
        return GeneratedGroup.symmetric(int(rest))
    if head == "cyclic":
        return GeneratedGroup.cyclic(int(rest))
    if head == "aut":
        return automorphism_group(playground(rest))
    raise ValueError(f"unknown group {arg!r}")


def load_spec(arg: str) -> ClassSpec:
    text = _read(arg)
    if text is not None:
        return parse_spec(text)
    if arg.startswith("gamma:"):
        return gamma_class(load_structure(arg.split(":", 1)[1]))
    return builtin_spec(arg)


def parse_iso_file(text: str, source: GeneratedGroup, target: GeneratedGroup) -> GroupIso:
    """Lines ``<cycles> -> <cycles>`` after a ``degree n`` header; the left sides must
    generate the source group."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("degree"):
        raise ValueError("isomorphism file must start with 'degree n'")
    n = int(lines[0].split()[1])
    lefts, rights = [], []
    for ln in lines[1:]:
        a, b = ln.split("->")
        lefts.append(Permutation.parse(a.strip(), n))
        rights.append(Permutation.parse(b.strip(), target.degree))
    S = GeneratedGroup(lefts, n)
    if not S.same_group(source):
        raise ValueError("the listed generators do not generate the automorphism group of M")
    return GroupIso(S, target, rights)


def _pts(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(x) for x in text.replace(",", " ").split()]


def _check(name: str, status: str, witnesses=None, details=None) -> dict:
    return {"check": name, "status": status, "witnesses": witnesses or [], "details": details or {}}


# -- commands ---------------------------------------------------------------------------


def cmd_group(args) -> dict:
    if args.action == "info":
        G = load_perm_group(args.source)
        return {
            "result": {
                "degree": G.degree,
                "order": G.order(),
                "base": list(G.base),
                "strong_generators": [str(g) for g in G.strong_generators],
                "orbits": orbits(G),
            }
        }
    if args.action == "subgroups":
        G = load_perm_group(args.source)
        subs = all_subgroups(G, args.bound or 1000)
        return {
            "result": {
                "order": G.order(),
                "count": len(subs),
                "subgroups": [
                    {"order": e.order, "index": e.index_in_parent, "normal": e.is_normal_in_parent, "generators": [str(g) for g in e.group.generators]}
                    for e in subs
                ],
            }
        }
    if args.action == "iso":
        A, B = load_finite_group(args.source), load_finite_group(args.other)
        phi = group_isomorphic(A, B)
        return {"result": {"isomorphic": phi is not None, "map": phi}}
    if args.action == "table":
        return {"result": {"table": format_table(load_finite_group(args.source))}}
    raise ValueError(args.action)


def cmd_struct(args) -> dict:
    M = load_structure(args.source)
    G = automorphism_group(M)
    if args.action == "aut":
        return {"result": {"n": M.n, "order": G.order(), "generators": [str(g) for g in G.generators], "orbits": orbits(G)}}
    if args.action == "homogeneous":
        r = is_homogeneous(M, G)
        return {"result": {"homogeneous": r.homogeneous, "subset": r.subset, "image": r.image}}
    if args.action == "closure":
        A = _pts(args.set)
        kind = args.closure or "dcl"
        if kind == "dcl":
            cl = dcl(M, A, G)
        elif kind.startswith("threshold:"):
            cl = acl_threshold(M, A, int(kind.split(":")[1]), G)
        else:
            from .fraisse import class_acl

            cl = class_acl(load_spec(kind.split(":", 1)[1]), M, A)
        return {"result": {"set": A, "closure": sorted(cl), "kind": kind}}
    if args.action == "canonical":
        C = canonical_relational(G, args.bound or 2)
        return {"result": {"structure": format_structure(C), "symbols": len(C.signature)}}
    raise ValueError(args.action)


def cmd_class(args) -> dict:
    spec = load_spec(args.spec)
    if args.action == "check":
        rep = check_amalgamation(spec, args.bound or 4)
        status = EXACT_PASS if rep.free else EXACT_FAIL
        return {"checks": [_check("free_amalgamation", status, [repr(w) for w in rep.failures[:10]], rep.to_dict())], "result": rep.to_dict()}
    if args.action == "build":
        b = generic_build(spec, args.k, args.stages, args.seed or 0)
        checks = []
        if b.complete:
            ok = bool(extension_property_check(b.structure, spec, args.k))
            checks.append(_check("extension_property", EXACT_PASS if ok else EXACT_FAIL))
        return {
            "checks": checks,
            "result": {"complete": b.complete, "stages": b.stages, "size": b.structure.n, "structure": format_structure(b.structure), "deficiencies": [repr(d) for d in b.deficiencies[:10]]},
        }
    if args.action == "symmetry":
        r = signature_symmetry_group(spec, max(2, args.bound or 2))
        return {
            "result": {
                "order": r.order(),
                "symbols": list(r.symbols),
                "generators": [w.symbol_permutation for w in r.witnesses],
                "members_checked": r.members_checked,
            }
        }
    raise ValueError(args.action)


def cmd_exaut(args) -> dict:
    M = playground(args.playground)
    bound = 2 if args.bound is None else args.bound
    kind = args.closure or "dcl"
    if kind.startswith("class:"):
        kind = load_spec(kind.split(":", 1)[1])
    model = build_exaut(M, kind, bound)
    if args.action == "build":
        s = model.summary()
        s["pairs_list"] = [repr(p) for p in model.pairs]
        s["j_orders"] = [g.order() for g in model.j_table]
        return {"result": s}
    checks = [r.to_dict(args.playground, {"bound": bound}) for r in verify_all(model)]
    for text in args.conj or []:
        g = Permutation.parse(text, M.n)
        F = GroupIso.conjugation(model.G, model.G, g)
        checks.append(verify_equivariance(model, F).to_dict(args.playground, {"bound": bound, "conjugator": str(g)}))
    return {"checks": checks, "result": model.summary()}


def cmd_frucht(args) -> dict:
    K = load_finite_group(args.group)
    F = frucht_graph(K)
    cert = verify_frucht(K, F)
    status = EXACT_PASS if cert.ok else EXACT_FAIL
    return {
        "checks": [_check("frucht", status, [] if cert.ok else [cert.aut_order], {"aut_order": cert.aut_order, "group_order": K.order})],
        "result": {"vertices": F.vertex_count, "generating_set": list(F.generating_set), "graph": format_structure(F.graph), "certificate": cert.to_dict()},
    }


def cmd_outpipe(args) -> dict:
    K = load_finite_group(args.group)
    rep = out_pipeline(K, check_bound=max(2, args.bound or 2))
    d = rep.to_dict()
    timing = d.pop("timings")
    status = EXACT_PASS if rep.ok else EXACT_FAIL
    return {"checks": [_check("outpipe", status, details={"symmetry_order": rep.symmetry_order, "group_order": K.order})], "result": d, "timing": timing}


def cmd_reconstruct(args) -> dict:
    arity = args.bound or 2
    if args.mode == "s6":
        F = exceptional_s6_automorphism()
        try:
            induced_bijection(F)
        except ReconkitError as e:
            return {
                "checks": [_check("s6_negative_control", EXACT_PASS, [type(e).__name__], {"message": str(e)})],
                "result": {"generator_images": {str(k): str(v) for k, v in F.generator_images.items()}, "outcome": type(e).__name__},
            }
        return {"checks": [_check("s6_negative_control", EXACT_FAIL)], "result": {}}
    if args.mode == "demo":
        M = load_structure(args.m or "c5")
        sc = scramble_harness(M, args.seed or 0)
        r = reconstruct(sc.F, M, sc.N, arity)
        recovered = r.f is not None and any(c == sc.sigma for c in r.coset)
        ok = r.verified and r.bidef is not None and r.bidef.ok and recovered
        res = r.to_dict()
        res["hidden_sigma"] = list(sc.sigma)
        res["sigma_in_coset"] = recovered
        return {"checks": [_check("reconstruct", EXACT_PASS if ok else EXACT_FAIL, [] if ok else [res.get("error", "")])], "result": res}
    if not (args.m and args.n and args.iso):
        raise ValueError("reconstruct needs --m, --n and --iso (or a mode: demo, s6)")
    M, N = load_structure(args.m), load_structure(args.n)
    F = parse_iso_file(Path(args.iso).read_text(), automorphism_group(M), automorphism_group(N))
    r = reconstruct(F, M, N, arity)
    ok = r.verified and r.bidef is not None and r.bidef.ok
    return {"checks": [_check("reconstruct", EXACT_PASS if ok else EXACT_FAIL, [] if ok else [r.error])], "result": r.to_dict()}


COMMANDS = {
    "group": cmd_group,
    "struct": cmd_struct,
    "class": cmd_class,
    "exaut": cmd_exaut,
    "frucht": cmd_frucht,
    "outpipe": cmd_outpipe,
    "reconstruct": cmd_reconstruct,
}


# -- parser and rendering --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--bound", type=int, default=None, help="size, arity or check bound for the command")
    common.add_argument("--closure", default=None, help="dcl | threshold:t | class:<spec>")
    common.add_argument("--explain", action="store_true", help="describe what the command computes")

    p = argparse.ArgumentParser(prog="reconkit", description="Finite permutation groups, structures and reconstruction checks.")
    p.add_argument("--version", action="version", version=f"reconkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", parents=[common], help="permutation groups and Cayley tables")
    g.add_argument("action", choices=["info", "subgroups", "iso", "table"])
    g.add_argument("source", help="generator file, sym:n, cyclic:n, aut:<playground>; for iso/table a group name or table file")
    g.add_argument("other", nargs="?", help="second group for iso")

    s = sub.add_parser("struct", parents=[common], help="finite structures")
    s.add_argument("action", choices=["aut", "homogeneous", "closure", "canonical"])
    s.add_argument("source", help="structure file or playground name (pureset:n, c5, rook3, cycle:n, path:n, cliques:a:b)")
    s.add_argument("--set", default=None, help="points, e.g. 0,1")

    c = sub.add_parser("class", parents=[common], help="amalgamation classes")
    c.add_argument("action", choices=["check", "build", "symmetry"])
    c.add_argument("spec", help="class file, pure_set, graphs, kn_free:n, colored_graph:n, gamma:<playground>")
    c.add_argument("--k", type=int, default=1)
    c.add_argument("--stages", type=int, default=200)

    e = sub.add_parser("exaut", parents=[common], help="pairs of closed sets and groups")
    e.add_argument("action", choices=["build", "verify"])
    e.add_argument("--playground", required=True)
    e.add_argument("--conj", action="append", help="also check equivariance for conjugation by this permutation (cycle notation)")

    f = sub.add_parser("frucht", parents=[common], help="graph with a given automorphism group")
    f.add_argument("--group", required=True, help="Z1..Z8, V4, S3, D4, Q8, ... or a Cayley table file")

    o = sub.add_parser("outpipe", parents=[common], help="group -> graph -> class -> symmetries")
    o.add_argument("--group", required=True)

    r = sub.add_parser("reconstruct", parents=[common], help="recover a bijection from a group isomorphism")
    r.add_argument("mode", nargs="?", choices=["run", "demo", "s6"], default="run")
    r.add_argument("--m", default=None, help="source structure (file or playground)")
    r.add_argument("--n", default=None, help="target structure")
    r.add_argument("--iso", default=None, help="generator-image file")
    return p


def _status_of(report: dict) -> str:
    if report.get("error"):
        return "error"
    statuses = [c["status"] for c in report.get("checks", [])]
    if EXACT_FAIL in statuses:
        return EXACT_FAIL
    if EMPIRICAL_FAIL in statuses:
        return EMPIRICAL_FAIL
    if EMPIRICAL_PASS in statuses:
        return EMPIRICAL_PASS
    return EXACT_PASS


def render_text(report: dict) -> str:
    lines = [f"{report['command']}: {report['status']}"]
    for c in report.get("checks", []):
        line = f"  [{c['status']}] {c['check']}"
        if c.get("details"):
            line += "  " + json.dumps(c["details"], sort_keys=True, default=str)
        lines.append(line)
        for w in c.get("witnesses", [])[:5]:
            lines.append(f"      witness: {json.dumps(w, default=str)}")
    res = report.get("result", {})
    for key, val in res.items():
        if isinstance(val, str) and "\n" in val:
            lines.append(f"  {key}:")
            lines += ["    " + ln for ln in val.rstrip().splitlines()]
        else:
            lines.append(f"  {key}: {json.dumps(val, default=str)}")
    if report.get("error"):
        lines.append(f"  error: {report['error']}")
    return "\n".join(lines)


def dispatch(argv: list[str] | None = None) -> tuple[dict, int]:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("json", "explain", "command")}
    report: dict = {"schema": SCHEMA, "version": __version__, "command": args.command, "parameters": params}
    if args.explain:
        report["explain"] = EXPLAIN[args.command]
    t = time.perf_counter()
    try:
        out = COMMANDS[args.command](args)
        report["checks"] = out.get("checks", [])
        report["result"] = out.get("result", {})
        timing = out.get("timing", {})
    except (ReconkitError, ValueError, OSError, KeyError) as e:
        report["checks"] = []
        report["result"] = {}
        report["error"] = f"{type(e).__name__}: {e}"
        timing = {}
    timing["total_seconds"] = round(time.perf_counter() - t, 3)
    report["timing"] = timing
    report["status"] = _status_of(report)
    code = 0 if report["status"] not in (EXACT_FAIL, "error") else 1
    return report, code


def main(argv: list[str] | None = None) -> int:
    as_json = build_parser().parse_args(argv).json
    report, code = dispatch(argv)
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True, default=str))
    else:
        if report.get("explain"):
            print(report["explain"])
            print()
        print(render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
