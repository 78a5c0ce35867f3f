"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 usage or data error.
"""

import argparse
import difflib
import json
import sys

from . import acceptance
from .algebra import poincare
from .catalog import (
    CatalogError, default_catalog_path, load_catalog, validate_catalog, validate_degrees,
)
from .decomposition import (
    DecompositionError, FAIL, kernel_ideal_check, verify_catalog_edge, verify_motive_restriction,
    dominance_check,
)
from .omega import DEFAULT_VBOUND, OmegaError, augmentation_quotient
from .spectral import SpectralError, e2_page, run_real, run_to_stable, real_character

SCHEMA_VERSION = "1"
VERBS = ("list", "show", "poincare", "chow", "verify-edge", "verify-restriction", "validate", "ss-run", "report")


class UsageError(Exception):
    pass


def _result(entry, check, verdict, **witnesses):
    return {"entry": entry, "check": check, "verdict": verdict, "witnesses": witnesses}


def _table(rows, header):
    rows = [[str(c) for c in r] for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    out = [fmt.format(*header).rstrip(), fmt.format(*("-" * w for w in widths)).rstrip()]
    out += [fmt.format(*r).rstrip() for r in rows]
    return out


def _find(cat, group, prime):
    hits = [e for e in cat if e.group == group and (prime is None or e.prime == prime)]
    if len(hits) == 1:
        return hits[0]
    if len(hits) > 1:
        raise UsageError(f"{group} exists at primes {[e.prime for e in hits]}; pass -p")
    names = sorted({e.group for e in cat})
    close = difflib.get_close_matches(group, names, n=5, cutoff=0.3)
    if any(e.group == group for e in cat):
        primes = [e.prime for e in cat if e.group == group]
        raise UsageError(f"no entry {group} at p={prime}; available primes: {primes}")
    hint = f"; did you mean: {', '.join(close)}" if close else f"; known groups: {', '.join(names)}"
    raise UsageError(f"unknown group {group!r}{hint}")


def _deg(d):
    return f"{d} (CH^{d // 2})" if d % 2 == 0 else str(d)


# --- verbs -------------------------------------------------------------------------

def cmd_list(args, cat):
    results, rows = [], []
    for e in cat:
        flags = ",".join(sorted(e.flags)) or "-"
        results.append(_result(e.label, "list", "info", group=e.group, prime=e.prime, flags=sorted(e.flags),
                               generators=[g.name for g in e.gens], classes=len(e.classes),
                               res_complete=e.res_complete))
        rows.append([e.group, e.prime, " ".join(g.name for g in e.gens) or "-", len(e.classes),
                     "yes" if e.res_complete and e.res_lines else ("-" if not e.res_lines else "no"), flags])
    return results, _table(rows, ["group", "p", "generators", "classes", "res complete", "flags"])


def cmd_show(args, cat):
    e = _find(cat, args.group, args.prime)
    lines = [f"{e.label}"]
    lines += [f"  flags: {', '.join(sorted(e.flags)) or '-'}"]
    gens = [[g.name, ",".join(g.aliases) or "-", g.degree, g.degree // 2, g.height] for g in e.gens]
    lines += ["  " + l for l in _table(gens, ["generator", "aliases", "deg", "chow deg", "height"])]
    for ed in e.edges:
        lines.append(f"  edge <- {ed.target} labels={','.join(ed.labels) or '0'} ({ed.convention})")
    for r in e.res_lines:
        lines.append(f"  res ({','.join(r.ideal)}){r.monomial}{' [incomplete]' if r.incomplete else ''}")
    for c in e.classes:
        extra = " [known-inconsistent]" if c.known_inconsistent else ""
        extra += f" corrected: {c.corrected}" if c.corrected else ""
        lines.append(f"  class {c.name} deg {_deg(c.degree)} -> {c.image}{extra}")
    for a in e.assertions:
        lines.append(f"  assertion (not computed): {a}")
    result = _result(e.label, "show", "info", flags=sorted(e.flags),
                     generators=[{"name": g.name, "degree": g.degree, "chow_degree": g.degree // 2,
                                  "height": g.height, "aliases": list(g.aliases)} for g in e.gens],
                     edges=[{"target": x.target, "labels": list(x.labels), "convention": x.convention} for x in e.edges],
                     res=[{"ideal": list(r.ideal), "monomial": r.monomial, "incomplete": r.incomplete} for r in e.res_lines],
                     classes=[{"name": c.name, "degree": c.degree, "image": c.image, "corrected": c.corrected,
                               "known_inconsistent": c.known_inconsistent} for c in e.classes],
                     assertions=e.assertions)
    return [result], lines


def cmd_poincare(args, cat):
    e = _find(cat, args.group, args.prime)
    P = e.presentation()
    s = poincare(P, args.N)
    rows = [[d, d // 2, k] for d, k in enumerate(s) if k]
    lines = [f"{e.label}: dimension {P.dimension}, top degree {_deg(P.top_degree)}"]
    lines += _table(rows, ["deg", "chow deg", "dim"])
    return [_result(e.label, "poincare", "info", series={str(d): k for d, k in enumerate(s) if k},
                    dimension=P.dimension, top_degree=P.top_degree)], lines


def cmd_chow(args, cat):
    e = _find(cat, args.group, args.prime)
    M = e.res_module(args.m)
    try:
        q = augmentation_quotient(M, args.N)
    except OmegaError as exc:
        raise UsageError(str(exc)) from None
    names = e.expected_chow().names
    rows = [[d, d // 2, q.describe(d), ",".join(names.get(d, ())) or "-"] for d in q.degrees()]
    lines = [f"{e.label}: Res(Omega) (x) Z_({e.prime}), v-bound {args.m}"] + _table(rows, ["deg", "chow deg", "group", "names"])
    return [_result(e.label, "chow", "info", groups=q.to_json(),
                    names={str(d): list(v) for d, v in names.items()})], lines


def _check_rows(results):
    rows = []
    for r in results:
        w = r["witnesses"]
        what = w.get("class") or w.get("edge") or w.get("item") or ""
        parts = []
        if isinstance(w.get("expected"), str):
            parts.append(w["expected"])
        if w.get("comparison"):
            parts.append(f"({w['comparison']})")
        if w.get("mismatch_degree") is not None:
            parts.append(f"mismatch at {w['mismatch_degree']}")
        extra = " ".join(parts)
        rows.append([r["entry"], r["check"], what, extra, r["verdict"]])
    return _table(rows, ["entry", "check", "subject", "detail", "verdict"])


def cmd_verify_edge(args, cat):
    e = _find(cat, args.group, args.prime)
    edges = [x for x in e.edges if args.to is None or x.target == args.to]
    if not edges:
        raise UsageError(f"{e.label} has no edge to {args.to}")
    results = []
    for ed in edges:
        r = verify_catalog_edge(cat, e, ed)
        d = r.to_json()
        d["witnesses"]["convention"] = r.convention
        d["witnesses"]["mismatch_degree"] = r.mismatch_degree
        results.append(d)
    return results, _check_rows(results)


def cmd_verify_restriction(args, cat):
    G = _find(cat, args.group, args.prime)
    G2 = _find(cat, args.to, G.prime)
    if args.labels is not None:
        labels = tuple(x for x in args.labels.split(",") if x)
    else:
        names2 = set(G2.presentation().names)
        labels = tuple(g.name for g in G.gens if g.name not in names2)
    results = [r.to_json() for r in verify_motive_restriction(G, G2, labels, args.N)]
    results += [r.to_json() for r in kernel_ideal_check(G, G2, labels)]
    results.append(dominance_check(G).to_json())
    return results, _check_rows(results)


def cmd_validate(args, cat):
    if args.group and not args.all:
        e = _find(cat, args.group, args.prime)
        report = validate_degrees(e, cat)
    else:
        report = validate_catalog(cat)
    results = []
    for i in report.items:
        results.append(_result(i.entry, "degree", i.verdict, item=i.item, expected=i.expected, found=i.found,
                               known_inconsistent=i.known_inconsistent, note=i.note))
    unexpected = report.unexpected
    lines = [f"{len(report.items)} items checked, {len(report.flagged)} flagged, {len(unexpected)} unexpected"]
    rows = [[i.entry, i.item, i.expected, i.found, "known" if i.known_inconsistent else "UNEXPECTED"]
            for i in report.flagged + [u for u in unexpected if u.ok]]
    lines += _table(rows, ["entry", "item", "expected", "found", "status"])
    if unexpected:
        results.append(_result("catalog", "validation", "fail", unexpected=[u.item for u in unexpected]))
    return results, lines


def _parse_fiber(text):
    out = []
    for part in text.split(","):
        name, _, deg = part.partition("=")
        out.append((name, int(deg)))
    return out


def _parse_diffs(specs):
    diffs = {}
    for spec in specs or ():
        page, _, rest = spec.partition(":")
        name, _, img = rest.partition("=")
        diffs.setdefault(int(page), {})[name] = img
    return diffs


def cmd_ss_run(args, cat):
    if args.fiber is not None:
        label = "custom"
        page, cert = run_to_stable(e2_page(_parse_fiber(args.fiber) if args.fiber else [], args.smax),
                                   _parse_diffs(args.d))
        cor = None
    else:
        e = _find(cat, args.group, args.prime if args.prime is not None else 2)
        label = e.label
        page, cert = run_real(e, args.smax)
        cor = real_character(e, cert.window)
    dims = page.total_dims(cert.window)
    verdict = "pass" if cert.status == "stable" and (cor is None or cor == dims) else (
        "inconclusive" if cert.status != "stable" else FAIL)
    lines = [f"{label}: E_{page.r} = E_infinity in total degrees <= {cert.window} ({cert.status})"]
    rows = [[n, dims[n], cor[n] if cor else "-"] for n in range(len(dims))]
    lines += _table(rows, ["total deg", "dim", "convolution formula"])
    lines.append("surviving generators: " + ", ".join(k for k, v in page.surviving_generators().items() if v))
    if page.rho_height() is not None:
        lines.append(f"rho^{page.rho_height()} = 0 on the final page")
    return [_result(label, "spectral-sequence", verdict, page=page.r, dims=dims, convolution=cor,
                    certificate=cert.to_json(), surviving=page.surviving_generators(),
                    rho_height=page.rho_height())], lines


def cmd_report(args, cat):
    results = acceptance.run_all(cat)
    out = [_result("acceptance", f"criterion-{r.number}", "pass" if r.passed else "fail",
                   title=r.title, seconds=round(r.seconds, 3), details=r.to_json()["details"]) for r in results]
    lines = [r.line() for r in results]
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} criteria pass")
    return out, lines


HANDLERS = {"list": cmd_list, "show": cmd_show, "poincare": cmd_poincare, "chow": cmd_chow,
            "verify-edge": cmd_verify_edge, "verify-restriction": cmd_verify_restriction,
            "validate": cmd_validate, "ss-run": cmd_ss_run, "report": cmd_report}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-p", dest="prime", type=int, choices=(2, 3, 5), help="prime")
    common.add_argument("-N", type=int, default=None, help="degree cap (topological)")
    common.add_argument("-m", type=int, default=DEFAULT_VBOUND, help="number of v-variables")
    common.add_argument("--json", action="store_true", help="emit the JSON report")
    common.add_argument("--catalog", default=None, help="catalog file (default: $ROSTCHOW_CATALOG or bundled)")

    parser = argparse.ArgumentParser(prog="rostchow", description="Chow rings of generalized Rost motives")
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("list", parents=[common], help="list catalog entries")
    for verb, text in (("show", "show one entry"), ("poincare", "Poincare series of P(y)"),
                       ("chow", "augmentation quotient of Res(Omega)")):
        sp = sub.add_parser(verb, parents=[common], help=text)
        sp.add_argument("group")
    sp = sub.add_parser("verify-edge", parents=[common], help="character check of chain edges")
    sp.add_argument("group")
    sp.add_argument("--to", default=None)
    sp = sub.add_parser("verify-restriction", parents=[common], help="restriction to a smaller motive")
    sp.add_argument("group")
    sp.add_argument("--to", required=True)
    sp.add_argument("--labels", default=None, help="comma separated label generators")
    sp = sub.add_parser("validate", parents=[common], help="degree validation")
    sp.add_argument("group", nargs="?")
    sp.add_argument("--all", action="store_true")
    sp = sub.add_parser("ss-run", parents=[common], help="real-field spectral sequence")
    sp.add_argument("group", nargs="?")
    sp.add_argument("--smax", type=int, default=24)
    sp.add_argument("--fiber", default=None, help="custom fiber, e.g. y6=6,y10=10")
    sp.add_argument("--d", action="append", help="differential, e.g. 7:y6=rho^7")
    sub.add_parser("report", parents=[common], help="run the acceptance suite")
    return parser


def run(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    path = args.catalog or default_catalog_path()
    try:
        cat = load_catalog(path)
        if args.verb in ("show", "poincare", "chow", "verify-edge", "verify-restriction") and not args.group:
            raise UsageError("a group is required")
        if args.verb == "ss-run" and args.fiber is None and not args.group:
            raise UsageError("ss-run needs a group or --fiber")
        results, lines = HANDLERS[args.verb](args, cat)
    except (UsageError, CatalogError, DecompositionError, OmegaError, SpectralError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        if args.json:
            doc = {"schema_version": SCHEMA_VERSION, "command": args.verb, "status": "error",
                   "catalog": str(path), "results": [_result("-", "error", "fail", message=str(msg))]}
            print(json.dumps(doc, indent=2), file=out)
        print(f"error: {msg}", file=err)
        return 2
    failed = any(r["verdict"] in ("fail",) for r in results)
    if args.json:
        doc = {"schema_version": SCHEMA_VERSION, "command": args.verb, "status": "fail" if failed else "pass",
               "catalog": str(path), "results": results}
        print(json.dumps(doc, indent=2, default=str), file=out)
    else:
        print("\n".join(lines), file=out)
    return 1 if failed else 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
