"""Command-line entry point: ``shadelift <command> ...``.

Exit status is 0 when every check passes, 1 when a check fails and 2 on
usage or input errors.  ``--json`` (or ``SHADELIFT_FORMAT=json``) switches
every command to versioned JSON on standard output.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .bigraph import BigraphParseError, bigraph_fp_norm, bigraph_parse
from .duality import (
    Bicharacter,
    BicharacterError,
    bichar_enumerate_classify,
    bichar_props,
    check_symmetric_duality,
    chi_from_phi,
    functoriality_suite,
    parse_inline_chi,
    phi_from_chi,
    verify_star_iso,
)
from .groups import AbelianGroup
from .grouppa import BoxError, TwoBox, calibrate, scalar_value, state_sum_eval
from .tangle import Tangle, TangleError, compose, parse_tangle, shade
from .ty import fs_indicators, ty_classify, TYDatum

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------------
# argument helpers


def parse_group(text: str) -> AbelianGroup:
    text = text.strip()
    if text in ("", "1", "trivial"):
        return AbelianGroup([])
    try:
        return AbelianGroup([int(x) for x in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad group {text!r}: {exc}") from None


def load_chi(group: AbelianGroup, inline: str | None, path: str | None) -> Bicharacter:
    if inline is not None and path is not None:
        raise UsageError("give either --chi or --chi-file, not both")
    if path is not None:
        chi = Bicharacter.from_json(json.loads(Path(path).read_text()))
        if chi.group != group:
            raise UsageError(f"bicharacter file is for group {chi.group.factors}, not {group.factors}")
        return chi
    return parse_inline_chi(group, inline or "")


def load_tangle(path: str) -> Tangle:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    if text.lstrip().startswith("{"):
        return Tangle.from_json(json.loads(text))
    return parse_tangle(text)


_BOX = re.compile(r"\s*([PQ])\s*\(([-\d,\s]*)\)\s*")


def load_box(group: AbelianGroup, source: str) -> TwoBox:
    """``P(1,0)`` / ``Q(2)`` basis shorthand, or a path to TwoBox JSON."""
    m = _BOX.fullmatch(source)
    if m:
        g = tuple(int(x) for x in m.group(2).split(",") if x.strip())
        return TwoBox.basis(group, "+" if m.group(1) == "P" else "-", g)
    box = TwoBox.from_json(json.loads(Path(source).read_text()))
    if box.group != group:
        raise UsageError(f"box {source} is over {box.group.factors}, not {group.factors}")
    return box


# ----------------------------------------------------------------------------
# output


class Out:
    def __init__(self, fmt: str):
        self.fmt = fmt

    def emit(self, command: str, payload: dict, text: str) -> None:
        if self.fmt == "json":
            doc = {"schema": f"shadelift.{command}/{SCHEMA_VERSION}", **payload}
            sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        else:
            sys.stdout.write(text.rstrip("\n") + "\n")


def _phases(chi: Bicharacter) -> str:
    return "[" + "; ".join(" ".join(str(q) for q in row) for row in chi.phases) + "]"


# ----------------------------------------------------------------------------
# commands


def cmd_classify(args, out: Out) -> int:
    A = parse_group(args.group)
    res = bichar_enumerate_classify(A, args.filter, bound=args.bound)
    lines = [f"group {A.factors}: {len(res.bicharacters)} bicharacters ({res.filter}), {len(res.orbits)} orbits"]
    for o in res.orbits:
        lines.append(f"  representative {_phases(o[0])}  orbit size {len(o)}")
    out.emit("classify-bicharacters", res.to_json(), "\n".join(lines))
    return EXIT_OK


def cmd_verify(args, out: Out) -> int:
    A = parse_group(args.group)
    chi = load_chi(A, args.chi, args.chi_file)
    props = bichar_props(chi)
    if not props.is_nondegenerate:
        payload = {"chi": chi.to_json(), "nondegenerate": False, "ok": False}
        out.emit("verify-duality", payload, f"chi {_phases(chi)} is degenerate; no self-duality")
        return EXIT_FAIL
    phi = phi_from_chi(chi)
    report = verify_star_iso(phi)
    roundtrip = chi_from_phi(phi) == chi
    symmetric = check_symmetric_duality(phi)
    ok = report.ok and roundtrip
    if "symmetric" in args.check:
        ok = ok and symmetric
    payload = {
        "chi": chi.to_json(),
        "checks": report.checks,
        "roundtrip": roundtrip,
        "symmetric": symmetric,
        "chi_symmetric": props.is_symmetric,
        "ok": ok,
    }
    lines = [f"chi {_phases(chi)} on {A.factors}"]
    lines += [f"  {name:15s} {'pass' if v else 'FAIL'}" for name, v in report.checks.items()]
    lines.append(f"  {'roundtrip':15s} {'pass' if roundtrip else 'FAIL'}")
    lines.append(f"  symmetric = {str(symmetric).lower()}")
    out.emit("verify-duality", payload, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def _suite_job(job):
    factors, phases, trials, seed = job
    chi = Bicharacter(AbelianGroup(factors), phases)
    return chi.to_json(), functoriality_suite(phi_from_chi(chi), trials, seed).to_json()


def cmd_lift(args, out: Out) -> int:
    A = parse_group(args.group)
    if args.chi is not None or args.chi_file is not None:
        chis = [load_chi(A, args.chi, args.chi_file)]
    else:
        chis = bichar_enumerate_classify(A, "symmetric_nondegenerate").representatives
    for chi in chis:
        if not (chi.is_symmetric() and chi.is_nondegenerate()):
            raise UsageError(f"lift-check needs a symmetric non-degenerate chi, got {_phases(chi)}")
    jobs = [(A.factors, chi.phases, args.trials, args.seed) for chi in chis]
    if args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_suite_job, jobs))
    else:
        results = [_suite_job(j) for j in jobs]
    ok = all(r["ok"] for _, r in results)
    lines = []
    for (chij, r), chi in zip(results, chis):
        lines.append(
            f"chi {_phases(chi)}: {r['passed']}/{r['trials']} pass, "
            f"cases +:{r['cases']['+']} -:{r['cases']['-']} {'ok' if r['ok'] else 'FAIL'}"
        )
    payload = {"group": A.to_json(), "seed": args.seed, "results": [{"chi": c, **r} for c, r in results], "ok": ok}
    out.emit("lift-check", payload, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_ty_classify(args, out: Out) -> int:
    A = parse_group(args.group)
    data = ty_classify(A, bound=args.bound)
    lines = [f"{len(data)} inequivalent TY categories over {A.factors}"]
    lines += [f"  chi {_phases(d.chi)} sign {d.sign}" for d in data]
    out.emit("ty-classify", {"group": A.to_json(), "count": len(data), "data": [d.to_json() for d in data]},
             "\n".join(lines))
    return EXIT_OK


def cmd_ty_indicators(args, out: Out) -> int:
    A = parse_group(args.group)
    if args.chi is None and args.chi_file is None:
        reps = bichar_enumerate_classify(A, "symmetric_nondegenerate").representatives
        if not reps:
            raise UsageError("group has no symmetric non-degenerate bicharacter")
        chi = reps[0]
    else:
        chi = load_chi(A, args.chi, args.chi_file)
    try:
        datum = TYDatum(A, chi, args.sign)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ind = fs_indicators(datum)
    lines = [f"{'m' if k == 'm' else k}: {v}" for k, v in ind.values.items()]
    lines.append(f"factor planar algebra admissible: {str(ind.factor_planar_algebra_admissible).lower()}")
    out.emit("ty-indicators", {"datum": datum.to_json(), **ind.to_json()}, "\n".join(lines))
    return EXIT_OK


def cmd_bigraph(args, out: Out) -> int:
    g = bigraph_parse(args.code)
    if args.action == "parse":
        if out.fmt == "dot":
            sys.stdout.write(g.to_dot())
            return EXIT_OK
        payload = {
            "code": args.code,
            "levels": list(g.levels),
            "adjacency": [[list(r) for r in m] for m in g.adjacency],
            "duals": [[j + 1 for j in b] for b in g.duals],
            "roundtrip": g.serialize() == args.code,
        }
        text = f"depth {g.depth}, levels {list(g.levels)}, duals {payload['duals']}"
        out.emit("bigraph-parse", payload, text)
        return EXIT_OK if payload["roundtrip"] else EXIT_FAIL
    norm, index = bigraph_fp_norm(g)
    out.emit("bigraph-norm", {"code": args.code, "norm": norm, "index": index}, repr(norm))
    return EXIT_OK


def cmd_tangle(args, out: Out) -> int:
    t = load_tangle(args.file)
    if args.action == "validate":
        rep = t.validate()
        payload = {"valid": rep.ok, "violations": [{"kind": v.kind, "message": v.message} for v in rep.violations]}
        text = "valid" if rep.ok else "\n".join(f"invalid: {v.kind}: {v.message}" for v in rep.violations)
        out.emit("tangle-validate", payload, text)
        return EXIT_OK if rep.ok else EXIT_FAIL
    if args.action == "shade":
        s = shade(t)
        regions = [
            {"corners": [list(c) for c in r.corners], "shaded": s.shades[r.index], "loop_sides": r.n_loop_sides}
            for r in t.regions
        ]
        payload = {"signs": list(s.signs), "regions": regions}
        text = "signs " + " ".join(s.signs) + "\n" + "\n".join(
            f"  region {i}: {'shaded' if r['shaded'] else 'unshaded'} corners {r['corners']}"
            for i, r in enumerate(regions)
        )
        out.emit("tangle-shade", payload, text)
        return EXIT_OK
    if args.action == "compose":
        if args.other is None or args.disk is None:
            raise UsageError("compose needs --disk I and --with FILE")
        W = compose(t, args.disk, load_tangle(args.other))
        out.emit("tangle-compose", {"tangle": W.to_json()}, W.to_dsl())
        return EXIT_OK
    # eval
    if args.group is None:
        raise UsageError("eval needs --group")
    A = parse_group(args.group)
    s = shade(t)
    if args.reverse:
        s = s.op()
    boxes = [load_box(A, b) for b in args.box]
    w = calibrate(A).chosen
    v = state_sum_eval(s, boxes, w, group=A)
    if v.n == 2:
        box = v.to_twobox()
        out.emit("tangle-eval", {"result": box.to_json()}, repr(box))
    elif v.n == 0:
        val = scalar_value(v, w)
        out.emit("tangle-eval", {"result": val.to_json(), "approx": [val.to_complex().real, val.to_complex().imag]},
                 f"{val!r}  (~{val.to_complex():.6g})")
    else:
        payload = {"result": {"n": v.n, "side": v.side,
                              "coeffs": {",".join(map(str, k)): c.to_json() for k, c in sorted(v.coeffs.items())}}}
        out.emit("tangle-eval", payload, "\n".join(f"{k}: {c!r}" for k, c in sorted(v.coeffs.items())))
    return EXIT_OK


# ----------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS so an option given before the subcommand is not reset by the subparser
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--format", choices=("text", "json", "dot"), help="output format (default from SHADELIFT_FORMAT)")
    common.add_argument("--seed", type=int, help="seed for randomized trials (default 0)")
    common.add_argument("--threads", type=int, help="worker processes for independent jobs (default 1)")

    p = argparse.ArgumentParser(prog="shadelift", description=__doc__.splitlines()[0], parents=[common])
    p.add_argument("--version", action="version", version=f"shadelift {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def chi_opts(sp):
        sp.add_argument("--chi", help="inline phases, e.g. '1,1=1/4;1,2=1/2' (1-based generator indices)")
        sp.add_argument("--chi-file", help="bicharacter JSON file")

    sp = sub.add_parser("classify-bicharacters", parents=[common], help="enumerate bicharacters and Aut(A)-orbits")
    sp.add_argument("--group", required=True, help="cyclic factors, e.g. 2,2")
    sp.add_argument("--filter", default="all",
                    choices=("all", "symmetric", "nondegenerate", "symmetric-nondegenerate", "symmetric_nondegenerate"))
    sp.add_argument("--bound", type=int, default=64)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("verify-duality", parents=[common], help="build the self-duality of chi and check it")
    sp.add_argument("--group", required=True)
    chi_opts(sp)
    sp.add_argument("--check", action="append", default=[], choices=("star", "symmetric"),
                    help="'symmetric' also requires the duality to square to the identity")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("lift-check", parents=[common], help="functoriality of the lifted action on random pairs")
    sp.add_argument("--group", required=True)
    chi_opts(sp)
    sp.add_argument("--trials", type=int, default=200)
    sp.set_defaults(func=cmd_lift)

    ty = sub.add_parser("ty", parents=[common], help="Tambara-Yamagami data")
    tys = ty.add_subparsers(dest="ty_command", required=True)
    sp = tys.add_parser("classify", parents=[common])
    sp.add_argument("--group", required=True)
    sp.add_argument("--bound", type=int, default=64)
    sp.set_defaults(func=cmd_ty_classify)
    sp = tys.add_parser("indicators", parents=[common])
    sp.add_argument("--group", required=True)
    chi_opts(sp)
    sp.add_argument("--sign", choices=("+", "-"), default="+")
    sp.set_defaults(func=cmd_ty_indicators)

    sp = sub.add_parser("bigraph", parents=[common], help="principal graph codes")
    sp.add_argument("action", choices=("parse", "norm"))
    sp.add_argument("code")
    sp.set_defaults(func=cmd_bigraph)

    sp = sub.add_parser("tangle", parents=[common], help="planar tangles (DSL or JSON files, '-' for stdin)")
    sp.add_argument("action", choices=("validate", "shade", "compose", "eval"))
    sp.add_argument("file")
    sp.add_argument("--disk", type=int, help="compose: input disk to fill")
    sp.add_argument("--with", dest="other", help="compose: tangle inserted into --disk")
    sp.add_argument("--group", help="eval: cyclic factors")
    sp.add_argument("--box", action="append", default=[], help="eval: input box, 'P(g)', 'Q(g)' or TwoBox JSON path")
    sp.add_argument("--reverse", action="store_true", help="eval: use the reversed shading")
    sp.set_defaults(func=cmd_tangle)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    for name, default in (("json", False), ("format", None), ("seed", 0), ("threads", 1)):
        if not hasattr(args, name):
            setattr(args, name, default)
    fmt = args.format or ("json" if args.json else os.environ.get("SHADELIFT_FORMAT", "text"))
    if fmt not in ("text", "json", "dot"):
        print(f"shadelift: unknown output format {fmt!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, Out(fmt))
    except (UsageError, BicharacterError, BigraphParseError, TangleError, BoxError,
            ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"shadelift: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
