"""Command-line front end: JSON in, canonical JSON out.

Exit codes: 0 success, 1 mathematical rejection (with a machine-readable
reason on stdout), 2 parse or I/O error.  Output is deterministic: keys are
sorted and no timing or environment data is included.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import jsonio
from .complexes import cohomology
from .derived import derived_hom
from .errors import FormatError, MathError
from .extensions import (
    ExtClass,
    baer_sum,
    ext_class,
    is_split,
    psi,
    pullback_extension,
    pushdown_extension,
    theta,
)
from .abelian import ext1_group, hom_group
from .verify import run_verification

_CLASSIFY_CAP = 32


def _dump(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _load(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="picext")
    sub = p.add_subparsers(dest="command", required=True)

    group = sub.add_parser("group", help="group-level queries")
    gsub = group.add_subparsers(dest="subcommand", required=True)
    ginv = gsub.add_parser("invariants", help="canonical invariants of a group")
    ginv.add_argument("file")

    hom = sub.add_parser("hom", help="Hom group of two groups")
    hom.add_argument("a")
    hom.add_argument("b")

    ext1 = sub.add_parser("ext1", help="Ext^1 group of two groups")
    ext1.add_argument("a")
    ext1.add_argument("b")

    cx = sub.add_parser("complex", help="complex-level queries")
    csub = cx.add_subparsers(dest="subcommand", required=True)
    ccoh = csub.add_parser("cohomology", help="cohomology of a two-term complex")
    ccoh.add_argument("file")

    dhom = sub.add_parser("dhom", help="derived Hom group of two complexes")
    dhom.add_argument("k")
    dhom.add_argument("l")
    dhom.add_argument("--degree", type=int, default=0)

    ext = sub.add_parser("ext", help="extension operations")
    esub = ext.add_subparsers(dest="subcommand", required=True)

    ecls = esub.add_parser("classify", help="list Ext^1(M, K) with optional representatives")
    ecls.add_argument("m")
    ecls.add_argument("k")
    ecls.add_argument("--representatives", action="store_true")

    etheta = esub.add_parser("theta", help="class of an extension")
    etheta.add_argument("e")

    epsi = esub.add_parser("psi", help="extension realizing a class")
    epsi.add_argument("m")
    epsi.add_argument("k")
    epsi.add_argument("--class", dest="coords", required=True)

    esum = esub.add_parser("sum", help="Baer sum of two extensions")
    esum.add_argument("e1")
    esum.add_argument("e2")

    esplit = esub.add_parser("split", help="split test")
    esplit.add_argument("e")

    epull = esub.add_parser("pullback", help="pull back an extension along a chain map")
    epull.add_argument("e")
    epull.add_argument("f")

    epush = esub.add_parser("pushdown", help="push an extension down along a chain map")
    epush.add_argument("e")
    epush.add_argument("g")

    ver = sub.add_parser("verify", help="run the randomized verification suites")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--iterations", type=int, default=10)
    return p


def _execute(args) -> dict:
    if args.command == "group":
        g = jsonio.group_from_json(_load(args.file))
        return {"invariants": jsonio.invariants_to_json(g)}
    if args.command == "hom":
        a = jsonio.group_from_json(_load(args.a))
        b = jsonio.group_from_json(_load(args.b))
        hg = hom_group(a, b)
        gens = [
            jsonio.hom_to_json(hg.lift(hg.group.element(tuple(1 if t == j else 0 for t in range(hg.group.ambient_rank)))))
            for j in range(hg.group.ambient_rank)
        ]
        return {"invariants": jsonio.invariants_to_json(hg.group), "generators": gens}
    if args.command == "ext1":
        a = jsonio.group_from_json(_load(args.a))
        b = jsonio.group_from_json(_load(args.b))
        return {"invariants": jsonio.invariants_to_json(ext1_group(a, b))}
    if args.command == "complex":
        k = jsonio.two_term_from_json(_load(args.file))
        h = cohomology(k)
        return {
            "h_minus1": jsonio.invariants_to_json(h[-1]),
            "h0": jsonio.invariants_to_json(h[0]),
        }
    if args.command == "dhom":
        k = jsonio.two_term_from_json(_load(args.k))
        l = jsonio.two_term_from_json(_load(args.l))
        return jsonio.derived_hom_to_json(derived_hom(k, l, args.degree))
    if args.command == "ext":
        return _execute_ext(args)
    if args.command == "verify":
        return run_verification(args.seed, args.iterations)
    raise FormatError(f"unknown command {args.command}")


def _execute_ext(args) -> dict:
    if args.subcommand == "classify":
        m = jsonio.two_term_from_json(_load(args.m))
        k = jsonio.two_term_from_json(_load(args.k))
        dh = derived_hom(m, k, 1)
        out = {"invariants": jsonio.invariants_to_json(dh.group)}
        if args.representatives:
            n = dh.group.ambient_rank
            reps = []
            for j in range(min(n, _CLASSIFY_CAP)):
                coords = tuple(1 if t == j else 0 for t in range(n))
                reps.append(jsonio.extension_to_json(psi(ExtClass(dh, dh.group.element(coords)))))
            out["representatives"] = reps
            out["truncated"] = n > _CLASSIFY_CAP
        return out
    if args.subcommand == "theta":
        e = jsonio.extension_from_json(_load(args.e))
        return jsonio.ext_class_to_json(theta(e))
    if args.subcommand == "psi":
        m = jsonio.two_term_from_json(_load(args.m))
        k = jsonio.two_term_from_json(_load(args.k))
        try:
            coords = [int(c) for c in args.coords.split(",")] if args.coords else []
        except ValueError as exc:
            raise FormatError(f"bad class coordinates: {exc}") from exc
        return jsonio.extension_to_json(psi(ext_class(m, k, coords)))
    if args.subcommand == "sum":
        e1 = jsonio.extension_from_json(_load(args.e1))
        e2 = jsonio.extension_from_json(_load(args.e2))
        return jsonio.extension_to_json(baer_sum(e1, e2))
    if args.subcommand == "split":
        e = jsonio.extension_from_json(_load(args.e))
        return {"split": is_split(e)}
    if args.subcommand == "pullback":
        e = jsonio.extension_from_json(_load(args.e))
        f = jsonio.chain_map_from_json(_load(args.f))
        return jsonio.extension_to_json(pullback_extension(e, f))
    if args.subcommand == "pushdown":
        e = jsonio.extension_from_json(_load(args.e))
        g = jsonio.chain_map_from_json(_load(args.g))
        return jsonio.extension_to_json(pushdown_extension(e, g))
    raise FormatError(f"unknown ext subcommand {args.subcommand}")


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        payload = _execute(args)
    except MathError as exc:
        print(_dump({"error": exc.payload()}))
        return 1
    except (FormatError, OSError) as exc:
        print(_dump({"error": {"kind": "format-error", "reason": str(exc)}}))
        return 2
    print(_dump(payload))
    if args.command == "verify" and not payload.get("ok", False):
        return 1
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
