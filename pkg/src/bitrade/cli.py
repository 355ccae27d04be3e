"""Command line: construct families, compute groups, plan, verify, convert,
export DOT.

Exit codes: 0 success, 1 verification failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys

from .digraph import NotConnected, NotEulerian, sandpile_group
from .families import ParameterError, build_family, parse_group_spec, plan_group, verify_instance
from .io import (DocumentError, bitrade_document, digraph_document, dumps,
                 parse_bitrade_document, parse_digraph_document, read_document, to_dot)
from .latin import (InvalidBitrade, LatinBitrade, NotConnectedBitrade, NotSeparated,
                    canonical_group, enumerate_spherical_bitrades)
from .surface import (MalformedRotation, NonSpherical, NotABitrade, NotDirectedEulerian,
                      SearchTooLarge, bitrade_from_embedding, find_spherical_rotation,
                      triangulation_from_bitrade, tutte_digraph)
from .suites import SUITES, run_suite

INPUT_ERRORS = (DocumentError, ParameterError, NotEulerian, NotConnected, InvalidBitrade,
                NotSeparated, NotConnectedBitrade, MalformedRotation, NonSpherical,
                NotABitrade, NotDirectedEulerian, SearchTooLarge)


class VerificationFailed(Exception):
    pass


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_construct(args) -> int:
    inst = build_family(args.family, args.params)
    problems = verify_instance(inst)
    meta = {"family": inst.family, "params": args.params,
            "expected_group": str(inst.expected_group),
            "sandpile_group": str(sandpile_group(inst.digraph)),
            "verified": not problems}
    _emit(dumps(digraph_document(inst.embedded, meta)), args.out)
    if problems:
        print("verification failed: " + "; ".join(problems), file=sys.stderr)
        return 1
    return 0


def cmd_group(args) -> int:
    if bool(args.digraph) == bool(args.bitrade):
        raise DocumentError("give exactly one of --digraph or --bitrade")
    if args.digraph:
        D, _ = parse_digraph_document(read_document(args.digraph))
        G = sandpile_group(D)
        payload = {"source": "digraph", "group": G.to_json()}
    else:
        bt = parse_bitrade_document(read_document(args.bitrade))
        P = bt.W if args.side == "W" else bt.B
        G = canonical_group(P).group
        payload = {"source": "bitrade", "side": args.side, "group": G.to_json(),
                   "canonical": str(G.torsion)}
    print(G)
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_plan(args) -> int:
    G = parse_group_spec(args.spec)
    if not G.is_finite or G.is_trivial:
        raise DocumentError(f"{args.spec!r} is not a nontrivial finite group")
    try:
        plan = plan_group(G, verify=not args.no_verify)
    except AssertionError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    print(f"group: {G}")
    print(f"verdict: {plan.verdict}")
    if plan.recipe:
        fam, params = plan.recipe
        print(f"recipe: {fam} {params}")
    if plan.instance is not None:
        print("verified: sandpile group, connectivity audit and spherical embedding")
    if plan.notes:
        print(f"notes: {plan.notes}")
    if args.json:
        print(json.dumps(plan.to_json(), sort_keys=True))
    return 0


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, args.max)
    failed = [c for c in checks if not c.ok]
    if args.json:
        print(json.dumps({"suite": args.suite, "max": args.max, "passed": len(checks) - len(failed),
                          "failed": len(failed), "checks": [c.to_json() for c in checks]},
                         indent=2))
    else:
        for c in checks:
            print(f"{'PASS' if c.ok else 'FAIL'} {c.name}: {c.detail}")
        print(f"{args.suite}: {len(checks) - len(failed)} passed, {len(failed)} failed")
    return 1 if failed else 0


def cmd_convert(args) -> int:
    if args.bitrade:
        if args.to != "digraph":
            raise DocumentError("--bitrade converts --to digraph")
        bt = parse_bitrade_document(read_document(args.bitrade))
        E = tutte_digraph(triangulation_from_bitrade(bt), args.cls)
        want = canonical_group(bt.W).canonical
        got = sandpile_group(E.digraph)
        meta = {"class": args.cls, "canonical_group": str(want), "sandpile_group": str(got),
                "groups_equal": got == want}
        _emit(dumps(digraph_document(E, meta)), args.out)
        return 0 if got == want else 1
    if args.digraph:
        if args.to != "bitrade":
            raise DocumentError("--digraph converts --to bitrade")
        D, E = parse_digraph_document(read_document(args.digraph))
        if E is None:
            E = find_spherical_rotation(D)
            if E is None:
                raise NonSpherical("no directed Eulerian spherical embedding exists")
        _, W, B = bitrade_from_embedding(E)
        if W is None:
            raise NotABitrade("the triangulation is not simple, so it gives no latin bitrade")
        bt = LatinBitrade(W, B)
        want = sandpile_group(D)
        got = canonical_group(W).canonical
        meta = {"sandpile_group": str(want), "canonical_group": str(got), "groups_equal": got == want}
        _emit(dumps(bitrade_document(bt, meta)), args.out)
        return 0 if got == want else 1
    raise DocumentError("give --bitrade or --digraph")


def cmd_export_dot(args) -> int:
    D, E = parse_digraph_document(read_document(args.digraph))
    _emit(to_dot(E if E is not None else D), args.out)
    return 0


def cmd_enumerate(args) -> int:
    bitrades, summary = enumerate_spherical_bitrades(args.max)
    doc = {"summary": summary.to_json(),
           "bitrades": [bitrade_document(bt) for bt in bitrades]}
    _emit(dumps(doc), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bitrade",
        description="Sandpile groups of directed Eulerian spherical embeddings and "
                    "canonical groups of spherical latin bitrades.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a digraph family with its embedding")
    p.add_argument("family", choices=["composites", "primes", "abc", "fig5", "fig6", "dipole"])
    p.add_argument("params", nargs="*", type=int,
                   help="composites m a1..ak | primes p n a1..ak | abc a b c | fig5 m | fig6 m | dipole N")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("group", help="sandpile group of a digraph or group of a bitrade half")
    p.add_argument("--digraph")
    p.add_argument("--bitrade")
    p.add_argument("--side", choices=["W", "B"], default="W")
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("plan", help="find a construction for a group such as 4+4 or 2^3+4")
    p.add_argument("spec")
    p.add_argument("--no-verify", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--max", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("convert", help="bitrade to Tutte digraph or embedded digraph to bitrade")
    p.add_argument("--bitrade")
    p.add_argument("--digraph")
    p.add_argument("--to", required=True, choices=["digraph", "bitrade"])
    p.add_argument("--class", dest="cls", choices=["R", "C", "S"], default="R")
    p.add_argument("--out")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("export-dot", help="DOT rendering of a digraph document")
    p.add_argument("--digraph", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("enumerate", help="list spherical bitrades up to a size")
    p.add_argument("--max", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
