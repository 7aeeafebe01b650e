"""Command line entry point: ``ternstab <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import sys

from ..errors import ConfigError
from .runner import EXIT_CONFIG, run, write_outputs
from .scenario import load_scenario, parse_scenario

DESCRIPTION = "Stability and superstability checks for ternary semigroup homomorphisms."


def parse_probes(text: str) -> dict:
    """``exhaustive``, ``grid:LO,HI,COUNT``, ``points:A,B,...`` or ``gen:A,B@DEPTH``."""
    if text == "exhaustive":
        return {"exhaustive": True}
    kind, _, body = text.partition(":")
    try:
        if kind == "grid":
            lo, hi, count = body.split(",")
            return {"grid": [float(lo), float(hi), int(count)]}
        if kind == "points":
            return {"points": [_number(t) for t in body.split(",")]}
        if kind == "gen":
            gens, _, depth = body.partition("@")
            return {"generators": [_number(t) for t in gens.split(",")],
                    "depth": int(depth or 1)}
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"bad probe spec {text!r}")


def _number(tok: str):
    tok = tok.strip()
    try:
        return int(tok)
    except ValueError:
        return float(tok)


def parse_target(text: str) -> dict:
    kind, _, dim = text.partition(":")
    out = {"kind": kind}
    if dim:
        out["dim"] = int(dim)
    return out


def _structure(text: str) -> dict:
    return {"table_file": text} if text.endswith((".txt", ".table")) else {"name": text}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="verdict tolerance (default 1e-9)")
    common.add_argument("--n-max", type=int, help="iteration cap (default 60)")
    common.add_argument("--seed", type=int, help="seed for random draws (default 0)")
    common.add_argument("--out", help="directory for report.json, report.txt and series CSVs")
    common.add_argument("--format", choices=("text", "machine"), default="text",
                        help="report printed on stdout")

    parser = argparse.ArgumentParser(prog="ternstab", description=DESCRIPTION)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stability", parents=[common],
                       help="Hyers limit and distance bound for an approximately additive map")
    p.add_argument("--structure", default="reals-add")
    p.add_argument("--target", type=parse_target, default={"kind": "real"})
    p.add_argument("--map", required=True, help="expression in x")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--epsilon", type=float, help="constant control")
    g.add_argument("--phi", help="control expression in x, y, z")
    p.add_argument("--probes", type=parse_probes, default=None)
    p.add_argument("--series-point", type=_number)

    p = sub.add_parser("superstability", parents=[common],
                       help="bounded-or-homomorphism dichotomy for a multiplicative map")
    p.add_argument("--structure", default="reals-add")
    p.add_argument("--target", type=parse_target, default={"kind": "complex"})
    p.add_argument("--map", required=True, help="expression in x")
    p.add_argument("--probes", type=parse_probes, default=None)
    p.add_argument("--growth-u", type=_number, help="base point for the growth trace")

    p = sub.add_parser("baker", parents=[common],
                       help="diagonal-matrix counterexample for a non-multiplicative norm")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--triples", type=int, default=100)

    p = sub.add_parser("lemma", parents=[common],
                       help="rearrangement identity on random maps and quintuples")
    p.add_argument("--structure", required=True)
    p.add_argument("--draws", type=int, default=1000)

    p = sub.add_parser("axioms", parents=[common],
                       help="associativity and commutativity with first witnesses")
    p.add_argument("--structure", required=True, help="structure name or table file")
    p.add_argument("--probes", type=parse_probes, default=None)

    p = sub.add_parser("run", parents=[common], help="run a scenario file")
    p.add_argument("scenario")
    return parser


def scenario_document(args) -> dict:
    doc = {"version": 1, "suite": args.command, "name": args.command}
    for key in ("tol", "n_max", "seed"):
        if getattr(args, key) is not None:
            doc[key] = getattr(args, key)
    if args.command in ("stability", "superstability", "lemma", "axioms"):
        doc["structure"] = _structure(args.structure)
    if args.command in ("stability", "superstability"):
        doc["target"] = args.target
        doc["map"] = {"expr": args.map}
    if getattr(args, "probes", None):
        doc["probes"] = args.probes
    params = {}
    if args.command == "stability":
        doc["control"] = ({"constant": args.epsilon} if args.epsilon is not None
                          else {"expr": args.phi})
        if args.series_point is not None:
            params["series_point"] = args.series_point
    elif args.command == "superstability" and args.growth_u is not None:
        params["growth_u"] = args.growth_u
    elif args.command == "baker":
        params = {"epsilon": args.epsilon, "triples": args.triples}
    elif args.command == "lemma":
        params = {"draws": args.draws}
    if params:
        doc["params"] = params
    return doc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            sc = load_scenario(args.scenario)
            for key in ("tol", "n_max", "seed"):
                if getattr(args, key) is not None:
                    setattr(sc, key, getattr(args, key))
        else:
            sc = parse_scenario(json.dumps(scenario_document(args), indent=1),
                                source=f"<{args.command} arguments>")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = run(sc)
    out = args.out or (sc.output or {}).get("dir")
    if out:
        write_outputs(report, sc.path(out) if args.out is None else out)
    sys.stdout.write(report.to_machine() if args.format == "machine" else report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
