"""Command-line entry point.

Exit codes: 0 success (or a VALID witness), 2 no valid witness / check failed,
1 usage or runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .constructions import balanced_blowup, build_family, random_blowup
from .graph_core import Graph
from .persistence import (
    coloring_from_record,
    dumps_document,
    format_graph,
    graph_record,
    instance_record,
    load_document,
    make_document,
    read_graph,
    recipe_record,
    replay,
    to_graph6,
    write_document,
    write_graph,
)
from .ramsey import RamseyInstance, certify, trial_recipe
from .seeding import check_seed, fresh_seed

EXIT_OK, EXIT_ERROR, EXIT_NO_WITNESS = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2, which means "no witness" here
        self.print_help(sys.stderr)
        self.exit(EXIT_ERROR, f"\n{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, help="64-bit master seed (generated and printed if omitted)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "edgelist", "graph6"), default=None)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--budget", type=int, default=100, help="trial budget for randomized searches")
    return p


def _graph_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", action="append", default=[], help="edge-list or graph6 (.g6) file")
    p.add_argument("--family", action="append", default=[],
                   help="family spec, e.g. cycle:5, paley:13, turan:12:3, regular:10:3:3")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pseudoramsey", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)
    common = _common()

    p = sub.add_parser("construct", parents=[common], help="build a graph family member")
    _graph_inputs(p)

    p = sub.add_parser("spectrum", parents=[common], help="adjacency spectrum and (n,d,lambda) certificate")
    _graph_inputs(p)

    p = sub.add_parser("blowup", parents=[common], help="balanced or random blowup")
    _graph_inputs(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--factor", type=int, help="balanced blowup factor t")
    g.add_argument("--N", type=int, help="random blowup target size")

    p = sub.add_parser("color", parents=[common], help="overlay source graphs into a coloring of K_N")
    _graph_inputs(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--mode", choices=("identity", "random"), default="random")
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--tie-rule", choices=("lowest", "highest"), default="lowest")

    p = sub.add_parser("verify", parents=[common], help="verify a coloring, or replay a certificate")
    p.add_argument("--coloring", help="coloring or witness document")
    p.add_argument("--s", type=int, nargs="+")
    p.add_argument("--t", type=int)
    p.add_argument("--replay", help="certificate document to re-derive and compare")

    p = sub.add_parser("count-tuples", parents=[common], help="exact independent t-tuple count")
    _graph_inputs(p)
    p.add_argument("--t", type=int, required=True)

    p = sub.add_parser("bound", parents=[common], help="tuple-count and blowup bounds in log space")
    _graph_inputs(p)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--N", type=int)

    p = sub.add_parser("expect", parents=[common], help="exact E[i_t] of a random blowup, optional Monte Carlo")
    _graph_inputs(p)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--mc-trials", type=int, default=0)
    p.add_argument("--check-s", type=int, help="also check every sample is K_s-free")

    p = sub.add_parser("trace", parents=[common], help="candidate-pool trace of an independent sequence")
    _graph_inputs(p)
    p.add_argument("--sequence", required=True, help="comma-separated vertices")

    p = sub.add_parser("audit", parents=[common], help="max degree / neighbourhood edges of the first k colors")
    p.add_argument("--coloring", required=True)
    p.add_argument("--s", type=int, nargs="+", required=True)
    p.add_argument("--t", type=int, required=True)

    p = sub.add_parser("certify", parents=[common], help="search seeds for a Ramsey witness")
    _graph_inputs(p)
    p.add_argument("--s", type=int, nargs="+", required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--mode", choices=("identity", "random"), default="random")
    p.add_argument("--tie-rule", choices=("lowest", "highest"), default="lowest")
    parser.commands = sub.choices
    return parser


def _seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return check_seed(args.seed)
    seed = fresh_seed()
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _needs_seed(specs: Sequence[str]) -> bool:
    return any(s.startswith("regular:") for s in specs)


def _load_graphs(args: argparse.Namespace) -> tuple[list[Graph], list[str]]:
    graphs, names = [], []
    seed = _seed(args) if _needs_seed(args.family) else None
    for spec in args.family:
        graphs.append(build_family(spec, seed))
        names.append(spec)
    fmt = "graph6" if args.format == "graph6" else None
    for path in args.graph:
        graphs.append(read_graph(path, fmt))
        names.append(f"file:{path}")
    if not graphs:
        raise UsageError("give at least one --graph or --family")
    return graphs, names


def _one_graph(args: argparse.Namespace) -> tuple[Graph, str]:
    graphs, names = _load_graphs(args)
    if len(graphs) != 1:
        raise UsageError("this command takes exactly one graph")
    return graphs[0], names[0]


def _emit_doc(doc: dict, out: str | None) -> None:
    if out:
        write_document(doc, out)
    else:
        sys.stdout.write(dumps_document(doc))


def _emit_graph(g: Graph, args: argparse.Namespace) -> None:
    fmt = args.format if args.format in ("edgelist", "graph6") else "edgelist"
    if args.out:
        write_graph(g, args.out, fmt)
    else:
        sys.stdout.write(to_graph6(g) + "\n" if fmt == "graph6" else format_graph(g))


def _load_coloring(path: str):
    doc = load_document(path)
    payload = doc["payload"]
    return coloring_from_record(payload["coloring"] if "coloring" in payload else payload)


def cmd_construct(args) -> int:
    g, _ = _one_graph(args)
    _emit_graph(g, args)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    g, name = _one_graph(args)
    doc = make_document("spectral", "spectrum", {"graph": graph_record(g), "tolerance": args.tolerance},
                        family_specs=[name])
    _emit_doc(doc, args.out)
    return EXIT_OK


def cmd_blowup(args) -> int:
    g, _ = _one_graph(args)
    if args.factor is not None:
        blown, fmap = balanced_blowup(g, args.factor)
    else:
        blown, fmap = random_blowup(g, args.N, _seed(args))
    print(f"fibers: {fmap.fiber_sizes()}", file=sys.stderr)
    _emit_graph(blown, args)
    return EXIT_OK


def cmd_color(args) -> int:
    graphs, names = _load_graphs(args)
    seed = _seed(args) if args.mode == "random" else None
    recipe = trial_recipe(len(graphs), args.N, args.mode, seed, args.trial, args.tie_rule)
    derived = list((recipe.blowup_seeds or ()) + (recipe.perm_seeds or ()))
    doc = make_document("coloring", "coloring",
                        {"sources": [graph_record(g) for g in graphs], "k": len(graphs),
                         "trial": recipe_record(recipe)},
                        master_seed=seed, derived_seeds=derived, family_specs=names)
    _emit_doc(doc, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.replay:
        doc = load_document(args.replay)
        ok, stored, fresh = replay(doc)
        print(json.dumps({"replay": args.replay, "kind": doc["kind"], "match": ok}))
        if not ok:
            print(f"stored: {stored[:200]!r}\nfresh:  {fresh[:200]!r}", file=sys.stderr)
            return EXIT_ERROR
        return EXIT_OK
    if not (args.coloring and args.s and args.t):
        raise UsageError("verify needs --replay DOC, or --coloring with --s and --t")
    c = _load_coloring(args.coloring)
    inst = RamseyInstance(tuple(args.s), args.t, c.n)
    doc = make_document("witness", "verify",
                        {"coloring": {"n": c.n, "k": c.k, "rows": c.upper_rows()},
                         "instance": instance_record(inst)})
    _emit_doc(doc, args.out)
    return EXIT_OK if doc["payload"]["valid"] else EXIT_NO_WITNESS


def cmd_count_tuples(args) -> int:
    g, name = _one_graph(args)
    doc = make_document("tuple_count", "count_tuples", {"graph": graph_record(g), "t": args.t},
                        family_specs=[name])
    _emit_doc(doc, args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    g, name = _one_graph(args)
    doc = make_document("bound", "bound", {"graph": graph_record(g), "t": args.t, "N": args.N},
                        family_specs=[name])
    _emit_doc(doc, args.out)
    return EXIT_OK


def cmd_expect(args) -> int:
    g, name = _one_graph(args)
    a = {"graph": graph_record(g), "N": args.N, "t": args.t, "mc_trials": args.mc_trials,
         "mc_seed": None, "s": args.check_s}
    seed = None
    if args.mc_trials:
        seed = a["mc_seed"] = _seed(args)
    doc = make_document("expectation", "expectation", a, master_seed=seed, family_specs=[name])
    _emit_doc(doc, args.out)
    return EXIT_OK


def cmd_trace(args) -> int:
    g, name = _one_graph(args)
    try:
        seq = [int(x) for x in args.sequence.split(",") if x.strip()]
    except ValueError:
        raise UsageError("--sequence must be comma-separated integers") from None
    doc = make_document("trace", "trace", {"graph": graph_record(g), "sequence": seq}, family_specs=[name])
    _emit_doc(doc, args.out)
    return EXIT_OK if doc["payload"]["ok"] else EXIT_NO_WITNESS


def cmd_audit(args) -> int:
    c = _load_coloring(args.coloring)
    inst = RamseyInstance(tuple(args.s), args.t, c.n)
    doc = make_document("audit", "audit",
                        {"coloring": {"n": c.n, "k": c.k, "rows": c.upper_rows()},
                         "instance": instance_record(inst)})
    _emit_doc(doc, args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    graphs, names = _load_graphs(args)
    inst = RamseyInstance(tuple(args.s), args.t, args.N)
    if args.budget < 1:
        raise UsageError("--budget must be at least 1")
    seed = _seed(args) if args.mode == "random" else None
    res = certify(inst, graphs, seed, args.budget, args.mode, args.tie_rule)
    sources = [graph_record(g) for g in graphs]
    if res.valid:
        recipe = res.recipe
        doc = make_document(
            "witness", "witness",
            {"sources": sources, "instance": instance_record(inst), "trial": recipe_record(recipe)},
            master_seed=seed,
            derived_seeds=list((recipe.blowup_seeds or ()) + (recipe.perm_seeds or ())),
            family_specs=names,
        )
        code = EXIT_OK
    else:
        doc = make_document(
            "failure", "certify",
            {"sources": sources, "instance": instance_record(inst), "master_seed": seed,
             "trial_budget": args.budget, "mode": args.mode, "tie_rule": args.tie_rule},
            master_seed=seed, family_specs=names,
        )
        code = EXIT_NO_WITNESS
    _emit_doc(doc, args.out)
    return code


COMMANDS = {
    "construct": cmd_construct,
    "spectrum": cmd_spectrum,
    "blowup": cmd_blowup,
    "color": cmd_color,
    "verify": cmd_verify,
    "count-tuples": cmd_count_tuples,
    "bound": cmd_bound,
    "expect": cmd_expect,
    "trace": cmd_trace,
    "audit": cmd_audit,
    "certify": cmd_certify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.commands[args.command].print_help(sys.stderr)
        print(f"pseudoramsey {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        print(f"pseudoramsey {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
