"""``slab`` command line: generate, verify, shortcut, adversary, eval, recipe.

Exit codes: 0 success, 2 failed assertion/verification, 3 input error,
4 resource guard tripped.
"""
import argparse
import json
import sys
from math import ceil, sqrt

from . import io
from .construct import build_base, build_gd, path_subsample, sample_source_set
from .errors import ContractError, FormatError, InputError, ResourceGuardError, ValidationError
from .graph import ShortcutSet, diameter, distance_histogram
from .potential import STRATEGIES, PotentialConfig, adversary_run
from .recipe import builtin_recipes, load_recipe, run_recipe, to_jsonable
from .shortcuts import folklore_shortcut, sourcewise_diameter, sourcewise_shortcut
from .verify import verify_overlap_bound, verify_unique_paths, verify_vertex_disjoint

EXIT_OK, EXIT_ASSERT, EXIT_INPUT, EXIT_GUARD = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which is reserved for assertion failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _u64(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _dump(obj, path):
    text = json.dumps(obj, indent=2, default=to_jsonable) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _config(args):
    return {k: v for k, v in vars(args).items() if k != "func"}


def cmd_generate(args):
    if args.family == "base":
        if args.d != 1:
            raise InputError("family 'base' has d = 1")
        graph, paths = build_base(args.r)
    else:
        graph, paths = build_gd(args.r, args.d)
    full = graph
    if args.subsample > 1:
        graph = path_subsample(graph, args.subsample)
    io.write_graph(graph, args.out)
    paths_out = args.paths_out or args.out + ".paths"
    io.write_paths(paths, paths_out)
    summary = {"schema": "slab.generate/1", "graph": args.out, "paths": paths_out,
               "n": graph.n, "m": graph.m, "num_layers": graph.num_layers,
               "num_paths": len(paths), "config": _config(args)}
    if args.sources_seed is not None:
        sources = sample_source_set(full, args.sources_seed)
        summary["sources"] = args.sources_out or args.out + ".sources"
        summary["num_sources"] = len(sources)
        io.write_sources(sources, summary["sources"])
    _dump(summary, None)
    return EXIT_OK


def cmd_verify(args):
    graph = io.read_graph(args.graph)
    paths = io.read_paths(args.paths)
    if args.lemma == "unique":
        report = verify_unique_paths(graph, paths)
    elif args.lemma == "disjoint":
        report = verify_vertex_disjoint(graph, paths)
    else:
        report = verify_overlap_bound(graph, paths, constant=args.constant)
    out = report.to_json()
    out.update(schema="slab.verify/1", config=_config(args))
    _dump(out, args.report)
    print(f"{args.lemma}: checked={report.checked} violations={len(report.violations)} "
          f"max_ratio={report.max_ratio}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_ASSERT


def cmd_shortcut(args):
    graph = io.read_graph(args.graph)
    if args.algo == "folklore":
        D = args.target_d or ceil(sqrt(graph.n))
        H = folklore_shortcut(graph, D, args.seed, alpha=args.alpha)
        sw = None
    else:
        if not args.sources:
            raise InputError("--sources is required for --algo sourcewise")
        sources = io.read_sources(args.sources)
        H = sourcewise_shortcut(graph, sources, args.seed, beta=args.beta, gamma=args.gamma)
        sw = sourcewise_diameter(graph, H, sources)
    io.write_shortcuts(H, args.out)
    out = {"schema": "slab.shortcut/1", "algo": args.algo, "size": len(H), "n": graph.n,
           "meta": H.meta, "config": _config(args)}
    if sw is not None:
        out["sourcewise_diameter"] = sw
    _dump(out, args.report)
    return EXIT_OK


def cmd_adversary(args):
    graph = io.read_graph(args.graph)
    paths = io.read_paths(args.paths)
    config = PotentialConfig(args.c, args.half_layer)
    report = adversary_run(graph, paths, args.budget, args.strategy, args.seed, config=config)
    out = report.to_json()
    out.update(schema="slab.adversary/1", config=_config(args))
    _dump(out, args.report)
    return EXIT_OK


def cmd_eval(args):
    graph = io.read_graph(args.graph)
    H = ShortcutSet(graph, io.read_shortcuts(args.shortcuts).tolist()) if args.shortcuts else None
    if args.sources:
        sources = io.read_sources(args.sources)
        sources.check(graph)
        hist = distance_histogram(graph, H, sources.vertices)
        diam = sourcewise_diameter(graph, H, sources)
        kind = "sourcewise_diameter"
    else:
        hist = distance_histogram(graph, H)
        diam = diameter(graph, H)
        kind = "diameter"
    print(f"{kind}: {diam}")
    for k, count in hist.items():
        print(f"  {k}\t{count}")
    if args.report:
        _dump({"schema": "slab.eval/1", kind: diam,
               "histogram": {str(k): v for k, v in hist.items()},
               "shortcuts": 0 if H is None else len(H), "config": _config(args)}, args.report)
    return EXIT_OK


def cmd_recipe(args):
    if args.list:
        print("\n".join(builtin_recipes()))
        return EXIT_OK
    if not args.recipe:
        raise InputError("a recipe file or bundled recipe name is required")
    recipe = load_recipe(args.recipe)
    report = run_recipe(recipe, out_dir=args.out_dir)
    for a in report.assertions:
        status = "PASS" if a["passed"] else "FAIL"
        print(f"{status} {a['metric']} {a['op']} {a['expected']} (actual {a['actual']})",
              file=sys.stderr)
    _dump(report.to_json(), args.report)
    return EXIT_OK if report.passed else EXIT_ASSERT


def build_parser():
    p = _Parser(prog="slab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="build a lower-bound instance")
    g.add_argument("--family", choices=["base", "gd"], required=True)
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--subsample", type=int, default=1)
    g.add_argument("--sources-seed", type=_u64)
    g.add_argument("--out", required=True)
    g.add_argument("--paths-out")
    g.add_argument("--sources-out")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="check a structural property exhaustively")
    v.add_argument("--graph", required=True)
    v.add_argument("--paths", required=True)
    v.add_argument("--lemma", choices=["unique", "disjoint", "overlap"], required=True)
    v.add_argument("--constant", type=float, default=8)
    v.add_argument("--report")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("shortcut", help="compute a shortcut set")
    s.add_argument("--algo", choices=["folklore", "sourcewise"], required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--sources")
    s.add_argument("--target-d", type=int)
    s.add_argument("--alpha", type=float, default=3.0)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--seed", type=_u64, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--report")
    s.set_defaults(func=cmd_shortcut)

    a = sub.add_parser("adversary", help="spend a shortcut budget against the potential")
    a.add_argument("--graph", required=True)
    a.add_argument("--paths", required=True)
    a.add_argument("--budget", type=int, required=True)
    a.add_argument("--strategy", choices=STRATEGIES, required=True)
    a.add_argument("--c", type=int, default=0)
    a.add_argument("--half-layer", action="store_true")
    a.add_argument("--seed", type=_u64, required=True)
    a.add_argument("--report")
    a.set_defaults(func=cmd_adversary)

    e = sub.add_parser("eval", help="exact (sourcewise) diameter of G plus shortcuts")
    e.add_argument("--graph", required=True)
    e.add_argument("--shortcuts")
    e.add_argument("--sources")
    e.add_argument("--report")
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("recipe", help="run an experiment recipe")
    r.add_argument("recipe", nargs="?", help="recipe JSON file or bundled recipe name")
    r.add_argument("--list", action="store_true", help="list bundled recipes")
    r.add_argument("--report")
    r.add_argument("--out-dir")
    r.set_defaults(func=cmd_recipe)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code
    try:
        return args.func(args)
    except ValidationError as exc:
        u, v = exc.edge
        print(f"error: invalid shortcut edge {u} {v}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceGuardError as exc:
        print(f"error: resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InputError, FormatError, ContractError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
