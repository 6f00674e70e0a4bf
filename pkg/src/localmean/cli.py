"""Command-line front end.

Exit codes: 0 success, 1 violations found, 2 tree parse error, 3 invalid argument.
"""

import argparse
import sys

from . import verify as verify_mod
from .counting import EnumerationGuardError, global_stats, subtree_stats
from .density import local_density, max_density_subtree
from .extremal import classify_leaves, k_extremal
from .report import Report
from .structure import core_decomposition
from .tree import FAMILIES, SubtreeError, TreeError, as_subtree, generate, parse_tree

EXIT_OK, EXIT_VIOLATIONS, EXIT_PARSE, EXIT_ARG = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _int_list(text, what):
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of integers, got {text!r}") from None


def _read_tree(path):
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_tree(text)


def _scalar(v):
    return not isinstance(v, (dict, list)) or (isinstance(v, list) and all(_scalar(x) and not isinstance(x, list) for x in v))


def _text(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if _scalar(v):
                lines.append(f"{pad}{k}: {_flat(v)}")
            else:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
    elif isinstance(obj, list):
        for v in obj:
            if _scalar(v):
                lines.append(f"{pad}- {_flat(v)}")
            else:
                sub = _text(v, indent + 1)
                lines.append(f"{pad}- {sub[0].lstrip()}")
                lines.extend(sub[1:])
    else:
        lines.append(f"{pad}{_flat(obj)}")
    return lines


def _flat(v):
    if isinstance(v, list):
        return "[" + ", ".join(_flat(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


def _verify_text(d):
    lines = []
    for name, r in d["results"].items():
        status = "ok" if r["violation_count"] == 0 else "VIOLATED"
        lines.append(f"{name}: {status} trees={r['trees']} checks={r['checks']} violations={r['violation_count']}")
        for k, v in r["info"].items():
            lines.append(f"    {k}: {v}")
    return lines


def _emit(report, args):
    if args.json:
        out = report.to_json() + "\n"
    else:
        d = report.to_dict()
        lines = [f"# {d['command']['name']}"]
        if d["tree"]:
            lines.append(f"tree: {d['tree']}")
        if d["command"]["name"] == "verify":
            lines.append("params: " + ", ".join(f"{k}={_flat(v)}" for k, v in d["command"]["params"].items()))
            lines.extend(_verify_text(d))
        else:
            lines.extend(_text(d["results"]))
        if d["violations"]:
            lines.append(f"violations: {len(d['violations'])}")
            lines.extend(_text(d["violations"], 1))
        out = "\n".join(lines) + "\n"
    sys.stdout.write(out)


def cmd_stats(args):
    tree = _read_tree(args.tree)
    params = {"subtree": args.subtree}
    if args.subtree is None:
        g = global_stats(tree)
        results = {"scope": "global", "N": g.stats.N, "R": g.stats.R, "mean": g.mean, "density": g.density}
    else:
        verts = _int_list(args.subtree, "--subtree")
        try:
            S = as_subtree(tree, verts)
        except SubtreeError as exc:
            raise UsageError(str(exc)) from None
        st = subtree_stats(tree, S)
        D = local_density(tree, S).value if S.order < tree.n else None
        results = {"scope": "local", "subtree": list(S.sorted()), "N": st.N, "R": st.R, "mean": st.mean,
                   "density": D}
    return Report(tree.digest(), {"name": "stats", "params": params}, results), EXIT_OK


def cmd_extremal(args):
    tree = _read_tree(args.tree)
    direction = "min" if args.min else "max"
    if not 1 <= args.k <= tree.n:
        raise UsageError(f"--k must lie in 1..{tree.n}")
    res = k_extremal(tree, args.k, direction)
    decomp = core_decomposition(tree)
    optima = []
    for S in res.optima:
        conf = classify_leaves(tree, S, decomp)
        optima.append({"subtree": list(S.sorted()), "case": conf.case,
                       "leaves": [{"vertex": r.vertex, "degree": r.degree, "kind": r.kind} for r in conf.leaves]})
    results = {"k": args.k, "direction": direction, "value": res.value, "optima": optima}
    return Report(tree.digest(), {"name": "extremal", "params": {"k": args.k, "direction": direction}}, results), EXIT_OK


def cmd_core(args):
    tree = _read_tree(args.tree)
    return Report(tree.digest(), {"name": "core", "params": {}}, core_decomposition(tree).to_dict()), EXIT_OK


def cmd_density_max(args):
    tree = _read_tree(args.tree)
    if tree.n < 2:
        raise UsageError("maximal density needs at least two vertices")
    r = max_density_subtree(tree)
    results = {"value": r.value,
               "optima": [{"subtree": list(S.sorted()), "class": c} for S, c in zip(r.optima, r.structure_class)]}
    code = EXIT_VIOLATIONS if r.violations else EXIT_OK
    return Report(tree.digest(), {"name": "density-max", "params": {}}, results, list(r.violations)), code


def cmd_verify(args):
    if args.all:
        names = list(verify_mod.SUITES)
    elif args.theorem:
        names = []
        for t in args.theorem:
            names.extend(x for x in t.split(",") if x)
    else:
        raise UsageError("give --theorem NAME or --all")
    unknown = [x for x in names if x not in verify_mod.SUITES]
    if unknown:
        raise UsageError(f"unknown theorem(s): {', '.join(unknown)}; known: {', '.join(verify_mod.SUITES)}")
    if args.max_n < 1:
        raise UsageError("--max-n must be >= 1")
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if not 0 <= args.seed < 2 ** 64:
        raise UsageError("--seed must fit in 64 unsigned bits")
    results = verify_mod.run(names, args.max_n, seed=args.seed, samples=args.samples, min_n=args.min_n)
    summary = {}
    violations = []
    for name, r in results.items():
        d = r.to_dict()
        violations.extend(d.pop("violations"))
        summary[name] = d
    params = {"theorems": names, "max_n": args.max_n, "min_n": args.min_n, "seed": args.seed, "samples": args.samples,
              "exhaustive_trees_up_to": min(args.max_n, 8)}
    code = EXIT_OK if all(r.ok for r in results.values()) else EXIT_VIOLATIONS
    return Report(None, {"name": "verify", "params": params}, summary, violations), code


def cmd_gen(args):
    params = _int_list(args.params or "", "--params")
    try:
        tree = generate(args.family, params)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None
    text = tree.serialize()
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return None, EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="localmean", description="Exact subtree statistics, local means and densities of trees.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help, tree=True):
        sp = sub.add_parser(name, help=help)
        if tree:
            sp.add_argument("tree", help="edge-list file, '-' for stdin")
        sp.add_argument("--json", action="store_true", help="machine-readable report")
        sp.set_defaults(func=func)
        return sp

    sp = add("stats", cmd_stats, "subtree counts, mean and density")
    sp.add_argument("--subtree", help="comma-separated vertex ids")

    sp = add("extremal", cmd_extremal, "k-maximal or k-minimal subtrees")
    sp.add_argument("--k", type=int, required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--max", action="store_true", default=True)
    g.add_argument("--min", action="store_true")

    add("core", cmd_core, "core, limbs, joint vertices and core-paths")
    add("density-max", cmd_density_max, "subtrees of maximal local density")

    sp = add("verify", cmd_verify, "run theorem suites over the tree corpus", tree=False)
    sp.add_argument("--theorem", action="append", help="suite name (repeatable or comma-separated)")
    sp.add_argument("--all", action="store_true")
    sp.add_argument("--max-n", type=int, default=7)
    sp.add_argument("--min-n", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=10_000,
                    help="sampled subtrees per order from n=8, random trees per order beyond 8")

    sp = sub.add_parser("gen", help="write a tree from a named family")
    sp.add_argument("--family", required=True, help=", ".join(FAMILIES))
    sp.add_argument("--params", default="", help="comma-separated integers")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_gen, json=False)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ARG if exc.code else EXIT_OK
    try:
        report, code = args.func(args)
    except TreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (UsageError, SubtreeError, EnumerationGuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARG
    if report is not None:
        _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
