"""Command-line front end.

Exit codes: 0 success, 1 domain error (bad input data), 2 audit failure
(an audited inequality was violated), 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from .graphs import (
    Graph,
    family,
    load_graph,
    min_degree,
    save_edgelist,
    save_json,
    to_edgelist_text,
)
from .connectivity import edge_connectivity, disjoint_paths, local_edge_connectivity
from .product import lex_product, classify_edge, EdgeType
from .steiner import lambda_k_witness
from .construct import construct_packing_detailed, verify_packing, ConstructionError
from .bounds import AuditFailure, audit, connected_graphs, corpus_inequality_scan

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_AUDIT = 2
EXIT_USAGE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="lexpack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a standard graph family")
    p.add_argument("kind", choices=["path", "cycle", "complete", "empty"])
    p.add_argument("n", type=int)
    p.add_argument("-o", "--out", help="output file (default: stdout)")
    p.add_argument("--json", action="store_true", help="write JSON format")

    p = sub.add_parser("product", help="build a lexicographic product")
    p.add_argument("gfile")
    p.add_argument("hfile")
    p.add_argument("-o", "--out",
                   help="edge-list output; also writes OUT.meta.json")

    p = sub.add_parser("lambda2", help="edge connectivity of a graph")
    p.add_argument("gfile")
    p.add_argument("--witness", action="store_true",
                   help="print an edge-disjoint path system for a minimum pair")

    p = sub.add_parser("lambda3", help="3-terminal packing connectivity")
    p.add_argument("gfile")
    p.add_argument("--witness", action="store_true",
                   help="print the minimizing terminals and their packing")

    p = sub.add_parser("construct", help="build the guaranteed product packing")
    p.add_argument("gfile")
    p.add_argument("hfile")
    p.add_argument("--terminals", nargs=3, required=True, metavar="T",
                   help="three product vertices, flat ids or (u,v) pairs")
    p.add_argument("--dot", help="write the packing as a DOT file")

    p = sub.add_parser("audit", help="cross-check all bounds on a factor pair")
    p.add_argument("gfile")
    p.add_argument("hfile")
    p.add_argument("--exact", action="store_true",
                   help="also pin the exact product value when affordable")
    p.add_argument("--budget", type=int, default=30,
                   help="max product edges for brute-force exact (default 30)")
    p.add_argument("--json", dest="json_out", metavar="FILE",
                   help="write the report as JSON")

    p = sub.add_parser("corpus", help="inequality scan over small connected graphs")
    p.add_argument("--min-n", type=int, default=3)
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--budget", type=int, default=2_000_000,
                   help="per-graph search node budget before skipping")

    return parser


def _parse_terminal(text: str):
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    if "," in text:
        u, v = text.split(",")
        return int(u), int(v)
    return int(text)


def _print_tree(prod, edges, out) -> None:
    parts = [
        f"{prod.vertex_label(a)}-{prod.vertex_label(b)}" for a, b in sorted(edges)
    ]
    out.write(" ".join(parts) + "\n")


_DOT_COLORS = [
    "red", "blue", "forestgreen", "orange", "purple", "brown",
    "deeppink", "cadetblue", "goldenrod", "black", "cyan4", "magenta",
]

_DOT_STYLE = {
    EdgeType.ALIGNED: "solid",
    EdgeType.IN_LAYER: "dashed",
    EdgeType.SKEW: "dotted",
}


def _write_dot(prod, packing, path) -> None:
    lines = ["graph packing {"]
    for i in range(prod.graph.n):
        label = prod.vertex_label(i)
        shape = "doublecircle" if i in packing.terminals else "circle"
        lines.append(f'  "{label}" [shape={shape}];')
    for t, tree in enumerate(packing.trees):
        color = _DOT_COLORS[t % len(_DOT_COLORS)]
        for a, b in sorted(tree.edges):
            style = _DOT_STYLE[classify_edge(prod, (a, b))]
            lines.append(
                f'  "{prod.vertex_label(a)}" -- "{prod.vertex_label(b)}"'
                f' [color={color}, style={style}];'
            )
    lines.append("}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_gen(args, out) -> int:
    g = family(args.kind, args.n)
    if args.out:
        (save_json if args.json else save_edgelist)(g, args.out)
    else:
        if args.json:
            out.write(json.dumps({"n": g.n, "edges": [list(e) for e in g.edge_list]}) + "\n")
        else:
            out.write(to_edgelist_text(g))
    return EXIT_OK


def _cmd_product(args, out) -> int:
    g, h = load_graph(args.gfile), load_graph(args.hfile)
    prod = lex_product(g, h)
    if args.out:
        save_edgelist(prod.graph, args.out)
        with open(args.out + ".meta.json", "w", encoding="ascii") as fh:
            json.dump({"n1": prod.n1, "n2": prod.n2}, fh)
            fh.write("\n")
    else:
        out.write(to_edgelist_text(prod.graph))
    return EXIT_OK


def _cmd_lambda2(args, out) -> int:
    g = load_graph(args.gfile)
    value = edge_connectivity(g)
    out.write(f"{value}\n")
    if args.witness and value > 0:
        best = min(
            ((local_edge_connectivity(g, 0, v), v) for v in range(1, g.n)),
        )
        system = disjoint_paths(g, 0, best[1], best[0])
        for path in system.paths:
            out.write("path: " + "-".join(map(str, path)) + "\n")
    return EXIT_OK


def _cmd_lambda3(args, out) -> int:
    g = load_graph(args.gfile)
    if g.n < 3:
        raise ValueError("3-terminal connectivity needs at least 3 vertices")
    value, terms, packing = lambda_k_witness(g, 3)
    out.write(f"{value}\n")
    if args.witness:
        out.write(f"terminals: {' '.join(map(str, terms))}\n")
        for tree in packing.trees:
            out.write(
                "tree: " + " ".join(f"{a}-{b}" for a, b in tree.sorted_edges()) + "\n"
            )
    return EXIT_OK


def _cmd_construct(args, out) -> int:
    g, h = load_graph(args.gfile), load_graph(args.hfile)
    terminals = [_parse_terminal(t) for t in args.terminals]
    res = construct_packing_detailed(g, h, terminals)
    prod = lex_product(g, h)
    report = verify_packing(prod, res.packing, layer_tree_count=res.layer_count)
    if not report.valid:
        raise ConstructionError("; ".join(report.problems))
    out.write(
        f"{len(res.packing.trees)} edge-disjoint trees "
        f"({res.layer_count} layer-stage, {res.cross_count} cross-stage), verified\n"
    )
    for i, tree in enumerate(res.packing.trees):
        stage = "layer" if i < res.layer_count else "cross"
        out.write(f"tree {i} [{stage}]: ")
        _print_tree(prod, tree.edges, out)
    for note in res.notes:
        out.write(f"note: {note}\n")
    if args.dot:
        _write_dot(prod, res.packing, args.dot)
    return EXIT_OK


def _cmd_audit(args, out) -> int:
    g, h = load_graph(args.gfile), load_graph(args.hfile)
    try:
        report = audit(g, h, exact=args.exact, budget=args.budget)
    except AuditFailure as exc:
        out.write(f"AUDIT FAILED: {', '.join(exc.failed)}\n")
        if args.json_out:
            with open(args.json_out, "w", encoding="ascii") as fh:
                json.dump(exc.report.to_dict(), fh, indent=2)
                fh.write("\n")
        return EXIT_AUDIT
    d = report.to_dict()
    out.write(
        f"lower={report.lower_thm1} constructed={report.constructed} "
        f"upper={report.upper_thm2} product_lambda={report.yangxu_lambda}\n"
    )
    if report.exact_lambda3 is not None:
        out.write(f"exact={report.exact_lambda3} ({report.exact_method})\n")
    elif args.exact:
        out.write(f"exact: {report.exact_method}\n")
    if report.yangxu_direct is not None:
        out.write(f"product_lambda_direct={report.yangxu_direct}\n")
    out.write(f"checks passed: {len(d['checks'])}\n")
    for note in report.notes:
        out.write(f"note: {note}\n")
    if args.json_out:
        with open(args.json_out, "w", encoding="ascii") as fh:
            json.dump(d, fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def _corpus_chunk(payload):
    min_n, max_n, budget = payload
    bad = 0
    skipped = 0
    total = 0
    for _, _, checks in corpus_inequality_scan(min_n, max_n, node_budget=budget):
        total += 1
        if checks is None:
            skipped += 1
        elif not all(checks.values()):
            bad += 1
    return total, skipped, bad


def _cmd_corpus(args, out) -> int:
    sizes = list(range(args.min_n, args.max_n + 1))
    payloads = [(n, n, args.budget) for n in sizes]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_corpus_chunk, payloads))
    else:
        results = [_corpus_chunk(p) for p in payloads]
    grand_total = grand_skip = grand_bad = 0
    for n, (total, skipped, bad) in zip(sizes, results):
        out.write(f"n={n}: {total} graphs, {skipped} skipped, {bad} violations\n")
        grand_total += total
        grand_skip += skipped
        grand_bad += bad
    out.write(
        f"total: {grand_total} graphs, {grand_skip} skipped, "
        f"{grand_bad} violations\n"
    )
    return EXIT_AUDIT if grand_bad else EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handlers = {
        "gen": _cmd_gen,
        "product": _cmd_product,
        "lambda2": _cmd_lambda2,
        "lambda3": _cmd_lambda3,
        "construct": _cmd_construct,
        "audit": _cmd_audit,
        "corpus": _cmd_corpus,
    }
    try:
        return handlers[args.command](args, sys.stdout)
    except (OSError, ValueError, ConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
