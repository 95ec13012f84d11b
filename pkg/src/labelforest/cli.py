"""Command-line interface: ``labelforest <command> ...``."""

from __future__ import annotations

import argparse
import sys

from .bits import BitString
from .caterpillar import NotACaterpillar, cat_decode, cat_encode
from .graph import FAMILIES, Forest, ForestError, GenSpec, format_forest, gen_tree, parse_forest
from .harness import ConfigError, VerifyConfig, bench_tsv, run_bench, run_verify
from .scheme import decode_adjacent, encode_forest, scheme_stats
from .universal import (
    PartitionError,
    build_universal,
    check_partition,
    composite_decode,
    composite_encode,
    parse_graph,
    parse_partition,
    peel_forests,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _bits(text: str) -> BitString:
    try:
        return BitString.from_str(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _components(f: Forest) -> list[list[int]]:
    adj = f.adjacency()
    seen = [False] * f.n
    comps = []
    for r in range(f.n):
        if seen[r]:
            continue
        seen[r] = True
        comp, stack = [r], [r]
        while stack:
            for v in adj[stack.pop()]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def cmd_gen(args) -> int:
    sys.stdout.write(format_forest(gen_tree(GenSpec(args.family, args.n, args.seed))))
    return EXIT_OK


def _stats_block(stats: dict) -> list[str]:
    lines = ["# stats:"]
    for key, value in stats.items():
        if isinstance(value, float):
            value = f"{value:.4f}"
        lines.append(f"# {key}: {value}")
    return lines


def cmd_encode(args) -> int:
    f = parse_forest(_read(args.input))
    out = []
    if args.scheme == "tree":
        enc = encode_forest(f)
        out += [f"{u}\t{enc.labels[u]}" for u in range(f.n)]
        out += _stats_block(scheme_stats(enc))
    else:
        # caterpillar labels are per tree; components are encoded separately
        for i, comp in enumerate(_components(f)):
            index = {u: j for j, u in enumerate(comp)}
            edges = tuple(sorted((index[u], index[v]) for u, v in f.edges if u in index))
            try:
                cat = cat_encode(Forest(len(comp), edges))
            except NotACaterpillar as e:
                raise UsageError(f"component {i} is not a caterpillar: {e}") from None
            out.append(f"# component {i}: max id {cat.max_id}")
            out += [f"{u}\t{cat.labels[index[u]]}" for u in comp]
    print("\n".join(out))
    return EXIT_OK


def cmd_decode_pair(args) -> int:
    decode = decode_adjacent if args.scheme == "tree" else cat_decode
    print("true" if decode(_bits(args.a), _bits(args.b)) else "false")
    return EXIT_OK


def cmd_stats(args) -> int:
    f = parse_forest(_read(args.input))
    enc = encode_forest(f)
    lines = [f"# node {f.n} is the unlabelled root joining the components",
             "node\tsize\tlightSize\tapex\tgamma\twc\trld"]
    lines += ["\t".join(map(str, row)) for row in enc.hld.rows()]
    lines += _stats_block(scheme_stats(enc))
    print("\n".join(lines))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.config:
        cfg = VerifyConfig.from_json(_read(args.config))
    else:
        kwargs = {"seeds": tuple(args.seeds), "scheme": args.scheme}
        if args.exhaustive_max_n is not None:
            kwargs["exhaustive_max_n"] = args.exhaustive_max_n
        if args.sizes is not None:
            kwargs["random_sizes"] = tuple(args.sizes)
        if args.families is not None:
            kwargs["families"] = tuple(args.families)
        cfg = VerifyConfig(**kwargs)
    report = run_verify(cfg)
    sys.stdout.write(report.to_tsv())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_universal(args) -> int:
    try:
        u = build_universal(args.n, args.scheme)
    except ValueError as e:
        raise UsageError(str(e)) from None
    lines = [f"# n: {u.n}", f"# scheme: {u.scheme}", f"# vertices: {len(u.vertices)}"]
    lines += [str(v) for v in u.vertices]
    lines.append(f"# edges: {len(u.edges)}")
    lines += [f"{a} {b}" for a, b in u.edges]
    print("\n".join(lines))
    return EXIT_OK


def cmd_arbor(args) -> int:
    if args.action == "decode":
        if len(args.operands) != 2:
            raise UsageError("arbor decode needs two composite labels")
        a, b = (_bits(x) for x in args.operands)
        print("true" if composite_decode(a, b) else "false")
        return EXIT_OK
    if len(args.operands) > 1:
        raise UsageError("arbor encode takes at most one graph file")
    n, edges = parse_graph(_read(args.operands[0] if args.operands else None))
    if args.parts:
        partition = parse_partition(_read(args.parts))
        check_partition(n, edges, partition)
    else:
        partition = peel_forests(n, edges)
    labels = composite_encode(n, edges, partition)
    lines = [f"# forests: {partition.k}"]
    lines += [f"{u}\t{labels[u]}" for u in range(n)]
    print("\n".join(lines))
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        rows = run_bench(args.sizes, args.family, args.seed, args.runs, args.decode_pairs, args.max_n)
    except ValueError as e:
        raise UsageError(str(e)) from None
    sys.stdout.write(bench_tsv(rows, args.family, args.seed))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="labelforest", description="Adjacency labels for forests.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a tree in the forest text format")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("encode", help="label every node of a forest")
    e.add_argument("--scheme", choices=("tree", "caterpillar"), default="tree")
    e.add_argument("input", nargs="?", help="forest file (default: stdin)")
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode-pair", help="decide adjacency from two labels")
    d.add_argument("--scheme", choices=("tree", "caterpillar"), default="tree")
    d.add_argument("a")
    d.add_argument("b")
    d.set_defaults(func=cmd_decode_pair)

    s = sub.add_parser("stats", help="per-node decomposition facts and label statistics")
    s.add_argument("input", nargs="?")
    s.set_defaults(func=cmd_stats)

    v = sub.add_parser("verify", help="run the verification suites")
    v.add_argument("--config", help="JSON config file (must list seeds)")
    v.add_argument("--scheme", choices=("tree", "caterpillar"), default="tree")
    v.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    v.add_argument("--exhaustive-max-n", type=int)
    v.add_argument("--sizes", type=int, nargs="+")
    v.add_argument("--families", nargs="+", choices=FAMILIES)
    v.set_defaults(func=cmd_verify)

    u = sub.add_parser("universal", help="induced-universal graph for small trees")
    u.add_argument("--n", type=int, required=True)
    u.add_argument("--scheme", choices=("tree", "caterpillar"), default="tree")
    u.set_defaults(func=cmd_universal)

    a = sub.add_parser("arbor", help="composite labels for graphs split into forests")
    a.add_argument("action", choices=("encode", "decode"))
    a.add_argument("operands", nargs="*", help="graph file for encode; two labels for decode")
    a.add_argument("--parts", help="partition file with lines 'u v part'")
    a.set_defaults(func=cmd_arbor)

    b = sub.add_parser("bench", help="encode/decode timing")
    b.add_argument("--sizes", type=int, nargs="*", default=[100000, 200000, 400000])
    b.add_argument("--family", choices=FAMILIES, default="uniform-prufer")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--runs", type=int, default=3)
    b.add_argument("--decode-pairs", type=int, default=10 ** 6)
    b.add_argument("--max-n", type=int, default=10 ** 7, help="refuse sizes above this cap")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ForestError, PartitionError, ConfigError) as e:
        print(f"labelforest: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"labelforest: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
