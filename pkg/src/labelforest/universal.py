"""Induced-universal graphs from labels, and labels for bounded arboricity.

A labeling scheme with unique labels yields a universal graph whose vertices
are the labels themselves and whose edges are the pairs the decoder accepts.
Graphs whose edges split into k forests get composite labels: one tree-scheme
label per forest, so adjacency holds iff it holds in some forest.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .bits import BitString, MalformedCode, _gamma_at
from .caterpillar import NotACaterpillar, cat_decode, cat_encode
from .graph import Edge, Forest, RootedTree, enumerate_parent_arrays, tree_to_forest
from .scheme import decode_adjacent, encode_forest

SCHEMES = ("tree", "caterpillar")

Graph = tuple[int, tuple[Edge, ...]]


def decoder_for(scheme: str) -> Callable[[BitString, BitString], bool]:
    if scheme == "tree":
        return decode_adjacent
    if scheme == "caterpillar":
        return cat_decode
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def tree_labels(t: RootedTree, scheme: str) -> list[BitString] | None:
    """Labels of the real nodes of ``t``; None when the scheme does not apply."""
    decoder_for(scheme)
    f = tree_to_forest(t)
    if scheme == "tree":
        return encode_forest(f).real_labels()
    try:
        return cat_encode(f).labels
    except NotACaterpillar:
        return None


@dataclass
class UniversalGraph:
    n: int
    scheme: str
    vertices: list[BitString]  # sorted by (length, value)
    edges: list[tuple[BitString, BitString]] | None  # None when not materialized

    @property
    def vertex_set(self) -> frozenset[BitString]:
        return frozenset(self.vertices)

    def has_edge(self, a: BitString, b: BitString) -> bool:
        return decoder_for(self.scheme)(a, b)


def _family(n: int) -> Iterator[RootedTree]:
    for m in range(1, n + 1):
        yield from enumerate_parent_arrays(m)


def build_universal(n: int, scheme: str = "tree", with_edges: bool = True) -> UniversalGraph:
    """Union of every label emitted over all parent-array trees with up to n nodes."""
    if not 1 <= n <= 10:
        raise ValueError(f"universal graphs are built for 1 <= n <= 10, got {n}")
    decode = decoder_for(scheme)
    seen: set[BitString] = set()
    for t in _family(n):
        labels = tree_labels(t, scheme)
        if labels is not None:
            seen.update(labels)
    vertices = sorted(seen)
    edges = None
    if with_edges:
        edges = [(a, b) for i, a in enumerate(vertices) for b in vertices[i + 1:] if decode(a, b)]
    return UniversalGraph(n, scheme, vertices, edges)


@dataclass
class EmbedReport:
    nodes: int = 0
    pairs: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def embed_check(u: UniversalGraph, t: RootedTree) -> EmbedReport:
    """Check that labelling ``t`` embeds it into ``u`` as an induced subgraph."""
    report = EmbedReport()
    labels = tree_labels(t, u.scheme)
    if labels is None:
        report.violations.append("tree is outside the scheme's family")
        return report
    real = t.real_nodes()
    report.nodes = len(real)
    if len(set(labels)) != len(labels):
        report.violations.append("labels are not unique")
    vertex_set = u.vertex_set
    for node, lab in zip(real, labels):
        if lab not in vertex_set:
            report.violations.append(f"node {node}: label {lab} is not a vertex")
    edge_set = None if u.edges is None else {frozenset(e) for e in u.edges}
    for i in range(len(real)):
        for j in range(i + 1, len(real)):
            report.pairs += 1
            a, b = labels[i], labels[j]
            in_u = u.has_edge(a, b) if edge_set is None else frozenset((a, b)) in edge_set
            if in_u != t.adjacent(real[i], real[j]):
                kind = "missing edge" if in_u is False else "extra edge"
                report.violations.append(f"{kind} between nodes {real[i]} and {real[j]}")
    return report


# -- arboricity ---------------------------------------------------------------


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class ForestPartition:
    k: int
    assignment: dict[Edge, int]

    def part(self, i: int) -> list[Edge]:
        return sorted(e for e, p in self.assignment.items() if p == i)


class _Dsu:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def normalize_graph(n: int, edges: Iterable[Edge]) -> tuple[Edge, ...]:
    """Validate a simple undirected graph; edges as sorted ``(min, max)`` pairs."""
    out = set()
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise PartitionError(f"endpoint out of range in edge ({u}, {v}) for n={n}")
        if u == v:
            raise PartitionError(f"self-loop at node {u}")
        e = (u, v) if u < v else (v, u)
        if e in out:
            raise PartitionError(f"duplicate edge {e}")
        out.add(e)
    return tuple(sorted(out))


def parse_graph(text: str) -> Graph:
    """Same text format as forests (``n`` then ``u v`` lines), cycles allowed."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1 or not parts[0].isdigit() or int(parts[0]) < 1:
                raise PartitionError(f"line {lineno}: expected node count, got {line!r}")
            n = int(parts[0])
            continue
        try:
            u, v = (int(x) for x in parts)
        except ValueError:
            raise PartitionError(f"line {lineno}: expected 'u v', got {line!r}") from None
        edges.append((u, v))
    if n is None:
        raise PartitionError("missing node count")
    return n, normalize_graph(n, edges)


def peel_forests(n: int, edges: Iterable[Edge]) -> ForestPartition:
    """Greedy partition: repeatedly take a maximal spanning forest of what is left."""
    remaining = list(normalize_graph(n, edges))
    assignment: dict[Edge, int] = {}
    k = 0
    while remaining:
        dsu = _Dsu(n)
        left = []
        for e in remaining:
            if dsu.union(*e):
                assignment[e] = k
            else:
                left.append(e)
        remaining = left
        k += 1
    return ForestPartition(k, assignment)


def check_partition(n: int, edges: Iterable[Edge], p: ForestPartition) -> None:
    """Raise :class:`PartitionError` unless ``p`` splits the edges into forests."""
    edges = normalize_graph(n, edges)
    if set(p.assignment) != set(edges):
        raise PartitionError("partition does not cover exactly the graph's edges")
    dsus = [_Dsu(n) for _ in range(p.k)]
    for e in sorted(p.assignment):
        i = p.assignment[e]
        if not 0 <= i < p.k:
            raise PartitionError(f"edge {e} assigned to part {i} outside 0..{p.k - 1}")
        if not dsus[i].union(*e):
            raise PartitionError(f"part {i} contains a cycle through edge {e}")


def parse_partition(text: str) -> ForestPartition:
    """Lines ``u v part``; blank lines and ``#`` comments ignored."""
    assignment: dict[Edge, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            u, v, i = (int(x) for x in parts)
        except ValueError:
            raise PartitionError(f"line {lineno}: expected 'u v part', got {line!r}") from None
        if i < 0:
            raise PartitionError(f"line {lineno}: negative part index")
        e = (u, v) if u < v else (v, u)
        if e in assignment:
            raise PartitionError(f"line {lineno}: edge {e} listed twice")
        assignment[e] = i
    k = max(assignment.values(), default=-1) + 1
    return ForestPartition(k, assignment)


def format_partition(p: ForestPartition) -> str:
    return "".join(f"{u} {v} {i}\n" for (u, v), i in sorted(p.assignment.items()))


def _prefix_end(value: int, length: int, pos: int) -> int:
    # end of the aux and table fields of a tree label starting at pos
    k1, p = _gamma_at(value, length, pos)
    c, p = _gamma_at(value, length, p)
    _, p = _gamma_at(value, length, p)
    p += 4
    width, p = _gamma_at(value, length, p)
    end = p + width * c
    if end > length:
        raise MalformedCode("table runs past end")
    return end


def _split_tree_label(lab: BitString) -> tuple[BitString, BitString]:
    end = _prefix_end(lab.value, lab.length, 0)
    rest = lab.length - end
    return BitString(lab.value >> rest, end), BitString(lab.value & ((1 << rest) - 1), rest)


def composite_encode(n: int, edges: Iterable[Edge], p: ForestPartition) -> list[BitString]:
    """Per node: for each part, ``0`` if the node has no edge there, else
    ``1`` then the part's tree label with its variable-width id field
    prefixed by ``[width + 1]γ``."""
    edges = normalize_graph(n, edges)
    check_partition(n, edges, p)
    out = [(0, 0)] * n
    for i in range(p.k):
        part = p.part(i)
        touched = [False] * n
        for u, v in part:
            touched[u] = touched[v] = True
        labels = encode_forest(Forest(n, tuple(part))).labels
        for u in range(n):
            value, length = out[u]
            if not touched[u]:
                out[u] = (value << 1, length + 1)
                continue
            head, tail = _split_tree_label(labels[u])
            w = tail.length + 1
            lw = 2 * w.bit_length() - 1
            value = (value << 1) | 1
            value = (value << head.length) | head.value
            value = (value << lw) | w
            value = (value << tail.length) | tail.value
            out[u] = (value, length + 1 + head.length + lw + tail.length)
    return [BitString(v, length) for v, length in out]


def composite_parts(c: BitString) -> list[BitString | None]:
    """Split a composite label into per-part tree labels (None when absent)."""
    value, length = c.value, c.length
    pos = 0
    parts: list[BitString | None] = []
    while pos < length:
        if not (value >> (length - pos - 1)) & 1:
            parts.append(None)
            pos += 1
            continue
        start = pos + 1
        end = _prefix_end(value, length, start)
        w, p = _gamma_at(value, length, end)
        stop = p + w - 1
        if stop > length:
            raise MalformedCode("id field runs past end")
        head = (value >> (length - end)) & ((1 << (end - start)) - 1)
        tail = (value >> (length - stop)) & ((1 << (w - 1)) - 1)
        parts.append(BitString((head << (w - 1)) | tail, end - start + w - 1))
        pos = stop
    return parts


def composite_decode(c1: BitString, c2: BitString) -> bool:
    if c1 == c2:
        return False
    try:
        a = composite_parts(c1)
        b = composite_parts(c2)
    except MalformedCode:
        return False
    return any(x is not None and y is not None and decode_adjacent(x, y) for x, y in zip(a, b))


def random_two_forest_graph(n: int, seed: int) -> tuple[Graph, ForestPartition]:
    """Union of two random spanning trees, with the natural 2-forest partition."""
    rng = random.Random(seed)
    assignment: dict[Edge, int] = {}
    for part in range(2):
        perm = list(range(n))
        rng.shuffle(perm)
        for i in range(1, n):
            u, v = perm[i], perm[rng.randrange(i)]
            e = (u, v) if u < v else (v, u)
            assignment.setdefault(e, part)
    edges = tuple(sorted(assignment))
    return (n, edges), ForestPartition(2, assignment)
