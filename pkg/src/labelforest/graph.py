"""Forests, rooted trees, instance generators and the ground-truth oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import chain, product
from typing import Iterable, Iterator, Sequence

import numba
import numpy as np

FAMILIES = ("path", "star", "caterpillar", "binary", "uniform-prufer", "random-recursive", "broom")

Edge = tuple[int, int]


class ForestError(ValueError):
    """Invalid forest description."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class HeaderError(ForestError):
    pass


class EndpointError(ForestError):
    pass


class DuplicateEdgeError(ForestError):
    pass


class CycleError(ForestError):
    pass


@dataclass(frozen=True)
class Forest:
    """Undirected forest on nodes ``0..n-1``; edges are stored as ``(min, max)``."""

    n: int
    edges: tuple[Edge, ...]

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj


@dataclass(frozen=True)
class RootedTree:
    """Parent-array tree.  ``parent[root] == -1``; ``real[u]`` is False only
    for an imaginary root added on top of a forest."""

    parent: Sequence[int]
    root: int
    real: Sequence[bool] = field(default=())

    def __post_init__(self):
        if len(self.real) == 0:
            object.__setattr__(self, "real", [True] * len(self.parent))

    @property
    def n(self) -> int:
        return len(self.parent)

    def real_nodes(self) -> list[int]:
        return [u for u in range(self.n) if self.real[u]]

    def adjacent(self, u: int, v: int) -> bool:
        return u != v and (self.parent[u] == v or self.parent[v] == u)


def _find(dsu: list[int], x: int) -> int:
    while dsu[x] != x:
        dsu[x] = dsu[dsu[x]]
        x = dsu[x]
    return x


def make_forest(n: int, edges: Iterable[Edge]) -> Forest:
    """Build a validated :class:`Forest`, normalizing each edge to ``(min, max)``."""
    if n < 1:
        raise HeaderError(f"node count must be >= 1, got {n}")
    dsu = list(range(n))
    seen: set[Edge] = set()
    out: list[Edge] = []
    for u, v in edges:
        _check_edge(n, u, v, seen, dsu, None)
        out.append((u, v) if u < v else (v, u))
    return Forest(n, tuple(out))


def _check_edge(n, u, v, seen, dsu, line):
    if not (0 <= u < n and 0 <= v < n):
        raise EndpointError(f"endpoint out of range in edge ({u}, {v}) for n={n}", line)
    if u == v:
        raise CycleError(f"self-loop at node {u}", line)
    e = (u, v) if u < v else (v, u)
    if e in seen:
        raise DuplicateEdgeError(f"duplicate edge {e}", line)
    seen.add(e)
    ru, rv = _find(dsu, u), _find(dsu, v)
    if ru == rv:
        raise CycleError(f"edge {e} closes a cycle", line)
    dsu[ru] = rv


def validate_forest(f: Forest) -> None:
    """Raise :class:`ForestError` unless ``f`` satisfies the forest invariants."""
    make_forest(f.n, f.edges)
    if any(u >= v for u, v in f.edges):
        raise ForestError("edges must be stored as (min, max)")


def parse_forest(text: str | Iterable[str]) -> Forest:
    """Parse the text format: ``n`` on the first line, then one ``u v`` per line.

    Blank lines and lines starting with ``#`` are ignored.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    n = None
    dsu: list[int] = []
    seen: set[Edge] = set()
    edges: list[Edge] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1 or not parts[0].isdigit():
                raise HeaderError(f"expected node count, got {line!r}", lineno)
            n = int(parts[0])
            if n < 1:
                raise HeaderError("node count must be >= 1", lineno)
            dsu = list(range(n))
            continue
        if len(parts) != 2:
            raise ForestError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ForestError(f"non-integer endpoint in {line!r}", lineno) from None
        _check_edge(n, u, v, seen, dsu, lineno)
        edges.append((u, v) if u < v else (v, u))
    if n is None:
        raise HeaderError("missing node count", 1)
    return Forest(n, tuple(edges))


def format_forest(f: Forest) -> str:
    """Canonical text form; edges sorted lexicographically."""
    out = [str(f.n)]
    out.extend(f"{u} {v}" for u, v in sorted(f.edges))
    return "\n".join(out) + "\n"


def oracle_adjacent(f: Forest, u: int, v: int) -> bool:
    if not (0 <= u < f.n and 0 <= v < f.n):
        raise IndexError(f"node out of range for n={f.n}: ({u}, {v})")
    if u == v:
        return False
    return ((u, v) if u < v else (v, u)) in f.edge_set


@numba.njit(cache=True)
def _bfs_parents(n, us, vs):
    deg = np.zeros(n + 1, np.int64)
    for i in range(us.shape[0]):
        deg[us[i] + 1] += 1
        deg[vs[i] + 1] += 1
    for i in range(n):
        deg[i + 1] += deg[i]
    fill = deg[:-1].copy()
    adj = np.empty(2 * us.shape[0], np.int64)
    for i in range(us.shape[0]):
        adj[fill[us[i]]] = vs[i]
        fill[us[i]] += 1
        adj[fill[vs[i]]] = us[i]
        fill[vs[i]] += 1
    parent = np.full(n + 1, -2, np.int64)
    parent[n] = -1
    queue = np.empty(n, np.int64)
    for r in range(n):
        if parent[r] != -2:
            continue
        parent[r] = n
        queue[0] = r
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            for j in range(deg[u], deg[u + 1]):
                v = adj[j]
                if parent[v] == -2:
                    parent[v] = u
                    queue[tail] = v
                    tail += 1
    return parent


def edge_arrays(f: Forest) -> tuple[np.ndarray, np.ndarray]:
    flat = np.fromiter(chain.from_iterable(f.edges), dtype=np.int64, count=2 * len(f.edges))
    return flat[0::2].copy(), flat[1::2].copy()


def attach_imaginary_root(f: Forest) -> RootedTree:
    """Root every component at its smallest node and hang those roots below a
    new node ``n`` that is marked not real."""
    n = f.n
    parent = _bfs_parents(n, *edge_arrays(f))
    real = np.ones(n + 1, dtype=np.bool_)
    real[n] = False
    return RootedTree(parent, n, real)


def tree_to_forest(t: RootedTree) -> Forest:
    """Real-node edges of ``t`` as a forest (imaginary nodes dropped)."""
    real = t.real
    index = {}
    for u in range(t.n):
        if real[u]:
            index[u] = len(index)
    edges = []
    for v, p in enumerate(t.parent):
        if p >= 0 and real[v] and real[p]:
            a, b = index[v], index[p]
            edges.append((a, b) if a < b else (b, a))
    return Forest(len(index), tuple(edges))


def children_lists(t: RootedTree) -> list[list[int]]:
    ch: list[list[int]] = [[] for _ in range(t.n)]
    for v, p in enumerate(t.parent):
        if p >= 0:
            ch[p].append(v)
    return ch


def enumerate_parent_arrays(n: int) -> Iterator[RootedTree]:
    """Every parent array with ``parent[i] < i`` rooted at node 0: (n-1)! trees."""
    if not 1 <= n <= 10:
        raise ValueError(f"enumeration supports 1 <= n <= 10, got {n}")
    for tail in product(*(range(i) for i in range(1, n))):
        yield RootedTree((-1,) + tail, 0)


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    seed: int = 0


def _prufer_edges(n: int, rng: random.Random) -> list[Edge]:
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    ptr = degree.index(1)
    leaf = ptr
    edges = []
    for x in seq:
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1 and x < ptr:
            leaf = x
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n - 1))
    return edges


def _random_binary_edges(n: int, rng: random.Random) -> list[Edge]:
    # each new node takes a uniformly random free child slot
    slots = [0, 0]
    edges = []
    for i in range(1, n):
        j = rng.randrange(len(slots))
        slots[j], slots[-1] = slots[-1], slots[j]
        edges.append((slots.pop(), i))
        slots.append(i)
        slots.append(i)
    return edges


def gen_tree(spec: GenSpec) -> Forest:
    """Deterministic instance generator; the result is always a single tree."""
    n, family = spec.n, spec.family
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(spec.seed)
    if family == "path":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif family == "star":
        edges = [(0, i) for i in range(1, n)]
    elif family == "caterpillar":
        spine = rng.randint(max(1, n // 8), max(1, n // 2))
        edges = [(i, i + 1) for i in range(spine - 1)]
        edges += [(rng.randrange(spine), i) for i in range(spine, n)]
    elif family == "binary":
        edges = _random_binary_edges(n, rng)
    elif family == "uniform-prufer":
        edges = _prufer_edges(n, rng)
    elif family == "random-recursive":
        edges = [(rng.randrange(i), i) for i in range(1, n)]
    elif family == "broom":
        handle = max(1, n // 2)
        edges = [(i, i + 1) for i in range(handle - 1)]
        edges += [(handle - 1, i) for i in range(handle, n)]
    else:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return Forest(n, tuple((u, v) if u < v else (v, u) for u, v in edges))
