"""Adjacency labels for caterpillars.

The tree is rooted at one end of a longest path ``u_1 .. u_p``.  Every spine
node ``u_i`` owns an aligned interval ``[id(u_i), id(u_i) + 2**k_i)`` whose
first slot is its own id and whose next slots hold its leaf children.  The
alignments differ by at most one along the spine, so a spine label only needs
two bits to say where the next interval starts.

Labels:

* spine node: ``0 ∘ type(2) ∘ [k+1]γ ∘ wlsb(id, k)`` where type is ``00`` for
  the last spine node and ``01``/``10``/``11`` when the next alignment is
  ``k+1``/``k``/``k-1``;
* leaf off the spine: ``1 ∘ binary(id)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .bits import LABEL_CAPACITY, BitString, MalformedCode, _gamma_at, snap_up
from .graph import Forest

_TYPE_LAST = 0b00
_TYPE_FOR_DELTA = {1: 0b01, 0: 0b10, -1: 0b11}
_DELTA_FOR_TYPE = (None, 1, 0, -1)


class NotACaterpillar(ValueError):
    pass


def _bfs(adj: list[list[int]], src: int) -> tuple[list[int], list[int]]:
    dist = [-1] * len(adj)
    parent = [-1] * len(adj)
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                parent[v] = u
                queue.append(v)
    return dist, parent


def _farthest(dist: list[int]) -> int:
    best = max(dist)
    return dist.index(best)


def cat_check(f: Forest) -> list[int]:
    """Longest path of a caterpillar, from its lower-index end.

    Raises :class:`NotACaterpillar` if ``f`` is not a single caterpillar.
    """
    n = f.n
    if len(f.edges) != n - 1:
        raise NotACaterpillar(f"expected a single tree: {n} nodes, {len(f.edges)} edges")
    adj = [sorted(a) for a in f.adjacency()]
    dist, _ = _bfs(adj, 0)
    if min(dist) < 0:
        raise NotACaterpillar("forest is not connected")
    a = _farthest(dist)
    dist, parent = _bfs(adj, a)
    b = _farthest(dist)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    if path[-1] < path[0]:
        path.reverse()
    on_path = [False] * n
    for u in path:
        on_path[u] = True
    for v in range(n):
        if on_path[v]:
            continue
        if len(adj[v]) != 1 or not on_path[adj[v][0]]:
            raise NotACaterpillar(f"node {v} is off the longest path but not a leaf of it")
    return path


def _ceil_lg(x: int) -> int:
    return max(1, (x - 1).bit_length())


@dataclass
class CatLabels:
    path: list[int]
    k: list[int]  # alignment per spine position
    ids: list[int]  # per node
    labels: list[BitString]  # per node

    @property
    def max_id(self) -> int:
        return max(self.ids)

    def interval_len(self, i: int) -> int:
        return 1 << self.k[i]


def spine_alignments(light_sizes: list[int]) -> list[int]:
    """k_i = max_j (gamma_j - |i - j|), clamped at 0, in two linear sweeps."""
    k = [_ceil_lg(s) for s in light_sizes]
    for i in range(1, len(k)):
        k[i] = max(k[i], k[i - 1] - 1)
    for i in range(len(k) - 2, -1, -1):
        k[i] = max(k[i], k[i + 1] - 1)
    return [max(0, x) for x in k]


def cat_encode(f: Forest) -> CatLabels:
    path = cat_check(f)
    n = f.n
    pos = [-1] * n
    for i, u in enumerate(path):
        pos[u] = i
    leaves: list[list[int]] = [[] for _ in path]
    for u, v in f.edges:
        if pos[u] >= 0 and pos[v] >= 0:
            continue
        if pos[u] >= 0:
            leaves[pos[u]].append(v)
        else:
            leaves[pos[v]].append(u)
    # a lone node needs no interval beyond its own id
    k = [0] if n == 1 else spine_alignments([1 + len(c) for c in leaves])

    ids = [0] * n
    labels: list[BitString | None] = [None] * n
    start = 0
    for i, u in enumerate(path):
        x = snap_up(start, k[i])
        ids[u] = x
        for j, v in enumerate(sorted(leaves[i]), 1):
            ids[v] = x + j
            labels[v] = BitString((1 << (x + j).bit_length()) | (x + j), 1 + (x + j).bit_length())
        start = x + (1 << k[i])

    for i, u in enumerate(path):
        kind = _TYPE_LAST if i == len(path) - 1 else _TYPE_FOR_DELTA[k[i + 1] - k[i]]
        k1 = k[i] + 1
        lk = 2 * k1.bit_length() - 1
        rest = ids[u] >> k[i]
        lr = rest.bit_length()
        labels[u] = BitString((((kind << lk) | k1) << lr) | rest, 3 + lk + lr)
    return CatLabels(path, k, ids, labels)


def _parse_cat(s: BitString) -> tuple[bool, int, int, int | None] | None:
    """(on_spine, k, id, delta) with delta None for the last spine node."""
    n, value = s.length, s.value
    if n < 2 or n > LABEL_CAPACITY:
        return None
    if value >> (n - 1):
        ident = value & ((1 << (n - 1)) - 1)
        if not ident >> (n - 2):
            return None
        return False, 0, ident, None
    if n < 4:
        return None
    kind = (value >> (n - 3)) & 3
    try:
        k1, p = _gamma_at(value, n, 3)
    except MalformedCode:
        return None
    if k1 > 2 * LABEL_CAPACITY:
        return None
    rest = n - p
    bits = value & ((1 << rest) - 1)
    if rest and not bits >> (rest - 1):
        return None
    k = k1 - 1
    delta = _DELTA_FOR_TYPE[kind]
    if delta is not None and k + delta < 0:
        return None
    return True, k, bits << k, delta


def cat_decode(l1: BitString, l2: BitString) -> bool:
    if l1 == l2:
        return False
    a = _parse_cat(l1)
    b = _parse_cat(l2)
    if a is None or b is None:
        return False
    if not a[0] and not b[0]:
        return False
    if a[0] != b[0]:
        spine, leaf = (a, b) if a[0] else (b, a)
        return spine[2] < leaf[2] < spine[2] + (1 << spine[1])
    lo, hi = (a, b) if a[2] < b[2] else (b, a)
    _, k, ident, delta = lo
    if delta is None:
        return False
    return hi[1] == k + delta and hi[2] == snap_up(ident + (1 << k), k + delta)
