"""Heavy-light decomposition with weight classes and restricted light depth.

``lg`` is floored at 1 throughout, so every node has ``gamma >= 1`` and
``wc >= 1``.  Per-node quantities are numpy arrays indexed by node; the
sequential passes are compiled with numba.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .graph import RootedTree

I64 = np.int64


@numba.njit(cache=True)
def bitlen(x):
    c = 0
    while x:
        x >>= 1
        c += 1
    return c


@numba.njit(cache=True)
def _parents_first(parent, root):
    n = parent.shape[0]
    ptr = np.zeros(n + 1, np.int64)
    for v in range(n):
        p = parent[v]
        if p >= 0:
            ptr[p + 1] += 1
    for i in range(n):
        ptr[i + 1] += ptr[i]
    fill = ptr[:-1].copy()
    kids = np.empty(max(n - 1, 0), np.int64)
    for v in range(n):
        p = parent[v]
        if p >= 0:
            kids[fill[p]] = v
            fill[p] += 1
    order = np.empty(n, np.int64)
    order[0] = root
    head = 0
    tail = 1
    while head < tail:
        u = order[head]
        head += 1
        for i in range(ptr[u], ptr[u + 1]):
            if tail >= n:
                return order, -1
            order[tail] = kids[i]
            tail += 1
    return order, tail


@numba.njit(cache=True)
def _decompose(parent, order, root):
    n = parent.shape[0]
    size = np.ones(n, np.int64)
    for i in range(n - 1, 0, -1):
        v = order[i]
        size[parent[v]] += size[v]

    # heavy child: largest subtree; scanning in index order keeps the lowest
    # index on ties
    heavy = np.full(n, -1, np.int64)
    for v in range(n):
        p = parent[v]
        if p >= 0:
            h = heavy[p]
            if h < 0 or size[v] > size[h]:
                heavy[p] = v

    # light children by descending size, ties by index: one stable bucket sort
    light_ptr = np.zeros(n + 1, np.int64)
    start = np.zeros(n + 2, np.int64)
    for v in range(n):
        p = parent[v]
        if p >= 0 and heavy[p] != v:
            light_ptr[p + 1] += 1
            start[n - size[v] + 1] += 1
    for i in range(n):
        light_ptr[i + 1] += light_ptr[i]
    for s in range(n + 1):
        start[s + 1] += start[s]
    by_size = np.empty(light_ptr[n], np.int64)
    for v in range(n):
        p = parent[v]
        if p >= 0 and heavy[p] != v:
            s = n - size[v]
            by_size[start[s]] = v
            start[s] += 1
    light_idx = np.empty(light_ptr[n], np.int64)
    fill = light_ptr[:-1].copy()
    for v in by_size:
        p = parent[v]
        light_idx[fill[p]] = v
        fill[p] += 1

    apex = np.ones(n, np.bool_)
    light_size = np.ones(n, np.int64)
    for u in range(n):
        h = heavy[u]
        if h >= 0:
            apex[h] = False
            light_size[u] = size[u] - size[h]

    gamma = np.empty(n, np.int64)
    wc = np.empty(n, np.int64)
    for u in range(n):
        g = bitlen(size[u] if apex[u] else light_size[u]) - 1
        if g < 1:
            g = 1
        gamma[u] = g
        c = bitlen(g) - 1
        wc[u] = c if c > 1 else 1

    light_height = np.zeros(n, np.int64)
    for i in range(n - 1, 0, -1):
        v = order[i]
        p = parent[v]
        x = light_height[v] + (1 if heavy[p] != v else 0)
        if x > light_height[p]:
            light_height[p] = x

    # tops[v, c]: light depth of the highest node reachable upward from v
    # through ancestors of weight class <= c; v itself never blocks
    width = wc.max() + 1
    tops = np.zeros((n, width), np.int64)
    light_depth = np.zeros(n, np.int64)
    rld = np.zeros(n, np.int64)
    for i in range(1, n):
        v = order[i]
        p = parent[v]
        ld = light_depth[p] + (1 if heavy[p] != v else 0)
        light_depth[v] = ld
        cp = wc[p]
        for c in range(width):
            tops[v, c] = ld if c < cp else tops[p, c]
        rld[v] = ld - tops[v, wc[v]]

    return (size, light_size, heavy, apex, light_height, light_depth, gamma, wc, rld,
            light_ptr, light_idx)


@dataclass
class HldInfo:
    root: int
    parent: np.ndarray
    order: np.ndarray  # parents before children
    size: np.ndarray
    light_size: np.ndarray
    heavy: np.ndarray  # -1 for leaves
    apex: np.ndarray
    light_height: np.ndarray
    light_depth: np.ndarray
    gamma: np.ndarray
    wc: np.ndarray
    rld: np.ndarray
    # light children of u are light_idx[light_ptr[u]:light_ptr[u + 1]],
    # by descending subtree size with ties broken by node index
    light_ptr: np.ndarray
    light_idx: np.ndarray

    @property
    def n(self) -> int:
        return len(self.parent)

    def light_children(self, u: int) -> list[int]:
        return self.light_idx[self.light_ptr[u]:self.light_ptr[u + 1]].tolist()

    def heavy_path(self, u: int) -> list[int]:
        path = [u]
        h = int(self.heavy[u])
        while h >= 0:
            path.append(h)
            h = int(self.heavy[h])
        return path

    def rows(self):
        """(node, size, lightSize, apex, gamma, wc, rld) per node."""
        cols = (self.size, self.light_size, self.apex.astype(I64), self.gamma, self.wc, self.rld)
        for u, row in enumerate(zip(*(c.tolist() for c in cols))):
            yield (u, *row)


@numba.njit(cache=True)
def _renumber(parent, order):
    n = parent.shape[0]
    pos = np.empty(n, np.int64)
    for i in range(n):
        pos[order[i]] = i
    out = np.empty(n, np.int64)
    out[0] = -1
    for i in range(1, n):
        out[i] = pos[parent[order[i]]]
    return out, pos


def parents_first_order(t: RootedTree) -> np.ndarray:
    parent = np.asarray(t.parent, dtype=I64)
    if t.n == 0:
        raise ValueError("empty tree")
    order, count = _parents_first(parent, t.root)
    if count != t.n or parent[t.root] != -1:
        raise ValueError("parent array does not describe a single rooted tree")
    return order


def bfs_renumber(t: RootedTree) -> tuple[RootedTree, np.ndarray]:
    """Copy of ``t`` with nodes numbered in breadth-first order.

    Returns the copy and ``order`` with ``order[i]`` the original node now
    numbered i.  Siblings keep their relative order, so size ties resolve the
    same way in both numberings; the copy just has far better memory locality.
    """
    order = parents_first_order(t)
    parent, _ = _renumber(np.asarray(t.parent, dtype=I64), order)
    real = np.asarray(t.real, dtype=np.bool_)[order]
    return RootedTree(parent, 0, real), order


def decompose(t: RootedTree, order: np.ndarray | None = None) -> HldInfo:
    """Decompose ``t``; ``order`` may supply a known parents-first order."""
    parent = np.asarray(t.parent, dtype=I64)
    if order is None:
        order = parents_first_order(t)
    fields = _decompose(parent, order, t.root)
    return HldInfo(t.root, parent, order, *fields)
