"""Executable structural guarantees of the tree scheme.

Each checker returns a list of human-readable violations; an empty list means
the property holds.  The brute-force checkers are quadratic and meant for small
trees; the rest are linear and run on every verified instance.
"""

from __future__ import annotations

import numpy as np

from .bits import approx_value, precision_for
from .graph import RootedTree
from .hld import HldInfo
from .scheme import (
    WEIGHT_FACTOR,
    TreeEncoding,
    WeightMap,
    light_height_product,
    min_alignment,
)


def _first(mask: np.ndarray, limit: int = 5) -> list[int]:
    return np.flatnonzero(mask)[:limit].tolist()


def check_decomposition(h: HldInfo) -> list[str]:
    out = []
    n = h.n
    size, lh = h.size, h.light_height
    # |T_u| >= 2^(lightHeight + 1) - 1; light heights are O(log n) so this is exact
    bad = size < (np.left_shift(1, np.minimum(lh + 1, 62)) - 1)
    for u in _first(bad):
        out.append(f"light height bound: node {u} size {size[u]} light height {lh[u]}")

    has_heavy = h.heavy >= 0
    ls = np.where(has_heavy, size - size[np.maximum(h.heavy, 0)], 1)
    for u in _first((ls != h.light_size) | (~has_heavy & (size != 1))):
        out.append(f"light size: node {u}")
    if not h.apex[h.root]:
        out.append("root is not an apex node")

    basis = np.where(h.apex, size, h.light_size)
    expect_gamma = np.maximum(1, np.floor(np.log2(basis)).astype(np.int64))
    for u in _first(expect_gamma != h.gamma):
        out.append(f"gamma: node {u} has {h.gamma[u]}, expected {expect_gamma[u]}")
    expect_wc = np.maximum(1, np.floor(np.log2(h.gamma)).astype(np.int64))
    for u in _first(expect_wc != h.wc):
        out.append(f"weight class: node {u}")

    for u in _first(h.rld > 2 * h.gamma + 2):
        out.append(f"restricted light depth bound: node {u} rld {h.rld[u]} gamma {h.gamma[u]}")
    for u in _first((h.gamma >= 2) & (h.rld > 2 * h.gamma + 1)):
        out.append(f"restricted light depth bound (gamma >= 2): node {u}")

    # apex children: rld 0 below a heavier class, rld + 1 within the same class
    child = np.flatnonzero(h.apex & (h.parent >= 0))
    par = h.parent[child]
    lower = h.wc[child] < h.wc[par]
    same = h.wc[child] == h.wc[par]
    bad = (lower & (h.rld[child] != 0)) | (same & (h.rld[child] != h.rld[par] + 1)) | (h.wc[child] > h.wc[par])
    for i in _first(bad):
        out.append(f"apex child rule: node {child[i]} under {par[i]}")

    # each non-root node has exactly one parent edge, heavy or light
    heavy_kids = np.bincount(h.heavy[has_heavy], minlength=n) if has_heavy.any() else np.zeros(n, np.int64)
    if heavy_kids.max(initial=0) > 1:
        out.append("a node is the heavy child of two parents")
    for u in _first(has_heavy & (h.parent[np.maximum(h.heavy, 0)] != np.arange(n))):
        out.append(f"heavy child of {u} is not its child")
    for u in _first(h.apex == (h.parent >= 0) & (h.heavy[np.maximum(h.parent, 0)] == np.arange(n))):
        out.append(f"apex flag: node {u}")

    out += check_census(h)
    return out


def check_census(h: HldInfo) -> list[str]:
    """#{u : wc(u) = k} * 2^(2^k) <= n * (2^(k+1) + 1) for every class k."""
    out = []
    classes, counts = np.unique(h.wc, return_counts=True)
    for k, c in zip(classes.tolist(), counts.tolist()):
        if c * (1 << (1 << k)) > h.n * ((1 << (k + 1)) + 1):
            out.append(f"weight class census: {c} nodes in class {k} for n={h.n}")
    return out


def check_heavy_choice(t: RootedTree, h: HldInfo) -> list[str]:
    """Heavy child is the largest child, ties to the lowest index; light
    children listed by descending size then index."""
    out = []
    kids: list[list[int]] = [[] for _ in range(h.n)]
    for v, p in enumerate(h.parent.tolist()):
        if p >= 0:
            kids[p].append(v)
    size = h.size.tolist()
    for u in range(h.n):
        ranked = sorted(kids[u], key=lambda v: (-size[v], v))
        heavy = ranked[0] if ranked else -1
        if heavy != h.heavy[u]:
            out.append(f"heavy child of {u}: {h.heavy[u]}, expected {heavy}")
        if ranked[1:] != h.light_children(u):
            out.append(f"light child order of {u}")
    return out


def rld_by_definition(h: HldInfo) -> list[int]:
    """Restricted light depth straight from its definition (quadratic)."""
    parent, heavy, wc = h.parent.tolist(), h.heavy.tolist(), h.wc.tolist()
    out = []
    for u in range(h.n):
        light = 0
        v = u
        while parent[v] >= 0 and wc[parent[v]] <= wc[u]:
            p = parent[v]
            if heavy[p] != v:
                light += 1
            v = p
        out.append(light)
    return out


def check_rld_rules(h: HldInfo) -> list[str]:
    """Definition cross-check plus the apex-ancestor rule over all pairs."""
    out = []
    ref = rld_by_definition(h)
    for u in range(h.n):
        if ref[u] != h.rld[u]:
            out.append(f"rld of {u}: {h.rld[u]}, definition gives {ref[u]}")
    parent, heavy = h.parent.tolist(), h.heavy.tolist()
    for v in range(h.n):
        light = 0
        w = v
        while parent[w] >= 0:
            p = parent[w]
            if heavy[p] != w:
                light += 1
            w = p
            if h.apex[w] and h.wc[w] == h.wc[v] and h.rld[v] != h.rld[w] + light:
                out.append(f"apex ancestor rule: {w} above {v}")
    return out


def check_weights(h: HldInfo, w: WeightMap) -> list[str]:
    """Path/light weight bounds, alignment smoothness and table shape."""
    out = []
    apex = np.flatnonzero(h.apex)
    pw = w.pw[apex]
    for i in _first(pw > WEIGHT_FACTOR * h.size[apex]):
        out.append(f"path weight bound: node {apex[i]} pw {pw[i]} size {h.size[apex[i]]}")
    for u in _first(w.lw > WEIGHT_FACTOR * h.light_size):
        out.append(f"light weight bound: node {u}")
    # tighter product bound, exactly; the product only depends on light height
    for x in np.unique(h.light_height[apex]).tolist():
        prod = light_height_product(x)
        sel = apex[h.light_height[apex] == x]
        lhs = w.pw[sel].astype(object) * prod.denominator
        rhs = 3 * h.size[sel].astype(object) * prod.numerator
        for i in _first(np.asarray(lhs > rhs, dtype=bool)):
            out.append(f"light height product bound: node {sel[i]}")

    has_heavy = h.heavy >= 0
    diff = np.abs(w.k[has_heavy] - w.k[h.heavy[has_heavy]])
    for i in _first(diff > 1):
        out.append(f"alignment jumps by more than one below node {np.flatnonzero(has_heavy)[i]}")
    top = int(h.gamma.max()) + 1
    kmin = np.array([min_alignment(g) for g in range(top)], dtype=np.int64)
    for u in _first(w.k < kmin[h.gamma]):
        out.append(f"alignment below minimum: node {u}")

    for u in range(h.n):
        lo, hi = w.table_ptr[u], w.table_ptr[u + 1]
        if hi == lo:
            if w.lw[u] != 1:
                out.append(f"light weight of childless node {u}")
            continue
        t = w.table[lo:hi]
        if hi - lo != h.wc[u] or (np.diff(t) < 0).any() or w.lw[u] != 1 + t[-1]:
            out.append(f"table of node {u}")
    return out


def check_approximation_tables(h: HldInfo, w: WeightMap) -> list[str]:
    """a_i(u) is the round-up approximation of a_{i-1}(u) + b_i(u)."""
    out = []
    pw, wc = w.pw.tolist(), h.wc.tolist()
    for u in range(h.n):
        kids = h.light_children(u)
        if not kids:
            continue
        b = [0] * (wc[u] + 1)
        for v in kids:
            b[wc[v]] += pw[v]
        t = precision_for(int(h.gamma[u]))
        prev = 0
        for i, a in enumerate(w.entries(u, wc[u]), 1):
            exact = prev + b[i]
            if a != approx_value(exact, t) or a < exact or (a << (t - 1)) > exact * ((1 << (t - 1)) + 1):
                out.append(f"approximation a_{i} of node {u}")
            prev = a
    return out


def check_ids(enc: TreeEncoding) -> list[str]:
    """Alignment, interval membership and nesting of the id assignment."""
    h, w = enc.hld, enc.weights
    ids = enc.ids.tolist()
    k, lw, pw, wc = w.k.tolist(), w.lw.tolist(), w.pw.tolist(), h.wc.tolist()
    heavy = h.heavy.tolist()
    out = []
    if len(set(ids)) != len(ids):
        out.append("ids are not unique")
    if max(ids) >= pw[h.root]:
        out.append(f"max id {max(ids)} not below root path weight {pw[h.root]}")
    stack = [(h.root, 0, pw[h.root])]
    while stack:
        a, s, limit = stack.pop()
        u = a
        while u >= 0:
            x = ids[u]
            if not s <= x < s + (1 << k[u]) or x & ((1 << k[u]) - 1):
                out.append(f"id of node {u} outside its aligned window")
            ent = w.entries(u, wc[u])
            t = x + 1
            cur = 0
            for v in h.light_children(u):
                c = wc[v]
                if c != cur:
                    cur = c
                    t = x + 1 + (ent[c - 2] if c > 1 else 0)
                lo = x + (ent[c - 2] if c > 1 else 0)
                hi = x + ent[c - 1]
                if not lo < ids[v] <= hi or t + pw[v] - 1 > hi:
                    out.append(f"light child {v} of {u} escapes its class range")
                stack.append((v, t, t + pw[v]))
                t += pw[v]
            s = x + lw[u]
            u = heavy[u]
        if s > limit:
            out.append(f"heavy path of {a} overruns its path weight")
    return out


def check_label_sizes(enc: TreeEncoding) -> list[str]:
    """Every label fits the capacity and the encoding stays injective."""
    labels = enc.real_labels()
    out = []
    if len(set(labels)) != len(labels):
        out.append("labels are not unique")
    if labels and max(len(x) for x in labels) > 512:
        out.append("label exceeds capacity")
    return out


def check_encoding(enc: TreeEncoding, brute: bool = False) -> list[str]:
    out = check_decomposition(enc.hld) + check_weights(enc.hld, enc.weights)
    out += check_ids(enc) + check_label_sizes(enc)
    if brute:
        out += check_heavy_choice(enc.tree, enc.hld) + check_rld_rules(enc.hld)
        out += check_approximation_tables(enc.hld, enc.weights)
    return out


def census_bound(n: int, k: int) -> float:
    return n * (2 ** (k + 1) + 1) / 2 ** (2 ** k)

