"""lg n + O(1) adjacency labels for trees and forests.

Encoding runs in four linear passes: heavy-light decomposition, weight
assignment (bottom-up over heavy paths), id assignment (top-down), and label
packing.  A label is laid out as::

    [k+1]γ [wc]γ [rld+1]γ apex leaf next(2) | [M]γ r_1 .. r_wc | wlsb(id, k)

where each ``r_i`` is an M-bit, zero-padded, sentinel-prefixed approximation
code for ``a_i`` (see :mod:`labelforest.bits`).  The decoder needs no
knowledge of the tree or of n.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numba
import numpy as np

from .bits import LABEL_CAPACITY, BitString, MalformedCode, _gamma_at, precision_for
from .graph import Forest, RootedTree, attach_imaginary_root
from .hld import HldInfo, bfs_renumber, bitlen, decompose

# path and light weights never exceed this multiple of the subtree size
WEIGHT_FACTOR = 3 * math.exp(math.pi ** 2)

# shifts decoded from untrusted labels are capped so noise cannot blow up ints
_MAX_SHIFT = 2 * LABEL_CAPACITY

_NEXT_BITS = {0: 0b00, 1: 0b01, -1: 0b11}
_NEXT_VALUE = (0, 1, None, -1)


class LabelOverflow(RuntimeError):
    """A label exceeded the fixed capacity; indicates a broken invariant."""


def min_alignment(gamma: int) -> int:
    """k'(u) = gamma - ceil(2 lg gamma) + 1, clamped at 0."""
    k = gamma - max(2, (gamma * gamma - 1).bit_length()) + 1
    return k if k > 0 else 0


@dataclass
class WeightMap:
    lw: np.ndarray
    k: np.ndarray
    pw: np.ndarray  # path weight, set on apex nodes only
    # a_1(u) .. a_wc(u)(u) live in table[table_ptr[u]:table_ptr[u + 1]];
    # the range is empty when u has no light children (all entries zero)
    table_ptr: np.ndarray
    table: np.ndarray

    def entries(self, u: int, wc: int) -> list[int]:
        lo, hi = self.table_ptr[u], self.table_ptr[u + 1]
        return self.table[lo:hi].tolist() if hi > lo else [0] * int(wc)


@numba.njit(cache=True)
def _assign_weights(order, heavy, apex, light_ptr, light_idx, wc, gamma, prec, kmin):
    n = order.shape[0]
    lw = np.ones(n, np.int64)
    k = np.zeros(n, np.int64)
    pw = np.zeros(n, np.int64)
    table_ptr = np.zeros(n + 1, np.int64)
    for u in range(n):
        table_ptr[u + 1] = table_ptr[u] + (wc[u] if light_ptr[u + 1] > light_ptr[u] else 0)
    table = np.zeros(table_ptr[n], np.int64)
    path = np.empty(n, np.int64)
    ks = np.empty(n, np.int64)
    b = np.zeros(wc.max() + 1, np.int64)

    # deeper apex nodes first, so every light child's pw is ready
    for i in range(n - 1, -1, -1):
        a = order[i]
        if not apex[a]:
            continue
        m = 0
        u = a
        while u >= 0:
            path[m] = u
            ks[m] = kmin[gamma[u]]
            m += 1
            lo = light_ptr[u]
            hi = light_ptr[u + 1]
            if hi > lo:
                c = wc[u]
                t = prec[gamma[u]]
                for j in range(c + 1):
                    b[j] = 0
                for q in range(lo, hi):
                    v = light_idx[q]
                    b[wc[v]] += pw[v]
                acc = 0
                base = table_ptr[u] - 1
                for j in range(1, c + 1):
                    acc += b[j]
                    e = bitlen(acc) - t
                    if e > 0:
                        acc = -((-acc) >> e) << e
                    table[base + j] = acc
                lw[u] = 1 + acc
            u = heavy[u]
        for j in range(1, m):
            if ks[j - 1] - 1 > ks[j]:
                ks[j] = ks[j - 1] - 1
        for j in range(m - 2, -1, -1):
            if ks[j + 1] - 1 > ks[j]:
                ks[j] = ks[j + 1] - 1
        total = 0
        for j in range(m):
            u = path[j]
            k[u] = ks[j]
            total += lw[u] + (1 << ks[j]) - 1
        pw[a] = total
    return lw, k, pw, table_ptr, table


def assign_weights(h: HldInfo) -> WeightMap:
    top = int(h.gamma.max()) + 1
    prec = np.array([precision_for(g) if g else 0 for g in range(top)], dtype=np.int64)
    kmin = np.array([min_alignment(g) if g else 0 for g in range(top)], dtype=np.int64)
    return WeightMap(*_assign_weights(h.order, h.heavy, h.apex, h.light_ptr, h.light_idx,
                                      h.wc, h.gamma, prec, kmin))


@numba.njit(cache=True)
def _assign_ids(root, heavy, light_ptr, light_idx, wc, k, lw, pw, table_ptr, table):
    n = heavy.shape[0]
    ids = np.zeros(n, np.int64)
    stack_u = np.empty(n, np.int64)
    stack_s = np.empty(n, np.int64)
    stack_u[0] = root
    stack_s[0] = 0
    top = 1
    while top > 0:
        top -= 1
        u = stack_u[top]
        s = stack_s[top]
        while u >= 0:
            kk = k[u]
            x = (s >> kk) << kk
            if x != s:
                x += 1 << kk
            ids[u] = x
            cur = 0
            t = 0
            # weight classes form contiguous runs; run j starts after a_{j-1}
            for q in range(light_ptr[u], light_ptr[u + 1]):
                v = light_idx[q]
                c = wc[v]
                if c != cur:
                    cur = c
                    t = x + 1 + (table[table_ptr[u] + c - 2] if c > 1 else 0)
                stack_u[top] = v
                stack_s[top] = t
                top += 1
                t += pw[v]
            s = x + lw[u]
            u = heavy[u]
    return ids


def assign_ids(h: HldInfo, w: WeightMap) -> np.ndarray:
    return _assign_ids(h.root, h.heavy, h.light_ptr, h.light_idx, h.wc, w.k, w.lw, w.pw,
                       w.table_ptr, w.table)


def _pack_table(entries, t: int) -> tuple[int, int]:
    codes = []
    width = 2
    for a in entries:
        if a == 0:
            codes.append(0b11)
            continue
        e = a.bit_length() - t
        if e < 0:
            e = 0
        m = a >> e
        le = 2 * (e + 1).bit_length() - 1
        lm = 2 * m.bit_length() - 1
        codes.append((((0b10 << le) | (e + 1)) << lm) | m)
        if 2 + le + lm > width:
            width = 2 + le + lm
    value = width
    length = 2 * width.bit_length() - 1
    for c in codes:
        value = (value << width) | c
    return value, length + width * len(codes)


_WORD = 62


@numba.njit(cache=True)
def _pack_small(real, heavy, apex, wc, rld, gamma, prec, k, ids, table_ptr, table):
    """Label pieces per node; full value when the label fits one word.

    Returns (value, length, head, head_len, tab, tab_len, fits) where head is
    the aux part and tab the table (tab_len < 0 when it does not fit).
    """
    n = heavy.shape[0]
    value = np.zeros(n, np.int64)
    length = np.zeros(n, np.int64)
    head = np.zeros(n, np.int64)
    head_len = np.zeros(n, np.int64)
    tab = np.zeros(n, np.int64)
    tab_len = np.zeros(n, np.int64)
    fits = np.zeros(n, np.bool_)
    for u in range(n):
        if not real[u]:
            continue
        kk = k[u]
        c = wc[u]
        hv = heavy[u]
        flags = 8 if apex[u] else 0
        if hv < 0:
            flags |= 4
        else:
            d = k[hv] - kk
            flags |= 1 if d == 1 else (3 if d == -1 else 0)
        k1 = kk + 1
        r1 = rld[u] + 1
        l1 = 2 * bitlen(k1) - 1
        l2 = 2 * bitlen(c) - 1
        l3 = 2 * bitlen(r1) - 1
        head[u] = (((((k1 << l2) | c) << l3) | r1) << 4) | flags
        head_len[u] = l1 + l2 + l3 + 4

        lo = table_ptr[u]
        hi = table_ptr[u + 1]
        if hi == lo:
            tv = 2
            for _ in range(c):
                tv = (tv << 2) | 3
            tl = 3 + 2 * c
        else:
            t = prec[gamma[u]]
            width = 2
            for q in range(lo, hi):
                a = table[q]
                if a:
                    e = bitlen(a) - t
                    if e < 0:
                        e = 0
                    w = 2 * bitlen(e + 1) + 2 * bitlen(a >> e)
                    if w > width:
                        width = w
            tl = 2 * bitlen(width) - 1 + width * c
            tv = 0
            if tl <= _WORD:
                tv = width
                for q in range(lo, hi):
                    a = table[q]
                    if a:
                        e = bitlen(a) - t
                        if e < 0:
                            e = 0
                        m = a >> e
                        le = 2 * bitlen(e + 1) - 1
                        lm = 2 * bitlen(m) - 1
                        code = (((2 << le) | (e + 1)) << lm) | m
                    else:
                        code = 3
                    tv = (tv << width) | code
            else:
                tl = -tl
        tab[u] = tv
        tab_len[u] = tl

        i = ids[u]
        il = bitlen(i) - kk
        if il < 0:
            il = 0
        total = head_len[u] + (tl if tl > 0 else -tl) + il
        length[u] = total
        if tl > 0 and total <= _WORD:
            value[u] = (((head[u] << tl) | tv) << il) | (i >> kk)
            fits[u] = True
    return value, length, head, head_len, tab, tab_len, fits


class LabelArray(Sequence):
    """Labels indexed by node; ``None`` for nodes that carry no label."""

    def __init__(self, values: list, lengths: list):
        self._values = values
        self._lengths = lengths
        self._words = None

    def __len__(self) -> int:
        return len(self._values)

    def __getitem__(self, u):
        if isinstance(u, slice):
            return [self[i] for i in range(*u.indices(len(self)))]
        v = self._values[u]
        return None if v is None else _bits(v, self._lengths[u])

    def word_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Values and lengths as int64 arrays; labels wider than one word
        (and unlabelled nodes) get length ``_WORD + 1`` and value 0."""
        if self._words is None:
            big = _WORD + 1
            lengths = np.array([big if v is None or n > _WORD else n
                                for v, n in zip(self._values, self._lengths)], dtype=np.int64)
            values = np.array([v if n <= _WORD else 0 for v, n in zip(self._values, lengths.tolist())],
                              dtype=np.int64)
            self._words = values, lengths
        return self._words

    @property
    def lengths(self) -> list:
        return [length for v, length in zip(self._values, self._lengths) if v is not None]


def _bits(value: int, length: int) -> BitString:
    b = object.__new__(BitString)
    b.value = value
    b.length = length
    return b


def pack_labels(t: RootedTree, h: HldInfo, w: WeightMap, ids: np.ndarray,
                order: np.ndarray | None = None) -> LabelArray:
    """Assemble labels; with ``order`` (see ``bfs_renumber``) the result is
    indexed by the original node numbers instead of ``t``'s."""
    real = np.asarray(t.real, dtype=np.bool_)
    top = int(h.gamma.max()) + 1
    prec = np.array([precision_for(g) if g else 0 for g in range(top)], dtype=np.int64)
    value, length, head, head_len, tab, tab_len, fits = _pack_small(
        real, h.heavy, h.apex, h.wc, h.rld, h.gamma, prec, w.k, ids, w.table_ptr, w.table)
    if length.size and length.max() > LABEL_CAPACITY:
        u = int(np.argmax(length))
        raise LabelOverflow(f"label of node {u} needs {int(length[u])} bits")
    if order is None:
        order = np.arange(h.n, dtype=np.int64)
    out_value = np.empty_like(value)
    out_length = np.empty_like(length)
    out_value[order] = value
    out_length[order] = length
    values = out_value.tolist()
    for u in np.flatnonzero(real & ~fits).tolist():
        kk = int(w.k[u])
        tl = int(tab_len[u])
        if tl > 0:
            tv = int(tab[u])
        else:
            tv, tl = _pack_table(w.entries(u, h.wc[u]), int(prec[h.gamma[u]]))
        i = int(ids[u])
        il = max(0, i.bit_length() - kk)
        values[order[u]] = (((int(head[u]) << tl) | tv) << il) | (i >> kk)
    for u in order[~real].tolist():
        values[u] = None
    return LabelArray(values, out_length.tolist())


@dataclass
class TreeEncoding:
    """Encoder state.  ``tree``, ``hld``, ``weights`` and ``ids`` use the
    breadth-first numbering, where node i is original node ``order[i]``;
    ``labels`` is indexed by original node."""

    tree: RootedTree
    hld: HldInfo
    weights: WeightMap
    ids: np.ndarray
    labels: LabelArray
    order: np.ndarray

    @property
    def position(self) -> np.ndarray:
        """Inverse of ``order``: original node -> internal number."""
        pos = np.empty_like(self.order)
        pos[self.order] = np.arange(len(self.order))
        return pos

    def label_map(self) -> dict[int, BitString]:
        return {u: lab for u, lab in enumerate(self.labels) if lab is not None}

    def real_labels(self) -> list[BitString]:
        return [lab for lab in self.labels if lab is not None]


def encode_tree(t: RootedTree) -> TreeEncoding:
    """Run the full encoder on a rooted tree; labels only for real nodes."""
    canon, order = bfs_renumber(t)
    h = decompose(canon, np.arange(canon.n, dtype=np.int64))
    w = assign_weights(h)
    ids = assign_ids(h, w)
    return TreeEncoding(canon, h, w, ids, pack_labels(canon, h, w, ids, order), order)


def encode_labels(t: RootedTree) -> dict[int, BitString]:
    return encode_tree(t).label_map()


def encode_forest(f: Forest) -> TreeEncoding:
    """Encode a forest via an unlabeled imaginary root (node ``f.n``)."""
    return encode_tree(attach_imaginary_root(f))


class TreeLabel(NamedTuple):
    k: int
    wc: int
    rld: int
    apex: bool
    leaf: bool
    next: int
    M: int
    table_offset: int
    entries: tuple[int, ...]
    id: int

    @property
    def lw(self) -> int:
        return 1 + self.entries[-1]


def _entry(field: int, width: int) -> int:
    if not field:
        raise MalformedCode("empty table entry")
    s = width - field.bit_length()
    if s + 2 > width:
        raise MalformedCode("table entry truncated")
    if (field >> (width - s - 2)) & 1:
        if s + 2 != width:
            raise MalformedCode("trailing bits after zero entry")
        return 0
    e1, p = _gamma_at(field, width, s + 2)
    m, p = _gamma_at(field, width, p)
    if p != width or e1 > _MAX_SHIFT:
        raise MalformedCode("bad table entry")
    return m << (e1 - 1)


def _parse(value: int, length: int) -> TreeLabel | None:
    if length > LABEL_CAPACITY:
        return None
    try:
        k1, p = _gamma_at(value, length, 0)
        c, p = _gamma_at(value, length, p)
        r1, p = _gamma_at(value, length, p)
        if p + 4 > length or k1 > _MAX_SHIFT:
            return None
        flags = (value >> (length - p - 4)) & 15
        p += 4
        nxt = _NEXT_VALUE[flags & 3]
        if nxt is None:
            return None
        leaf = bool(flags & 4)
        k = k1 - 1
        if (leaf and nxt) or k + nxt < 0:
            return None
        width, p = _gamma_at(value, length, p)
        if width < 2:
            return None
        end = p + width * c
        if end > length:
            return None
        mask = (1 << width) - 1
        entries = []
        prev = 0
        shift = length - p
        for _ in range(c):
            shift -= width
            a = _entry((value >> shift) & mask, width)
            if a < prev:
                return None
            entries.append(a)
            prev = a
    except MalformedCode:
        return None
    rest = length - end
    idbits = value & ((1 << rest) - 1)
    if rest and not idbits >> (rest - 1):
        return None
    return TreeLabel(k, c, r1 - 1, bool(flags & 8), leaf, nxt, width, p, tuple(entries), idbits << k)


def parse_label(s: BitString) -> TreeLabel | None:
    """Parse a label; ``None`` marks anything that is not a well-formed label."""
    return _parse(s.value, s.length)


def is_parent(u: TreeLabel, v: TreeLabel) -> bool:
    """True iff the node labelled ``u`` is the parent of the one labelled ``v``."""
    if v.apex:
        c = v.wc
        if c > u.wc:
            return False
        ent = u.entries
        d = v.id - u.id
        if d <= (ent[c - 2] if c > 1 else 0) or d > ent[c - 1]:
            return False
        if c < u.wc:
            return v.rld == 0
        return v.rld == u.rld + 1
    if u.leaf:
        return False
    s = u.id + 1 + u.entries[-1]
    kk = u.k + u.next
    x = (s >> kk) << kk
    if x != s:
        x += 1 << kk
    return v.id == x


def labels_adjacent(u: TreeLabel | None, v: TreeLabel | None) -> bool:
    if u is None or v is None:
        return False
    return is_parent(u, v) or is_parent(v, u)


# Word-sized fast path.  Labels of at most _WORD bits are decoded by a
# compiled routine; it answers 2 ("undecided") whenever an intermediate value
# would not fit comfortably in a signed 64-bit word, and the caller then falls
# back to the arbitrary-precision path above.  Both paths agree on every input.

_UNDECIDED = 2
_SAFE = 60


@numba.njit(cache=True)
def _gamma_word(value, length, pos):
    rem = length - pos
    if rem <= 0:
        return -1, pos
    tail = value & ((1 << rem) - 1)
    if tail == 0:
        return -1, pos
    width = 2 * (rem - bitlen(tail)) + 1
    if width > rem:
        return -1, pos
    return tail >> (rem - width), pos + width


@numba.njit(cache=True)
def _entry_word(field, width):
    """Value of one table entry; -1 if malformed, -2 if too large."""
    if field == 0:
        return -1
    s = width - bitlen(field)
    if s + 2 > width:
        return -1
    if (field >> (width - s - 2)) & 1:
        return 0 if s + 2 == width else -1
    e1, p = _gamma_word(field, width, s + 2)
    if e1 < 0:
        return -1
    m, p = _gamma_word(field, width, p)
    if m < 0 or p != width:
        return -1
    if e1 > _MAX_SHIFT:
        return -1
    if e1 - 1 + bitlen(m) > _SAFE:
        return -2
    return m << (e1 - 1)


@numba.njit(cache=True)
def _parse_word(value, length):
    """(status, k, wc, rld, apex, leaf, next, width, table_pos, id)."""
    bad = (0, 0, 0, 0, False, False, 0, 0, 0, 0)
    k1, p = _gamma_word(value, length, 0)
    if k1 < 0:
        return bad
    c, p = _gamma_word(value, length, p)
    if c < 0:
        return bad
    r1, p = _gamma_word(value, length, p)
    if r1 < 0 or p + 4 > length:
        return bad
    flags = (value >> (length - p - 4)) & 15
    p += 4
    code = flags & 3
    if code == 2:
        return bad
    nxt = 0 if code == 0 else (1 if code == 1 else -1)
    leaf = (flags & 4) != 0
    k = k1 - 1
    if (leaf and nxt != 0) or k + nxt < 0:
        return bad
    width, p = _gamma_word(value, length, p)
    if width < 2:
        return bad
    end = p + width * c
    if end > length:
        return bad
    undecided = False
    prev = 0
    shift = length - p
    mask = (1 << width) - 1
    for _ in range(c):
        shift -= width
        a = _entry_word((value >> shift) & mask, width)
        if a == -1:
            return bad
        if a == -2:
            undecided = True
        elif a < prev:
            return bad
        else:
            prev = a
    rest = length - end
    idbits = value & ((1 << rest) - 1)
    if rest and not idbits >> (rest - 1):
        return bad
    if undecided or k + 1 > _SAFE or (idbits and bitlen(idbits) + k > _SAFE):
        return (_UNDECIDED, 0, 0, 0, False, False, 0, 0, 0, 0)
    return (1, k, c, r1 - 1, (flags & 8) != 0, leaf, nxt, width, p, idbits << k)


@numba.njit(cache=True)
def _table_word(value, length, p, width, i):
    # a_i for i >= 1; a_0 is zero by definition
    if i == 0:
        return 0
    field = (value >> (length - p - width * i)) & ((1 << width) - 1)
    return _entry_word(field, width)


@numba.njit(cache=True)
def _is_parent_word(uv, ul, u, vv, vl, v):
    _, uk, uc, urld, _, uleaf, unxt, uw, up, uid = u
    _, _, vc, vrld, vapex, _, _, _, _, vid = v
    if vapex:
        if vc > uc:
            return False
        d = vid - uid
        if d <= _table_word(uv, ul, up, uw, vc - 1) or d > _table_word(uv, ul, up, uw, vc):
            return False
        if vc < uc:
            return vrld == 0
        return vrld == urld + 1
    if uleaf:
        return False
    s = uid + 1 + _table_word(uv, ul, up, uw, uc)
    kk = uk + unxt
    x = (s >> kk) << kk
    if x != s:
        x += 1 << kk
    return vid == x


@numba.njit(cache=True)
def _decode_word(v1, l1, v2, l2):
    a = _parse_word(v1, l1)
    if a[0] == 0:
        return 0
    b = _parse_word(v2, l2)
    if b[0] == 0:
        return 0
    if a[0] == _UNDECIDED or b[0] == _UNDECIDED:
        return _UNDECIDED
    if _is_parent_word(v1, l1, a, v2, l2, b) or _is_parent_word(v2, l2, b, v1, l1, a):
        return 1
    return 0


def _decode_general(l1: BitString, l2: BitString) -> bool:
    u = _parse(l1.value, l1.length)
    if u is None:
        return False
    v = _parse(l2.value, l2.length)
    if v is None:
        return False
    return is_parent(u, v) or is_parent(v, u)


def decode_adjacent(l1: BitString, l2: BitString) -> bool:
    """Adjacency from two labels alone; total on arbitrary bit strings."""
    n1, n2 = l1.length, l2.length
    if n1 == n2 and l1.value == l2.value:
        return False
    if n1 <= _WORD and n2 <= _WORD:
        r = _decode_word(l1.value, n1, l2.value, n2)
        if r != _UNDECIDED:
            return r == 1
    return _decode_general(l1, l2)


@numba.njit(cache=True)
def _decode_index_batch(values, lengths, us, vs):
    out = np.empty(us.shape[0], np.int8)
    for i in range(us.shape[0]):
        u = us[i]
        v = vs[i]
        if lengths[u] > _WORD or lengths[v] > _WORD:
            out[i] = _UNDECIDED
        elif lengths[u] == lengths[v] and values[u] == values[v]:
            out[i] = 0
        else:
            out[i] = _decode_word(values[u], lengths[u], values[v], lengths[v])
    return out


def decode_batch(labels: LabelArray, us, vs) -> np.ndarray:
    """``decode_adjacent(labels[u], labels[v])`` for each index pair; bool array."""
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    values, lengths = labels.word_arrays()
    res = _decode_index_batch(values, lengths, us, vs)
    out = res == 1
    for i in np.flatnonzero(res == _UNDECIDED).tolist():
        out[i] = decode_adjacent(labels[int(us[i])], labels[int(vs[i])])
    return out


def ceil_lg(n: int) -> int:
    return max(1, (n - 1).bit_length())


_PRODUCT_CACHE: dict[int, Fraction] = {0: Fraction(1)}


def light_height_product(x: int) -> Fraction:
    """prod_{i=1..x} (1 + 6 / i^2), exactly."""
    if x not in _PRODUCT_CACHE:
        _PRODUCT_CACHE[x] = light_height_product(x - 1) * (1 + Fraction(6, x * x))
    return _PRODUCT_CACHE[x]


def scheme_stats(enc: TreeEncoding) -> dict:
    h, w = enc.hld, enc.weights
    real = np.asarray(enc.tree.real, dtype=np.bool_)
    lengths = np.asarray(enc.labels.lengths, dtype=np.int64)
    n = int(lengths.size)
    classes, counts = np.unique(h.wc[real], return_counts=True)
    apex = h.apex
    return {
        "n": n,
        "max_label_bits": int(lengths.max()),
        "mean_label_bits": float(lengths.mean()),
        "excess": int(lengths.max()) - ceil_lg(n),
        "max_id": int(enc.ids.max()),
        "root_pw": int(w.pw[h.root]),
        "max_pw_ratio": float((w.pw[apex] / h.size[apex]).max()),
        "wc_census": dict(zip(classes.tolist(), counts.tolist())),
    }
