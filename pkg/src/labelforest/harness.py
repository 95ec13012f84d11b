"""Verification suites and benchmarks behind the ``verify`` and ``bench`` commands."""

from __future__ import annotations

import ctypes
import ctypes.util
import gc
import json
import os
import random
import time
import tracemalloc
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .bits import (
    BitString,
    approx,
    approx_pack,
    approx_unpack,
    gamma_decode,
    gamma_encode,
)
from .caterpillar import NotACaterpillar, cat_decode, cat_encode
from .graph import (
    FAMILIES,
    Forest,
    GenSpec,
    edge_arrays,
    enumerate_parent_arrays,
    gen_tree,
    tree_to_forest,
)
from .invariants import check_encoding
from .scheme import decode_adjacent, decode_batch, encode_forest, encode_tree
from .universal import build_universal, embed_check

Decoder = Callable[[BitString, BitString], bool]


def thread_count() -> int:
    """Worker cap from LABELFOREST_THREADS (default 1)."""
    raw = os.environ.get("LABELFOREST_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class ConfigError(ValueError):
    pass


@dataclass
class VerifyConfig:
    seeds: tuple[int, ...]
    scheme: str = "tree"
    exhaustive_max_n: int = 9
    random_sizes: tuple[int, ...] = (1000, 10000, 100000)
    families: tuple[str, ...] = FAMILIES
    non_edge_factor: int = 10
    codec_samples: int = 100000
    fuzz_pairs: int = 20000
    universal_max_n: int = 6

    def __post_init__(self):
        self.seeds = tuple(self.seeds)
        self.random_sizes = tuple(self.random_sizes)
        self.families = tuple(self.families)
        if self.scheme not in ("tree", "caterpillar"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if not 0 <= self.exhaustive_max_n <= 10:
            raise ConfigError("exhaustive_max_n must be within 0..10")
        if any(n < 1 for n in self.random_sizes):
            raise ConfigError("random sizes must be >= 1")
        unknown = set(self.families) - set(FAMILIES)
        if unknown:
            raise ConfigError(f"unknown families {sorted(unknown)}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> VerifyConfig:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        if "seeds" not in raw:
            raise ConfigError("config must list its seeds")
        known = set(cls.__dataclass_fields__)
        extra = set(raw) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        return cls(**raw)


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    violations: list[str] = field(default_factory=list)
    seconds: float = 0.0


@dataclass
class VerifyReport:
    config: VerifyConfig
    suites: list[SuiteResult]

    @property
    def ok(self) -> bool:
        return all(not s.violations for s in self.suites)

    def to_tsv(self) -> str:
        lines = [f"# seeds: {' '.join(map(str, self.config.seeds))}",
                 f"# scheme: {self.config.scheme}",
                 "suite\tchecked\tviolations\tseconds"]
        for s in self.suites:
            lines.append(f"{s.name}\t{s.checked}\t{len(s.violations)}\t{s.seconds:.2f}")
        for s in self.suites:
            for v in s.violations[:20]:
                lines.append(f"# {s.name}: {v}")
        return "\n".join(lines) + "\n"


def _timed(fn):
    def run(*args, **kwargs) -> SuiteResult:
        start = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - start
        return res
    return run


def _exhaustive_size(n: int, scheme: str, decode: Decoder, invariants: bool) -> SuiteResult:
    res = SuiteResult(f"exhaustive-n{n}")
    for index, t in enumerate(enumerate_parent_arrays(n)):
        if scheme == "tree":
            enc = encode_tree(t)
            labels = enc.real_labels()
            if invariants:
                res.violations += [f"tree {index}: {v}" for v in check_encoding(enc, brute=True)]
        else:
            try:
                cat = cat_encode(tree_to_forest(t))
            except NotACaterpillar:
                continue
            labels = cat.labels
            if cat.max_id > 12 * n:
                res.violations.append(f"tree {index}: max id {cat.max_id} above 12n")
        if len(set(labels)) != len(labels):
            res.violations.append(f"tree {index}: duplicate labels")
        for u in range(n):
            for v in range(n):
                if u == v:
                    continue
                res.checked += 1
                if decode(labels[u], labels[v]) != t.adjacent(u, v):
                    res.violations.append(f"tree {index}: pair ({u}, {v}) decoded wrongly")
    return res


def _exhaustive_timed(n: int, scheme: str, decode: Decoder, invariants: bool) -> SuiteResult:
    # module-level so worker processes can unpickle it
    start = time.perf_counter()
    res = _exhaustive_size(n, scheme, decode, invariants)
    res.seconds = time.perf_counter() - start
    return res


def suite_exhaustive(cfg: VerifyConfig, decode: Decoder, invariants: bool = True) -> list[SuiteResult]:
    sizes = list(range(1, cfg.exhaustive_max_n + 1))
    workers = min(thread_count(), len(sizes)) if sizes else 1
    run = _exhaustive_timed
    if workers > 1 and decode in (decode_adjacent, cat_decode):
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(run, n, cfg.scheme, decode, invariants) for n in sizes]
            return [f.result() for f in futures]
    return [run(n, cfg.scheme, decode, invariants) for n in sizes]


def sample_non_edges(f: Forest, count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """``count`` uniformly random ordered pairs u != v that are not edges."""
    rng = np.random.default_rng(seed)
    if f.n < 3 or f.n * (f.n - 1) // 2 == len(f.edges):
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    us, vs = edge_arrays(f)
    edge_keys = np.concatenate([us * f.n + vs, vs * f.n + us])
    edge_keys.sort()
    out_u, out_v = [], []
    need = count
    while need > 0:
        a = rng.integers(0, f.n, 2 * need + 16)
        b = rng.integers(0, f.n, 2 * need + 16)
        keys = a * f.n + b
        pos = np.searchsorted(edge_keys, keys)
        is_edge = edge_keys[np.minimum(pos, len(edge_keys) - 1)] == keys if len(edge_keys) else np.zeros(len(keys), bool)
        keep = (a != b) & ~is_edge
        a, b = a[keep][:need], b[keep][:need]
        out_u.append(a)
        out_v.append(b)
        need -= len(a)
    return np.concatenate(out_u), np.concatenate(out_v)


@_timed
def suite_random(cfg: VerifyConfig, family: str, n: int, seed: int,
                 decode: Decoder | None = None, invariants: bool = True) -> SuiteResult:
    res = SuiteResult(f"random-{family}-n{n}-s{seed}")
    f = gen_tree(GenSpec(family, n, seed))
    us, vs = edge_arrays(f)
    nu, nv = sample_non_edges(f, cfg.non_edge_factor * n, seed)
    if cfg.scheme == "tree":
        enc = encode_forest(f)
        labels = enc.labels
        if invariants:
            res.violations += check_encoding(enc)
        if decode is None:
            got_edges = decode_batch(labels, us, vs)
            got_non = decode_batch(labels, nu, nv)
        else:
            got_edges = np.array([decode(labels[a], labels[b]) for a, b in zip(us.tolist(), vs.tolist())], bool)
            got_non = np.array([decode(labels[a], labels[b]) for a, b in zip(nu.tolist(), nv.tolist())], bool)
    else:
        try:
            cat = cat_encode(f)
        except NotACaterpillar:
            res.name += "-skipped"
            return res
        labels = cat.labels
        if cat.max_id > 12 * n:
            res.violations.append(f"max id {cat.max_id} above 12n")
        dec = decode or cat_decode
        got_edges = np.array([dec(labels[a], labels[b]) for a, b in zip(us.tolist(), vs.tolist())], bool)
        got_non = np.array([dec(labels[a], labels[b]) for a, b in zip(nu.tolist(), nv.tolist())], bool)
    real = [labels[u] for u in range(n)]
    if len(set(real)) != n:
        res.violations.append("duplicate labels")
    res.checked = len(us) + len(nu)
    missed = np.flatnonzero(~got_edges).tolist()
    spurious = np.flatnonzero(got_non).tolist()
    res.violations += [f"edge ({us[i]}, {vs[i]}) decoded false" for i in missed]
    res.violations += [f"non-edge ({nu[i]}, {nv[i]}) decoded true" for i in spurious]
    return res


@_timed
def suite_codec(samples: int, seed: int) -> SuiteResult:
    res = SuiteResult("codec")
    rng = random.Random(seed)
    for _ in range(samples):
        a = rng.getrandbits(rng.randrange(1, 63))
        t = rng.randrange(1, 40)
        c = approx(a, t)
        b = c.value
        res.checked += 1
        if b < a or (b << (t - 1)) > a * ((1 << (t - 1)) + 1) or (b == 0) != (a == 0):
            res.violations.append(f"approx({a}, {t}) = {b} breaks the error bound")
        packed = approx_pack(c)
        if approx_unpack(BitString(0, rng.randrange(4)) + packed, 0)[0] != c:
            res.violations.append(f"pack round trip of {c}")
        x = rng.randrange(1, 1 << 40)
        if gamma_decode(gamma_encode(x), 0) != (x, 2 * x.bit_length() - 1):
            res.violations.append(f"gamma round trip of {x}")
    return res


@_timed
def suite_fuzz(pairs: int, seed: int, decode: Decoder) -> SuiteResult:
    res = SuiteResult("fuzz")
    rng = random.Random(seed)
    for _ in range(pairs):
        a = BitString(*_random_bits(rng))
        b = BitString(*_random_bits(rng))
        res.checked += 1
        try:
            r = decode(a, b)
        except Exception as e:  # totality is the property under test
            res.violations.append(f"decoder raised {type(e).__name__} on {a}, {b}")
            continue
        if not isinstance(r, bool):
            res.violations.append(f"decoder returned {r!r}")
    return res


def _random_bits(rng: random.Random) -> tuple[int, int]:
    length = rng.randrange(0, 513)
    return rng.getrandbits(length) if length else 0, length


@_timed
def suite_universal(max_n: int, scheme: str) -> SuiteResult:
    res = SuiteResult(f"universal-n{max_n}")
    if max_n < 1:
        return res
    u = build_universal(max_n, scheme)
    for m in range(1, max_n + 1):
        for t in enumerate_parent_arrays(m):
            rep = embed_check(u, t)
            if rep.violations and rep.violations != ["tree is outside the scheme's family"]:
                res.violations += rep.violations[:3]
            res.checked += rep.pairs
    return res


def run_verify(cfg: VerifyConfig, decode: Decoder | None = None) -> VerifyReport:
    """Run every suite; ``decode`` substitutes the decoder under test."""
    base = decode_adjacent if cfg.scheme == "tree" else cat_decode
    dec = decode or base
    suites = suite_exhaustive(cfg, dec)
    for n in cfg.random_sizes:
        for family in cfg.families:
            for seed in cfg.seeds:
                suites.append(suite_random(cfg, family, n, seed, decode))
    suites.append(suite_codec(cfg.codec_samples, cfg.seeds[0]))
    suites.append(suite_fuzz(cfg.fuzz_pairs, cfg.seeds[0], dec))
    if decode is None:
        suites.append(suite_universal(min(cfg.universal_max_n, cfg.exhaustive_max_n), cfg.scheme))
    return VerifyReport(cfg, suites)


# -- benchmarks -----------------------------------------------------------------


@dataclass
class BenchRow:
    n: int
    encode_seconds: float
    decode_ns: float
    max_label_bits: int
    max_id: int
    peak_mib: float


_M_TRIM_THRESHOLD = -1
_M_MMAP_THRESHOLD = -3


def retain_heap() -> bool:
    """Ask glibc to keep freed memory instead of handing it back to the OS.

    Without this, large arrays freed between runs are returned to the kernel
    and the next run pays a page fault per touched page, a cost that depends
    on allocator thresholds rather than on the encoder.  Returns False when
    the C library has no ``mallopt``.
    """
    name = ctypes.util.find_library("c")
    try:
        libc = ctypes.CDLL(name)
        mallopt = libc.mallopt
    except (OSError, AttributeError, TypeError):
        return False
    mallopt.argtypes = (ctypes.c_int, ctypes.c_int)
    ok = mallopt(_M_MMAP_THRESHOLD, 32 * 2 ** 20)
    ok &= mallopt(_M_TRIM_THRESHOLD, 2 ** 31 - 1)
    return bool(ok)


def time_encode(f: Forest, runs: int = 3) -> float:
    """Mean wall time of encode_forest over ``runs`` runs after one warm-up.

    Like timeit, the collector is paused while timing and each result is
    released outside the timed region.
    """
    encode_forest(f)
    times = []
    enabled = gc.isenabled()
    try:
        for _ in range(runs):
            gc.collect()
            gc.disable()
            start = time.perf_counter()
            enc = encode_forest(f)
            times.append(time.perf_counter() - start)
            if enabled:
                gc.enable()
            del enc
    finally:
        if enabled:
            gc.enable()
    return sum(times) / len(times)


def _detached(lab: BitString) -> BitString:
    # x + 0 allocates a new int for anything beyond the small-int cache
    return BitString(lab.value + 0, lab.length)


def time_decode(labels, n: int, pairs: int, seed: int) -> float:
    """Mean nanoseconds per decode_adjacent call over random node pairs.

    Each query gets its own copy of the two labels, laid out in query order,
    so the timing covers decoding rather than random lookups into a label
    table that outgrows the caches as n grows.
    """
    rng = np.random.default_rng(seed)
    us = rng.integers(0, n, pairs).tolist()
    vs = rng.integers(0, n, pairs).tolist()
    batch = [(_detached(labels[u]), _detached(labels[v])) for u, v in zip(us, vs)]
    start = time.perf_counter()
    for a, b in batch:
        decode_adjacent(a, b)
    return (time.perf_counter() - start) / max(1, pairs) * 1e9


def run_bench(sizes, family: str = "uniform-prufer", seed: int = 0, runs: int = 3,
              decode_pairs: int = 10 ** 6, max_n: int | None = None) -> list[BenchRow]:
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    if max_n is not None and sizes and sizes[-1] > max_n:
        raise ValueError(f"size {sizes[-1]} exceeds the cap {max_n}")
    retain_heap()
    rows = []
    for n in sizes:
        f = gen_tree(GenSpec(family, n, seed))
        seconds = time_encode(f, runs)
        tracemalloc.start()
        enc = encode_forest(f)
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        lengths = enc.labels.lengths
        ns = time_decode(enc.labels, n, decode_pairs, seed)
        rows.append(BenchRow(n, seconds, ns, max(lengths), int(enc.ids.max()), peak / 2 ** 20))
    return rows


def bench_tsv(rows: list[BenchRow], family: str, seed: int) -> str:
    lines = [f"# family: {family}", f"# seed: {seed}",
             "n\tencode_s\tdecode_ns\tmax_label_bits\tmax_id\tpeak_mib"]
    for r in rows:
        lines.append(f"{r.n}\t{r.encode_seconds:.4f}\t{r.decode_ns:.1f}\t{r.max_label_bits}\t{r.max_id}\t{r.peak_mib:.1f}")
    return "\n".join(lines) + "\n"
