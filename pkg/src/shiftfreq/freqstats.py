"""Block frequencies, iterated Cesàro averages and accumulation reports.

Two denominators are supported. ``PAPER_N`` divides the occurrence count
among the first ``n`` symbols by ``n`` (the trajectory convention, so the
entries sum to ``(n-k+1)/n``). ``FITTED`` divides by the number of windows
``n-k+1`` and yields a probability vector.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import gmpy2
import numpy as np

from .errors import InputError, ResourceError, TruncatedStream
from .shiftspace import LanguageSlice, ShiftSpec, enumerate_language, fmt, is_allowed
from .stream import CHUNK, iter_chunks

PAPER_N = "per-n"
FITTED = "fitted"

# exact rational towers beyond this many symbols get slow (denominators ~ lcm(1..n)^R)
EXACT_LIMIT = 20_000


@dataclass(frozen=True)
class FrequencyVector:
    k: int
    blocks: tuple
    entries: tuple
    mode: str = FITTED

    def __post_init__(self):
        if len(self.blocks) != len(self.entries):
            raise InputError("blocks and entries differ in length")
        if self.mode not in (PAPER_N, FITTED):
            raise InputError(f"unknown denominator mode {self.mode!r}")

    def __getitem__(self, block):
        return self.entries[self.blocks.index(tuple(block))]

    def __len__(self):
        return len(self.entries)

    def as_dict(self) -> dict:
        return dict(zip(self.blocks, self.entries))

    @property
    def total(self):
        return sum(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.entries])

    def is_exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.entries)

    def label(self) -> str:
        return ",".join(str(v) for v in self.entries)


def vector(values, blocks, k: int | None = None, mode: str = FITTED) -> FrequencyVector:
    """Build a vector over ``blocks`` from numbers or strings like ``"1/2"``."""
    if isinstance(blocks, LanguageSlice):
        k = blocks.k if k is None else k
        blocks = blocks.words
    blocks = tuple(tuple(b) for b in blocks)
    if k is None:
        k = len(blocks[0]) if blocks else 0
    vals = tuple(Fraction(v) if isinstance(v, (str, int, Fraction)) else v for v in values)
    return FrequencyVector(k, blocks, vals, mode)


def _encode(w, n):
    c = 0
    for s in w:
        c = c * n + s
    return c


def window_counts(w: Sequence[int], k: int) -> Counter:
    """Occurrences of every length-``k`` block at offsets ``0..len(w)-k``."""
    w = tuple(w)
    if len(w) > 4096:
        arr = np.asarray(w, dtype=np.int64)
        base = int(arr.max()) + 1
        codes = _window_codes(arr, k, base)
        uniq, cnt = np.unique(codes, return_counts=True)
        return Counter({_decode(int(c), k, base): int(m) for c, m in zip(uniq, cnt)})
    return Counter(w[i : i + k] for i in range(len(w) - k + 1))


def _decode(code, k, base):
    out = []
    for _ in range(k):
        code, r = divmod(code, base)
        out.append(r)
    return tuple(reversed(out))


def _window_codes(arr: np.ndarray, k: int, base: int) -> np.ndarray:
    if base**k >= 2**62:
        raise ResourceError(f"blocks of length {k} over {base} symbols overflow int64 codes")
    m = len(arr) - k + 1
    if m <= 0:
        return np.empty(0, np.int64)
    codes = np.zeros(m, np.int64)
    for t in range(k):
        codes = codes * base + arr[t : t + m]
    return codes


def block_frequency(prefix: Sequence[int], b: Sequence[int], mode: str = FITTED) -> Fraction:
    prefix, b = tuple(prefix), tuple(b)
    k = len(b)
    if k < 1 or k > len(prefix):
        raise InputError(f"block length {k} does not fit a prefix of length {len(prefix)}")
    count = sum(1 for i in range(len(prefix) - k + 1) if prefix[i : i + k] == b)
    return Fraction(count, _denominator(len(prefix), k, mode))


def _denominator(n, k, mode):
    if mode == FITTED:
        return n - k + 1
    if mode == PAPER_N:
        return n
    raise InputError(f"unknown denominator mode {mode!r}")


def vector_from_counts(counts, blocks: LanguageSlice | tuple, n: int, k: int, mode: str = FITTED) -> FrequencyVector:
    """Exact vector from a block -> count mapping for a word of length ``n``."""
    words = blocks.words if isinstance(blocks, LanguageSlice) else tuple(blocks)
    extra = set(counts) - set(words)
    if any(counts[b] for b in extra):
        raise InputError(f"blocks {sorted(fmt(b) for b in extra)} are not in the language")
    den = _denominator(n, k, mode)
    return FrequencyVector(k, words, tuple(Fraction(counts.get(b, 0), den) for b in words), mode)


def frequency_vector(prefix: Sequence[int], k: int, spec: ShiftSpec, mode: str = FITTED) -> FrequencyVector:
    prefix = tuple(prefix)
    if k < 1 or k > len(prefix):
        raise InputError(f"block length {k} does not fit a prefix of length {len(prefix)}")
    if not is_allowed(spec, prefix):
        raise InputError("prefix is not allowed in this shift")
    blocks = enumerate_language(spec, k)
    return vector_from_counts(window_counts(prefix, k), blocks, len(prefix), k, mode)


def l1_distance(p: FrequencyVector, q: FrequencyVector):
    if p.k != q.k or p.blocks != q.blocks:
        raise InputError("vectors are indexed by different block sets")
    return sum(abs(a - b) for a, b in zip(p.entries, q.entries))


class WindowCounter:
    """Streaming block counter that reports cumulative counts after every symbol."""

    def __init__(self, blocks: LanguageSlice | tuple, k: int, alphabet_size: int):
        words = blocks.words if isinstance(blocks, LanguageSlice) else tuple(blocks)
        self.k = k
        self.base = alphabet_size
        self.blocks = words
        self.codes = np.array([_encode(w, alphabet_size) for w in words], dtype=np.int64)
        if len(self.codes) > 1 and np.any(np.diff(self.codes) <= 0):
            raise InputError("blocks must be sorted and distinct")
        self.counts = np.zeros(len(words), np.int64)
        self.n = 0
        self._tail = np.empty(0, np.int64)

    def _indices(self, chunk):
        ext = np.concatenate([self._tail, np.asarray(chunk, np.int64)])
        codes = _window_codes(ext, self.k, self.base)
        idx = np.searchsorted(self.codes, codes)
        bad = (idx >= len(self.codes)) | (self.codes[np.minimum(idx, len(self.codes) - 1)] != codes)
        if np.any(bad):
            raise InputError("stream contains a block outside the language")
        keep = max(self.k - 1, 0)
        self._tail = ext[len(ext) - keep :] if keep else np.empty(0, np.int64)
        return idx

    def feed(self, chunk) -> np.ndarray:
        """Cumulative counts after each symbol of ``chunk``, shape ``(len(chunk), B)``."""
        m = len(chunk)
        lead = min(m, max(0, self.k - 1 - self.n))  # positions before the first full window
        idx = self._indices(chunk)
        inc = np.zeros((m, len(self.codes)), np.int64)
        inc[np.arange(lead, m), idx] = 1
        cum = np.cumsum(inc, axis=0) + self.counts
        if m:
            self.counts = cum[-1].copy()
        self.n += m
        return cum

    def feed_totals(self, chunk) -> np.ndarray:
        idx = self._indices(chunk)
        self.counts += np.bincount(idx, minlength=len(self.codes))
        self.n += len(chunk)
        return self.counts


class CesaroTower:
    """Layered running sums giving ``P^(0..R)`` at every ``n`` in one pass.

    ``exact=True`` keeps every layer in gmpy2 rationals (one symbol at a
    time); ``exact=False`` works on numpy chunks in float64 with a
    compensated carry between chunks.
    """

    def __init__(self, blocks: LanguageSlice | tuple, k: int, R: int, alphabet_size: int, exact: bool = True):
        if R < 0:
            raise InputError("Cesàro order must be non-negative")
        self.counter = WindowCounter(blocks, k, alphabet_size)
        self.blocks = self.counter.blocks
        self.k, self.R, self.exact = k, R, exact
        B = len(self.blocks)
        if exact:
            # layer r is held as integer numerators over lcm(1..n)**r
            self._index = {int(c): i for i, c in enumerate(self.counter.codes)}
            self._num = [[gmpy2.mpz(0)] * B for _ in range(R + 1)]
            self._lcm = gmpy2.mpz(1)
            self._window = []
            self._n = 0
        else:
            self._carry = np.zeros((R, B))
            self._comp = np.zeros((R, B))
            self._last_f = np.zeros((R + 1, B))

    @property
    def n(self) -> int:
        return self._n if self.exact else self.counter.n

    def push(self, symbol: int):
        """Exact mode: consume one symbol."""
        k = self.k
        self._n += 1
        n = self._n
        win = self._window
        win.append(int(symbol))
        if len(win) > k:
            del win[0]
        num = self._num
        if len(win) == k:
            i = self._index.get(_encode(win, self.counter.base))
            if i is None:
                raise InputError(f"block {fmt(win)} is outside the language")
            num[0][i] += 1
        grow = n // gmpy2.gcd(self._lcm, n)
        if grow > 1:
            self._lcm *= grow
            for r in range(1, self.R + 1):
                scale = grow**r
                num[r] = [v * scale for v in num[r]]
        step = self._lcm // n
        for r in range(1, self.R + 1):
            lower, upper = num[r - 1], num[r]
            for b in range(len(upper)):
                upper[b] += lower[b] * step

    def feed(self, chunk):
        if self.exact:
            for s in chunk:
                self.push(s)
        else:
            self.feed_all(chunk)

    def feed_all(self, chunk) -> np.ndarray:
        """Float mode: ``P^(r)(n)`` for every ``n`` in the chunk, shape ``(m, R+1, B)``."""
        if self.exact:
            raise InputError("feed_all is only available in float mode")
        n0 = self.counter.n
        cum = self.counter.feed(chunk)
        m = len(cum)
        ns = np.arange(n0 + 1, n0 + m + 1, dtype=np.float64)[:, None]
        out = np.empty((m, self.R + 1, len(self.blocks)))
        layer = cum / ns
        out[:, 0] = layer
        for r in range(self.R):
            local = np.cumsum(layer, axis=0)
            total = local + (self._carry[r] + self._comp[r])
            # Neumaier update of the carried sum
            add = local[-1] if m else 0.0
            t = self._carry[r] + add
            big = np.abs(self._carry[r]) >= np.abs(add)
            self._comp[r] += np.where(big, (self._carry[r] - t) + add, (add - t) + self._carry[r])
            self._carry[r] = t
            layer = total / ns
            out[:, r + 1] = layer
        if m:
            self._last_f = out[-1].copy()
        return out

    def values(self, r: int):
        if not 0 <= r <= self.R:
            raise InputError(f"order {r} outside 0..{self.R}")
        if self.exact:
            if self._n == 0:
                return (Fraction(0),) * len(self.blocks)
            den = int(self._n * self._lcm**r)
            return tuple(Fraction(int(v), den) for v in self._num[r])
        return tuple(float(v) for v in self._last_f[r])

    def vector(self, r: int) -> FrequencyVector:
        return FrequencyVector(self.k, self.blocks, self.values(r), PAPER_N)


def _stream_setup(spec, k):
    if k < 1:
        raise InputError("block length must be at least 1")
    return enumerate_language(spec, k)


def cesaro_trajectory(stream, k: int, R: int, spec: ShiftSpec, checkpoints: Sequence[int], exact: bool | None = None):
    """``[(n, r, FrequencyVector)]`` for every checkpoint ``n`` and order ``r <= R``."""
    cps = list(checkpoints)
    if any(b <= a for a, b in zip(cps, cps[1:])) or (cps and cps[0] < 1):
        raise InputError("checkpoints must be positive and strictly increasing")
    if exact is None:
        exact = bool(cps) and cps[-1] <= EXACT_LIMIT
    blocks = _stream_setup(spec, k)
    tower = CesaroTower(blocks, k, R, spec.alphabet_size, exact=exact)
    out = []
    if not cps:
        return out
    pos = 0
    chunks = iter_chunks(stream, CHUNK, limit=cps[-1])
    for chunk in chunks:
        start = 0
        while start < len(chunk):
            target = cps[pos] - tower.n
            piece = chunk[start : start + target]
            tower.feed(piece)
            start += len(piece)
            if tower.n == cps[pos]:
                out.extend((tower.n, r, tower.vector(r)) for r in range(R + 1))
                pos += 1
                if pos == len(cps):
                    return out
    raise TruncatedStream(f"stream ended at n={tower.n} before checkpoint {cps[pos]}", out)


# Exact ties with the tolerance must count as hits despite float rounding.
TIE_SLACK = 1e-12


@dataclass
class AccumulationReport:
    targets: list
    tolerance: float
    r: int
    horizon: int
    stride: int = 1
    ns: list = field(default_factory=list)
    distances: list = field(default_factory=list)

    def hits(self, i: int):
        return list(zip(self.ns[i].tolist(), self.distances[i].tolist()))

    def hit_count(self, i: int) -> int:
        return int(len(self.ns[i]))

    def visits(self, i: int) -> int:
        """Number of separate excursions into the tolerance ball."""
        ns = self.ns[i]
        if not len(ns):
            return 0
        return int(1 + np.count_nonzero(np.diff(ns) > self.stride))

    def summary(self) -> list:
        return [
            f"target={t.label()} hits={self.hit_count(i)} visits={self.visits(i)}"
            for i, t in enumerate(self.targets)
        ]


def detect_accumulation(stream, k: int, r: int, targets, tolerance: float, horizon: int, spec: ShiftSpec, stride: int = 1):
    """Every ``n <= horizon`` (multiple of ``stride``) where ``P^(r)`` is within ``tolerance`` of a target."""
    if tolerance <= 0:
        raise InputError("tolerance must be positive")
    blocks = _stream_setup(spec, k)
    for t in targets:
        if t.blocks != blocks.words:
            raise InputError("target is not indexed by the language slice")
    tower = CesaroTower(blocks, k, r, spec.alphabet_size, exact=False)
    qs = [t.as_array() for t in targets]
    ns_parts = [[] for _ in targets]
    d_parts = [[] for _ in targets]
    size = max(1024, (1 << 22) // max(1, len(blocks) * (r + 1)))
    for chunk in iter_chunks(stream, size, limit=horizon):
        n0 = tower.n
        layer = tower.feed_all(chunk)[:, r]
        ns = np.arange(n0 + 1, n0 + len(chunk) + 1)
        sel = ns % stride == 0
        for i, q in enumerate(qs):
            dist = np.abs(layer - q).sum(axis=1)
            mask = sel & (dist <= tolerance + TIE_SLACK)
            ns_parts[i].append(ns[mask])
            d_parts[i].append(dist[mask])
    rep = AccumulationReport(list(targets), tolerance, r, horizon, stride)
    rep.ns = [np.concatenate(p) if p else np.empty(0, np.int64) for p in ns_parts]
    rep.distances = [np.concatenate(p) if p else np.empty(0) for p in d_parts]
    return rep
