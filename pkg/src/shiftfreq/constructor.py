"""Padded concatenation, frequency-word realizers and non-normal stream builders.

Long words are kept compressed as :class:`Seg` trees (a sequence of parts
repeated ``reps`` times). Exact block counts of a tree come from a small
monoid of (counts, length, head, tail) summaries, so a word of 10^7 symbols
built from a handful of repeated cycles is counted in microseconds and only
materialised when it is actually emitted.

Concatenation with ``⊙`` is a left fold: each new word is joined to
everything produced so far with the shortest, lexicographically least
padding. For a shift of finite type with memory ``M`` only the last ``M``
symbols on the left and the first ``M`` on the right can influence that
choice, so paddings are looked up on those windows.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from .errors import InfeasibleTarget, InputError, PaperBoundViolation, ResourceError
from .freqstats import FITTED, FrequencyVector, WindowCounter, window_counts
from .shiftspace import ShiftSpec, enumerate_language, find_padding, fmt, is_allowed
from .spectrum import as_sft, invariant_polytope
from .stream import CHUNK, DTYPE, DigitStream

DEFAULT_BUDGET = 10**7
MAX_STAGES = 64
MAX_FLOW_EDGES = 10**6
PHI_BIT_BUDGET = 1 << 24


def _last(w: tuple, n: int) -> tuple:
    return w[max(0, len(w) - n) :] if n > 0 else ()


# ---------------------------------------------------------------------------
# exact window counts of compressed words


@dataclass(frozen=True)
class _Summary:
    counts: dict
    length: int
    head: tuple  # first k-1 symbols (all of them if shorter)
    tail: tuple  # last k-1 symbols


_EMPTY = _Summary({}, 0, (), ())


def _summarise(w: tuple, k: int) -> _Summary:
    counts = dict(window_counts(w, k)) if len(w) >= k else {}
    return _Summary(counts, len(w), w[: k - 1], _last(w, k - 1))


def _combine(a: _Summary, b: _Summary, k: int) -> _Summary:
    if not a.length:
        return b
    if not b.length:
        return a
    counts = dict(a.counts)
    for blk, c in b.counts.items():
        counts[blk] = counts.get(blk, 0) + c
    s = a.tail + b.head
    for i in range(len(a.tail)):
        if i + k <= len(s):
            blk = s[i : i + k]
            counts[blk] = counts.get(blk, 0) + 1
    return _Summary(counts, a.length + b.length, (a.head + b.head)[: k - 1], _last(a.tail + b.tail, k - 1))


def _power(a: _Summary, r: int, k: int) -> _Summary:
    out, base = _EMPTY, a
    while r:
        if r & 1:
            out = _combine(out, base, k)
        r >>= 1
        if r:
            base = _combine(base, base, k)
    return out


class Seg:
    """``parts`` concatenated, the whole repeated ``reps`` times. Parts are words or Segs."""

    __slots__ = ("parts", "reps", "length", "_summaries", "_array")

    def __init__(self, parts, reps: int = 1):
        self.parts = tuple(p for p in (tuple(x) if not isinstance(x, Seg) else x for x in parts) if len(p))
        self.reps = int(reps) if self.parts else 0
        self.length = sum(len(p) for p in self.parts) * self.reps
        self._summaries = {}
        self._array = None

    def __len__(self):
        return self.length

    def __repr__(self):
        return f"Seg(parts={len(self.parts)}, reps={self.reps}, length={self.length})"

    def head(self, n: int) -> tuple:
        out = ()
        for _ in range(self.reps):
            for p in self.parts:
                need = n - len(out)
                if need <= 0:
                    return out
                out += p.head(need) if isinstance(p, Seg) else p[:need]
        return out[:n]

    def tail(self, n: int) -> tuple:
        out = ()
        for _ in range(self.reps):
            for p in reversed(self.parts):
                need = n - len(out)
                if need <= 0:
                    return out
                out = (p.tail(need) if isinstance(p, Seg) else _last(p, need)) + out
        return _last(out, n)

    def summary(self, k: int) -> _Summary:
        s = self._summaries.get(k)
        if s is None:
            body = _EMPTY
            for p in self.parts:
                body = _combine(body, p.summary(k) if isinstance(p, Seg) else _summarise(p, k), k)
            s = _power(body, self.reps, k)
            self._summaries[k] = s
        return s

    def _body(self) -> np.ndarray:
        if self._array is None:
            pieces = [p._flat() if isinstance(p, Seg) else np.asarray(p, DTYPE) for p in self.parts]
            self._array = np.concatenate(pieces) if pieces else np.empty(0, DTYPE)
        return self._array

    def _flat(self) -> np.ndarray:
        return np.tile(self._body(), self.reps)

    def chunks(self, size: int = CHUNK):
        body_len = self.length // self.reps if self.reps else 0
        if not body_len:
            return
        if body_len <= size:
            body = self._body()
            per = max(1, size // body_len)
            block = np.tile(body, per)
            full, rest = divmod(self.reps, per)
            for _ in range(full):
                yield block
            if rest:
                yield block[: rest * body_len]
            return
        for _ in range(self.reps):
            for p in self.parts:
                if isinstance(p, Seg):
                    yield from p.chunks(size)
                else:
                    arr = np.asarray(p, DTYPE)
                    for i in range(0, len(arr), size):
                        yield arr[i : i + size]

    def word(self) -> tuple:
        return tuple(int(s) for chunk in self.chunks() for s in chunk)


def _head(x, n):
    return x.head(n) if isinstance(x, Seg) else tuple(x[:n])


def _tail(x, n):
    return x.tail(n) if isinstance(x, Seg) else _last(tuple(x), n)


def _summary_of(x, k):
    return x.summary(k) if isinstance(x, Seg) else _summarise(tuple(x), k)


# ---------------------------------------------------------------------------
# the ⊙ fold


class Assembly:
    """Left fold of ``⊙`` with running exact ``k``-block counts."""

    def __init__(self, spec: ShiftSpec, k: int | None = None):
        if spec.spec_constant is None:
            raise InputError("specification constant unknown; measure it with connect() first")
        self.spec = as_sft(spec)
        self.j = spec.spec_constant
        self.m = max(1, self.spec.memory)
        self.k = k
        self.parts: list = []
        self.length = 0
        self.ctx: tuple = ()
        self.summ = _EMPTY
        self._pads: dict = {}

    def pad(self, left_tail: tuple, right_head: tuple) -> tuple:
        key = (left_tail, right_head)
        u = self._pads.get(key)
        if u is None:
            u = find_padding(self.spec, left_tail, right_head, self.j)
            self._pads[key] = u
        return u

    def raw(self, x):
        """Append without padding (caller guarantees admissibility)."""
        if not len(x):
            return
        self.parts.append(x)
        self.length += len(x)
        self.ctx = _last(self.ctx + _tail(x, self.m), self.m)
        if self.k:
            self.summ = _combine(self.summ, _summary_of(x, self.k), self.k)

    def append(self, x):
        if not len(x):
            return
        if not isinstance(x, Seg) and not is_allowed(self.spec, x):
            raise InputError(f"{fmt(x)} is not an allowed word")
        if self.length:
            self.raw(self.pad(self.ctx, _head(x, self.m)))
        self.raw(x)

    def append_power(self, x, ell: int):
        """``⊙`` of ``ell`` further copies of ``x``; the padding sequence is eventually periodic."""
        if ell <= 0 or not len(x):
            return
        self.append(x)
        remaining = ell - 1
        head, tail = _head(x, self.m), _tail(x, self.m)
        ctx, us, seen = self.ctx, [], {}
        while len(us) < remaining and ctx not in seen:
            seen[ctx] = len(us)
            u = self.pad(ctx, head)
            us.append(u)
            ctx = _last(ctx + u + tail, self.m)
        if len(us) == remaining:
            for u in us:
                self.raw(u)
                self.raw(x)
            return
        start = seen[ctx]
        for u in us[:start]:
            self.raw(u)
            self.raw(x)
        period = us[start:]
        left = remaining - start
        full, rest = divmod(left, len(period))
        if full:
            self.raw(Seg(tuple(itertools.chain.from_iterable((u, x) for u in period)), full))
        for u in period[:rest]:
            self.raw(u)
            self.raw(x)

    def seg(self) -> Seg:
        return Seg(tuple(self.parts))

    def word(self) -> tuple:
        return self.seg().word()

    def counts(self) -> dict:
        return self.summ.counts

    def distance(self, q) -> Fraction:
        """Exact L1 distance of the fitted-window frequency vector to ``q``."""
        blocks, vals = _blocks_and_values(q, self.spec, self.k)
        N = self.length - self.k + 1
        if N <= 0:
            raise InputError("word shorter than the block length")
        c = self.summ.counts
        return sum((abs(Fraction(c.get(b, 0), N) - v) for b, v in zip(blocks, vals)), Fraction(0))

    def vector(self) -> FrequencyVector:
        blocks = enumerate_language(self.spec, self.k).words
        N = self.length - self.k + 1
        return FrequencyVector(self.k, blocks, tuple(Fraction(self.summ.counts.get(b, 0), N) for b in blocks), FITTED)


def _blocks_and_values(q, spec: ShiftSpec, k: int):
    blocks = enumerate_language(as_sft(spec), k).words
    if isinstance(q, FrequencyVector):
        if q.blocks != blocks:
            raise InputError("target is not indexed by the language slice")
        vals = q.entries
    else:
        vals = tuple(q)
        if len(vals) != len(blocks):
            raise InputError(f"expected {len(blocks)} entries, got {len(vals)}")
    return blocks, tuple(Fraction(v) for v in vals)


def odot_concat(spec: ShiftSpec, words) -> tuple:
    asm = Assembly(spec)
    for w in words:
        asm.append(tuple(w))
    return asm.word()


def odot_power(spec: ShiftSpec, gamma, ell: int) -> tuple:
    if ell < 1:
        raise InputError("power must be at least 1")
    asm = Assembly(spec)
    asm.append_power(tuple(gamma), ell)
    return asm.word()


# ---------------------------------------------------------------------------
# Z_n realizer


def flow_cycles(spec: ShiftSpec, q, k: int) -> list:
    """Closed walks whose union realises ``q`` exactly: one Euler circuit per flow component."""
    base = as_sft(spec)
    poly = invariant_polytope(base, k)
    _, vals = _blocks_and_values(q, base, k)
    p = poly.lift(vals)
    if p is None:
        raise InfeasibleTarget(f"target ({', '.join(map(str, vals))}) is not in the spectrum: it lies outside the invariant polytope")
    den = math.lcm(*(v.denominator for v in p))
    if den > MAX_FLOW_EDGES:
        raise ResourceError(f"flow needs {den} edges, above {MAX_FLOW_EDGES}")
    g = nx.MultiDiGraph()
    for w, pw in zip(poly.lifted, p):
        for _ in range(int(pw * den)):
            g.add_edge(w[:-1], w[1:], symbol=w[-1])
    cycles = []
    for comp in sorted(nx.weakly_connected_components(g), key=min):
        source = min(comp)
        sub = g.subgraph(comp)
        symbols = tuple(sub.edges[e]["symbol"] for e in nx.eulerian_circuit(sub, source=source, keys=True))
        cycles.append(min(symbols[i:] + symbols[:i] for i in range(len(symbols))))
    return cycles


@dataclass(frozen=True)
class Realization:
    """A word of ``Z_n(q, k)`` in compressed form: each cycle ⊙-repeated ``reps`` times."""

    k: int
    n: int
    target: tuple
    cycles: tuple
    reps: int
    seg: Seg = field(repr=False)
    distance: Fraction

    @property
    def length(self) -> int:
        return self.seg.length

    def word(self) -> tuple:
        return self.seg.word()


def realize_pattern(spec: ShiftSpec, q, k: int, n: int, min_length: int = 0) -> Realization:
    if k < 1 or n < 1:
        raise InputError("k and n must be at least 1")
    _, vals = _blocks_and_values(q, spec, k)
    cycles = flow_cycles(spec, vals, k)
    Lk = len(enumerate_language(as_sft(spec), k))
    need = max(k * n * Lk, min_length)
    base_len = sum(len(c) for c in cycles)
    s = max(1, -(-need // base_len))
    bound = Fraction(1, n)
    while True:
        asm = Assembly(spec, k)
        for c in cycles:
            asm.append_power(c, s)
        d = asm.distance(vals)
        if asm.length >= need and d <= bound:
            return Realization(k, n, vals, tuple(cycles), s, asm.seg(), d)
        s = max(s + 1, math.ceil(s * d * n * Fraction(11, 10)))


def realize_frequency_word(spec: ShiftSpec, q, k: int, n: int, budget: int = DEFAULT_BUDGET) -> tuple:
    """An allowed word of length ``>= k n |L_k|`` whose fitted frequency vector is within ``1/n`` of ``q``."""
    r = realize_pattern(spec, q, k, n)
    if r.length > budget:
        raise ResourceError(f"realizing word has {r.length} symbols, budget {budget}")
    return r.word()


def repetition_bound(t: int, gamma_len: int, k: int) -> int:
    """``ceil(t (1 + gamma_len / k))`` in integer arithmetic."""
    if k < 1 or t < 0 or gamma_len < 0:
        raise InputError("repetition_bound needs k >= 1 and non-negative lengths")
    return -(-t * (k + gamma_len) // k)


def append_and_certify(spec: ShiftSpec, omega, gamma, ell: int, q, n: int, k: int | None = None, materialize: bool = True):
    """``(omega ⊙ gamma^{⊙ell}, distance)``; raises when the distance breaks ``4/n``."""
    omega, gamma = tuple(omega), tuple(gamma)
    if k is None:
        if not isinstance(q, FrequencyVector):
            raise InputError("block length k required for a plain target")
        k = q.k
    need = max(1, repetition_bound(len(omega), len(gamma), k))
    if ell < need:
        raise InputError(f"ell={ell} is below the repetition bound {need}")
    asm = Assembly(spec, k)
    asm.append(omega)
    asm.append_power(gamma, ell)
    d = asm.distance(q)
    if d > Fraction(4, n):
        raise PaperBoundViolation(f"distance {float(d):.6g} exceeds 4/n = {4 / n:.6g}")
    return (asm.word() if materialize else asm.seg()), d


# ---------------------------------------------------------------------------
# checkpointed words


def _fraction(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


@dataclass(frozen=True)
class TargetPlan:
    k: int
    targets: tuple
    epsilon: Fraction
    prefix: tuple = ()
    cycle: bool = False

    def __post_init__(self):
        object.__setattr__(self, "epsilon", _fraction(self.epsilon))
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "targets", tuple(self.targets))
        if not 0 < self.epsilon < 2:
            raise InputError("epsilon must lie in (0, 2)")
        if self.k < 1:
            raise InputError("k must be at least 1")
        if self.cycle and not self.targets:
            raise InputError("a cycling plan needs at least one target")


@dataclass(frozen=True)
class Checkpoint:
    stage: int
    target: int
    n: int
    distance: Fraction
    l: int
    q: tuple = ()

    def record(self, epsilon) -> str:
        return (
            f"kind=checkpoint stage={self.stage} target={self.target} q={','.join(map(str, self.q))} "
            f"n={self.n} l={self.l} distance={self.distance} distance_decimal={float(self.distance):.12f} "
            f"epsilon={epsilon}"
        )


@dataclass
class CheckpointCertificate:
    epsilon: Fraction
    entries: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.distance <= self.epsilon for e in self.entries)

    def records(self) -> list:
        return [e.record(self.epsilon) for e in self.entries]


def stage_length_rule(prev_len: int, k: int, j: int, Lk: int, epsilon: Fraction) -> int:
    """Precision ``l_i`` for the next stage; never below ``2|L_k|/eps`` so that ``l_i >= 1``."""
    return max(math.ceil(2 * (prev_len + k + j - 1) * Lk / epsilon), math.ceil(2 * Lk / epsilon))


def _check_targets(spec, k, targets):
    poly = invariant_polytope(as_sft(spec), k)
    out = []
    for i, q in enumerate(targets):
        _, vals = _blocks_and_values(q, spec, k)
        if not poly.contains(vals):
            raise InfeasibleTarget(f"target {i} ({', '.join(map(str, vals))}) is not in the spectrum: it lies outside the invariant polytope")
        out.append(vals)
    return out


def _stages(plan: TargetPlan, spec: ShiftSpec, asm: Assembly, max_stages: int):
    """Yield ``(checkpoint, new_parts)`` stage by stage."""
    targets = _check_targets(spec, plan.k, plan.targets)
    Lk = len(enumerate_language(asm.spec, plan.k))
    order = itertools.cycle(range(len(targets))) if plan.cycle else iter(range(len(targets)))
    for stage, t in enumerate(order, 1):
        if stage > max_stages:
            return
        l = stage_length_rule(asm.length, plan.k, asm.j, Lk, plan.epsilon)
        real = realize_pattern(spec, targets[t], plan.k, l)
        before = len(asm.parts)
        asm.append(real.seg)
        yield Checkpoint(stage, t, asm.length, asm.distance(targets[t]), l, targets[t]), asm.parts[before:]


def build_checkpointed_word(plan: TargetPlan, spec: ShiftSpec, budget: int = DEFAULT_BUDGET, max_stages: int = MAX_STAGES):
    """``omega_0 ⊙ omega_1 ⊙ ...`` with a checkpoint certificate per stage.

    Returns a word for finite plans and a lazy :class:`DigitStream` (cut at
    ``budget`` symbols) for cycling ones.
    """
    if not is_allowed(spec, plan.prefix):
        raise InputError("prefix is not allowed")
    asm = Assembly(spec, plan.k)
    asm.append(plan.prefix)
    cert = CheckpointCertificate(plan.epsilon)
    if not plan.cycle:
        for cp, _ in _stages(plan, spec, asm, max_stages):
            cert.entries.append(cp)
            if asm.length > budget:
                raise ResourceError(f"stage {cp.stage} ends at {asm.length} symbols, budget {budget}")
        return asm.word(), cert

    holder = []

    def gen():
        stream = holder[0]
        emitted = 0
        pending = [(None, list(asm.parts))]
        stages = _stages(plan, spec, asm, max_stages)
        while True:
            for cp, parts in pending:
                for chunk in itertools.chain.from_iterable(_chunks(p) for p in parts):
                    room = budget - emitted
                    if len(chunk) > room:
                        if room:
                            yield chunk[:room]
                        stream.truncated = True
                        return
                    emitted += len(chunk)
                    if cp is not None and emitted == cp.n:
                        cert.entries.append(cp)
                    yield chunk
            nxt = next(stages, None)
            if nxt is None:
                return
            pending = [nxt]

    stream = DigitStream(gen(), name="checkpointed")
    holder.append(stream)
    stream.certificates = cert.entries
    return stream, cert


def _chunks(x, size: int = CHUNK):
    if isinstance(x, Seg):
        yield from x.chunks(size)
    else:
        arr = np.asarray(x, DTYPE)
        for i in range(0, len(arr), size):
            yield arr[i : i + size]


def oscillation(stream, k: int, spec: ShiftSpec, horizon: int, start: int = 1) -> dict:
    """``max - min`` of each letter's running frequency over ``start <= n <= horizon``."""
    counter = WindowCounter(enumerate_language(as_sft(spec), 1), 1, spec.alphabet_size)
    lo = np.full(len(counter.blocks), np.inf)
    hi = np.full(len(counter.blocks), -np.inf)
    from .stream import iter_chunks

    for chunk in iter_chunks(stream, CHUNK, limit=horizon):
        n0 = counter.n
        cum = counter.feed(chunk)
        ns = np.arange(n0 + 1, n0 + len(chunk) + 1)
        sel = ns >= start
        if np.any(sel):
            f = cum[sel] / ns[sel, None]
            lo = np.minimum(lo, f.min(axis=0))
            hi = np.maximum(hi, f.max(axis=0))
    return {b[0]: float(h - l) for b, h, l in zip(counter.blocks, hi, lo)}


# ---------------------------------------------------------------------------
# property P streams


def phi_tower(m: int, x: int, limit: int | None = None) -> int:
    """``phi_1(x) = 2**x`` iterated ``m`` times."""
    if m < 1 or x < 0:
        raise InputError("phi_tower needs m >= 1 and x >= 0")
    v = int(x)
    for _ in range(m):
        if v > PHI_BIT_BUDGET or (limit is not None and v > limit.bit_length()):
            raise ResourceError(f"phi tower exceeds {'the budget' if limit is not None else 'the big-integer budget'}")
        v = 1 << v
    if limit is not None and v > limit:
        raise ResourceError(f"phi tower value {v} exceeds the budget {limit}")
    return v


FACTOR = "factor"
TOWER = "tower"


@dataclass(frozen=True)
class WindowRule:
    kind: str = FACTOR
    W: int = 8

    def __post_init__(self):
        if self.kind not in (FACTOR, TOWER):
            raise InputError(f"unknown window rule {self.kind!r}")
        if self.kind == FACTOR and self.W < 1:
            raise InputError("window factor must be at least 1")

    def window_end(self, j: int, m: int, budget: int | None = None) -> int:
        if self.kind == FACTOR:
            return self.W * j
        return phi_tower(m, phi_tower(1, j, budget) if budget is not None else 1 << j, budget)

    def describe(self) -> str:
        return f"factor:{self.W}" if self.kind == FACTOR else "tower"


@dataclass(frozen=True)
class PropertyPSchedule:
    k: int
    targets: tuple
    epsilons: tuple = (Fraction(1, 10),)
    ms: tuple = (1,)
    window_rule: WindowRule = WindowRule()
    R: int = 1
    budget: int = DEFAULT_BUDGET
    max_stages: int = MAX_STAGES
    prefix: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "epsilons", tuple(_fraction(e) for e in self.epsilons))
        object.__setattr__(self, "ms", tuple(self.ms))
        if not self.targets or not self.epsilons or not self.ms:
            raise InputError("schedule needs targets, epsilons and window orders")
        if any(not 0 < e < 2 for e in self.epsilons):
            raise InputError("epsilons must lie in (0, 2)")
        if any(m < 1 for m in self.ms):
            raise InputError("window orders m must be at least 1")

    def diagonal(self):
        """All ``(target, m, i, eps)`` tuples with ``i >= 1``, diagonal by index sum."""
        T, M, E = len(self.targets), len(self.ms), len(self.epsilons)
        for t in itertools.count():
            for a in range(T):
                for b in range(M):
                    for d in range(E):
                        c = t - a - b - d
                        if c >= 0:
                            yield a, self.ms[b], c + 1, self.epsilons[d]


@dataclass(frozen=True)
class StageCertificate:
    stage: int
    target: int
    q: tuple
    m: int
    i: int
    epsilon: Fraction
    j: int
    window_end: int
    stage_end: int
    sup_distance: float
    boundary_distance: float
    gamma_length: int
    n_z: int

    def serves(self, a, m, i, eps, rule: WindowRule) -> bool:
        same_m = rule.kind == FACTOR or m == self.m
        return a == self.target and same_m and self.j >= i and self.epsilon <= eps and _small_ratio(self.j, eps)

    def record(self) -> str:
        return (
            f"kind=stage stage={self.stage} target={self.target} q={','.join(map(str, self.q))} m={self.m} "
            f"i={self.i} epsilon={self.epsilon} j={self.j} window_end={self.window_end} "
            f"stage_end={self.stage_end} sup_distance={self.sup_distance:.12f} "
            f"boundary_distance={self.boundary_distance:.12f} gamma_length={self.gamma_length} n_z={self.n_z}"
        )


def _small_ratio(j: int, eps) -> bool:
    return j >= 64 or Fraction(j, 2**j) < eps


def _next_stage(schedule: PropertyPSchedule, certs: list):
    """First diagonal tuple that no certificate serves, found without walking served ``i``."""
    best = None
    T, M, E = len(schedule.targets), len(schedule.ms), len(schedule.epsilons)
    for a in range(T):
        for b in range(M):
            for d in range(E):
                m, eps = schedule.ms[b], schedule.epsilons[d]
                J = max((c.j for c in certs if c.serves(a, m, 1, eps, schedule.window_rule)), default=0)
                key = (J + a + b + d, a, b, d)
                if best is None or key < best[0]:
                    best = (key, (a, m, J + 1, eps))
    return best[1]


def build_property_p_stream(schedule: PropertyPSchedule, spec: ShiftSpec) -> DigitStream:
    """Stream whose ``P_k`` stays within ``eps`` of each scheduled target over a whole window.

    Each stage appends copies of a ``Z_n`` word (``6/n <= eps``) until a
    checkpoint ``j`` with ``j >= i`` and ``j/2^j < eps`` is reached, then
    keeps appending until the window end. The sup of the distance over every
    ``n`` in ``(j, window_end]`` is measured on the emitted symbols and
    stored in a :class:`StageCertificate` as the stage's last chunk leaves.
    ``stream.schedule`` lists planned stages as soon as they are planned.
    """
    k = schedule.k
    base = as_sft(spec)
    blocks = enumerate_language(base, k).words
    targets = _check_targets(spec, k, schedule.targets)
    budget = schedule.budget
    holder = []

    def gen():
        stream = holder[0]
        asm = Assembly(spec, k)
        asm.append(schedule.prefix)
        counter = WindowCounter(blocks, k, spec.alphabet_size)
        emitted = 0
        for chunk in itertools.chain.from_iterable(_chunks(p) for p in asm.parts):
            chunk = chunk[: budget - emitted]
            counter.feed(chunk)
            emitted += len(chunk)
            yield chunk
        for stage in range(1, schedule.max_stages + 1):
            a, m, i, eps = _next_stage(schedule, stream.certificates)
            qv = targets[a]
            q = np.array([float(v) for v in qv])
            n_z = math.ceil(6 / eps)
            real = realize_pattern(spec, qv, k, n_z, min_length=asm.m)
            gamma = real.seg
            start = len(asm.parts)
            asm.append(gamma)
            L1, S1 = asm.length, asm.summ
            u = asm.pad(asm.ctx, gamma.head(asm.m))
            unit = Seg((u, gamma))
            S2 = _combine(S1, unit.summary(k), k)
            C1 = np.array([S1.counts.get(b, 0) for b in blocks], dtype=np.float64)
            delta = np.array([S2.counts.get(b, 0) for b in blocks], dtype=np.float64) - C1
            step = unit.length
            c_max = max(0, (budget - L1) // step + 1)
            cs = np.arange(c_max + 1, dtype=np.float64)
            lengths = L1 + cs * step
            N = lengths - k + 1
            d = np.abs((C1[None, :] + cs[:, None] * delta[None, :]) / N[:, None] - q).sum(axis=1)
            d_unit = float(np.abs(delta / delta.sum() - q).sum())
            ratio_ok = np.array([_small_ratio(int(x), eps) for x in lengths[:64]] + [True] * max(0, len(lengths) - 64), dtype=bool)
            ok = (lengths >= i) & ratio_ok & (np.maximum(d, d_unit) + 2 * step / lengths < float(eps))
            hit = np.flatnonzero(ok)
            if len(hit):
                c_j = int(hit[0])
                j = L1 + c_j * step
                try:
                    end = schedule.window_rule.window_end(j, m, budget)
                except ResourceError:
                    end = budget + 1
                boundary = float(d[c_j])
            else:
                j = end = budget + 1
                boundary = float("nan")
            c_end = max(0, -(-(min(end, budget + 1) - L1) // step))
            if c_end:
                asm.raw(Seg((unit,), c_end))
            stream.schedule.append((stage, a, j, end))
            sup = 0.0
            for chunk in itertools.chain.from_iterable(_chunks(p) for p in asm.parts[start:]):
                room = budget - emitted
                if len(chunk) > room:
                    chunk = chunk[:room]
                n0 = emitted
                cum = counter.feed(chunk)
                ns = np.arange(n0 + 1, n0 + len(chunk) + 1)
                sel = (ns > j) & (ns <= end)
                if np.any(sel):
                    dist = np.abs(cum[sel] / (ns[sel, None] - k + 1) - q).sum(axis=1)
                    sup = max(sup, float(dist.max()))
                emitted += len(chunk)
                if emitted == asm.length and end <= budget:
                    if not sup < eps:
                        raise PaperBoundViolation(f"stage {stage}: sup distance {sup:.6g} not below eps={eps}")
                    stream.certificates.append(
                        StageCertificate(stage, a, qv, m, i, eps, j, end, asm.length, sup, boundary, real.length, n_z)
                    )
                if len(chunk):
                    yield chunk
                if emitted >= budget:
                    stream.truncated = True
                    return

    stream = DigitStream(gen(), name="property-P")
    stream.schedule = []
    holder.append(stream)
    return stream


# ---------------------------------------------------------------------------
# Cesàro inheritance


@dataclass(frozen=True)
class InheritanceRow:
    stage: int
    r: int
    n: int
    j: int
    distance: float
    bound: float
    epsilon: float
    ok: bool
    long_window: bool

    def record(self) -> str:
        return (
            f"kind=inheritance stage={self.stage} r={self.r} n={self.n} j={self.j} "
            f"distance={self.distance:.12f} bound={self.bound:.12f} epsilon={self.epsilon} "
            f"ok={int(self.ok)} long_window={int(self.long_window)}"
        )


@dataclass
class InheritanceReport:
    rows: list

    @property
    def violations(self) -> list:
        return [r for r in self.rows if not r.ok]

    @property
    def passed(self) -> bool:
        return bool(self.rows) and not self.violations


def cesaro_inheritance_check(stream, k: int, r_max: int, spec: ShiftSpec, certificates=None, horizon: int | None = None, slack: float = 1e-9):
    """Check ``||P^(r)(n) - q|| <= eps/3 + 2j/n`` (and ``< eps``) at every certified window end.

    ``certificates`` may be given explicitly (for a stored stream); otherwise
    they are taken from ``stream.certificates`` as the stream is consumed.
    """
    from .freqstats import CesaroTower
    from .stream import iter_chunks

    if r_max < 1:
        raise InputError("r_max must be at least 1")
    blocks = enumerate_language(as_sft(spec), k).words
    tower = CesaroTower(blocks, k, r_max, spec.alphabet_size, exact=False)
    given = list(certificates) if certificates is not None else None
    limit = horizon
    if given is not None:
        ends = max((c.window_end for c in given), default=0)
        limit = ends if limit is None else min(limit, ends)
    values = {}
    for chunk in iter_chunks(stream, CHUNK, limit=limit):
        n0 = tower.n
        out = tower.feed_all(chunk)
        n1 = tower.n
        certs = given if given is not None else list(getattr(stream, "certificates", []))
        plans = [(c.window_end,) for c in certs]
        plans += [(e,) for (_, _, _, e) in getattr(stream, "schedule", [])]
        for (end,) in plans:
            if n0 < end <= n1 and end not in values:
                values[end] = out[end - n0 - 1]
    certs = given if given is not None else list(getattr(stream, "certificates", []))
    rows = []
    for c in certs:
        if c.window_end not in values:
            continue
        q = np.array([float(v) for v in c.q])
        n, eps = c.window_end, float(c.epsilon)
        for r in range(1, r_max + 1):
            dist = float(np.abs(values[n][r] - q).sum())
            bound = eps / 3 + 2 * c.j / n + 2 * (k - 1) / n + slack
            ok = dist <= bound and dist < eps
            rows.append(InheritanceRow(c.stage, r, n, c.j, dist, bound, eps, ok, n >= 64 * c.j))
    return InheritanceReport(rows)
