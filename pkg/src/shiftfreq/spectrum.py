"""Shift-invariant frequency vectors: polytope, membership, vertices, Parry measure.

For a shift of finite type whose forbidden words have length at most ``M``,
the invariant vectors on blocks of length ``k`` are the projections of the
balanced flows on the graph of allowed ``K``-blocks, ``K = max(k, M)``.
Membership is decided by an exact rational LP; vertices come from simple
cycles of that graph, so the two routes check each other.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import networkx as nx
import numpy as np

from .beta import sft_approximation
from .errors import InputError, NotIrreducible, ResourceError
from .freqstats import FITTED, FrequencyVector
from .lp import feasible_point
from .shiftspace import BETA, ENUMERATION_CAP, ShiftSpec, enumerate_language, fmt

VERTEX_DIMENSION_CAP = 12
CYCLE_CAP = 50_000
TARGET_CANDIDATE_CAP = 2_000_000


def as_sft(spec: ShiftSpec) -> ShiftSpec:
    """Beta-shifts are replaced by their finite-type surrogate at the stored depth."""
    if spec.kind == BETA:
        approx = sft_approximation(spec.beta, spec.beta.depth)
        return approx.with_spec_constant(spec.spec_constant)
    return spec


def level(spec: ShiftSpec, k: int) -> int:
    return max(k, as_sft(spec).memory)


def cyclic_block_counts(c, k: int) -> dict:
    c = tuple(c)
    L = len(c)
    out: dict = {}
    for p in range(L):
        b = tuple(c[(p + t) % L] for t in range(k))
        out[b] = out.get(b, 0) + 1
    return out


@dataclass(frozen=True)
class InvariantPolytope:
    k: int
    level: int
    blocks: tuple  # L_k
    lifted: tuple  # L_K, the flow variables
    nodes: tuple  # L_{K-1}
    balance: tuple  # one row per node: +1 outgoing, -1 incoming (self-loops cancel)

    @property
    def dimension(self) -> int:
        return len(self.blocks)

    def projection(self):
        pos = {b: i for i, b in enumerate(self.blocks)}
        return [pos[w[: self.k]] for w in self.lifted]

    def lift(self, q) -> list | None:
        """A balanced flow on ``L_K`` projecting onto ``q``, or ``None``."""
        vals = _entries(q, self)
        if any(v < 0 for v in vals) or sum(vals) != 1:
            return None
        proj = self.projection()
        rows = [list(r) for r in self.balance]
        rhs = [0] * len(rows)
        for i in range(len(self.blocks)):
            rows.append([1 if proj[c] == i else 0 for c in range(len(self.lifted))])
            rhs.append(vals[i])
        rows.append([1] * len(self.lifted))
        rhs.append(1)
        return feasible_point(rows, rhs)

    def contains(self, q) -> bool:
        return self.lift(q) is not None

    def describe(self) -> list:
        lines = [f"level={self.level} variables={','.join(fmt(w) for w in self.lifted)}"]
        lines.append("normalisation: " + " + ".join(f"p[{fmt(w)}]" for w in self.lifted) + " = 1")
        for v, row in zip(self.nodes, self.balance):
            out = [fmt(w) for w, c in zip(self.lifted, row) if c > 0]
            inc = [fmt(w) for w, c in zip(self.lifted, row) if c < 0]
            if out or inc:
                lhs = " + ".join(f"p[{w}]" for w in out) or "0"
                r = " + ".join(f"p[{w}]" for w in inc) or "0"
                lines.append(f"balance at {fmt(v)}: {lhs} = {r}")
        if self.level > self.k:
            for b in self.blocks:
                terms = " + ".join(f"p[{fmt(w)}]" for w in self.lifted if w[: self.k] == b)
                lines.append(f"q[{fmt(b)}] = {terms}")
        lines.append("nonnegativity: p >= 0")
        return lines


def _entries(q, poly: InvariantPolytope):
    if isinstance(q, FrequencyVector):
        if q.blocks != poly.blocks:
            raise InputError("target is not indexed by the language slice")
        vals = q.entries
    else:
        vals = tuple(q)
        if len(vals) != len(poly.blocks):
            raise InputError(f"expected {len(poly.blocks)} entries, got {len(vals)}")
    return [Fraction(v) if not isinstance(v, float) else Fraction(v) for v in vals]


def invariant_polytope(spec: ShiftSpec, k: int, cap: int = ENUMERATION_CAP) -> InvariantPolytope:
    if k < 1:
        raise InputError("block length must be at least 1")
    base = as_sft(spec)
    K = max(k, base.memory)
    blocks = enumerate_language(base, k, cap).words
    lifted = enumerate_language(base, K, cap).words
    nodes = enumerate_language(base, K - 1, cap).words
    pos = {v: i for i, v in enumerate(nodes)}
    rows = [[0] * len(lifted) for _ in nodes]
    for c, w in enumerate(lifted):
        rows[pos[w[:-1]]][c] += 1
        rows[pos[w[1:]]][c] -= 1
    return InvariantPolytope(k, K, blocks, lifted, nodes, tuple(tuple(r) for r in rows))


def is_in_spectrum(q, spec: ShiftSpec, k: int) -> bool:
    return invariant_polytope(spec, k).contains(q)


def _graph(poly: InvariantPolytope) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(poly.nodes)
    g.add_edges_from((w[:-1], w[1:]) for w in poly.lifted)
    return g


def cycle_word(nodes_on_cycle, K: int) -> tuple:
    """One period of the symbol sequence traced by a closed walk, starting with its first node."""
    if K == 1:
        return tuple(nodes_on_cycle)
    c = tuple(v[-1] for v in nodes_on_cycle[1:]) + (nodes_on_cycle[0][-1],)
    shift = (K - 1) % len(c)
    return c[len(c) - shift :] + c[: len(c) - shift] if shift else c


def simple_cycle_words(spec: ShiftSpec, k: int, cap: int = CYCLE_CAP) -> list:
    poly = invariant_polytope(spec, k)
    if poly.level == 1:
        return [(w[0],) for w in poly.lifted]
    words = []
    for cyc in nx.simple_cycles(_graph(poly)):
        if len(words) >= cap:
            raise ResourceError(f"more than {cap} simple cycles")
        words.append(cycle_word(cyc, poly.level))
    return sorted(words, key=lambda w: (len(w), w))


def cycle_vector(c, spec_or_poly, k: int | None = None) -> FrequencyVector:
    poly = spec_or_poly if isinstance(spec_or_poly, InvariantPolytope) else invariant_polytope(spec_or_poly, k)
    counts = cyclic_block_counts(c, poly.k)
    L = len(c)
    return FrequencyVector(poly.k, poly.blocks, tuple(Fraction(counts.get(b, 0), L) for b in poly.blocks), FITTED)


def _in_hull(v, others) -> bool:
    if not others:
        return False
    dim = len(v)
    rows = [[o[i] for o in others] for i in range(dim)]
    rows.append([1] * len(others))
    return feasible_point(rows, list(v) + [1]) is not None


def vertex_cycles(spec: ShiftSpec, k: int) -> list:
    """``[(vertex, cycle word)]`` with one shortest simple cycle per vertex."""
    poly = invariant_polytope(spec, k)
    if poly.dimension > VERTEX_DIMENSION_CAP:
        raise ResourceError(f"|L_k| = {poly.dimension} exceeds the vertex cap {VERTEX_DIMENSION_CAP}")
    seen: dict = {}
    for c in simple_cycle_words(spec, k):
        v = cycle_vector(c, poly)
        seen.setdefault(v.entries, (v, c))
    cands = list(seen.values())
    out = []
    for i, (v, c) in enumerate(cands):
        others = [u.entries for j, (u, _) in enumerate(cands) if j != i]
        if not _in_hull(v.entries, others):
            out.append((v, c))
    return sorted(out, key=lambda vc: tuple(-x for x in vc[0].entries))


def polytope_vertices(spec: ShiftSpec, k: int) -> list:
    return [v for v, _ in vertex_cycles(spec, k)]


class Theorem1Check(NamedTuple):
    holds: bool
    gaps: dict


def theorem1_hypothesis(spec: ShiftSpec) -> Theorem1Check:
    """For each letter, do two invariant letter-frequency vectors differ in that letter?"""
    verts = polytope_vertices(spec, 1)
    blocks = verts[0].blocks
    gaps = {b[0]: max(v.entries[i] for v in verts) - min(v.entries[i] for v in verts) for i, b in enumerate(blocks)}
    return Theorem1Check(all(g > 0 for g in gaps.values()), gaps)


# ---------------------------------------------------------------------------
# Markov measures


@dataclass(frozen=True)
class MarkovMeasure:
    """Markov measure on the graph of allowed ``order``-blocks; entropy in nats."""

    states: tuple
    transition: np.ndarray = field(repr=False)
    stationary: np.ndarray
    order: int  # states are words of length order
    perron_root: float = float("nan")
    unit: str = "nats"

    def word_measure(self, w) -> float:
        w = tuple(w)
        m = self.order
        if len(w) < m:
            return sum(self.word_measure(s) for s in self.states if s[: len(w)] == w)
        idx = {s: i for i, s in enumerate(self.states)}
        i = idx.get(w[:m])
        if i is None:
            return 0.0
        p = float(self.stationary[i])
        for t in range(1, len(w) - m + 1):
            j = idx.get(w[t : t + m])
            if j is None:
                return 0.0
            p *= float(self.transition[i, j])
            i = j
        return p

    def block_frequencies(self, spec: ShiftSpec, k: int) -> FrequencyVector:
        blocks = enumerate_language(as_sft(spec), k).words
        return FrequencyVector(k, blocks, tuple(self.word_measure(b) for b in blocks), FITTED)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """A length-``n`` path started from the stationary law."""
        m = self.order
        cum = np.cumsum(self.transition, axis=1)
        last = np.array([s[-1] for s in self.states], dtype=np.int64)
        steps = max(0, n - m)
        u = rng.random(steps + 1)
        i = int(np.searchsorted(np.cumsum(self.stationary), u[0] * self.stationary.sum()))
        i = min(i, len(self.states) - 1)
        out = np.empty(m + steps, dtype=np.int64)
        out[:m] = self.states[i]
        rows = [cum[r] for r in range(len(self.states))]
        path = np.empty(steps, dtype=np.int64)
        for t in range(steps):
            i = int(np.searchsorted(rows[i], u[t + 1] * rows[i][-1], side="right"))
            path[t] = i
        out[m:] = last[path]
        return out[:n]


def _state_graph(spec: ShiftSpec):
    base = as_sft(spec)
    K = max(base.memory, 2)
    states = enumerate_language(base, K - 1).words
    pos = {s: i for i, s in enumerate(states)}
    A = np.zeros((len(states), len(states)))
    for w in enumerate_language(base, K).words:
        A[pos[w[:-1]], pos[w[1:]]] = 1.0
    return states, A, K - 1


def _check_irreducible(A):
    g = nx.DiGraph()
    g.add_nodes_from(range(len(A)))
    g.add_edges_from(zip(*np.nonzero(A)))
    if not nx.is_strongly_connected(g):
        raise NotIrreducible("transition graph is not strongly connected")


def parry_measure(spec: ShiftSpec) -> MarkovMeasure:
    """Maximal-entropy Markov measure from the Perron eigenpair of the adjacency matrix."""
    states, A, order = _state_graph(spec)
    _check_irreducible(A)
    vals, right = np.linalg.eig(A)
    i = int(np.argmax(vals.real))
    lam = float(vals[i].real)
    v = np.abs(right[:, i].real)
    lvals, left = np.linalg.eig(A.T)
    u = np.abs(left[:, int(np.argmax(lvals.real))].real)
    P = A * v[None, :] / (lam * v[:, None])
    pi = u * v / float(u @ v)
    return MarkovMeasure(states, P, pi, order, lam)


def markov_measure(spec: ShiftSpec, weights) -> MarkovMeasure:
    """Markov measure from positive weights on the allowed transitions (rows renormalised)."""
    states, A, order = _state_graph(spec)
    _check_irreducible(A)
    W = np.asarray(weights, dtype=float) * A
    P = W / W.sum(axis=1, keepdims=True)
    vals, left = np.linalg.eig(P.T)
    pi = np.abs(left[:, int(np.argmin(np.abs(vals - 1)))].real)
    pi /= pi.sum()
    return MarkovMeasure(states, P, pi, order)


def entropy(mu: MarkovMeasure) -> float:
    P = mu.transition
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, P * np.log(np.where(P > 0, P, 1.0)), 0.0)
    return float(-(mu.stationary @ terms.sum(axis=1)))


def block_entropy(mu: MarkovMeasure, spec: ShiftSpec, n: int) -> float:
    """``-sum mu[w] log mu[w]`` over allowed words of length ``n``."""
    total = 0.0
    for w in enumerate_language(as_sft(spec), n).words:
        p = mu.word_measure(w)
        if p > 0:
            total -= p * math.log(p)
    return total


def cylinder_entropy_rate(mu: MarkovMeasure, spec: ShiftSpec, depth: int) -> float:
    """Entropy from cylinder sums as the increment ``H_depth - H_{depth-1}``."""
    return block_entropy(mu, spec, depth) - block_entropy(mu, spec, depth - 1)


# ---------------------------------------------------------------------------
# rational targets


@dataclass(frozen=True)
class RationalTargetEnumeration:
    Q: int
    k: int
    vectors: tuple

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def density_gap(self, vertices) -> Fraction:
        """Largest L1 distance from a vertex to its nearest listed member."""
        return max(min(sum(abs(a - b) for a, b in zip(v.entries, m.entries)) for m in self.vectors) for v in vertices)


def _compositions(total, parts):
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev, out = -1, []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 2 - prev)
        yield out


def _float_member(poly: InvariantPolytope, vals) -> bool:
    from scipy.optimize import linprog

    proj = poly.projection()
    rows = [list(r) for r in poly.balance] + [[1.0 if proj[c] == i else 0.0 for c in range(len(poly.lifted))] for i in range(len(poly.blocks))]
    rhs = [0.0] * len(poly.balance) + [float(v) for v in vals]
    res = linprog(np.zeros(len(poly.lifted)), A_eq=rows, b_eq=rhs, bounds=(0, None), method="highs")
    return res.status == 0


def enumerate_rational_targets(spec: ShiftSpec, k: int, Q: int) -> RationalTargetEnumeration:
    """Invariant vectors with common denominator ``<= Q``, smallest denominator first."""
    if Q < 1:
        raise InputError("denominator bound must be at least 1")
    poly = invariant_polytope(spec, k)
    B = poly.dimension
    if math.comb(Q + B - 1, B - 1) * Q > TARGET_CANDIDATE_CAP:
        raise ResourceError(f"too many candidate vectors for Q={Q}, |L_k|={B}")
    seen = set()
    out = []
    for d in range(1, Q + 1):
        layer = []
        for comp in _compositions(d, B):
            vals = tuple(Fraction(c, d) for c in comp)
            if vals in seen:
                continue
            seen.add(vals)
            if Q > 64 and not _float_member(poly, vals):
                continue
            if poly.contains(vals):
                layer.append(vals)
        out.extend(FrequencyVector(k, poly.blocks, v, FITTED) for v in sorted(layer))
    return RationalTargetEnumeration(Q, k, tuple(out))
