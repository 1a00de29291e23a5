"""Verification suites behind ``shiftfreq verify``.

Each suite returns a :class:`SuiteResult` holding one line per check. The
suites exercise the library end to end; the test suite re-checks the same
claims against independent brute-force oracles.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import beta as B
from .constructor import (
    FACTOR,
    PropertyPSchedule,
    TargetPlan,
    WindowRule,
    append_and_certify,
    build_checkpointed_word,
    build_property_p_stream,
    cesaro_inheritance_check,
    oscillation,
    realize_pattern,
    repetition_bound,
    stage_length_rule,
)
from .freqstats import detect_accumulation, vector
from .shiftspace import ShiftSpec, _extension_ok, enumerate_language, full_shift, golden_mean_shift, is_allowed
from .spectrum import enumerate_rational_targets, entropy, is_in_spectrum, parry_measure, vertex_cycles

NEGATIVE_CONTROL_BELOW = 64


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)
    negative_control: bool = False

    def add(self, label: str, ok: bool, detail: str = ""):
        self.checks.append((label, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)

    def lines(self) -> list:
        out = [f"{'PASS' if ok else 'FAIL'} {self.name}: {label}" + (f" ({detail})" if detail else "") for label, ok, detail in self.checks]
        n_ok = sum(ok for _, ok, _ in self.checks)
        out.append(f"{self.name}: {n_ok}/{len(self.checks)} checks pass")
        return out


def random_allowed_word(spec: ShiftSpec, t: int, rng: random.Random) -> tuple:
    """Uniform choice among allowed one-symbol extensions, restarting at dead ends."""
    while True:
        w = ()
        while len(w) < t:
            opts = [a for a in range(spec.alphabet_size) if _extension_ok(spec, w + (a,))]
            if not opts:
                break
            w += (rng.choice(opts),)
        if len(w) == t:
            return w


def suite_spectrum_golden(seed: int = 0) -> SuiteResult:
    res = SuiteResult("spectrum-golden")
    g = golden_mean_shift()
    res.add("accepts (1/2,1/2)", is_in_spectrum((Fraction(1, 2), Fraction(1, 2)), g, 1))
    res.add("accepts (1,0)", is_in_spectrum((Fraction(1), Fraction(0)), g, 1))
    rng = random.Random(seed)
    bad = [Fraction(rng.randint(51, 100), 100) for _ in range(20)] + [Fraction(1, 2) + Fraction(1, 10**9)]
    res.add("rejects q_1 > 1/2", not any(is_in_spectrum((1 - x, x), g, 1) for x in bad), f"{len(bad)} probes")
    return res


def suite_beta_fixtures(seed: int = 0) -> SuiteResult:
    res = SuiteResult("beta-fixtures")
    sys = B.BetaSystem.golden()
    inv = sys.inverse_power(1)
    inv2 = sys.inverse_power(2)
    d1 = B.greedy_expansion(inv, sys, 20)
    d2 = B.greedy_expansion(inv2, sys, 20)
    res.add("1/beta -> 1000...", d1 == (1,) + (0,) * 19)
    res.add("1/beta^2 -> 0100...", d2 == (0, 1) + (0,) * 18)
    e1 = abs(B.symbolic_to_point(d1, sys).value - float(inv))
    e2 = abs(B.symbolic_to_point(d2, sys).value - float(inv2))
    res.add("points invert within 1e-9", max(e1, e2) <= 1e-9, f"max error {max(e1, e2):.2e}")
    return res


def suite_language_counts(seed: int = 0) -> SuiteResult:
    res = SuiteResult("language-counts")
    g = golden_mean_shift()
    counts = [len(enumerate_language(g, k)) for k in range(1, 9)]
    res.add("golden |L_k| = 2,3,5,...,55", counts == [2, 3, 5, 8, 13, 21, 34, 55], str(counts))
    return res


def _random_targets(spec, k, Q, count, rng):
    pool = list(enumerate_rational_targets(spec, k, Q))
    return [rng.choice(pool) for _ in range(count)]


def suite_zn_contract(seed: int = 0, count: int = 50) -> SuiteResult:
    res = SuiteResult("zn-contract")
    rng = random.Random(seed)
    specs = [golden_mean_shift(), full_shift(2)]
    bad = []
    for _ in range(count):
        spec, k, n = rng.choice(specs), rng.choice([1, 2]), rng.randint(3, 10)
        q = _random_targets(spec, k, 6, 1, rng)[0]
        r = realize_pattern(spec, q, k, n)
        w = r.word()
        Lk = len(enumerate_language(spec, k))
        ok = len(w) >= k * n * Lk and r.distance <= Fraction(1, n) and is_allowed(spec, w)
        if not ok:
            bad.append((spec.name, k, n, q.label()))
    res.add(f"{count} realizations meet length and 1/n bounds", not bad, f"failures {bad[:3]}" if bad else "")
    return res


def suite_lemma_frequency_word(seed: int = 0, count: int = 100) -> SuiteResult:
    res = SuiteResult("lemma-frequency-word")
    rng = random.Random(seed)
    specs = [golden_mean_shift(), full_shift(2)]
    worst = 0.0
    fails = 0
    for _ in range(count):
        spec, k, n = rng.choice(specs), rng.choice([1, 2]), rng.randint(4, 12)
        t = rng.randint(0, 20)
        omega = random_allowed_word(spec, t, rng)
        q = _random_targets(spec, k, 6, 1, rng)[0]
        gamma = realize_pattern(spec, q, k, n).word()
        ell = max(1, repetition_bound(t, len(gamma), k))
        try:
            _, d = append_and_certify(spec, omega, gamma, ell, q, n, materialize=False)
            worst = max(worst, float(d) * n)
        except Exception:  # PaperBoundViolation counts as a failed instance
            fails += 1
    res.add(f"{count - fails}/{count} instances within 4/n", fails == 0, f"max n*distance {worst:.4f}")
    return res


def _golden_letter_targets():
    blocks = [(0,), (1,)]
    return [vector([1, 0], blocks), vector(["1/2", "1/2"], blocks)]


def suite_distributions(seed: int = 0) -> SuiteResult:
    res = SuiteResult("distributions")
    g = golden_mean_shift()
    cases = [(1, _golden_letter_targets(), Fraction(1, 20)), (2, [v for v, _ in vertex_cycles(g, 2)], Fraction(1, 10))]
    for k, targets, eps in cases:
        _, cert = build_checkpointed_word(TargetPlan(k, targets, eps), g)
        Lk = len(enumerate_language(g, k))
        prev, rule_ok = 0, True
        for e in cert.entries:
            rule_ok &= e.l == stage_length_rule(prev, k, g.spec_constant, Lk, eps) and e.n >= prev + k * e.l * Lk
            prev = e.n
        dists = ", ".join(f"{float(e.distance):.4f}" for e in cert.entries)
        res.add(f"k={k} eps={eps}: distances <= eps", cert.ok and len(cert.entries) == len(targets), dists)
        res.add(f"k={k}: stage lengths follow the l_i rule", rule_ok)
    return res


def suite_theorem1(seed: int = 0, horizon: int = 10**6) -> SuiteResult:
    res = SuiteResult("theorem1")
    g = golden_mean_shift()
    stream, cert = build_checkpointed_word(TargetPlan(1, _golden_letter_targets(), Fraction(1, 10), cycle=True), g, budget=horizon)
    osc = oscillation(stream, 1, g, horizon)
    res.add("every letter oscillates by >= 0.3", all(v >= 0.3 for v in osc.values()), str({a: round(v, 4) for a, v in osc.items()}))
    res.add("checkpoints within eps", cert.ok, f"{len(cert.entries)} checkpoints")
    return res


def _vertex_targets(spec):
    return [v for v, _ in vertex_cycles(spec, 1)]


def _contrast_prefix(spec, length: int = 240) -> tuple:
    """A prefix built from the last vertex cycle, so the first stage starts away from its target."""
    c = vertex_cycles(spec, 1)[-1][1]
    return (c * (length // len(c) + 1))[:length]


def suite_property_p(seed: int = 0, horizon: int = 10**6) -> SuiteResult:
    res = SuiteResult("property-p")
    for spec in (full_shift(2), golden_mean_shift()):
        V = _vertex_targets(spec)
        stream = build_property_p_stream(PropertyPSchedule(1, V, window_rule=WindowRule(FACTOR, 8)), spec)
        rep = detect_accumulation(stream, 1, 0, V, 0.1, horizon, spec)
        hits = [rep.hit_count(i) for i in range(len(V))]
        visits = [rep.visits(i) for i in range(len(V))]
        res.add(f"{spec.name}: >= 2 certified hits per vertex target (W=8)", min(hits) >= 2, f"hits {hits}, excursions {visits}")
        res.add(f"{spec.name}: stage certificates below eps", all(c.sup_distance < float(c.epsilon) for c in stream.certificates), f"{len(stream.certificates)} stages")
    res.checks.extend(suite_cesaro_inheritance(seed, 64, horizon).checks)
    res.checks.extend(suite_cesaro_inheritance(seed, 2, horizon).checks)
    return res


def suite_cesaro_inheritance(seed: int = 0, W: int = 64, horizon: int = 10**6) -> SuiteResult:
    negative = W < NEGATIVE_CONTROL_BELOW
    res = SuiteResult("cesaro-inheritance", negative_control=negative)
    for spec in (full_shift(2), golden_mean_shift()):
        V = _vertex_targets(spec)
        sched = PropertyPSchedule(1, V, window_rule=WindowRule(FACTOR, W), prefix=_contrast_prefix(spec))
        stream = build_property_p_stream(sched, spec)
        rep = cesaro_inheritance_check(stream, 1, 1, spec, horizon=horizon)
        worst = max((r.distance for r in rep.rows), default=float("nan"))
        detail = f"{len(rep.rows)} window ends, {len(rep.violations)} violations, max distance {worst:.4f}"
        if negative:
            res.add(f"{spec.name}: W={W} negative control reports violations", bool(rep.rows) and bool(rep.violations), detail)
        else:
            res.add(f"{spec.name}: W={W} P^(1) within eps/3 + 2j/n at window ends", rep.passed, detail)
    return res


def suite_parry(seed: int = 0) -> SuiteResult:
    res = SuiteResult("parry")
    g = golden_mean_shift()
    mu = parry_measure(g)
    A = np.array([[1.0, 1.0], [1.0, 0.0]])
    v = np.ones(2)
    for _ in range(200):
        v = A.T @ v
        v /= v.sum()
    phi = (1 + math.sqrt(5)) / 2
    res.add("stationary vector", np.max(np.abs(mu.stationary - np.array([phi**2, 1]) / (1 + phi**2))) <= 1e-9, str(mu.stationary))
    res.add("entropy log(beta)", abs(entropy(mu) - math.log(phi)) <= 1e-9, f"{entropy(mu):.12f} nats")
    path = mu.sample(10**6, np.random.default_rng(seed))
    res.add("sampled frequency of 1", abs(path.mean() - 0.27639) <= 0.01, f"{path.mean():.5f}")
    return res


SUITES = {
    "spectrum-golden": suite_spectrum_golden,
    "beta-fixtures": suite_beta_fixtures,
    "language-counts": suite_language_counts,
    "zn-contract": suite_zn_contract,
    "lemma-frequency-word": suite_lemma_frequency_word,
    "distributions": suite_distributions,
    "theorem1": suite_theorem1,
    "property-p": suite_property_p,
    "cesaro-inheritance": suite_cesaro_inheritance,
    "parry": suite_parry,
}
