"""Acceptance criteria 1-10, each re-checked against an independent oracle.

Every test prints one ``[ACCEPT n] PASS|FAIL ...`` line and asserts the
same condition; conftest repeats the lines in the terminal summary.
Tolerances and runtime limits are the contractual ones.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np

from oracles import (
    brute_language,
    cesaro_bruteforce,
    fibonacci_counts,
    fitted_vector,
    forbidden_scan,
    l1,
    power_iteration_parry,
)
from shiftfreq import (
    BetaSystem,
    PropertyPSchedule,
    TargetPlan,
    WindowRule,
    append_and_certify,
    build_checkpointed_word,
    build_property_p_stream,
    cesaro_inheritance_check,
    cesaro_trajectory,
    detect_accumulation,
    entropy,
    enumerate_language,
    enumerate_rational_targets,
    full_shift,
    golden_mean_shift,
    greedy_expansion,
    is_in_spectrum,
    parry_measure,
    realize_frequency_word,
    repetition_bound,
    symbolic_to_point,
    vector,
)
from shiftfreq.constructor import FACTOR, realize_pattern
from shiftfreq.spectrum import vertex_cycles
from shiftfreq.stream import iter_chunks

PHI = (1 + math.sqrt(5)) / 2
ACCEPT_LINES = []
GOLDEN_FORBIDDEN = [(1, 1)]


def report(n: int, ok: bool, detail: str, elapsed: float, limit: float | None):
    within = limit is None or elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    lim = f" (limit {limit:g} s)" if limit is not None else ""
    line = f"[ACCEPT {n}] {status} {detail}; {elapsed:.2f} s{lim}"
    ACCEPT_LINES.append(line)
    print("\n" + line)
    assert ok, detail
    assert within, f"criterion {n} took {elapsed:.2f} s, limit {limit} s"


def forbidden_of(spec):
    return [] if spec.alphabet_size == 2 and not spec.forbidden else list(spec.forbidden)


def random_allowed(spec, t, rng):
    forb = forbidden_of(spec)
    w = []
    while len(w) < t:
        opts = [a for a in range(spec.alphabet_size) if forbidden_scan(w[-1:] + [a], forb)]
        w.append(rng.choice(opts))
    return tuple(w)


def test_criterion_1_golden_spectrum():
    t0 = time.perf_counter()
    g = golden_mean_shift()
    rng = random.Random(1)
    # The exact boundary of the k=1 golden spectrum is q_1 <= 1/2.
    probes = [Fraction(1, 2) + Fraction(1, d) for d in (10**3, 10**6, 10**12)]
    probes += [Fraction(rng.randint(501, 1000), 1000) for _ in range(40)]
    rejected = sum(not is_in_spectrum((1 - x, x), g, 1) for x in probes)
    below = [Fraction(rng.randint(0, 500), 1000) for _ in range(20)]
    accepted_below = sum(is_in_spectrum((1 - x, x), g, 1) for x in below)
    half = is_in_spectrum((Fraction(1, 2), Fraction(1, 2)), g, 1)
    one = is_in_spectrum((Fraction(1), Fraction(0)), g, 1)
    ok = rejected == len(probes) and half and one and accepted_below == len(below)
    report(1, ok, f"rejected {rejected}/{len(probes)} with q_1>1/2, (1/2,1/2)={half}, (1,0)={one}, accepted {accepted_below}/{len(below)} with q_1<=1/2", time.perf_counter() - t0, 1.0)


def test_criterion_2_beta_fixtures():
    t0 = time.perf_counter()
    sysb = BetaSystem.golden()
    d1 = greedy_expansion(sysb.inverse_power(1), sysb, 20)
    d2 = greedy_expansion(sysb.inverse_power(2), sysb, 20)
    e1 = abs(symbolic_to_point(d1, sysb).value - 1 / PHI)
    e2 = abs(symbolic_to_point(d2, sysb).value - 1 / PHI**2)
    ok = tuple(d1) == (1,) + (0,) * 19 and tuple(d2) == (0, 1) + (0,) * 18 and max(e1, e2) <= 1e-9
    report(2, ok, f"digits {''.join(map(str, d1))} / {''.join(map(str, d2))}, inversion error {max(e1, e2):.1e} <= 1e-9", time.perf_counter() - t0, 1.0)


def test_criterion_3_language_counts():
    t0 = time.perf_counter()
    g = golden_mean_shift()
    lib = [sorted(enumerate_language(g, k).words) for k in range(1, 9)]
    brute = [sorted(brute_language(2, GOLDEN_FORBIDDEN, k)) for k in range(1, 9)]
    counts = [len(x) for x in lib]
    ok = lib == brute and counts == fibonacci_counts(8) == [2, 3, 5, 8, 13, 21, 34, 55]
    report(3, ok, f"|L_k| = {counts}, word sets equal brute force: {lib == brute}", time.perf_counter() - t0, 1.0)


def _sample_instances(rng, count, n_range):
    specs = [(golden_mean_shift(), GOLDEN_FORBIDDEN), (full_shift(2), [])]
    pools = {}
    for _ in range(count):
        (spec, forb), k = rng.choice(specs), rng.choice([1, 2])
        key = (spec.name, k)
        if key not in pools:
            pools[key] = list(enumerate_rational_targets(spec, k, 6))
        yield spec, forb, k, rng.randint(*n_range), rng.choice(pools[key])


def test_criterion_4_zn_contract():
    t0 = time.perf_counter()
    rng = random.Random(4)
    bad = []
    for spec, forb, k, n, q in _sample_instances(rng, 50, (3, 10)):
        w = realize_frequency_word(spec, q, k, n)
        blocks = brute_language(2, forb, k)
        d = l1(fitted_vector(w, blocks), [q.as_dict()[b] for b in blocks])
        if not (len(w) >= k * n * len(blocks) and d <= Fraction(1, n) and forbidden_scan(w, forb)):
            bad.append((spec.name, k, n, q.label(), d))
    report(4, not bad, f"50 instances, {len(bad)} failures of length >= kn|L_k| and distance <= 1/n", time.perf_counter() - t0, 30.0)


def test_criterion_5_lemma_frequency_word():
    t0 = time.perf_counter()
    rng = random.Random(5)
    worst, bad = Fraction(0), 0
    for spec, forb, k, n, q in _sample_instances(rng, 100, (4, 12)):
        omega = random_allowed(spec, rng.randint(0, 20), rng)
        gamma = realize_pattern(spec, q, k, n).word()
        ell = max(1, repetition_bound(len(omega), len(gamma), k))
        w, d_lib = append_and_certify(spec, omega, gamma, ell, q, n)
        blocks = brute_language(2, forb, k)
        d = l1(fitted_vector(w, blocks), [q.as_dict()[b] for b in blocks])
        worst = max(worst, d * n)
        bad += not (d == d_lib and d <= Fraction(4, n) and forbidden_scan(w, forb) and tuple(w[: len(omega)]) == omega)
    report(5, bad == 0, f"{100 - bad}/100 instances within 4/n, max n*distance {float(worst):.4f}", time.perf_counter() - t0, 60.0)


def test_criterion_6_distributions():
    t0 = time.perf_counter()
    g = golden_mean_shift()
    letters = [(0,), (1,)]
    cases = [
        (1, [vector([1, 0], letters), vector(["1/2", "1/2"], letters)], Fraction(1, 20)),
        (2, [v for v, _ in vertex_cycles(g, 2)], Fraction(1, 10)),
    ]
    details, ok = [], True
    for k, targets, eps in cases:
        w, cert = build_checkpointed_word(TargetPlan(k, targets, eps), g)
        blocks = brute_language(2, GOLDEN_FORBIDDEN, k)
        Lk, j = len(blocks), g.spec_constant
        prev = 0
        ok &= len(cert.entries) == len(targets) and forbidden_scan(w, GOLDEN_FORBIDDEN)
        for e, q in zip(cert.entries, targets):
            d = l1(fitted_vector(w[: e.n], blocks), [q.as_dict()[b] for b in blocks])
            rule = max(math.ceil(2 * (prev + k + j - 1) * Lk / eps), math.ceil(2 * Lk / eps))
            ok &= d == e.distance and d <= eps and e.l == rule and e.n >= prev + k * e.l * Lk
            details.append(f"k={k} n={e.n} d={float(d):.4f}")
            prev = e.n
    report(6, ok, ", ".join(details), time.perf_counter() - t0, 60.0)


def test_criterion_7_theorem1_witness():
    t0 = time.perf_counter()
    g = golden_mean_shift()
    letters = [(0,), (1,)]
    targets = [vector([1, 0], letters), vector(["1/2", "1/2"], letters)]
    horizon = 10**6
    stream, cert = build_checkpointed_word(TargetPlan(1, targets, Fraction(1, 10), cycle=True), g, budget=horizon)
    arr = np.concatenate(list(iter_chunks(stream, limit=horizon)))
    # Oracle: running letter frequencies after the first checkpoint, so the
    # trivial oscillation of very short prefixes does not count.
    start = cert.entries[0].n
    ns = np.arange(1, len(arr) + 1)
    f1 = np.cumsum(arr == 1) / ns
    tail = f1[start - 1 :]
    osc = float(tail.max() - tail.min())  # letter 0 has the same oscillation
    ok = len(arr) == horizon and osc >= 0.3 and cert.ok and len(cert.entries) >= 3
    report(7, ok, f"oscillation {osc:.4f} >= 0.3 for both letters over n in [{start}, 10^6], {len(cert.entries)} checkpoints", time.perf_counter() - t0, 60.0)


def _contrast_prefix(spec, length=240):
    c = vertex_cycles(spec, 1)[-1][1]
    return (c * (length // len(c) + 1))[:length]


def _oracle_p1(arr):
    ns = np.arange(1, len(arr) + 1)
    p0 = np.cumsum(arr == 1) / ns
    return p0, np.cumsum(p0) / ns


def test_criterion_8_property_p():
    t0 = time.perf_counter()
    horizon, eps = 10**6, Fraction(1, 10)
    details, ok = [], True
    for spec in (full_shift(2), golden_mean_shift()):
        V = [v for v, _ in vertex_cycles(spec, 1)]
        stream = build_property_p_stream(PropertyPSchedule(1, V, epsilons=(eps,), window_rule=WindowRule(FACTOR, 8)), spec)
        arr = np.concatenate(list(iter_chunks(stream, limit=horizon)))
        rep = detect_accumulation(arr, 1, 0, V, float(eps), horizon, spec)
        # Exact oracle: 2|c_n - n q_1| <= n eps in integers, c_n = count of 1s.
        c = np.cumsum(arr == 1, dtype=np.int64)
        ns = np.arange(1, len(arr) + 1, dtype=np.int64)
        oracle_hits = []
        for v in V:
            q1 = v.entries[1]
            num = np.abs(c * q1.denominator - ns * q1.numerator) * 2 * eps.denominator
            oracle_hits.append(int(np.count_nonzero(num <= ns * eps.numerator * q1.denominator)))
        hits = [rep.hit_count(i) for i in range(len(V))]
        ok &= hits == oracle_hits and min(hits) >= 2
        details.append(f"{spec.name} r=0 hits {hits}")

        for W, negative in ((64, False), (2, True)):
            sched = PropertyPSchedule(1, V, epsilons=(eps,), window_rule=WindowRule(FACTOR, W), prefix=_contrast_prefix(spec))
            s = build_property_p_stream(sched, spec)
            arr = np.concatenate(list(iter_chunks(s, limit=horizon)))
            certs = list(s.certificates)
            inh = cesaro_inheritance_check(arr, 1, 1, spec, certificates=certs, horizon=horizon)
            _, p1 = _oracle_p1(arr)
            oracle = []
            for c in certs:
                n = c.window_end
                d = 2 * abs(p1[n - 1] - float(c.q[1]))
                oracle.append(d <= float(eps) / 3 + 2 * c.j / n + 1e-9 and d < float(eps))
            agree = len(oracle) == len(inh.rows) and all(o == r.ok for o, r in zip(oracle, inh.rows))
            if negative:
                ok &= agree and bool(inh.rows) and bool(inh.violations)
                details.append(f"W=2 violations {len(inh.violations)}/{len(inh.rows)}")
            else:
                ok &= agree and inh.passed
                details.append(f"W=64 r=1 max distance {max(r.distance for r in inh.rows):.4f}")
    report(8, ok, "; ".join(details), time.perf_counter() - t0, 300.0)


def test_criterion_9_parry():
    t0 = time.perf_counter()
    g = golden_mean_shift()
    mu = parry_measure(g)
    pi, lam = power_iteration_parry([[1, 1], [1, 0]])
    err = float(np.max(np.abs(np.asarray(mu.stationary) - pi)))
    ent = entropy(mu)
    path = mu.sample(10**6, np.random.default_rng(9))
    freq = float(np.mean(path))
    ok = (
        err <= 1e-9
        and abs(pi[0] - 0.72361) < 5e-6
        and abs(ent - math.log(lam)) <= 1e-9
        and abs(ent - 0.481212) <= 1e-6
        and abs(freq - 0.27639) <= 0.01
    )
    report(9, ok, f"stationary {mu.stationary[0]:.9f},{mu.stationary[1]:.9f} (oracle error {err:.1e}), entropy {ent:.9f} nats, sampled frequency {freq:.5f}", time.perf_counter() - t0, None)


def test_criterion_10_cesaro_exactness():
    blocks1 = [(0,), (1,)]
    blocks2 = [(0, 0), (0, 1), (1, 0), (1, 1)]
    spec = full_shift(2)
    R = 3
    lib_time = 0.0
    mismatches = 0
    checked = 0
    for w in itertools.product((0, 1), repeat=12):
        for k, blocks in ((1, blocks1), (2, blocks2)):
            t = time.perf_counter()
            traj = cesaro_trajectory(w, k, R, spec, range(1, 13), exact=True)
            lib_time += time.perf_counter() - t
            oracle = cesaro_bruteforce(w, k, R, blocks, mpq=False)
            for n, r, vec in traj:
                checked += 1
                mismatches += tuple(vec.entries) != tuple(oracle[r][n])
    rng = random.Random(10)
    cps = list(range(1, 65)) + list(range(101, 2000, 37)) + [2000]
    for _ in range(100):
        w = tuple(rng.randint(0, 1) for _ in range(2000))
        t = time.perf_counter()
        traj = cesaro_trajectory(w, 1, R, spec, cps, exact=True)
        lib_time += time.perf_counter() - t
        oracle = cesaro_bruteforce(w, 1, R, blocks1)
        for n, r, vec in traj:
            checked += 1
            mismatches += tuple(vec.entries) != tuple(Fraction(int(x.numerator), int(x.denominator)) for x in oracle[r][n])
    report(10, mismatches == 0, f"{checked} (n, r) vectors compared exactly, {mismatches} mismatches, R={R}", lib_time, 60.0)
