"""Command-line interface: ``shiftfreq <command> ...``.

Exit codes: 0 ok, 2 input error, 3 infeasible target, 4 resource cap,
5 proof-bound violation or failed verification.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import beta as B
from .constructor import (
    DEFAULT_BUDGET,
    FACTOR,
    TOWER,
    PropertyPSchedule,
    TargetPlan,
    WindowRule,
    build_checkpointed_word,
    build_property_p_stream,
)
from .errors import InputError, NotIrreducible, PaperBoundViolation, ShiftError
from .freqstats import FITTED, WindowCounter, cesaro_trajectory, vector_from_counts, window_counts
from .records import format_record, open_output, read_config, read_digits, read_records, write_digits, write_records
from .shiftspace import ENUMERATION_CAP, ShiftSpec, connect, enumerate_language, fmt, full_shift, golden_mean_shift, is_allowed, sft, word
from .spectrum import (
    as_sft,
    enumerate_rational_targets,
    entropy,
    invariant_polytope,
    parry_measure,
    vertex_cycles,
)
from .verify import NEGATIVE_CONTROL_BELOW, SUITES

BUDGET_ENV = "BSF_BUDGET_SYMBOLS"


def parse_shift(text: str, probe_len: int = 4, j_max: int = 8) -> ShiftSpec:
    """``full:N``, ``golden``, ``sft:N:w1,w2``, ``beta:<base>[:depth]``."""
    parts = text.strip().split(":")
    kind = parts[0].lower()
    try:
        if kind == "full":
            return full_shift(int(parts[1]) if len(parts) > 1 else 2)
        if kind == "golden":
            return golden_mean_shift()
        if kind == "sft":
            n = int(parts[1])
            words = [w for w in parts[2].split(",") if w] if len(parts) > 2 else []
            return connect(sft(n, words, name=text), probe_len, j_max)
        if kind == "beta":
            depth = int(parts[2]) if len(parts) > 2 else B.DEFAULT_DEPTH
            sysb = B.BetaSystem.parse(parts[1], depth)
            approx = B.sft_approximation(sysb, depth)
            base = connect(approx, probe_len, j_max)
            spec = ShiftSpec(sysb.alphabet_size, B.BETA, beta=sysb, spec_constant=base.spec_constant, name=f"beta-shift {sysb.label}")
            return spec
    except (IndexError, ValueError) as exc:
        raise InputError(f"cannot parse shift {text!r}: {exc}") from exc
    raise InputError(f"unknown shift kind in {text!r}")


def parse_vector(text: str) -> tuple:
    try:
        return tuple(Fraction(x.strip()) for x in text.split(",") if x.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse vector {text!r}") from exc


def parse_targets(text: str) -> list:
    return [parse_vector(t) for t in text.split(";") if t.strip()]


def parse_window(text: str) -> WindowRule:
    kind, _, arg = text.partition(":")
    if kind == FACTOR:
        try:
            return WindowRule(FACTOR, int(arg or 8))
        except ValueError as exc:
            raise InputError(f"bad window factor {arg!r}") from exc
    if kind == TOWER:
        return WindowRule(TOWER)
    raise InputError(f"window rule must be factor:W or tower, got {text!r}")


@dataclass
class RunConfig:
    shift: str = "golden"
    k: int = 1
    R: int = 1
    targets: str = ""
    epsilon: str = "1/10"
    mode: str = "checkpoint"
    window: str = "factor:8"
    ms: str = "1"
    cycle: bool = False
    prefix: str = ""
    length: int | None = None
    budget: int = DEFAULT_BUDGET
    output: str = ""
    certificates: str = ""
    seed: int = 0
    probe_len: int = 4
    j_max: int = 8
    max_stages: int = 64

    @classmethod
    def resolve(cls, args: argparse.Namespace) -> "RunConfig":
        """Defaults, then config file, then the budget env var, then flags."""
        cfg = cls()
        fields = {f.name: f for f in dataclasses.fields(cls)}
        if getattr(args, "config", None):
            for key, value in read_config(args.config).items():
                if key not in fields:
                    raise InputError(f"unknown config key {key!r}")
                setattr(cfg, key, _coerce(fields[key], value))
        if os.environ.get(BUDGET_ENV):
            cfg.budget = _coerce(fields["budget"], os.environ[BUDGET_ENV])
        for name in fields:
            value = getattr(args, name, None)
            if value is not None:
                setattr(cfg, name, value)
        if cfg.budget < 1:
            raise InputError("budget must be positive")
        return cfg


def _coerce(f, value: str):
    kind = str(f.type)
    try:
        if "bool" in kind:
            if value.lower() in ("1", "true", "yes", "on"):
                return True
            if value.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if "int" in kind:
            return int(value)
    except ValueError as exc:
        raise InputError(f"bad value {value!r} for {f.name}") from exc
    return value


def _decimal(x) -> str:
    return f"{float(x):.12f}"


# ---------------------------------------------------------------------------
# commands


def cmd_expand(args) -> int:
    sysb = B.BetaSystem.parse(args.beta, args.depth)
    try:
        Fraction(args.x)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse x={args.x!r}") from exc
    digits = B.greedy_expansion(args.x, sysb, args.n)
    header = {"shift": f"beta:{args.beta}:{args.depth}", "source": f"expand x={args.x}"}
    write_digits(args.output, digits, header)
    return 0


def cmd_sample(args) -> int:
    spec = parse_shift(args.shift)
    mu = parry_measure(spec)
    path = mu.sample(args.n, np.random.default_rng(args.seed))
    write_digits(args.output, path, {"shift": args.shift, "source": f"parry-sample seed={args.seed}"})
    return 0


def _targets_for(cfg: RunConfig, spec):
    blocks = enumerate_language(as_sft(spec), cfg.k).words
    out = []
    for vals in parse_targets(cfg.targets):
        if len(vals) != len(blocks):
            raise InputError(f"target {','.join(map(str, vals))} needs {len(blocks)} entries ({' '.join(fmt(b) for b in blocks)})")
        out.append(vals)
    return out


def cmd_construct(args) -> int:
    cfg = RunConfig.resolve(args)
    spec = parse_shift(cfg.shift, cfg.probe_len, cfg.j_max)
    targets = _targets_for(cfg, spec)
    try:
        prefix = word(cfg.prefix)
        eps = Fraction(cfg.epsilon.split(",")[0])
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad prefix or epsilon: {exc}") from exc
    header = {"shift": cfg.shift, "k": cfg.k, "mode": cfg.mode}
    limit = cfg.length if cfg.length is not None else cfg.budget
    if cfg.mode == "checkpoint":
        plan = TargetPlan(cfg.k, targets, eps, prefix, cfg.cycle)
        result, cert = build_checkpointed_word(plan, spec, budget=limit, max_stages=cfg.max_stages)
        write_digits(cfg.output, result, header, limit=limit)
        lines = cert.records()
    elif cfg.mode == "property-p":
        if not targets:
            raise InputError("property-p mode needs targets")
        sched = PropertyPSchedule(
            cfg.k,
            targets,
            epsilons=tuple(Fraction(e) for e in cfg.epsilon.split(",")),
            ms=tuple(int(m) for m in cfg.ms.split(",")),
            window_rule=parse_window(cfg.window),
            R=cfg.R,
            budget=limit,
            max_stages=cfg.max_stages,
            prefix=prefix,
        )
        stream = build_property_p_stream(sched, spec)
        write_digits(cfg.output, stream, header, limit=limit)
        lines = [c.record() for c in stream.certificates]
    else:
        raise InputError(f"unknown construct mode {cfg.mode!r}")
    if cfg.certificates:
        write_records(cfg.certificates, lines)
    else:
        for line in lines:
            print(line, file=sys.stderr)
    return 0


def _check_certificates(symbols, spec, k, records) -> list:
    """Recompute every recorded distance from the digits."""
    blocks = enumerate_language(as_sft(spec), k).words
    out, failed = [], False
    for rec in records:
        q = parse_vector(rec["q"])
        if rec.get("kind") == "checkpoint":
            n = int(rec["n"])
            if n > len(symbols):
                raise InputError(f"certificate checkpoint n={n} beyond the file ({len(symbols)} symbols)")
            vec = vector_from_counts(window_counts(tuple(symbols[:n].tolist()), k), blocks, n, k, FITTED)
            d = sum((abs(a - b) for a, b in zip(vec.entries, q)), Fraction(0))
            ok = d == Fraction(rec["distance"])
            out.append(format_record({"kind": "certificate-check", "stage": rec["stage"], "n": n, "recorded": rec["distance"], "recomputed": d, "match": int(ok)}))
        elif rec.get("kind") == "stage":
            j, end = int(rec["j"]), int(rec["window_end"])
            if end > len(symbols):
                raise InputError(f"certificate window end {end} beyond the file ({len(symbols)} symbols)")
            wc = WindowCounter(blocks, k, spec.alphabet_size)
            cum = wc.feed(symbols[:end])
            ns = np.arange(j + 1, end + 1)
            qa = np.array([float(x) for x in q])
            sup = float(np.abs(cum[j:end] / (ns[:, None] - k + 1) - qa).sum(axis=1).max())
            ok = abs(sup - float(rec["sup_distance"])) <= 1e-12
            out.append(format_record({"kind": "certificate-check", "stage": rec["stage"], "n": end, "recorded": rec["sup_distance"], "recomputed": f"{sup:.12f}", "match": int(ok)}))
        else:
            continue
        failed |= not ok
    return out, failed


def cmd_analyze(args) -> int:
    header, symbols = read_digits(args.file)
    spec = parse_shift(args.shift or header.get("shift", "full:2"))
    if len(symbols) and symbols.max() >= spec.alphabet_size:
        raise InputError(f"symbol {int(symbols.max())} outside the alphabet of {spec.describe()}")
    if args.k < 1 or args.k > len(symbols):
        raise InputError(f"block length {args.k} does not fit a file of {len(symbols)} symbols")
    cps = [int(c) for c in args.checkpoints.split(",")] if args.checkpoints else [len(symbols)]
    if cps and cps[-1] > len(symbols):
        raise InputError(f"checkpoint {cps[-1]} beyond the file ({len(symbols)} symbols)")
    if not is_allowed(spec, tuple(symbols[: min(len(symbols), 4096)].tolist())):
        raise InputError("digit file is not allowed in the given shift")
    exact = None if args.precision == "auto" else args.precision == "exact"
    traj = cesaro_trajectory(symbols, args.k, args.R, spec, cps, exact=exact)
    out = [
        format_record({"n": n, "r": r, "block": fmt(b), "value": _decimal(v)})
        for n, r, vec in traj
        for b, v in zip(vec.blocks, vec.entries)
    ]
    failed = False
    if args.certificates:
        lines, failed = _check_certificates(symbols, spec, args.k, read_records(args.certificates))
        out += lines
    with open_output(args.output) as fh:
        fh.write("".join(l + "\n" for l in out))
    return PaperBoundViolation.exit_code if failed else 0


def cmd_spectrum(args) -> int:
    spec = parse_shift(args.shift)
    poly = invariant_polytope(spec, args.k, cap=args.cap)
    lines = [f"# shift={args.shift} k={args.k} blocks={','.join(fmt(b) for b in poly.blocks)}"]
    lines += ["constraint " + c for c in poly.describe()]
    for v, c in vertex_cycles(spec, args.k):
        lines.append(format_record({"kind": "vertex", "q": ",".join(map(str, v.entries)), "cycle": fmt(c)}))
    for v in enumerate_rational_targets(spec, args.k, args.Q):
        lines.append(format_record({"kind": "target", "q": ",".join(map(str, v.entries))}))
    try:
        mu = parry_measure(spec)
        lines.append(format_record({"kind": "parry", "stationary": ",".join(f"{x:.12f}" for x in mu.stationary), "entropy": f"{entropy(mu):.12f}", "unit": "nats"}))
    except NotIrreducible as exc:
        lines.append(format_record({"kind": "parry", "error": str(exc).replace(" ", "_")}))
    with open_output(args.output) as fh:
        fh.write("".join(l + "\n" for l in lines))
    return 0


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    ok = True
    for name in names:
        fn = SUITES[name]
        kwargs = {"seed": args.seed}
        if name == "cesaro-inheritance":
            kwargs["W"] = args.W
        res = fn(**kwargs)
        for line in res.lines():
            print(line)
        if res.negative_control:
            print(f"{name}: negative-control mode (W < {NEGATIVE_CONTROL_BELOW}); violations are the expected outcome")
        ok &= res.passed
    return 0 if ok else PaperBoundViolation.exit_code


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shiftfreq", description="Block frequencies, spectra and non-normal streams on subshifts.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("expand", help="greedy beta-expansion digits of x")
    e.add_argument("--beta", required=True)
    e.add_argument("--x", required=True)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--depth", type=int, default=B.DEFAULT_DEPTH)
    e.add_argument("--output", default="-")
    e.set_defaults(func=cmd_expand)

    s = sub.add_parser("sample", help="sample a path of the Parry measure")
    s.add_argument("--shift", default="golden")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output", default="-")
    s.set_defaults(func=cmd_sample)

    c = sub.add_parser("construct", help="build a checkpointed word or a property-P stream")
    c.add_argument("--config")
    for name, typ in (("shift", str), ("k", int), ("R", int), ("targets", str), ("epsilon", str), ("mode", str), ("window", str), ("ms", str), ("prefix", str), ("length", int), ("budget", int), ("output", str), ("certificates", str), ("seed", int), ("probe-len", int), ("j-max", int), ("max-stages", int)):
        c.add_argument(f"--{name}", type=typ, default=None, dest=name.replace("-", "_"))
    c.add_argument("--cycle", action="store_const", const=True, default=None)
    c.set_defaults(func=cmd_construct)

    a = sub.add_parser("analyze", help="Cesàro trajectory table of a digit file")
    a.add_argument("file")
    a.add_argument("--shift")
    a.add_argument("--k", type=int, default=1)
    a.add_argument("--R", type=int, default=1)
    a.add_argument("--checkpoints", default="")
    a.add_argument("--certificates")
    a.add_argument("--precision", choices=("auto", "exact", "float"), default="auto")
    a.add_argument("--output", default="-")
    a.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("spectrum", help="constraints, vertices and rational targets")
    sp.add_argument("--shift", default="golden")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--Q", type=int, default=4)
    sp.add_argument("--cap", type=int, default=ENUMERATION_CAP)
    sp.add_argument("--output", default="-")
    sp.set_defaults(func=cmd_spectrum)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES) + ["all"])
    v.add_argument("--W", type=int, default=64)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ShiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
