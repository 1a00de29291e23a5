"""Property-P streams on the vertex targets: distance traces and the Cesàro inheritance table.

For each shift and window factor, writes ``n d0 d1`` (L1 distance of P_1 and
its first Cesàro average to each vertex target, sampled every ``--stride``
symbols) and the inheritance rows at each certified window end.
"""

import argparse
from pathlib import Path

import numpy as np

from shiftfreq import PropertyPSchedule, WindowRule, build_property_p_stream, cesaro_inheritance_check, full_shift, golden_mean_shift
from shiftfreq.constructor import FACTOR
from shiftfreq.freqstats import CesaroTower
from shiftfreq.shiftspace import enumerate_language
from shiftfreq.spectrum import vertex_cycles
from shiftfreq.stream import iter_chunks


def trace(arr, spec, targets, stride):
    tower = CesaroTower(enumerate_language(spec, 1), 1, 1, spec.alphabet_size, exact=False)
    vals = tower.feed_all(arr)[stride - 1 :: stride]
    qs = [t.as_array() for t in targets]
    return [np.abs(vals[:, r, :][:, None, :] - np.array(qs)[None]).sum(axis=2) for r in (0, 1)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--horizon", type=int, default=10**6)
    ap.add_argument("--stride", type=int, default=1000)
    ap.add_argument("--windows", default="2,8,64")
    ap.add_argument("--prefix-length", type=int, default=240, help="symbols of the last vertex cycle emitted first")
    ap.add_argument("--out", default="results/property_p")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for spec, tag in ((full_shift(2), "full2"), (golden_mean_shift(), "golden")):
        cycles = vertex_cycles(spec, 1)
        V = [v for v, _ in cycles]
        c = cycles[-1][1]
        prefix = (c * (args.prefix_length // len(c) + 1))[: args.prefix_length]
        for W in map(int, args.windows.split(",")):
            sched = PropertyPSchedule(1, V, window_rule=WindowRule(FACTOR, W), prefix=prefix)
            s = build_property_p_stream(sched, spec)
            arr = np.concatenate(list(iter_chunks(s, limit=args.horizon)))
            d0, d1 = trace(arr, spec, V, args.stride)
            ns = np.arange(args.stride, len(arr) + 1, args.stride)
            with open(out / f"{tag}_W{W}_trace.tsv", "w") as fh:
                cols = "\t".join(f"r{r}_t{i}" for r in (0, 1) for i in range(len(V)))
                fh.write(f"n\t{cols}\n")
                for row in range(len(ns)):
                    vals = "\t".join(f"{x:.6f}" for x in list(d0[row]) + list(d1[row]))
                    fh.write(f"{ns[row]}\t{vals}\n")
            rep = cesaro_inheritance_check(arr, 1, 1, spec, certificates=s.certificates, horizon=args.horizon)
            with open(out / f"{tag}_W{W}_inheritance.txt", "w") as fh:
                fh.write("".join(c.record() + "\n" for c in s.certificates))
                fh.write("".join(r.record() + "\n" for r in rep.rows))
            print(f"{tag} W={W}: {len(s.certificates)} stages, {len(rep.violations)}/{len(rep.rows)} inheritance violations")


if __name__ == "__main__":
    main()
