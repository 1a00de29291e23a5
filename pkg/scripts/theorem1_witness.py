"""Running letter frequencies of the cycling checkpoint construction on the golden-mean shift.

Writes ``n freq0 freq1`` rows at log-spaced n plus the checkpoint list.
"""

import argparse
from fractions import Fraction
from pathlib import Path

import numpy as np

from shiftfreq import TargetPlan, build_checkpointed_word, golden_mean_shift, vector
from shiftfreq.stream import iter_chunks


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--horizon", type=int, default=10**6)
    ap.add_argument("--epsilon", default="1/10")
    ap.add_argument("--points", type=int, default=400)
    ap.add_argument("--out", default="results/theorem1")
    args = ap.parse_args()

    g = golden_mean_shift()
    letters = [(0,), (1,)]
    plan = TargetPlan(1, [vector([1, 0], letters), vector(["1/2", "1/2"], letters)], Fraction(args.epsilon), cycle=True)
    stream, cert = build_checkpointed_word(plan, g, budget=args.horizon)
    arr = np.concatenate(list(iter_chunks(stream, limit=args.horizon)))
    f1 = np.cumsum(arr == 1) / np.arange(1, len(arr) + 1)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ns = np.unique(np.geomspace(1, len(arr), args.points).astype(int))
    with open(out / "frequencies.tsv", "w") as fh:
        fh.write("n\tfreq0\tfreq1\n")
        for n in ns:
            fh.write(f"{n}\t{1 - f1[n - 1]:.9f}\t{f1[n - 1]:.9f}\n")
    with open(out / "checkpoints.txt", "w") as fh:
        fh.write("".join(line + "\n" for line in cert.records()))
    tail = f1[cert.entries[0].n - 1 :] if cert.entries else f1
    print(f"{len(cert.entries)} checkpoints, oscillation after the first: {tail.max() - tail.min():.4f}")


if __name__ == "__main__":
    main()
