"""Parry measure of a shift: stationary law, entropy and sampled frequency convergence."""

import argparse
import math
from pathlib import Path

import numpy as np

from shiftfreq import entropy, parry_measure
from shiftfreq.cli import parse_shift
from shiftfreq.spectrum import cylinder_entropy_rate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shift", default="golden")
    ap.add_argument("--n", type=int, default=10**6)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--out", default="results/parry")
    args = ap.parse_args()
    spec = parse_shift(args.shift)
    mu = parry_measure(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(f"stationary {mu.stationary}, entropy {entropy(mu):.12f} nats, log root {math.log(mu.perron_root):.12f}")
    print(f"cylinder increment at depth 8: {cylinder_entropy_rate(mu, spec, 8):.12f}")
    ns = np.unique(np.geomspace(10, args.n, 60).astype(int))
    with open(out / "sampled_frequency.tsv", "w") as fh:
        letters = range(spec.alphabet_size)
        fh.write("seed\tn\t" + "\t".join(f"freq{a}" for a in letters) + "\n")
        for seed in range(args.seeds):
            path = mu.sample(args.n, np.random.default_rng(seed))
            cum = np.stack([np.cumsum(path == a) for a in letters], axis=1)
            for n in ns:
                fh.write(f"{seed}\t{n}\t" + "\t".join(f"{c / n:.6f}" for c in cum[n - 1]) + "\n")


if __name__ == "__main__":
    main()
