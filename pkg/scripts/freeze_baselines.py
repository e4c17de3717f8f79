"""One-shot generator for src/dkglab/baselines.json.

Runs the Monte-Carlo estimate sweeps on the pinned configuration and
writes the measured ratios as the frozen regression baseline.  Rerun
only when the measurement conventions change on purpose.
"""

import json
import os
import time

from dkglab.grid import FourierGrid
from dkglab.spacetime import (
    bilinear_ratio_sweep,
    commutator_ratio,
    empirical_trilinear_ratio,
)

SEED = 2026
N = 32
COUNT = 64
DT = 0.09
BANDS = (1, 2, 4, 8)
BILINEAR_TRIALS = 200
TRILINEAR_TRIALS = 100
COMMUTATOR_TRIALS = 50

OUT = os.path.join(
    os.path.dirname(__file__), "..", "src", "dkglab", "baselines.json"
)


def main():
    grid = FourierGrid(N)
    t0 = time.time()

    inputs = [(n, l, n, l) for n in BANDS for l in BANDS]
    outputs = [(n, l) for n in BANDS for l in BANDS]
    bilinear = bilinear_ratio_sweep(
        grid, COUNT, DT, inputs, outputs, trials=BILINEAR_TRIALS, seed=SEED
    )
    print(f"bilinear sweep done in {time.time() - t0:.1f}s")

    trilinear = []
    for sigma in (0.0, 0.1):
        rec = empirical_trilinear_ratio(
            grid, COUNT, DT, 0.5, 1 / 3, 1 / 3, 1 / 3,
            sigma=sigma, trials=TRILINEAR_TRIALS, seed=SEED,
        )
        rec["sigma"] = sigma
        trilinear.append(rec)
        print(f"trilinear sigma={sigma}: max ratio {rec['max_ratio']:.6g}")

    commutator = commutator_ratio(
        grid, [0.0125, 0.025, 0.05, 0.1],
        theta=1.0, trials=COMMUTATOR_TRIALS, seed=SEED,
    )
    print(f"commutator slope {commutator['slope']:.4f}")

    payload = {
        "meta": {
            "seed": SEED,
            "grid_n": N,
            "time_samples": COUNT,
            "dt": DT,
            "bands": list(BANDS),
            "bilinear_trials": BILINEAR_TRIALS,
            "trilinear_trials": TRILINEAR_TRIALS,
            "commutator_trials": COMMUTATOR_TRIALS,
        },
        "bilinear": {"records": bilinear},
        "trilinear": {"records": trilinear},
        "commutator": commutator,
    }
    with open(os.path.abspath(OUT), "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    print(f"wrote {os.path.abspath(OUT)} in {time.time() - t0:.1f}s total")


if __name__ == "__main__":
    main()
