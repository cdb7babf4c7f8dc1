#!/usr/bin/env python3
"""Run experiments E1-E6 at their reference sizes and write CSV + JSON sidecars.

    python3 scripts/run_experiments.py --out results/
    python3 scripts/run_experiments.py --only E1 E3 --seed 7
    python3 scripts/run_experiments.py --quick        # small sizes, a few seconds

Set REGSUB_THREADS to run trials in several processes.
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from regsub.experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from regsub.thresholds import emergence_threshold


def configs(seed: int, quick: bool) -> dict[str, ExperimentConfig]:
    c3 = emergence_threshold(3).c_k
    scale = 10 if quick else 1
    return {
        # k-core size in G(n, c/n) just above the 3-core threshold
        "E1": ExperimentConfig("E1", n=100_000 // scale, k=3, c=c3 + 0.2,
                               trials=50 // scale, seed=seed),
        # hitting time of the first 3-regular subgraph along the edge process
        "E2": ExperimentConfig("E2", n=1000 // scale, k=3, trials=20 // scale, seed=seed),
        # property-B vertices in the pairing model at M = 3.5n
        "E3": ExperimentConfig("E3", n=10_000, k=3, M=35_000, trials=200 // scale, seed=seed),
        # simple probability of the all-3 pairing
        "E4": ExperimentConfig("E4", n=10_000, k=3, M=30_000, trials=2000 // scale, seed=seed),
        # epsilon_k against k
        "E5": ExperimentConfig("E5", seed=seed, params={"ks": [20, 50, 100, 200, 400, 800]}),
        # coefficient-sum bounds against the exact DP
        "E6": ExperimentConfig("E6", seed=seed),
    }


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="results")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", nargs="+", choices=EXPERIMENTS)
    p.add_argument("--quick", action="store_true")
    args = p.parse_args()

    out = Path(args.out)
    for name, cfg in configs(args.seed, args.quick).items():
        if args.only and name not in args.only:
            continue
        t0 = time.perf_counter()
        res = run_experiment(cfg)
        res.write(out / f"{name}.csv")
        print(f"{name}: {len(res.records)} trials in {time.perf_counter() - t0:.1f}s")
        for key, val in res.summary.items():
            if isinstance(val, float):
                val = f"{val:.6g}"
            print(f"    {key}: {val}")


if __name__ == "__main__":
    main()
