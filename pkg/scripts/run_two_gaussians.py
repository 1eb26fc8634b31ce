#!/usr/bin/env python3
"""Benchmark all query strategies on the shifted two-Gaussians task.

Trains the GAN once per (strategy, seed) run, sweeps the full strategy set,
and writes per-strategy summaries plus a comparison table with the passive
supervised baseline as a reference line.

    python3 scripts/run_two_gaussians.py --out results/ [--seeds 0,1,2] [--quick]
"""

import argparse
import dataclasses
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gaal import benchmarks as bm
from gaal import experiment as exp

STRATEGIES = ("gaal", "simple_gan", "svm_active", "random", "mixed")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results")
    parser.add_argument("--seeds", default=None, help="comma-separated run seeds")
    parser.add_argument("--strategies", default=",".join(STRATEGIES))
    parser.add_argument(
        "--quick", action="store_true", help="3 seeds and a short GAN budget"
    )
    args = parser.parse_args()

    base = bm.benchmark_experiment()
    if args.seeds:
        base.seeds = tuple(int(s) for s in args.seeds.split(","))
    if args.quick:
        base.seeds = base.seeds[:3]
        base.gan = dataclasses.replace(base.gan, epochs=200)

    os.makedirs(args.out, exist_ok=True)
    names = [s.strip() for s in args.strategies.split(",") if s.strip()]
    configs = [dataclasses.replace(base, strategy=name) for name in names]

    start = time.time()
    report = exp.compare_strategies(configs)
    for summary in report.summaries:
        path = os.path.join(args.out, f"summary_{summary.strategy}.csv")
        exp.write_summary_csv(path, summary)
        final = summary.points[-1]
        print(f"{summary.strategy:12s} final {final[1]:.4f} +- {final[2]:.4f} -> {path}")
    exp.write_comparison_csv(os.path.join(args.out, "comparison.csv"), report)
    print(f"supervised baseline: {report.supervised_baseline:.4f}")
    print(f"done in {time.time() - start:.0f}s; comparison.csv in {args.out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
