#!/usr/bin/env python3
"""Run every bound-checking suite and write reports under ./reports/.

Usage: python scripts/run_experiments.py [--seed N] [--only NAME ...]
Exit status is nonzero when any suite records a failing check.
"""

import argparse
import sys
import time
from pathlib import Path

from pcl.experiments import SUITES, ExperimentConfig, run_experiment
from pcl.serialize import dump_json


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--only", nargs="*", choices=sorted(SUITES))
    parser.add_argument("--out-dir", default="reports")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(exist_ok=True)
    names = args.only or sorted(SUITES)
    any_failed = False
    for name in names:
        start = time.time()
        report = run_experiment(ExperimentConfig(name, seed=args.seed))
        elapsed = time.time() - start
        dump_json(report.to_dict(), out_dir / f"{name}.json")
        (out_dir / f"{name}.csv").write_text(report.to_csv())
        status = "ok" if report.n_failed == 0 else "FAILED"
        print(
            f"{name:28s} {status:6s} "
            f"{report.n_passed}/{len(report.checks)} checks  {elapsed:6.1f}s"
        )
        any_failed |= report.n_failed > 0
    return 1 if any_failed else 0


if __name__ == "__main__":
    sys.exit(main())
