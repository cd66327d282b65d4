#!/usr/bin/env python3
"""Emit the measured-vs-envelope scaling tables as CSV on stdout.

Covers compression size over growing sample sizes and disambiguation size
over growing domains for VC-1 classes.
"""

import argparse
import csv
import sys

from pcl.experiments import emit_scaling_table


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--m-grid", type=int, nargs="*", default=[8, 16, 32, 64])
    parser.add_argument("--n-grid", type=int, nargs="*", default=[4, 6, 8, 10])
    args = parser.parse_args()

    writer = csv.writer(sys.stdout)
    for name, grid in (
        ("compression-size", args.m_grid),
        ("disambiguation-size", args.n_grid),
    ):
        header, rows = emit_scaling_table(name, grid, seed=args.seed)
        writer.writerow([name])
        writer.writerow(header)
        writer.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
