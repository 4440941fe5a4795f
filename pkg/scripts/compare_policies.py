#!/usr/bin/env python3
"""Side-by-side policy comparison on one preset topology.

Runs each policy over a seed range, prints a per-policy table of delivery
time, miss ratio, and the load on every link, and optionally dumps the raw
rows. The defaults reproduce the single-cache comparison; pass --preset
line or --preset tree for the multi-hop ones.
"""

import argparse
import sys
from collections import defaultdict
from statistics import mean

from lacsim.cache import split_policy_list
from lacsim.harness import run_matrix


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="single",
                    choices=("single", "line", "tree"))
    ap.add_argument("--policies", default="lru,lcp:0.1,sym:0.1,sym-la,lac:5,5")
    ap.add_argument("--seeds", type=int, default=3, metavar="N",
                    help="seeds 1..N per policy")
    ap.add_argument("--horizon", type=int, default=50_000,
                    help="requests per user")
    ap.add_argument("--csv", default="", help="also write raw rows here")
    args = ap.parse_args()

    policies = split_policy_list(args.policies)
    seeds = range(1, args.seeds + 1)
    rows = run_matrix(args.preset, policies, seeds, args.horizon)

    by_policy = defaultdict(list)
    for row in rows:
        by_policy[row.policy_label].append(row)

    link_labels = sorted(rows[0].link_loads)
    header = f"{'policy':>12} {'delivery':>9} {'stddev':>8} {'miss':>7}"
    header += "".join(f" {label:>18}" for label in link_labels)
    print(f"preset={args.preset} horizon={args.horizon} seeds=1..{args.seeds}")
    print(header)
    for label, group in by_policy.items():
        line = (f"{label:>12}"
                f" {mean(r.mean_delivery for r in group):9.4f}"
                f" {mean(r.stddev_delivery for r in group):8.4f}"
                f" {mean(r.overall_miss for r in group):7.4f}")
        for ll in link_labels:
            line += f" {mean(r.link_loads[ll] for r in group):18.4f}"
        print(line)

    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(",".join(rows[0].CSV_FIELDS) + "\n")
            for row in rows:
                fh.write(row.csv_row() + "\n")
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
