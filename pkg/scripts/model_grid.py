#!/usr/bin/env python3
"""Analytical curves without running the simulator.

Prints the per-rank steady-state miss probability of the asymmetric
discipline over a grid of mean admission probabilities, the symmetric
curve beside it, and the cache size eta(eps) each discipline needs to keep
the miss probability of rank 1 content below eps.
"""

import argparse
import sys

from lacsim.analytics import (eta_asym, eta_sym, fig1_grid, miss_sym,
                              solve_tau)
from lacsim.workload import zipf_weights


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x", type=int, default=8, help="cache size in objects")
    ap.add_argument("--catalog", type=int, default=20_000)
    ap.add_argument("--alpha", type=float, default=1.7)
    ap.add_argument("--rate", type=float, default=1.0)
    ap.add_argument("--mean-p", type=float, nargs="+",
                    default=[1.0, 0.1, 0.05, 0.02])
    ap.add_argument("--epsilon", type=float, nargs="+", default=[0.1, 0.01])
    ap.add_argument("--max-rank", type=int, default=16)
    args = ap.parse_args()

    popularity = zipf_weights(args.catalog, args.alpha)
    rows = fig1_grid(popularity, args.x, args.rate, args.mean_p,
                     max_rank=args.max_rank)

    by_rank = {}
    taus = {}
    for rank, mean_p, pi, tau in rows:
        by_rank.setdefault(rank, {})[mean_p] = pi
        taus[mean_p] = tau

    cols = "".join(f" p={p:<9g}" for p in args.mean_p)
    print(f"x={args.x} catalog={args.catalog} alpha={args.alpha}"
          f" lambda={args.rate}")
    print(f"{'rank':>4}{cols} {'sym':>10}")
    for rank in sorted(by_rank):
        line = f"{rank:>4}"
        for p in args.mean_p:
            line += f" {by_rank[rank][p]:11.6f}"
        line += f" {float(miss_sym(rank, args.x, args.alpha)):10.6f}"
        print(line)
    print()
    print("tau(x) per mean_p: "
          + "  ".join(f"p={p:g}: {taus[p]:.3f}" for p in args.mean_p))
    print()
    print(f"{'mean_p':>8} {'eps':>6} {'eta_sym':>9} {'eta_asym':>9}")
    for p in args.mean_p:
        tau = solve_tau(args.x, args.rate, popularity, mean_p=p).tau
        for eps in args.epsilon:
            print(f"{p:8g} {eps:6g}"
                  f" {eta_sym(args.x, args.alpha, eps):9.3f}"
                  f" {eta_asym(args.rate, popularity.norm_c, tau, p, eps, args.alpha):9.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
