"""Optimal two-level gap versus degeneracies, and classification of a gap profile."""

import argparse
import json

import numpy as np

from lqts.landau_zener import lz_classify_sweep, lz_heat_capacity, lz_optimal_gap


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--beta", type=float, default=9.0)
    args = p.parse_args()
    for n0, n1 in ((1, 1), (2, 1), (1, 2), (1, 3)):
        g = lz_optimal_gap(n0, n1)
        print(f"n0={n0} n1={n1}: beta*dE* = {g:.6f}, max heat capacity {lz_heat_capacity(g, 1.0, n0, n1):.6f}")
    gamma = np.linspace(-1, 1, 201)
    gap = np.sqrt(0.05**2 + gamma**2)
    print(json.dumps(lz_classify_sweep(gamma, gap, 1, 1, args.beta).to_dict(), indent=2))


if __name__ == "__main__":
    main()
