"""Compare the full heat capacity with its k-level truncations along a parameter sweep."""

import argparse
import sys

from lqts.experiments import Grid, few_level_columns, rows_to_csv, run_few_level
from lqts.models import SpinChainModel


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--family", choices=["ising", "xxz"], default="ising")
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--beta", type=float, default=9.0)
    p.add_argument("--grid", default=None, help="min:max:count")
    p.add_argument("--k", type=int, nargs="+", default=[2, 4])
    p.add_argument("--count", choices=["levels", "states"], default="levels")
    args = p.parse_args()
    model = SpinChainModel(args.family, args.L)
    grid = Grid.parse(args.grid) if args.grid else (
        Grid(0.0, 2.0) if args.family == "ising" else Grid(-2.0, 2.0))
    rows = run_few_level(model, args.beta, model.param_name, grid, args.k, count=args.count)
    sys.stdout.write(rows_to_csv(rows, few_level_columns(args.k, 4)))


if __name__ == "__main__":
    main()
