"""Power-law fit of the LQTS extremum against n_A / L for one or more chain lengths."""

import argparse
import json

from lqts.experiments import SCALING_POINTS, run_peak_scaling


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--L", type=int, nargs="+", default=[10])
    p.add_argument("--point", choices=sorted(SCALING_POINTS), default="peak")
    p.add_argument("--beta", type=float, help="defaults to 3L/4")
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    for L in args.L:
        fit = run_peak_scaling(L, args.point, args.beta, workers=args.workers)
        print(f"L={L} beta={fit.beta:g} alpha={fit.alpha:.3f} prefactor={fit.prefactor:.4g} "
              f"rms={fit.residual:.3g} window={fit.window}")
        print(json.dumps(fit.points, indent=1))


if __name__ == "__main__":
    main()
