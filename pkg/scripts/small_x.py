#!/usr/bin/env python3
"""Verify the small-x prime-sum bounds on the 1/1000 grid and print the epsilon bound."""
import argparse
import time

from ternbound import zeros


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T0", type=float, default=3.061e10)
    args = ap.parse_args(argv)
    t0 = time.time()
    r = zeros.austeria_check()
    print(f"grid points {r.grid_points}, status {r.outcome.status}, {time.time() - t0:.1f}s")
    eps = zeros.crepe_epsilon(zeros.ZeroHypothesis(T0=args.T0))
    print(f"epsilon at T0 = {args.T0:.4g}: {eps.hi:.6e}")


if __name__ == "__main__":
    main()
