#!/usr/bin/env python3
"""Print the prime-gap ladder and resulting n0 for several verified zero heights."""
import argparse

from ternbound import zeros


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("heights", nargs="*", type=float, default=[3.061e10, 2.419e11, 2.44e12])
    ap.add_argument("--delta-table", default=None, help="custom gap table file")
    args = ap.parse_args(argv)
    table = zeros.DeltaTable.load(args.delta_table) if args.delta_table else None
    for H in args.heights:
        kw = {"table": table} if table is not None else {}
        res = zeros.ladder_replay(zeros.ZeroHypothesis(T0=H), **kw)
        print(f"T0 = {H:.4g}: n0 = {zeros.six_figures(res.n0)}  ({res.n0})")


if __name__ == "__main__":
    main()
