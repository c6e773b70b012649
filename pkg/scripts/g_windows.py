#!/usr/bin/env python3
"""Check the G and G_2 lower/upper windows for integer R up to a limit."""
import argparse

from ternbound import arithfn as af


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("limit", nargs="?", type=int, default=1_000_000)
    args = ap.parse_args(argv)
    tables = af.build_tables(args.limit)
    for name, o in af.verify_G_windows(args.limit, tables).items():
        print(f"{name:9s} {o.status}" + ("" if o.proven else f"  first failure {o.failure_box}"))


if __name__ == "__main__":
    main()
