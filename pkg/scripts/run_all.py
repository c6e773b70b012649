#!/usr/bin/env python3
"""Run every verification task and write one report per task under results/."""
import argparse
import sys

from ternbound.cli import RunConfig, run, write_report, TASKS


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--full-scale", action="store_true", help="full ranges (tens of minutes)")
    ap.add_argument("--tasks", nargs="*", default=[t for t in TASKS if t != "all"])
    args = ap.parse_args(argv)
    cfg = RunConfig(full_scale=args.full_scale)
    ok = True
    for task in args.tasks:
        rep = run(task, cfg)
        path = write_report(rep)
        ok &= rep.passed
        print(f"{task:14s} {'PASS' if rep.passed else 'FAIL'}  {rep.wall_time:7.1f}s  {path}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
