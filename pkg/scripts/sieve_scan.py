#!/usr/bin/env python3
"""Scan the sieve quotient bound over all moduli up to QMAX."""
import argparse
import time

from ternbound import sieve


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("qmax", nargs="?", type=int, default=20_000)
    args = ap.parse_args(argv)
    t0 = time.time()
    cert = sieve.espagn_verify(args.qmax)
    print(f"q <= {args.qmax}: valid={cert.valid}, failures={len(cert.failures)}, {time.time() - t0:.1f}s")
    for f in cert.failures[:10]:
        print("  ", f)


if __name__ == "__main__":
    main()
