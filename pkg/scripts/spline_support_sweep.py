#!/usr/bin/env python3
"""Sweep node spacings and orders of the compact-support dual construction.

For each (K, p) pair: build the two-channel bank from the stride-K component
polynomials of the order-p discrete B-spline, attempt the exact cofactor
pair, certify perfect reconstruction, and report the dual support lengths
against the geometric tail a single-channel dual would need.
"""

import argparse
import sys

from orbitsamp.laurent import CoprimalityError
from orbitsamp.spectral import bspline_filter_bank, perfect_reconstruction_check


def run(max_K, max_p, grid):
    header = f"{'K':>3} {'p':>3} {'coprime':>8} {'PR resid':>10} {'h1 taps':>8} {'h2 taps':>8}"
    print(header)
    print("-" * len(header))
    failures = 0
    for K in range(3, max_K + 1, 2):
        for p in range(1, max_p + 1):
            try:
                sb = bspline_filter_bank(K, p)
            except CoprimalityError:
                print(f"{K:>3} {p:>3} {'no':>8} {'-':>10} {'-':>8} {'-':>8}")
                failures += 1
                continue
            pr = perfect_reconstruction_check(sb.bank, torus_grid=grid)
            taps = [len(h.coeffs) for h in sb.h_polys]
            print(
                f"{K:>3} {p:>3} {'yes':>8} {pr.max_residual:>10.2e} "
                f"{taps[0]:>8} {taps[1]:>8}"
            )
            if not pr.passed:
                failures += 1
    return failures


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-K", type=int, default=9)
    ap.add_argument("--max-p", type=int, default=6)
    ap.add_argument("--grid", type=int, default=512)
    args = ap.parse_args()
    return 1 if run(args.max_K, args.max_p, args.grid) else 0


if __name__ == "__main__":
    sys.exit(main())
