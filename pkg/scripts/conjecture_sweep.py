#!/usr/bin/env python3
"""Grid sweep of the invertible-function identity at higher k.

The k = 0, 1, 2 residuals are proved to vanish; anything nonzero at
higher k on commuting seeds would be a counterexample candidate, so the
sweep flags it prominently.  Seeds are drawn from a deterministic grid of
small rationals.
"""

import argparse
import itertools
import sys
import time
from fractions import Fraction

from prismstrat import CosimpCtx, KMat, Seeds, Trunc, conjecture_residual, field_init


def seed_grid(field, t_order, values, count):
    pool = [Fraction(v) for v in values]
    combos = itertools.islice(
        itertools.product(pool, repeat=t_order), count
    )
    for combo in combos:
        yield Seeds.of([KMat.scalar(field, 1, field.from_rational(v)) for v in combo])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--ramified", action="store_true", help="use E = u^2 - p")
    ap.add_argument("--k-max", type=int, default=5)
    ap.add_argument("--pd-degree", type=int, default=8)
    ap.add_argument("--count", type=int, default=24, help="number of seed tuples")
    args = ap.parse_args()

    E = [-args.p, 0, 1] if args.ramified else [-args.p, 1]
    field = field_init(args.p, E)
    t_order = args.k_max + 1
    ctx = CosimpCtx(field, Trunc(t_order, args.pd_degree))
    values = ["-2", "-1/2", "0", "1/3", "1", "5/2"]

    flagged = []
    started = time.monotonic()
    n = 0
    for seeds in seed_grid(field, t_order, values, args.count):
        rep = conjecture_residual(seeds, ctx, args.k_max)
        bad = [k for k, r in rep["residuals"].items() if not r["zero"]]
        tag = "ZERO" if not bad else f"NONZERO at k={bad}"
        vals = [m.rows[0][0] for m in seeds.A1]
        print(f"  seeds={vals!r}: {tag}")
        if bad:
            flagged.append((vals, bad))
        n += 1
    elapsed = time.monotonic() - started
    print(f"\n{n} seed tuples, k <= {args.k_max}, e = {field.e}, {elapsed:.1f}s")
    if flagged:
        print("POTENTIAL COUNTEREXAMPLES (recheck at higher truncation!):")
        for vals, bad in flagged:
            print(f"  {vals!r} at k = {bad}")
        return 1
    print("all residuals zero in the tested range")
    return 0


if __name__ == "__main__":
    sys.exit(main())
