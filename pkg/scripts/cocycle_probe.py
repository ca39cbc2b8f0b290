#!/usr/bin/env python3
"""Cocycle residuals for one seed family at increasing truncation depth.

Useful for convincing yourself (or failing to) that a candidate seed
family really does satisfy the full cocycle condition, beyond the
truncations the test suite pins down.
"""

import argparse
import sys
import time
from fractions import Fraction

from prismstrat import (
    CosimpCtx,
    KMat,
    Seeds,
    Trunc,
    assemble_epsilon,
    cocycle_residual,
    field_init,
    generate_Amn,
)
from prismstrat.stratification import residual_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--ramified", action="store_true", help="use E = u^2 - p")
    ap.add_argument(
        "--seeds",
        default="1/2,2/3,-5/4,1,0,0",
        help="comma list of rationals A_{0,1},A_{1,1},...",
    )
    ap.add_argument("--t-max", type=int, default=5)
    ap.add_argument("--x-max", type=int, default=10)
    args = ap.parse_args()

    E = [-args.p, 0, 1] if args.ramified else [-args.p, 1]
    field = field_init(args.p, E)
    vals = [Fraction(v) for v in args.seeds.split(",")]

    worst = "ZERO_RESIDUAL"
    for t_order in range(2, args.t_max + 1):
        if len(vals) < t_order:
            print(f"(stopping: only {len(vals)} seeds supplied)")
            break
        for deg in range(4, args.x_max + 1, 2):
            ctx = CosimpCtx(field, Trunc(t_order, deg))
            seeds = Seeds.of(
                [KMat.scalar(field, 1, field.from_rational(v)) for v in vals[:t_order]]
            )
            started = time.monotonic()
            table = generate_Amn(seeds, ctx, deg)
            R = cocycle_residual(assemble_epsilon(table, ctx), ctx)
            rep = residual_report(R)
            elapsed = time.monotonic() - started
            print(f"T={t_order} D={deg}: {rep['verdict']} ({elapsed:.2f}s)")
            if rep["verdict"] != "ZERO_RESIDUAL":
                worst = rep["verdict"]
                print(f"  nonzero monomials: {rep['nonzero_monomials'][:6]}")
    return 0 if worst == "ZERO_RESIDUAL" else 1


if __name__ == "__main__":
    sys.exit(main())
