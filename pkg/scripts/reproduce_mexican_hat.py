"""Bound states of the double-well potential on [-2, 2]: eigenvalues, node counts, densities.

    python3 scripts/reproduce_mexican_hat.py [--nu 1] [--delta 1] [--csv densities.csv]
"""
import argparse
import time

import numpy as np

from lamekit.eigen import (
    BOTH,
    EigenProblem,
    MexicanHatSpec,
    count_interior_zeros,
    density_profile,
    mexican_hat_field,
    solve_eigen,
)
from lamekit.numerics import Grid


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--nu", type=float, default=1.0)
    ap.add_argument("--delta", type=float, default=1.0)
    ap.add_argument("--a", type=float, default=-2.0)
    ap.add_argument("--b", type=float, default=2.0)
    ap.add_argument("--csv", help="write x and one density column per eigenvalue")
    args = ap.parse_args()

    w = mexican_hat_field(MexicanHatSpec(args.nu, args.delta))
    t0 = time.perf_counter()
    res = solve_eigen(EigenProblem(w, args.a, args.b, -9.0, 0.0, scan=20, method=BOTH))
    print(f"solved in {time.perf_counter() - t0:.2f}s")
    print(f"{'k':>2} {'lambda':>12} {'zeros':>5} {'flag':>5} {'peak x':>8}")
    grid = Grid(args.a, args.b, 401)
    cols = []
    # decreasing lambda: k-th state has k-1 interior zeros
    for k, (lam, flag) in enumerate(sorted(zip(res.eigenvalues, res.flags), reverse=True), 1):
        dens = density_profile(w, lam, args.a, args.b, grid)
        cols.append(dens.values)
        peak = grid.nodes[int(np.argmax(dens.values))]
        print(f"{k:>2} {lam:>12.6f} {count_interior_zeros(w, lam, args.a, args.b):>5} {flag:>5} {peak:>8.3f}")
    if args.csv:
        np.savetxt(args.csv, np.column_stack([grid.nodes, *cols]), delimiter=",", header="x," + ",".join(f"rho{k}" for k in range(1, len(cols) + 1)), comments="")


if __name__ == "__main__":
    main()
