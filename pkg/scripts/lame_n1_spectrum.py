"""Dirichlet spectrum of the n=1 even Lamé potential, shooting vs determinant.

    python3 scripts/lame_n1_spectrum.py [--g2 4] [--g3 0] [--a 0.3] [--b 2.3]
"""
import argparse
import time

from lamekit.eigen import BOTH, EigenProblem, lame_even_family, shoot_miss, solve_eigen
from lamekit.elliptic import EllipticInvariants
from lamekit.lame import even_pair


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--g2", type=float, default=4.0)
    ap.add_argument("--g3", type=float, default=0.0)
    ap.add_argument("--c0", type=float, default=0.0)
    ap.add_argument("--a", type=float, default=0.3)
    ap.add_argument("--b", type=float, default=2.3)
    ap.add_argument("--lmin", type=float, default=-40.0)
    ap.add_argument("--lmax", type=float, default=-2.0)
    args = ap.parse_args()

    inv = EllipticInvariants(args.g2, args.g3)
    w = even_pair(1, args.c0, inv, (args.a, args.b)).w
    fam = lame_even_family(1, args.c0, inv, args.a, args.b)
    t0 = time.perf_counter()
    res = solve_eigen(EigenProblem(w, args.a, args.b, args.lmin, args.lmax, scan=8, method=BOTH, family=fam))
    print(f"solved in {time.perf_counter() - t0:.2f}s")
    for lam, flag in zip(res.eigenvalues, res.flags):
        print(f"lambda = {lam:.10f}  found by {flag:<5}  shooting miss {shoot_miss(w, lam, args.a, args.b):.1e}")


if __name__ == "__main__":
    main()
