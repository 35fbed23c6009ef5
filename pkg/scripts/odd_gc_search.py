"""Multi-start search for nontrivial (c0, g2, g3) closing the odd Lamé recurrence.

    python3 scripts/odd_gc_search.py [--nmax 3] [--starts 8]
"""
import argparse
import time

from lamekit.lame import find_gc_roots


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--nmax", type=int, default=3)
    ap.add_argument("--starts", type=int, default=8)
    ap.add_argument("--box", type=float, default=5.0)
    args = ap.parse_args()
    for n in range(1, args.nmax + 1):
        t0 = time.perf_counter()
        roots = find_gc_roots(n, starts=args.starts, box=args.box)
        print(f"n={n}: {len(roots)} nontrivial root(s) from {args.starts} starts ({time.perf_counter() - t0:.2f}s)")
        for r in roots:
            print("   ", r)


if __name__ == "__main__":
    main()
