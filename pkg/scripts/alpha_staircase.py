"""Fitted sup exponent of the staircase symbol on shrinking balls around the origin.

Prints one row per radius: radius, clipped exponent, raw slope, fit residual.
"""

import argparse

from semiwf.symbols import example2_symbol
from semiwf.theorem1 import estimate_alpha, radius_ladder
from semiwf.wavefront import HLadder


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kmin", type=int, default=4)
    ap.add_argument("--kmax", type=int, default=14)
    ap.add_argument("--radii", type=int, default=4, help="number of radii r_j = 0.5 * 2^-(j-1)")
    ap.add_argument("--resolution", type=int, default=256)
    args = ap.parse_args()
    ladder = HLadder.dyadic(args.kmin, args.kmax)
    print(f"{'radius':>8} {'alpha':>8} {'raw':>8} {'resid':>8}")
    for e in estimate_alpha(example2_symbol(), radius_ladder(args.radii), ladder, args.resolution):
        print(f"{e.radius:8.4f} {e.alpha:8.4f} {e.raw_slope:8.4f} {e.residual:8.4f}")


if __name__ == "__main__":
    main()
