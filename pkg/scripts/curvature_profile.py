"""Print the curvature range table and the visibility integral growth of the flattened cusp."""

import argparse
import math

import numpy as np

from visbound.warped import CuspModel, curvature_range, cusp_volume, visibility_integral


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-max", type=float, default=10.0)
    ap.add_argument("--samples", type=int, default=21)
    args = ap.parse_args()

    m = CuspModel()
    ts = np.linspace(0.0, args.t_max, args.samples)
    lo, hi = curvature_range(m, ts)
    print(f"{'t':>8} {'K_min':>12} {'K_max':>12}")
    for t, a, b in zip(ts, lo, hi):
        print(f"{t:8.3f} {a:12.6f} {b:12.6f}")
    print()
    print(f"{'T':>8} {'integral':>12} {'0.04 ln T':>12}")
    for T in (10.0, 1e2, 1e3, 1e4):
        print(f"{T:8.0f} {visibility_integral(m, T):12.6f} {0.04 * math.log(T):12.6f}")
    print(f"\ncusp volume beyond t = 3: {cusp_volume(m, 3.0):.12f}")


if __name__ == "__main__":
    main()
