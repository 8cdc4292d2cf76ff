"""Greedy-net cover of a band below the thin part of H^2 / <z -> z + 1>, checked against (D, C)."""

import argparse
import math

import numpy as np

from visbound.constants import N_packing, build_ledger
from visbound.cover import (
    BallOracle,
    ball_cover,
    check_DC,
    complexity_constants,
    greedy_net,
    nerve,
    quotient_metric,
)
from visbound.thick_thin import thin_boundary_height


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--band", type=float, default=1.05, help="ratio of the band's top and bottom heights")
    ap.add_argument("--dim-cap", type=int, default=3)
    args = ap.parse_args()

    led = build_ledger(2, 0.32)
    r = led.r
    y_top = thin_boundary_height(led.eps)
    y_bot = y_top / args.band
    ys = np.exp(np.arange(math.log(y_bot), math.log(y_top), r / 8))
    xs = np.arange(0.0, 1.0, r / 8 * y_bot)
    X, Y = np.meshgrid(xs, ys)
    net = greedy_net(X.ravel(), Y.ravel(), r / 2, quotient_metric(1.0))
    cover = ball_cover(net, r, period=1.0)
    nc = nerve(cover, BallOracle(cover), dim_cap=args.dim_cap)
    C, D = complexity_constants(led)
    area = 1 / y_bot - 1 / y_top
    rep = check_DC(nc, D, C * area)
    print(f"band {y_bot:.4f} < y < {y_top:.4f}, area {area:.6f}")
    print(f"net size {len(net)}, f-vector {nc.f_vector()}")
    print(f"max degree {nc.max_degree()} <= N(2, r/2, 2r) = {N_packing(2, r / 2, 2 * r)}")
    print(f"(D, C) check passed: {rep.passed}")


if __name__ == "__main__":
    main()
