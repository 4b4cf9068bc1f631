#!/usr/bin/env python3
"""Generate the frozen K0/K1 reference table with mpmath at 40 digits.

Arguments are first rounded to IEEE doubles so the table describes exactly
the inputs the C++ tests feed to macdonald_k. Output columns:
w_re, w_im, K0_re, K0_im, K1_re, K1_im
"""
import math
import sys

import mpmath as mp

mp.mp.dps = 40

RADII = [10 ** (-6 + i * (math.log10(50.0) + 6) / 24) for i in range(25)]
ANGLES_DEG = [-90, -67.5, -45, -22.5, 0, 22.5, 45, 67.5, 90]


def points():
    for r in RADII:
        for deg in ANGLES_DEG:
            if deg == 90:
                yield 0.0, r
            elif deg == -90:
                yield 0.0, -r
            elif deg == 0:
                yield r, 0.0
            else:
                t = math.radians(deg)
                yield r * math.cos(t), r * math.sin(t)
    # anchors
    yield 1.0, 0.0
    yield 30.0, 0.0
    yield 0.0, 1.0


def fmt(x):
    return mp.nstr(x, 25, min_fixed=0, max_fixed=0)


def main(out):
    with open(out, "w") as f:
        f.write("# w_re,w_im,K0_re,K0_im,K1_re,K1_im (mpmath, 40 digits)\n")
        for re, im in points():
            w = mp.mpc(re, im)
            k0 = mp.besselk(0, w)
            k1 = mp.besselk(1, w)
            f.write(",".join([repr(re), repr(im), fmt(k0.real), fmt(k0.imag),
                              fmt(k1.real), fmt(k1.imag)]) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "bessel_table.csv")
