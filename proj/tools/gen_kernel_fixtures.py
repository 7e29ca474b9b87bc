#!/usr/bin/env python3
"""Regenerates the kernel fixture tables in tests/fixtures.

Columns: input_x, input_y, A_or_eps, out_x, out_y (12 significant digits).
"""
import argparse
import csv
import pathlib
from fractions import Fraction

import mpmath

mpmath.mp.dps = 40
HEADER = ["input_x", "input_y", "A_or_eps", "out_x", "out_y"]


def fmt(v):
    return mpmath.nstr(mpmath.mpf(v), 12, strip_zeros=True, min_fixed=-4, max_fixed=12)


def fmt_exact(q: Fraction):
    s = fmt(mpmath.mpf(q.numerator) / q.denominator)
    if Fraction(s) != q:
        raise ValueError(f"{q} is not exact at 12 significant digits")
    return s


def f_a(v: Fraction, a: Fraction) -> Fraction:
    m = abs(v)
    if m <= a:
        return v
    if m >= a + 1:
        capped = a
    else:
        t = m - a
        capped = a + t - 6 * t**3 + 8 * t**4 - 3 * t**5
    return capped if v > 0 else -capped


def grad_green(x, y, scale):
    r2 = x * x + y * y
    c = -scale / (mpmath.pi * r2)
    return c * x, c * y


def mollified_gaussian(x, y, eps):
    r2 = x * x + y * y
    mass = -mpmath.expm1(-r2 / (2 * eps * eps))
    c = -mass / (mpmath.pi * r2)
    return c * x, c * y


def write(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        w.writerows(rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for a in (Fraction(1, 2), Fraction(1), Fraction(47, 20), Fraction(5)):
        for k in range(-160, 161, 3):
            vx = Fraction(k, 20)
            vy = Fraction(-k + 7, 20)
            rows.append([fmt_exact(vx), fmt_exact(vy), fmt_exact(a), fmt_exact(f_a(vx, a)), fmt_exact(f_a(vy, a))])
    write(out / "f_a.csv", rows)

    rows = []
    for i in range(60):
        r = mpmath.mpf(10) ** (-3 + 5 * mpmath.mpf(i) / 59)
        th = 2 * mpmath.pi * mpmath.mpf(i) * (mpmath.sqrt(5) - 1) / 2
        x, y = mpmath.mpf(fmt(r * mpmath.cos(th))), mpmath.mpf(fmt(r * mpmath.sin(th)))
        gx, gy = grad_green(x, y, 1)
        rows.append([fmt(x), fmt(y), "1", fmt(gx), fmt(gy)])
    write(out / "grad_green.csv", rows)

    rows = []
    for eps in ("0.05", "0.25", "1"):
        e = mpmath.mpf(eps)
        for i in range(40):
            r = e * mpmath.mpf(10) ** (-4 + 5.5 * mpmath.mpf(i) / 39)
            th = 2 * mpmath.pi * mpmath.mpf(i) * (mpmath.sqrt(5) - 1) / 2
            x, y = mpmath.mpf(fmt(r * mpmath.cos(th))), mpmath.mpf(fmt(r * mpmath.sin(th)))
            kx, ky = mollified_gaussian(x, y, e)
            rows.append([fmt(x), fmt(y), eps, fmt(kx), fmt(ky)])
    write(out / "mollified_gaussian.csv", rows)


if __name__ == "__main__":
    main()
