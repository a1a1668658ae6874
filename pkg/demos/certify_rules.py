#!/usr/bin/env python3
"""Compare quadrature rules by their polynomial exactness degree.

A rule is exact through degree t when every weighted Weyl sum up to t
vanishes (the constant term is pinned by the weight sum).  Shipped
designs achieve this with N = (t+1)^2 points; the spiral construction
with the same budget is only approximate, and Gauss-Legendre grids need
about twice as many points.
"""
from sphdesign import (certify, gauss_legendre_grid, load_design,
                       spiral_points, uniform_random_points)


def line(tag, ps, t):
    v = certify(ps, t)
    mark = "pass" if v["pass"] else "FAIL"
    print(f"  {tag:<28} N={ps.n:4d}  max |weighted Weyl sum| = "
          f"{v['max_weighted_weyl']:.3e}  {mark}")


def main():
    for t in (16, 32):
        print(f"\ndegree t = {t}")
        line("shipped design", load_design(t), t)
        line("spiral, same N", spiral_points((t + 1) ** 2), t)
        line("gauss-legendre grid", gauss_legendre_grid(t), t)
        line("uniform random, same N", uniform_random_points((t + 1) ** 2, 0), t)


if __name__ == "__main__":
    main()
