#!/usr/bin/env python3
"""Regenerate frozen references for the joint survival probability of a
correlated two-dimensional Brownian motion with drift below upper barriers:

  S = P( sup_{t<=T} (B1(t) - g1 t) < u1, sup_{t<=T} (B2(t) - g2 t) < u2 )

computed from the wedge eigenfunction expansion (scipy quadrature + scaled
Bessel). See include/ruinlab/diffusion.hpp for the formula.

Output: tests/data/bm_survival_reference.inc
"""
import os

import numpy as np
from scipy import special, integrate

CASES = [
    # (u1, u2, g1, g2, S11, S22, rho, T)
    (10.0, 10.0, 0.1, 0.1, 2.07, 2.07, -0.5, 50.0),
    (10.0, 10.0, 0.1, 0.1, 2.07, 2.07, 0.0, 50.0),
    (10.0, 10.0, 0.1, 0.1, 2.07, 2.07, 0.27 / 2.07, 50.0),
    (10.0, 10.0, 0.1, 0.1, 2.07, 2.07, 0.5, 50.0),
    (10.0, 10.0, 0.1, 0.1, 2.07, 2.07, 0.9, 50.0),
    (4.0, 9.0, -0.05, 0.2, 1.0, 3.0, -0.3, 20.0),
    (4.0, 9.0, -0.05, 0.2, 1.0, 3.0, 0.6, 20.0),
]


def survival(u1, u2, g1, g2, S11, S22, rho, T, nmax=600, tol=1e-13):
    s1, s2 = np.sqrt(S11), np.sqrt(S22)
    c1, c2 = g1 / s1, g2 / s2
    z01, z02 = u1 / s1, u2 / s2
    alpha = np.arccos(-rho)
    om = 1.0 - rho * rho
    a1 = (c1 - rho * c2) / om
    a2 = (c2 - rho * c1) / om
    r0 = np.sqrt((z01 * z01 - 2 * rho * z01 * z02 + z02 * z02) / om)
    v1 = (z01 - rho * z02) / np.sqrt(om)
    theta0 = np.arctan2(z02, v1)
    pref = np.exp(-a1 * z01 - a2 * z02 - (c1 * a1 + c2 * a2) * T / 2.0)

    def f(r, th):
        x = r * r0 / T
        tot, small = 0.0, 0
        for n in range(1, nmax + 1):
            term = (np.sin(n * np.pi * theta0 / alpha)
                    * np.sin(n * np.pi * th / alpha)
                    * special.ive(n * np.pi / alpha, x))
            tot += term
            if abs(term) < tol * (abs(tot) + 1e-300):
                small += 1
                if small >= 2 and n >= 4:
                    break
            else:
                small = 0
        g = a1 * r * np.sin(alpha - th) + a2 * r * np.sin(th) \
            - (r - r0) ** 2 / (2.0 * T)
        return r * np.exp(g) * tot

    rmax = r0 + max(0.0, a1 + abs(a2)) * T + 14.0 * np.sqrt(T)
    val, _ = integrate.dblquad(f, 0.0, alpha, 0.0, rmax,
                               epsabs=1e-12, epsrel=1e-10)
    return pref * (2.0 / (alpha * T)) * val


def main():
    out = os.path.join(os.path.dirname(__file__), "..", "tests", "data",
                       "bm_survival_reference.inc")
    with open(out, "w") as f:
        f.write("// Correlated BM joint survival references (scipy).\n")
        f.write("// Generated by tools/gen_bm_survival_reference.py.\n")
        f.write("inline constexpr struct {\n")
        f.write("    double u1, u2, g1, g2, s11, s22, rho, T, survival;\n")
        f.write("} kBmSurvivalReference[] = {\n")
        for case in CASES:
            v = float(survival(*case))
            vals = ", ".join(repr(float(x)) for x in case)
            f.write(f"    {{{vals}, {v!r}}},\n")
        f.write("};\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
