#!/usr/bin/env python3
"""Regenerate frozen references for the closed-form finite-time ruin
probability of the compound-Poisson model with exponential claims
(premium r, rate lam, mean claim mu, capital u, horizon T), computed with
mpmath quadrature at 30 significant digits.

Output: tests/data/ruin_reference.inc
"""
import os

from mpmath import mp, mpf, exp, sin, cos, sqrt, pi, quad

mp.dps = 30

CASES = [
    # (lam, mu, r, u, T)
    (0.45, 1.0, 1.0, 0.0, 10.0),
    (0.45, 1.0, 1.0, 5.0, 50.0),
    (0.45, 1.0, 1.0, 10.0, 10.0),
    (1.8, 1.0, 1.0, 0.0, 50.0),
    (1.8, 1.0, 1.0, 5.0, 10.0),
    (1.8, 1.0, 1.0, 10.0, 50.0),
    (1.0, 1.0, 1.0, 5.0, 20.0),     # critical premium: r == lam * mu
    (0.9, 2.0, 2.5, 8.0, 30.0),     # non-unit mean and premium
]


def psi(lam, mu, r, u, T):
    lam, mu, r, u, T = map(mpf, (lam, mu, r, u, T))
    rho_f = sqrt(lam * mu / r)

    def integrand(th):
        e = 2 * T * sqrt(r * lam / mu) * cos(th) - (r / mu + lam) * T \
            + (u / mu) * (rho_f * cos(th) - 1)
        f1 = (lam * mu / r) * exp(e)
        f2 = 2 * sin(th) * sin((u * sqrt(lam / (r * mu))) * sin(th) + th)
        f3 = (1 - rho_f) ** 2 + 4 * rho_f * sin(th / 2) ** 2
        return f1 * f2 / f3

    I = quad(integrand, [0, pi]) / pi
    if r > lam * mu:
        return (lam * mu / r) * exp(-(1 / mu - lam / r) * u) - I
    return 1 - I


def main():
    out = os.path.join(os.path.dirname(__file__), "..", "tests", "data",
                       "ruin_reference.inc")
    with open(out, "w") as f:
        f.write("// Finite-time ruin probabilities, exponential claims\n")
        f.write("// (mpmath quadrature). Generated by tools/gen_ruin_reference.py.\n")
        f.write("inline constexpr struct { double lam, mu, r, u, T, psi; } "
                "kRuinReference[] = {\n")
        for lam, mu, r, u, T in CASES:
            v = float(psi(lam, mu, r, u, T))
            f.write(f"    {{{lam!r}, {mu!r}, {r!r}, {u!r}, {T!r}, {v!r}}},\n")
        f.write("};\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
