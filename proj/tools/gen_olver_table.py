#!/usr/bin/env python3
"""Regenerate the u_k(t) polynomial coefficient table used by the uniform
asymptotic (Olver) expansion of the modified Bessel function I_nu.

The polynomials satisfy the recurrence

    u_0(t) = 1
    u_{k+1}(t) = t^2 (1 - t^2) / 2 * u_k'(t)
                 + 1/8 * integral_0^t (1 - 5 s^2) u_k(s) ds

and u_k(t) has nonzero coefficients only for powers t^k, t^{k+2}, ..., t^{3k}.
The table stores, for each k, the k+1 coefficients of u_k(t) / t^k viewed as a
polynomial in t^2, lowest power first, so the evaluator can run Horner on t^2.

Output: src/numerics/olver_table.inc (checked in; rerun only if KMAX changes).
"""
import os

import sympy as sp

KMAX = 10

t, s = sp.symbols("t s")


def u_polynomials(kmax):
    us = [sp.Integer(1)]
    for _ in range(kmax):
        u = us[-1]
        us.append(sp.expand(
            t**2 * (1 - t**2) / 2 * sp.diff(u, t)
            + sp.Rational(1, 8) * sp.integrate((1 - 5 * s**2) * u.subs(t, s), (s, 0, t))
        ))
    return us


def main():
    out = os.path.join(os.path.dirname(__file__), "..", "src", "numerics",
                       "olver_table.inc")
    lines = [
        "// Coefficients of u_k(t)/t^k as polynomials in t^2, lowest power first.",
        "// Generated by tools/gen_olver_table.py; do not edit by hand.",
        f"inline constexpr int kOlverTerms = {KMAX + 1};",
    ]
    offsets = [0]
    coefs = []
    for k, u in enumerate(u_polynomials(KMAX)):
        p = sp.Poly(u, t)
        bycoef = {m[0]: c for m, c in zip(p.monoms(), p.coeffs())}
        row = []
        for power in range(k, 3 * k + 1, 2):
            c = bycoef.get(power, sp.Integer(0))
            row.append(sp.Float(c, 25))
        assert len(row) == k + 1
        coefs.extend(row)
        offsets.append(offsets[-1] + len(row))
    lines.append("inline constexpr int kOlverOffset[] = {"
                 + ", ".join(str(o) for o in offsets) + "};")
    lines.append("inline constexpr double kOlverCoef[] = {")
    for c in coefs:
        lines.append(f"    {float(c)!r},")
    lines.append("};")
    with open(out, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {out}: {len(coefs)} coefficients")


if __name__ == "__main__":
    main()
