#!/usr/bin/env python3
"""Regenerate the frozen reference table for exp(-x) I_nu(x) used by the
Bessel unit tests. Values come from mpmath at 40 significant digits and are
rounded to the nearest double.

Output: tests/data/bessel_reference.inc
"""
import os

from mpmath import mp, mpf, besseli, exp

mp.dps = 40

NUS = [0.0, 0.5, 1.0, 1.1676, 2.0, 3.5, 5.0, 10.0, 17.3, 24.9,
       26.5, 40.0, 100.0, 300.0, 580.0]
XS = [1e-8, 0.1, 1.0, 5.0, 10.0, 29.9, 30.0, 30.1, 50.0, 100.0,
      300.0, 700.0, 1500.0]


def main():
    out = os.path.join(os.path.dirname(__file__), "..", "tests", "data",
                       "bessel_reference.inc")
    rows = []
    for nu in NUS:
        for x in XS:
            v = exp(-mpf(x)) * besseli(mpf(nu), mpf(x))
            rows.append((nu, x, float(v)))
    with open(out, "w") as f:
        f.write("// exp(-x) I_nu(x) reference values (mpmath, 40 digits).\n")
        f.write("// Generated by tools/gen_bessel_reference.py.\n")
        f.write("inline constexpr struct { double nu, x, scaled; } "
                "kBesselReference[] = {\n")
        for nu, x, v in rows:
            f.write(f"    {{{nu!r}, {x!r}, {v!r}}},\n")
        f.write("};\n")
    print(f"wrote {out}: {len(rows)} rows")


if __name__ == "__main__":
    main()
