#!/usr/bin/env python3
"""Regenerate the 7-point Gauss / 15-point Kronrod nodes and weights on
[-1, 1] at 50 significant digits.

Method, all in exact-or-high precision arithmetic (no copied tables):
  1. Gauss nodes: roots of the Legendre polynomial P7 (sympy, exact
     coefficients; mpmath polyroots). Weights w = 2 / ((1 - x^2) P7'(x)^2).
  2. Kronrod extension: the 8 added nodes are the roots of the monic
     degree-8 Stieltjes polynomial E8 satisfying
         integral_{-1}^{1} E8(x) P7(x) x^k dx = 0   for k = 0..7.
     By parity E8 is even, so the conditions reduce to a 4x4 rational
     linear system solved exactly with sympy.
  3. Kronrod weights: solve the moment-exactness system on even powers
     x^0..x^14 over the 15 nodes (symmetric rule), then verify exactness
     through degree 22 and positivity of all weights.

Output: src/numerics/gauss_kronrod.inc
"""
import os

import sympy as sp
from mpmath import mp, mpf, polyroots, matrix, lu_solve

mp.dps = 50


def legendre_p7():
    x = sp.Symbol("x")
    return sp.legendre(7, x), x


def main():
    p7, x = legendre_p7()
    p7c = [sp.Rational(c) for c in sp.Poly(p7, x).all_coeffs()]

    # Gauss-7 nodes (roots of P7) and weights
    g_nodes = polyroots([mpf(str(c)) for c in p7c], maxsteps=200, extraprec=120)
    g_nodes = sorted(g_nodes, key=lambda r: r.real)
    dp7 = sp.diff(p7, x)
    g_weights = []
    for r in g_nodes:
        d = mpf(str(sp.nsimplify(0))) if False else None
        dv = sp.lambdify(x, dp7, "mpmath")(r)
        g_weights.append(2 / ((1 - r * r) * dv * dv))

    # Stieltjes polynomial E8(x) = x^8 + c3 x^6 + c2 x^4 + c1 x^2 + c0 (even, monic)
    c0, c1, c2, c3 = sp.symbols("c0 c1 c2 c3")
    e8 = x**8 + c3 * x**6 + c2 * x**4 + c1 * x**2 + c0
    eqs = []
    for k in range(1, 8, 2):  # even k vanish by parity (odd integrand)
        integ = sp.integrate(e8 * p7 * x**k, (x, -1, 1))
        eqs.append(sp.Eq(integ, 0))
    sol = sp.solve(eqs, [c0, c1, c2, c3], dict=True)
    assert len(sol) == 1
    e8_exact = e8.subs(sol[0])
    e8c = [sp.Rational(c) for c in sp.Poly(e8_exact, x).all_coeffs()]
    k_new = polyroots([mpf(str(c)) for c in e8c], maxsteps=400, extraprec=160)
    k_new = sorted(k_new, key=lambda r: r.real)

    all_nodes = sorted(list(g_nodes) + list(k_new), key=lambda r: r.real)
    assert all(abs(sp.im(complex(v))) == 0 for v in map(complex, all_nodes))

    # Kronrod weights from even-moment exactness (rule is symmetric).
    # Unknowns: weights of the 8 nonnegative-node columns (node 0 plus 7 pairs).
    nonneg = [v for v in all_nodes if v >= -mpf("1e-40")]
    assert len(nonneg) == 8
    A = matrix(8, 8)
    b = matrix(8, 1)
    for i in range(8):  # moments x^{2i}
        for j, v in enumerate(nonneg):
            scale = 1 if abs(v) < mpf("1e-40") else 2
            A[i, j] = scale * v ** (2 * i)
        b[i] = mpf(2) / (2 * i + 1)
    w = lu_solve(A, b)

    # map back to all 15 nodes
    k_weights = []
    for v in all_nodes:
        av = abs(v)
        idx = min(range(8), key=lambda j: abs(abs(nonneg[j]) - av))
        k_weights.append(w[idx])

    # verification: positivity, exactness to degree 22 (K15) and 13 (G7)
    assert all(wi > 0 for wi in k_weights) and all(wi > 0 for wi in g_weights)
    for deg in range(0, 23, 2):
        exact = mpf(2) / (deg + 1)
        got = sum(wi * v**deg for wi, v in zip(k_weights, all_nodes))
        assert abs(got - exact) < mpf("1e-45"), (deg, got - exact)
    for deg in range(0, 14, 2):
        exact = mpf(2) / (deg + 1)
        got = sum(wi * v**deg for wi, v in zip(g_weights, g_nodes))
        assert abs(got - exact) < mpf("1e-45"), (deg, got - exact)

    out = os.path.join(os.path.dirname(__file__), "..", "src", "numerics",
                       "gauss_kronrod.inc")
    with open(out, "w") as f:
        f.write("// 7-point Gauss / 15-point Kronrod nodes and weights on"
                " [-1, 1].\n")
        f.write("// Generated by tools/gen_gauss_kronrod.py; do not edit.\n")
        f.write("// Kronrod order: ascending; Gauss points are entries"
                " 1,3,5,7,9,11,13.\n")
        f.write("inline constexpr double kKronrodNode[15] = {\n")
        for v in all_nodes:
            f.write(f"    {float(v)!r},\n")
        f.write("};\n")
        f.write("inline constexpr double kKronrodWeight[15] = {\n")
        for v in k_weights:
            f.write(f"    {float(v)!r},\n")
        f.write("};\n")
        f.write("inline constexpr double kGaussWeight[7] = {\n")
        for v in g_weights:
            f.write(f"    {float(v)!r},\n")
        f.write("};\n")
    print(f"wrote {out}")
    # confirm interleaving claim in the header comment
    for i, v in enumerate(all_nodes):
        tag = "G" if any(abs(v - g) < mpf("1e-40") for g in g_nodes) else "K"
        print(i, tag, float(v))


if __name__ == "__main__":
    main()
