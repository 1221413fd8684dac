"""Independent numerical oracles for the test-suite.

Everything here avoids the library's own quadrature/interpolation
machinery, so expected values checked against these routines are
genuinely independent of the code paths under test.
"""

import numpy as np


def adaptive_simpson(f, a, b, tol=1e-13, max_depth=40):
    """Adaptive Simpson quadrature with Richardson correction."""

    def simp(x0, f0, x1, f1, x2, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, f0, xm, fm, x2, f2, whole, tol, depth):
        xl, xr = 0.5 * (x0 + xm), 0.5 * (xm + x2)
        fl, fr = f(xl), f(xr)
        left = simp(x0, f0, xl, fl, xm, fm)
        right = simp(xm, fm, xr, fr, x2, f2)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return recurse(x0, f0, xl, fl, xm, fm, left, 0.5 * tol, depth - 1) + recurse(
            xm, fm, xr, fr, x2, f2, right, 0.5 * tol, depth - 1
        )

    if b == a:
        return 0.0
    fa, fb = f(a), f(b)
    xm = 0.5 * (a + b)
    fm = f(xm)
    return recurse(a, fa, xm, fm, b, fb, simp(a, fa, xm, fm, b, fb), tol, max_depth)


def cumulative_simpson(f, points, tol=1e-14):
    """Antiderivative values int_0^x f at the sorted query points."""
    total = 0.0
    prev = 0.0
    out = np.empty(len(points))
    for i, x in enumerate(points):
        if x > prev:
            total += adaptive_simpson(f, prev, x, tol)
            prev = x
        out[i] = total
    return out


def random_polynomial(rng, degree):
    """Polynomial with uniform [-1, 1] coefficients up to ``degree``."""
    return np.polynomial.Polynomial(rng.uniform(-1.0, 1.0, degree + 1))
