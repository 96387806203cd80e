"""Large-argument expansion J0(x) = sqrt(2/(pi x)) (P(x) cos chi - Q(x) sin chi),
chi = x - pi/4, with P = sum P0[k] / x^(2k) and Q = sum Q0[k] / x^(2k+1).

From x >= SCAN_SWITCH, N_TERMS terms are accurate to a few ulps.
"""
from fractions import Fraction

SCAN_SWITCH = 25.0
N_TERMS = 8


def _coefficients(n):
    a = [Fraction(1)]
    for k in range(1, 2 * n + 1):
        a.append(a[-1] * Fraction(-(2 * k - 1) ** 2, 8 * k))
    p = [float((-1) ** k * a[2 * k]) for k in range(n)]
    q = [float((-1) ** k * a[2 * k + 1]) for k in range(n)]
    return p, q


P0, Q0 = _coefficients(N_TERMS)
