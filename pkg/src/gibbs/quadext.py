"""Recognition of numeric values as elements of a real quadratic field.

The commuting-family pipeline diagonalizes a matrix family numerically and
then needs the eigenvector matrix exactly.  In the cases handled here the
entries live in Q or in Q(sqrt(k)) for a small squarefree k; this module
recovers a + b*sqrt(k) with rational a, b from a high-precision float by
integer-relation detection (LLL on the row lattice of (x, sqrt(k), 1)).
"""

from fractions import Fraction

import mpmath as mp

from .lattice import lll_reduce

__all__ = ["try_rational", "try_quadratic", "find_quadratic", "squarefree_list"]


def squarefree_list(bound):
    """Squarefree integers 2..bound in increasing order."""
    out = []
    for k in range(2, bound + 1):
        j = 2
        sf = True
        while j * j <= k:
            if k % (j * j) == 0:
                sf = False
                break
            j += 1
        if sf:
            out.append(k)
    return out


def _digits():
    return int(mp.mp.dps)


def try_rational(x, max_den=10**6):
    """Nearest fraction with bounded denominator, if it matches x tightly."""
    f = Fraction(str(mp.nstr(x, min(_digits() - 2, 40), strip_zeros=False))).limit_denominator(max_den)
    tol = mp.mpf(10) ** (-(2 * _digits()) // 3) * (abs(x) + 1)
    if abs(x - mp.mpf(f.numerator) / f.denominator) < tol:
        return f
    return None


def try_quadratic(x, k, coeff_bound=10**5):
    """Express x as a + b*sqrt(k) with small rational a, b, or None."""
    s = mp.sqrt(k)
    j = max(18, (2 * _digits()) // 3)
    S = mp.mpf(10) ** j
    rows = [
        [int(mp.nint(x * S)), 1, 0, 0],
        [int(mp.nint(s * S)), 0, 1, 0],
        [int(S), 0, 0, 1],
    ]
    for row in lll_reduce(rows):
        p, q, r = row[1], row[2], row[3]
        if p == 0:
            continue
        if max(abs(p), abs(q), abs(r)) > coeff_bound:
            continue
        res = abs(p * x + q * s + r)
        if res < mp.mpf(10) ** (-(j // 2)) * (abs(x) + 1) * max(abs(p), 1):
            return (-Fraction(r, p), -Fraction(q, p))
    return None


def find_quadratic(x, max_k=100):
    """Recognize x as (a, b, k) with x = a + b*sqrt(k), preferring small k.

    k = 1 encodes a plain rational (b folded into a).  Returns None when no
    bounded-height representation fits at the working precision.
    """
    f = try_rational(x)
    if f is not None:
        return (f, Fraction(0), 1)
    for k in squarefree_list(max_k):
        ab = try_quadratic(x, k)
        if ab is not None and ab[1] != 0:
            return (ab[0], ab[1], k)
    return None
