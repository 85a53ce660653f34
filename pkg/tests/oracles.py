"""Independent reference implementations used by the tests."""

from collections import Counter
from fractions import Fraction

import mpmath


def census_oracle(terms, a, b):
    """(max count, witness c) by a plain map of differences over all pairs."""
    counts = Counter(a * x - b * y for x in terms for y in terms)
    if a == b:
        counts.pop(0, None)
    if not counts:
        return 0, None
    best = max(counts.values())
    c = min((c for c, v in counts.items() if v == best), key=lambda c: (abs(c), c))
    return best, c


def normal_tail_mp(t, dps=40):
    with mpmath.workdps(dps):
        return mpmath.erfc(mpmath.mpf(t) / mpmath.sqrt(2)) / 2


def frac_mul_oracle(n, p, B):
    """Fractional part of n p / 2^B as an exact rational."""
    q = Fraction(n * p, 1 << B)
    return q - (q.numerator // q.denominator)
