"""Clebsch-Gordan coefficients and Wigner 3j symbols (Condon-Shortley phases)."""

from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt


def half_integer(x):
    """Exact ``Fraction`` for an integer or half-integer, else ``ValueError``."""
    f = Fraction(x).limit_denominator(1000)
    if (2 * f).denominator != 1 or abs(float(f) - float(x)) > 1e-9:
        raise ValueError(f"{x!r} is not an integer or half-integer")
    return f


def _is_int(f):
    return f.denominator == 1


@lru_cache(maxsize=None)
def _cg(j1, m1, j2, m2, J, M):
    if m1 + m2 != M:
        return 0.0
    if not (abs(j1 - j2) <= J <= j1 + j2):
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(M) > J:
        return 0.0
    if not (_is_int(j1 + m1) and _is_int(j2 + m2) and _is_int(J + M) and _is_int(j1 + j2 + J)):
        return 0.0
    ints = lambda *xs: [int(x) for x in xs]  # noqa: E731
    a, b, c, d = ints(J + j1 - j2, J - j1 + j2, j1 + j2 - J, j1 + j2 + J + 1)
    pre = Fraction(2 * J + 1)
    pre *= Fraction(factorial(a) * factorial(b) * factorial(c), factorial(d))
    e, f, g, h, i, k = ints(J + M, J - M, j1 - m1, j1 + m1, j2 - m2, j2 + m2)
    pre *= factorial(e) * factorial(f) * factorial(g) * factorial(h) * factorial(i) * factorial(k)
    total = Fraction(0)
    for n in range(0, c + 1):
        args = ints(j1 + j2 - J - n, j1 - m1 - n, j2 + m2 - n, J - j2 + m1 + n, J - j1 - m2 + n)
        if min(args) < 0:
            continue
        den = factorial(n)
        for x in args:
            den *= factorial(x)
        total += Fraction((-1) ** n, den)
    sign = 1.0 if total >= 0 else -1.0
    return sign * sqrt(pre * total * total)


def cg(j1, m1, j2, m2, J, M):
    """``<j1 m1; j2 m2 | J M>``; zero for any inconsistent set of quantum numbers."""
    try:
        args = tuple(half_integer(x) for x in (j1, m1, j2, m2, J, M))
    except ValueError:
        return 0.0
    return _cg(*args)


def wigner_3j(j1, j2, j3, m1, m2, m3):
    """Wigner 3j symbol via its relation to the Clebsch-Gordan coefficient."""
    try:
        j1, j2, j3, m1, m2, m3 = (half_integer(x) for x in (j1, j2, j3, m1, m2, m3))
    except ValueError:
        return 0.0
    phase = j1 - j2 - m3
    if not _is_int(phase):
        return 0.0
    sign = -1.0 if int(phase) % 2 else 1.0
    return sign / sqrt(float(2 * j3 + 1)) * _cg(j1, m1, j2, m2, j3, -m3)
