"""Complementary error function.

Self-contained double-precision implementation:

* ``|x| <= 1.25`` — alternating Maclaurin series for erf, then
  ``erfc = 1 - erf``.  The series terms decay monotonically past
  ``n > x**2`` so there is no cancellation blow-up in this range.
* ``x > 1.25`` — modified Lentz continued fraction for the upper
  incomplete gamma function at ``a = 1/2`` evaluated at ``x**2``.
* ``x < -1.25`` — reflection ``erfc(-x) = 2 - erfc(x)``.

Absolute error is below 1e-13 on [-6, 6] (checked in the test suite
against an arbitrary-precision oracle), comfortably inside the 1e-12
budget the probability formulas require.
"""

import math

__all__ = ["erfc", "erf"]

_SQRT_PI = math.sqrt(math.pi)
_CROSSOVER = 1.25
_MAX_ITER = 300


def _erf_series(x: float) -> float:
    # erf(x) = 2/sqrt(pi) * sum_n (-1)^n x^(2n+1) / (n! (2n+1))
    term = x
    total = x
    x2 = x * x
    for n in range(1, _MAX_ITER):
        term *= -x2 * (2 * n - 1) / (n * (2 * n + 1))
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    return 2.0 / _SQRT_PI * total


def _erfc_continued_fraction(x: float) -> float:
    # Upper incomplete gamma CF: erfc(x) = x exp(-x^2)/sqrt(pi) * h,
    # h = 1/(x^2+1/2 - 1*(1/2)/(x^2+5/2 - 2*(3/2)/(x^2+9/2 - ...)))
    a = 0.5
    x2 = x * x
    tiny = 1e-300
    b = x2 + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return math.exp(-x2) * x / _SQRT_PI * h


def erfc(x: float) -> float:
    """Complementary error function, 2/sqrt(pi) * integral_x^inf exp(-s^2) ds."""
    x = float(x)
    if math.isnan(x):
        return x
    if x >= 0.0:
        if x <= _CROSSOVER:
            return 1.0 - _erf_series(x)
        return _erfc_continued_fraction(x)
    return 2.0 - erfc(-x)


def erf(x: float) -> float:
    """Error function, ``1 - erfc(x)``."""
    x = float(x)
    if abs(x) <= _CROSSOVER:
        return _erf_series(x)
    return 1.0 - erfc(x)
