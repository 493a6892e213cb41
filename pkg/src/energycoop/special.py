"""Regularized incomplete gamma function.

P(a, x) is evaluated with the power series

    P(a, x) = x^a e^-x / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n))

when x < a + 1, and otherwise as 1 - Q(a, x) with Q from the Legendre
continued fraction evaluated by the modified Lentz method.  The series is
relatively accurate for small P, which is the regime of interest for
decode-failure probabilities around 1e-8.
"""

import math

EPS = 1e-15
TINY = 1e-300
MAX_ITER = 10_000


def _prefactor(a, x):
    # x^a e^-x / Gamma(a), in log space
    return math.exp(a * math.log(x) - x - math.lgamma(a))


def _series(a, x):
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * EPS:
            break
    else:
        raise ArithmeticError(f"gamma series did not converge (a={a}, x={x})")
    return total * _prefactor(a, x)


def _continued_fraction(a, x):
    b = x + 1.0 - a
    c = 1.0 / TINY
    d = 1.0 / b
    h = d
    for i in range(1, MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < TINY:
            d = TINY
        c = b + an / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            break
    else:
        raise ArithmeticError(f"gamma continued fraction did not converge (a={a}, x={x})")
    return h * _prefactor(a, x)


def gammainc_lower(a, x):
    """Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0."""
    if a <= 0:
        raise ValueError("a must be positive")
    if math.isnan(x) or x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        p = _series(a, x)
    else:
        p = 1.0 - _continued_fraction(a, x)
    return min(max(p, 0.0), 1.0)


def gammainc_upper(a, x):
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0:
        raise ValueError("a must be positive")
    if math.isnan(x) or x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        q = 1.0 - _series(a, x)
    else:
        q = _continued_fraction(a, x)
    return min(max(q, 0.0), 1.0)


def erlang_cdf(k, x, mean=1.0):
    """CDF at ``x`` of the sum of ``k`` i.i.d. exponentials with the given mean."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if x <= 0:
        return 0.0
    return gammainc_lower(float(k), x / mean)
