"""Least common period of commensurate periods (rational ratio test)."""

from fractions import Fraction
from math import gcd

from .errors import IncommensuratePeriods

MAX_DENOMINATOR = 10**6
RATIO_TOL = 1e-9


def _lcm(a, b):
    return a * b // gcd(a, b)


def common_period(periods, *, base=None, max_denominator=MAX_DENOMINATOR):
    """Least common period of ``periods``.

    Ratios to the first period are matched to fractions with denominators up
    to ``max_denominator``; a mismatch larger than 1e-9 (relative) raises
    :class:`IncommensuratePeriods`. With ``base`` given, every period must
    divide ``base`` an integer number of times and ``base`` is returned.
    """
    periods = [float(p) for p in periods if p is not None]
    if any(not p > 0 for p in periods):
        raise ValueError("periods must be positive")
    if base is not None:
        base = float(base)
        for p in periods:
            k = base / p
            if abs(k - round(k)) > RATIO_TOL * max(1.0, k):
                raise IncommensuratePeriods(
                    f"period {p!r} does not divide the base period {base!r} "
                    f"(ratio {k!r} is not an integer)")
        return base
    if not periods:
        raise ValueError("need at least one period")
    ref = periods[0]
    num = 1
    for p in periods[1:]:
        ratio = p / ref
        frac = Fraction(ratio).limit_denominator(max_denominator)
        if abs(float(frac) - ratio) > RATIO_TOL * ratio:
            raise IncommensuratePeriods(
                f"periods {ref!r} and {p!r} have no rational ratio with "
                f"denominator <= {max_denominator}")
        num = _lcm(num, frac.numerator)
    # lcm of reduced fractions p_i/q_i is lcm(p_i)/gcd(q_i), and q_0 = 1.
    return ref * num
