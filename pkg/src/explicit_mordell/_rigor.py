"""Certified real arithmetic on top of arb balls.

Every real quantity in the package is an ``flint.arb`` ball that is known to
contain the true value.  An *upper bound* is read off as the right endpoint of
the ball, a *lower bound* as the left endpoint.  Endpoints are extracted as
exact dyadic fractions, so ceilings and floors of bounds are exact integers.
"""

from __future__ import annotations

import math
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from fractions import Fraction

import gmpy2
from flint import arb, fmpq, fmpz

Real = arb


def to_arb(value) -> arb:
    """Convert an exact number (or decimal literal string) to an enclosing ball."""
    if isinstance(value, arb):
        return value
    if isinstance(value, str):
        return arb(value)
    if isinstance(value, (int, type(gmpy2.mpz(0)))):
        return arb(fmpz(int(value)))
    if isinstance(value, (Fraction, type(gmpy2.mpq(0)))):
        return arb(fmpq(int(value.numerator), int(value.denominator)))
    if isinstance(value, float):
        return arb(value)
    if isinstance(value, (fmpz, fmpq)):
        return arb(value)
    raise TypeError(f"cannot convert {type(value).__name__} to a certified real")


def literal(text: str) -> arb:
    """A decimal constant as printed, enclosed exactly."""
    return arb(text)


LOG2 = arb.const_log2()


def log_abs(value) -> arb:
    """Enclosure of log|value| for a nonzero exact number."""
    if value == 0:
        raise ValueError("log of zero")
    if isinstance(value, (Fraction, type(gmpy2.mpq(0)))):
        num, den = abs(int(value.numerator)), int(value.denominator)
        return arb(fmpz(num)).log() - arb(fmpz(den)).log()
    return to_arb(abs(value)).log()


def _dyadic(ball: arb) -> Fraction:
    man, exp = ball.man_exp()
    man, exp = int(man), int(exp)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2 ** (-exp))


def endpoints(x: arb) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints (lo, hi) of a ball."""
    if not x.is_finite():
        raise ValueError("non-finite enclosure")
    mid = _dyadic(x.mid())
    rad = _dyadic(x.rad())
    return mid - rad, mid + rad


def upper(x: arb) -> Fraction:
    return endpoints(x)[1]


def lower(x: arb) -> Fraction:
    return endpoints(x)[0]


def float_up(x: arb) -> float:
    """A double that is >= every point of ``x``."""
    hi = upper(x)
    f = float(hi)
    if Fraction(f) < hi:
        f = math.nextafter(f, math.inf)
    return f


def float_down(x: arb) -> float:
    lo = lower(x)
    f = float(lo)
    if Fraction(f) > lo:
        f = math.nextafter(f, -math.inf)
    return f


def ceil_up(x: arb) -> int:
    return math.ceil(upper(x))


def floor_down(x: arb) -> int:
    return math.floor(lower(x))


def interval(lo, hi) -> arb:
    """Smallest convenient ball containing both endpoints."""
    return to_arb(lo).union(to_arb(hi))


def max_ball(*xs: arb) -> arb:
    """Ball containing max of the enclosed values."""
    out = xs[0]
    for x in xs[1:]:
        out = out.max(x)
    return out


def min_ball(*xs: arb) -> arb:
    out = xs[0]
    for x in xs[1:]:
        out = out.min(x)
    return out


def decimal_up(x: arb, digits: int = 12) -> str:
    """Decimal string rounded toward +infinity with ``digits`` significant digits."""
    hi = upper(x)
    ctx = Context(prec=digits, rounding=ROUND_CEILING)
    return str(ctx.divide(Decimal(hi.numerator), Decimal(hi.denominator))) if hi else "0"


def decimal_down(x: arb, digits: int = 12) -> str:
    lo = lower(x)
    ctx = Context(prec=digits, rounding=ROUND_FLOOR)
    return str(ctx.divide(Decimal(lo.numerator), Decimal(lo.denominator))) if lo else "0"
