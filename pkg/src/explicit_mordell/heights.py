"""Weil, h2 and canonical heights with certified enclosures.

The canonical height uses the normalisation in which it is three times
Silverman's and 3/2 times the limit of h_W(x(2^k P)) / 4^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from flint import arb
from gmpy2 import mpz

from ._rigor import LOG2, interval, literal, log_abs, lower, to_arb, upper
from .ec_arith import ECPoint, EllipticCurveQ, as_mpq
from .errors import GuardExceeded, PointNotOnCurve

DEFAULT_EPS = 1e-3
GENERATOR_EPS = 2.5e-4
DEFAULT_MAX_BITS = 1 << 27

_SILVERMAN_C3 = literal("1.07")
_SILVERMAN_C4 = literal("0.973")


def weil_height(q) -> arb:
    """log max(|num|, |den|) of a rational in lowest terms."""
    q = as_mpq(q)
    if q == 0:
        return arb(0)
    return to_arb(max(abs(q.numerator), q.denominator)).log()


def h_infty(q) -> arb:
    """max(0, log|q|)."""
    q = as_mpq(q)
    if q == 0 or abs(q) <= 1:
        return arb(0)
    return log_abs(q)


def h2_point(E: EllipticCurveQ, P: ECPoint) -> arb:
    """Height of (1 : x : y) with the Euclidean norm at the infinite place."""
    if P.is_infinity:
        return arb(0)
    e = mpz(P.denominator_root)
    m, n = P.x.numerator, P.y.numerator
    return to_arb(e**6 + (m * e) ** 2 + n * n).log() / 2


def hw_curve(E: EllipticCurveQ) -> arb:
    """log max(1, |A|^(1/2), |B|^(1/3))."""
    candidates = [arb(0)]
    if E.A:
        candidates.append(log_abs(E.A) / 2)
    if E.B:
        candidates.append(log_abs(E.B) / 3)
    out = candidates[0]
    for c in candidates[1:]:
        out = out.max(c)
    return out


@dataclass(frozen=True)
class HeightDiffConstants:
    c3: arb
    c4: arb
    c5: arb


def silverman_band(E: EllipticCurveQ, rational_points: bool = True) -> HeightDiffConstants:
    """Constants with -c4 <= hhat/3 - h_W(x)/2 <= c3, plus the Zimmer-type c5."""
    hw_disc = weil_height(E.discriminant)
    hinf_j = h_infty(E.j_invariant)
    c3 = hw_disc / 12 + hinf_j / 12 + _SILVERMAN_C3
    c4 = weil_height(E.j_invariant) / 24 + hw_disc / 12 + hinf_j / 12 + _SILVERMAN_C4
    if rational_points:
        c5 = 3 * hw_curve(E) + 6 * LOG2
    else:
        from .explicit_constants import table1

        c5 = table1(E, rational_points=False).c1
    return HeightDiffConstants(c3, c4, c5)


def _double_x(A, B, X, Z):
    X2, Z2 = X * X, Z * Z
    num = X2 * X2 - 2 * A * X2 * Z2 - 8 * B * X * Z2 * Z + A * A * Z2 * Z2
    den = 4 * Z * (X2 * X + A * X * Z2 + B * Z2 * Z)
    g = gmpy2.gcd(num, den)
    return num // g, den // g


def doublings_for(E: EllipticCurveQ, eps: float) -> int:
    """Least k with 3 max(c3, c4) / 4^k <= eps."""
    band = silverman_band(E)
    worst = upper(3 * band.c3.max(band.c4))
    k = 0
    while worst / 4**k > eps:
        k += 1
    return k


def canonical_height(E: EllipticCurveQ, P: ECPoint, eps: float = DEFAULT_EPS, *,
                     doublings: int | None = None, max_bits: int = DEFAULT_MAX_BITS) -> arb:
    """Enclosure of the canonical height of P of width at most 2*eps.

    Doubles the x-coordinate exactly ``k`` times and applies the explicit
    Silverman tail.  Raises ValueError on torsion points.
    """
    if P.curve != E:
        raise PointNotOnCurve(f"{P} is not on {E}")
    if P.is_infinity:
        return arb(0)
    k = doublings_for(E, eps) if doublings is None else int(doublings)
    return _canonical_height_cached(E.A, E.B, P.x, k, max_bits)


@lru_cache(maxsize=256)
def _canonical_height_cached(A: int, B: int, x, k: int, max_bits: int) -> arb:
    E = EllipticCurveQ(A, B)
    X, Z = mpz(x.numerator), mpz(x.denominator)
    A, B = mpz(A), mpz(B)
    for step in range(k):
        X, Z = _double_x(A, B, X, Z)
        if Z == 0:
            raise ValueError("point has finite order; its canonical height is 0")
        if max(X.bit_length(), Z.bit_length()) > max_bits:
            raise GuardExceeded(f"coordinates exceed {max_bits} bits after {step + 1} doublings")
    hw = to_arb(max(abs(X), abs(Z))).log()
    scale = arb(4) ** k
    band = silverman_band(E)
    middle = 3 * hw / 2
    lo = (middle - 3 * band.c4) / scale
    hi = (middle + 3 * band.c3) / scale
    return interval(lower(lo), upper(hi))


def generator_height_lower(E: EllipticCurveQ, g: ECPoint, eps: float = GENERATOR_EPS) -> arb:
    """A certified lower bound for the canonical height of a generator, as an exact ball."""
    return to_arb(lower(canonical_height(E, g, eps)))


def naive_estimate(E: EllipticCurveQ, P: ECPoint, doublings: int) -> float:
    """Floating estimate (3/2) h_W(x(2^k P)) / 4^k; diagnostic only."""
    X, Z = mpz(P.x.numerator), mpz(P.x.denominator)
    for _ in range(doublings):
        X, Z = _double_x(mpz(E.A), mpz(E.B), X, Z)
    return 1.5 * float(gmpy2.log2(max(abs(X), abs(Z)))) * math.log(2) / 4**doublings
