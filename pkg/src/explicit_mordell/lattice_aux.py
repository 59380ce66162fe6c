"""Geometry-of-numbers helpers used in the height bound, as checkable routines.

Linear forms built from integers are kept exact: a form (a X1 + b X2)/sqrt(a^2+b^2)
is stored as the pair (a, b), and every comparison is made on squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from flint import arb

from ._rigor import to_arb, upper
from .ec_arith import EllipticCurveQ
from .errors import PreconditionViolated, ZeroVector
from .explicit_constants import BEZOUT_C0_1_1_8, table1


@dataclass(frozen=True)
class LinearForm2:
    """The unit-norm form (a X1 + b X2) / sqrt(a^2 + b^2)."""

    a: int
    b: int

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise ZeroVector("linear form needs (a, b) != (0, 0)")

    @property
    def norm_squared(self) -> int:
        return self.a * self.a + self.b * self.b

    def value_squared(self, t: tuple[int, int]) -> Fraction:
        """|L(t)|^2 as an exact rational."""
        return Fraction((self.a * t[0] + self.b * t[1]) ** 2, self.norm_squared)


def rank_one_form(a: int, b: int) -> LinearForm2:
    return LinearForm2(int(a), int(b))


def trapezio_threshold(kappa: float) -> float:
    """Smallest T for which the short-vector lemma guarantees existence."""
    if kappa <= 1:
        raise PreconditionViolated("kappa must exceed 1")
    return kappa / (math.sqrt(2) * (kappa - 1) ** 0.25)


def short_vector(L: LinearForm2, kappa, T) -> tuple[int, int]:
    """Nonzero integer u with |u| <= T and |L(u)| <= kappa / T.

    Enumerates the disc up to sign (u and -u are equivalent, the
    representative has its first nonzero coordinate positive).  Ties go to
    the smallest |u|^2, then the smallest |L(u)|, then lexicographic order.
    ``kappa`` and ``T`` are converted to exact rationals.
    """
    kappa, T = Fraction(kappa), Fraction(T)
    if kappa <= 1 or T <= 0:
        raise PreconditionViolated("need kappa > 1 and T > 0")
    below = T < Fraction(trapezio_threshold(float(kappa)))
    r = math.isqrt(T.numerator * T.numerator // (T.denominator * T.denominator)) + 1
    T2 = T * T
    limit = kappa * kappa / T2  # compare |L(u)|^2 <= kappa^2 / T^2
    best = None
    for u1 in range(-r, r + 1):
        for u2 in range(-r, r + 1):
            n2 = u1 * u1 + u2 * u2
            if n2 == 0 or n2 > T2 or u1 < 0 or (u1 == 0 and u2 < 0):
                continue
            val = L.value_squared((u1, u2))
            if val > limit:
                continue
            key = (n2, val, (u1, u2))
            if best is None or key < best:
                best = key
    if best is None:
        reason = "below the existence threshold" if below else "unexpected: lemma guarantees a vector"
        raise PreconditionViolated(f"no short vector for T={T}, kappa={kappa} ({reason})")
    return best[2]


@dataclass(frozen=True)
class TranslateCertificate:
    u: tuple[int, int]
    deg_bound: int
    h2_bound: arb


def translate_certificate(u: tuple[int, int], E: EllipticCurveQ, hhat_uP) -> TranslateCertificate:
    """Degree and height bounds for the translate of the subgroup orthogonal to u."""
    u1, u2 = u
    n2 = u1 * u1 + u2 * u2
    if n2 == 0:
        raise ZeroVector("u must be nonzero")
    c1 = table1(E).c1
    return TranslateCertificate(u=(u1, u2), deg_bound=3 * n2, h2_bound=6 * to_arb(hhat_uP) + 12 * n2 * c1)


def auxiliary_subgroup_bounds(E: EllipticCurveQ, kappa, T, hhat_P) -> tuple[arb, arb]:
    """(degree bound 3T, height bound (6 kappa^2 / T) hhat(P) + 12 T c1)."""
    kappa, T = to_arb(Fraction(kappa)), to_arb(Fraction(T))
    c1 = table1(E).c1
    return 3 * T, 6 * kappa**2 / T * to_arb(hhat_P) + 12 * T * c1


@dataclass(frozen=True)
class ProofParameters:
    kappa: arb
    T: arb
    hhat_bound: arb
    c8: int
    c9: arb
    c10: arb


def proof_parameters(degC: int, h2C, E: EllipticCurveQ) -> ProofParameters:
    """kappa and T minimising the height inequality, and the resulting bound."""
    if degC < 1:
        raise ValueError("degree must be at least 1")
    tab = table1(E)
    c8 = 6 * degC
    c9 = 3 * to_arb(h2C) + 3 * degC * (4 * tab.c1 + BEZOUT_C0_1_1_8)
    c10 = 2 * tab.c2
    kappa = 1 + arb(1) / (16 * c8 * c8)
    T = c8 * kappa**2 * (1 + (1 + c10 / (c8 * c9 * kappa**2)).sqrt())
    return ProofParameters(kappa=kappa, T=T, hhat_bound=4 * c8 * c9 * kappa**2 + 2 * c10, c8=c8, c9=c9, c10=c10)


def optimised_bound_upper(degC: int, h2C, E: EllipticCurveQ) -> float:
    return float(upper(proof_parameters(degC, h2C, E).hhat_bound))
