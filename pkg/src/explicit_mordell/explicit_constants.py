"""Named constants attached to a curve: the c1..c7 table, theorem constants, Bezout constants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from flint import arb

from ._rigor import LOG2, literal, log_abs, to_arb
from .ec_arith import EllipticCurveQ
from .heights import h_infty, hw_curve, silverman_band, weil_height

C1_BASE = literal("72.251")
BEZOUT_C0_1_1_8 = literal("6.019")

# Literal constants of the table, stored as printed.
_C1_GENERAL = literal("3.724")
_C2_GENERAL = literal("4.015")
_C1_SHARP = literal("2.919")
_C2_SHARP = literal("3.21")
_C1_WEIER = literal("4.709")
_C2_WEIER = literal("2.427")


@dataclass(frozen=True)
class ConstantTable:
    c1: arb
    c2: arb
    c3: arb
    c4: arb
    c5: arb
    c6: arb
    c7: arb
    hWE: arb
    rational_points: bool

    def as_dict(self) -> dict[str, arb]:
        return {name: getattr(self, name) for name in ("hWE", "c1", "c2", "c3", "c4", "c5", "c6", "c7")}


@dataclass(frozen=True)
class TheoremConstants:
    C1: arb
    C2: arb
    C3: arb


def h_weier(E: EllipticCurveQ) -> arb:
    return hw_curve(E)


def table1(E: EllipticCurveQ, rational_points: bool = True) -> ConstantTable:
    return _table1_cached(E.A, E.B, rational_points)


@lru_cache(maxsize=128)
def _table1_cached(A: int, B: int, rational_points: bool) -> ConstantTable:
    E = EllipticCurveQ(A, B)
    hwe = hw_curve(E)
    j = E.j_invariant
    hw_disc = weil_height(E.discriminant)
    hinf_j = h_infty(j)
    hw_j = weil_height(j)
    hw_a = weil_height(A)
    hw_b = weil_height(B)

    c1_general = (hw_disc + hinf_j) / 4 + hw_j / 8 + (hw_a + hw_b) / 2 + _C1_GENERAL
    c2_general = (hw_disc + hinf_j) / 4 + (hw_a + hw_b) / 2 + _C2_GENERAL
    band = silverman_band(E)
    if rational_points:
        coeff_size = abs(A) + abs(B)
        log_disc = log_abs(E.discriminant)
        c1 = ((log_disc + hinf_j) / 4 + hw_j / 8 + to_arb(coeff_size + 3).log() / 2 + _C1_SHARP).min(
            3 * hwe + _C1_WEIER)
        c2 = ((log_disc + hinf_j) / 4 + to_arb(coeff_size + 3).log() / 2 + _C2_SHARP).min(
            3 * hwe / 2 + _C2_WEIER)
        c5 = band.c5
        c6 = to_arb(3 + coeff_size).log() / 2
        c7 = to_arb(1 + coeff_size).log() / 2
    else:
        c1, c2 = c1_general, c2_general
        c5 = c1_general
        c6 = (hw_a + hw_b + arb(5).log()) / 2
        c7 = (hw_a + hw_b + arb(3).log()) / 2
    return ConstantTable(c1=c1, c2=c2, c3=band.c3, c4=band.c4, c5=c5, c6=c6, c7=c7, hWE=hwe,
                         rational_points=rational_points)


def theorem_constants(E: EllipticCurveQ, rational_points: bool = True, *,
                      override_c1: arb | None = None, override_c2: arb | None = None) -> TheoremConstants:
    """C1 = 72.251, C2 = C1 (6.019 + 4 c1), C3 = 4 c2.

    The overrides implement the intrinsic variant in which caller-supplied
    constants replace c1 and c2.
    """
    table = table1(E, rational_points)
    c1 = table.c1 if override_c1 is None else to_arb(override_c1)
    c2 = table.c2 if override_c2 is None else to_arb(override_c2)
    return TheoremConstants(C1=C1_BASE, C2=C1_BASE * (BEZOUT_C0_1_1_8 + 4 * c1), C3=4 * c2)


def bezout_c0(d1: int, d2: int, m: int) -> arb:
    """Sum over i <= d1, j <= d2 of 1/(2(i+j+1)) plus (m - (d1+d2)/2) log 2."""
    if d1 < 0 or d2 < 0 or m < 1:
        raise ValueError("need d1, d2 >= 0 and m >= 1")
    harmonic = sum(Fraction(1, 2 * (i + j + 1)) for i in range(d1 + 1) for j in range(d2 + 1))
    return to_arb(harmonic) + to_arb(Fraction(2 * m - d1 - d2, 2)) * LOG2


def c0_of_N(N: int) -> arb:
    """(3^N - 3/2) log 2 + H_{N-1} - 1/(2N)."""
    if N < 2:
        raise ValueError("N must be at least 2")
    rational = sum(Fraction(1, i) for i in range(1, N)) - Fraction(1, 2 * N)
    return to_arb(Fraction(2 * 3**N - 3, 2)) * LOG2 + to_arb(rational)
