"""Explicit upper bounds for the canonical height of rank-one points on curves.

Every function returns certified upper bounds as arb balls (read the right
endpoint) and integer search boxes obtained as exact floors of the upper
endpoints of real bounds on integer indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from flint import arb

from ._rigor import LOG2, floor_down, literal, lower, to_arb, upper
from .curve_families import (
    IntPoly,
    cyclotomic,
    genus2_to_E,
    invariants_Dn,
    invariants_poly,
    phi_omega2_mu,
    weil_height_poly,
)
from .ec_arith import EllipticCurveQ
from .errors import ConstantPolynomial, InvalidDimension, NonpositiveGeneratorHeight
from .explicit_constants import (
    ConstantTable,
    TheoremConstants,
    bezout_c0,
    c0_of_N,
    table1,
    theorem_constants,
)
from .heights import silverman_band, weil_height

POLY_FACTOR = literal("1300.518")
POLY_SHIFT = literal("3.01")
KULESZ_SHIFT = literal("22.946")
SIMPLE_G2_BASE = literal("358956.08")
SIMPLE_G2_LOG = literal("93638.80")
GENUS2_DEGREE = 12


def index_floor(value: arb) -> int:
    """Largest integer that can be <= the enclosed nonnegative real; an index bound."""
    return max(0, math.floor(upper(value)))


def _sqrt_ratio_floor(num: arb, den: arb) -> int:
    ratio = num / den
    if not ratio.is_finite():
        raise NonpositiveGeneratorHeight("generator height bound not separated from 0")
    hi = upper(ratio)
    # floor(sqrt(hi)) computed exactly on the rational hi.
    root = math.isqrt(hi.numerator // hi.denominator)
    while Fraction((root + 1) ** 2) <= hi:
        root += 1
    return root


def _positive_generator_height(hhat_g_lower) -> arb:
    hg = to_arb(hhat_g_lower)
    if not lower(hg) > 0:
        raise NonpositiveGeneratorHeight("need a positive lower bound for the generator height")
    # Only the lower endpoint is used: dividing by it keeps box bounds sound.
    return to_arb(lower(hg))


@dataclass(frozen=True)
class BoundReport:
    formula_id: str
    hhat_upper: arb
    a_box: int
    b_box: int
    hhat_g_lower: arb
    constants: ConstantTable
    theorem: TheoremConstants
    details: dict = field(default_factory=dict, compare=False)


# ---------------------------------------------------------------- general theorems


def bound_E2(E: EllipticCurveQ, h2C, degC: int, rational_points: bool = True, *,
             override_c1=None, override_c2=None) -> arb:
    """C1 h2 deg + C2 deg^2 + C3 for a transverse curve in E^2."""
    if degC < 1:
        raise ValueError("degree must be at least 1")
    h2C = to_arb(h2C)
    if lower(h2C) < 0:
        raise ValueError("h2 must be nonnegative")
    tc = theorem_constants(E, rational_points, override_c1=override_c1, override_c2=override_c2)
    return tc.C1 * h2C * degC + tc.C2 * degC**2 + tc.C3


def bound_EN(E: EllipticCurveQ, h2C, degC: int, N: int, case: str = "transverse",
             rational_points: bool = True) -> arb:
    if N < 3:
        raise InvalidDimension("use bound_E2 for N = 2; N must be at least 3")
    if degC < 1:
        raise ValueError("degree must be at least 1")
    h2C = to_arb(h2C)
    tc = theorem_constants(E, rational_points)
    C1, C2, C3 = tc.C1, tc.C2, tc.C3
    if case == "transverse":
        return N * C1 * h2C * degC + arb(N) / 2 * C2 * degC**2 + arb(N) / 2 * C3
    if case == "weak_transverse":
        return 4 * (N - 1) * C1 * h2C * degC + (N - 1) * C2 * degC**2 + N * N * C3
    if case == "general":
        tab = table1(E, rational_points)
        p3 = 3 ** (N - 2)
        return (2 * p3 * math.factorial(N) * C1 * h2C * degC**2
                + arb(p3 * math.factorial(N)) / 2 * C2 * degC**3
                + p3 * math.factorial(N - 2) * h2C
                + degC * p3 * math.factorial(N - 2) * (N * (N - 1) * (C3 / 2 + tab.c1) + c0_of_N(N))
                + N * tab.c2)
    raise ValueError(f"unknown case {case!r}")


def bound_product_abelian(E: EllipticCurveQ, degC: int, h2C, degA: int, h2A, dimA: int, case: str,
                          ambient_dim: int, rational_points: bool = True) -> arb:
    """Height bound for rank-one points on a curve in E^2 x A (cases a, c) or E x A (case b).

    ``ambient_dim`` is the dimension of the projective space in which the
    Bezout intersection takes place; it feeds C0(1, dim A, ambient_dim).
    """
    if dimA < 1:
        raise InvalidDimension("dim A must be at least 1")
    h2C, h2A = to_arb(h2C), to_arb(h2A)
    tab = table1(E, rational_points)
    C0 = bezout_c0(1, dimA, ambient_dim)
    if case == "b_rank0_factor":
        return (1 + dimA) * (2 * tab.c1 * degA + h2A) * degC + degA * h2C + C0 * degA * degC
    if case in ("a_rank1_point", "c_rank1_rational"):
        tc = theorem_constants(E, rational_points)
        return (h2A * (1 + dimA) * degC + degA * (h2C + C0 * degC)
                + (1 + dimA) * degA * ((tc.C3 + 2 * tab.c1) * degC + 2 * tc.C1 * h2C * degC**2
                                       + tc.C2 * degC**3))
    raise ValueError(f"unknown case {case!r}")


def rank_zero_point_count(degA: int, degC: int) -> int:
    """Upper bound on the number of rational points in the rank-zero case."""
    return 16 * degA * degC


# ---------------------------------------------------------------- families


def _poly_hhat(E: EllipticCurveQ, p: IntPoly) -> arb:
    n = p.degree
    if n < 1:
        raise ConstantPolynomial("family polynomial must be non-constant")
    tab = table1(E)
    m = len(p.nonzero_terms)
    inner = weil_height_poly(p) + to_arb(m).log() + 2 * tab.c6 + POLY_SHIFT + 2 * tab.c1
    return POLY_FACTOR * (2 * n + 3) ** 2 * inner + 4 * tab.c2


def bound_poly(E: EllipticCurveQ, p: IntPoly, hhat_g_lower) -> BoundReport:
    hg = _positive_generator_height(hhat_g_lower)
    hhat = _poly_hhat(E, p)
    box = _sqrt_ratio_floor(hhat, hg)
    inv = invariants_poly(E, p)
    return BoundReport("poly", hhat, box, box, hg, table1(E), theorem_constants(E),
                       {"degree": inv.degree, "h2_upper": inv.h2_upper})


def bound_Cn(E: EllipticCurveQ, n: int, hhat_g_lower) -> BoundReport:
    """Power family x1^n = y2 with the sharpened asymmetric box."""
    if n < 1:
        raise ValueError("n must be at least 1")
    hg = _positive_generator_height(hhat_g_lower)
    tab = table1(E)
    hhat = _poly_hhat(E, IntPoly.monomial(n))
    denom = (2 * n + 3) * hg
    a_box = _sqrt_ratio_floor(3 * hhat + 3 * tab.c5 + 6 * n * tab.c3, denom)
    b_box = _sqrt_ratio_floor(2 * n * hhat + 6 * n * tab.c4 + 9 * tab.c3 + 3 * tab.c7, denom)
    return BoundReport("cn", hhat, a_box, b_box, hg, tab, theorem_constants(E), {"n": n})


def bound_Dn(E: EllipticCurveQ, n: int, hhat_g_lower) -> BoundReport:
    """Cyclotomic family; the smaller of the cyclotomic and the generic polynomial routes."""
    if n < 1:
        raise ValueError("n must be at least 1")
    hg = _positive_generator_height(hhat_g_lower)
    tab = table1(E)
    generic = _poly_hhat(E, cyclotomic(n))
    routes = {"polynomial": generic}
    if n >= 2:
        phi, omega2, _ = phi_omega2_mu(n)
        inner = 2**omega2 * LOG2 + 2 * tab.c6 + POLY_SHIFT + 2 * tab.c1
        routes["cyclotomic"] = POLY_FACTOR * (2 * phi + 3) ** 2 * inner + 4 * tab.c2
    route = min(routes, key=lambda k: upper(routes[k]))
    hhat = routes[route]
    box = _sqrt_ratio_floor(hhat, hg)
    return BoundReport("dn", hhat, box, box, hg, tab, theorem_constants(E),
                       {"n": n, "route": route, "routes": routes})


# ---------------------------------------------------------------- coefficient tables


def _ceil(x: arb) -> int:
    return math.ceil(upper(x))


def cn_coefficients(E: EllipticCurveQ, hhat_g_lower) -> dict[str, list[int]]:
    """Integer coefficients (highest degree first) of the power-family bounds in n.

    ``hhat``: quadratic bounding the height; ``a_numerator`` and
    ``b_numerator``: numerators N(n) with |a|, |b| <= sqrt(N(n)/(2n+3)).
    """
    hg = _positive_generator_height(hhat_g_lower)
    tab = table1(E)
    K = POLY_FACTOR * (2 * tab.c6 + POLY_SHIFT + 2 * tab.c1)
    h2, h1, h0 = 4 * K, 12 * K, 9 * K + 4 * tab.c2
    a_num = [3 * h2 / hg, (3 * h1 + 6 * tab.c3) / hg, (3 * h0 + 3 * tab.c5) / hg]
    b_num = [2 * h2 / hg, 2 * h1 / hg, (2 * h0 + 6 * tab.c4) / hg, (9 * tab.c3 + 3 * tab.c7) / hg]
    return {"hhat": [_ceil(c) for c in (h2, h1, h0)],
            "a_numerator": [_ceil(c) for c in a_num],
            "b_numerator": [_ceil(c) for c in b_num]}


def dn_prime_coefficients(E: EllipticCurveQ, hhat_g_lower) -> dict[str, list[int]]:
    """Coefficients for the cyclotomic family at odd prime n (phi = n - 1, one odd prime)."""
    hg = _positive_generator_height(hhat_g_lower)
    tab = table1(E)
    K = POLY_FACTOR * (2 * LOG2 + 2 * tab.c6 + POLY_SHIFT + 2 * tab.c1)
    # (2(n-1)+3)^2 = 4n^2 + 4n + 1
    h2, h1, h0 = 4 * K, 4 * K, K + 4 * tab.c2
    return {"hhat": [_ceil(c) for c in (h2, h1, h0)],
            "box_squared": [_ceil(c / hg) for c in (h2, h1, h0)]}


# ---------------------------------------------------------------- genus-2 comparison


@dataclass(frozen=True)
class DemjanenkoReport:
    general: int
    kulesz: int
    simple: int
    general_real: arb
    kulesz_real: arb
    simple_real: arb
    hhat_upper: arb


def genus2_h2_upper(a: int, b: int) -> arb:
    """h2 of the image of the genus-2 curve in E x E (via Zhang's inequality)."""
    inner = 1456 * a * a * (abs(a) + abs(b)) + (9 * abs(a) + 3 * abs(b)) ** 2 + 1
    return 24 * to_arb(inner).log()


def demjanenko_bounds(a: int, b: int, hhat_P0, c3E=None) -> DemjanenkoReport:
    """Bounds on min(|n1|, |n2|) for the genus-2 family.

    ``general`` uses the concrete height bound for the image curve with
    the Table-1 constants of the short model; ``simple`` is the closed form
    in log max(|a|, |b|); ``kulesz`` is the comparison bound.
    """
    model = genus2_to_E(a, b)
    E = model.short
    hP0 = _positive_generator_height(hhat_P0)
    hhat = bound_E2(E, genus2_h2_upper(a, b), GENUS2_DEGREE)
    general = (hhat / (2 * hP0)).sqrt()
    m = max(abs(a), abs(b))
    simple = ((SIMPLE_G2_BASE + SIMPLE_G2_LOG * to_arb(m).log()) / hP0).sqrt()
    c3 = silverman_band(E).c3 if c3E is None else to_arb(c3E)
    h_b = weil_height(Fraction(b, a))
    kulesz = ((12 * h_b + KULESZ_SHIFT + 3 * c3) / hP0).sqrt()
    return DemjanenkoReport(general=index_floor(general), kulesz=index_floor(kulesz),
                            simple=index_floor(simple), general_real=general, kulesz_real=kulesz,
                            simple_real=simple, hhat_upper=hhat)
