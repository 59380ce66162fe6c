"""Curve families inside E x E and their degree/height invariants.

A family is cut out by p(x1) = y2 for an integer polynomial p.  The power
family uses p = X^n, the cyclotomic family uses the n-th cyclotomic
polynomial.  The genus-2 family y^2 = a x^6 + b x^4 + b x^2 + a embeds into
E x E for an explicit elliptic curve E.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from flint import arb, fmpz, fmpz_poly

from ._rigor import LOG2, to_arb
from .ec_arith import EllipticCurveQ, curve_new
from .errors import ConstantPolynomial, DegenerateFamily
from .explicit_constants import table1


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial stored as coefficients from the constant term up."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs or (0,))

    @classmethod
    def monomial(cls, n: int, coeff: int = 1) -> "IntPoly":
        return cls((0,) * n + (coeff,))

    @classmethod
    def from_flint(cls, poly: fmpz_poly) -> "IntPoly":
        return cls(tuple(int(c) for c in poly.coeffs()))

    def to_flint(self) -> fmpz_poly:
        return fmpz_poly(list(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if any(self.coeffs) else -1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    @property
    def nonzero_terms(self) -> tuple[tuple[int, int], ...]:
        """(exponent, coefficient) pairs with nonzero coefficient."""
        return tuple((k, c) for k, c in enumerate(self.coeffs) if c)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        return str(self.to_flint())


def weil_height_poly(p: IntPoly) -> arb:
    """log max(1, max |p_i|): the height of (1 : p_0 : ... : p_n)."""
    return to_arb(max(1, max(abs(c) for c in p.coeffs))).log()


@dataclass(frozen=True)
class FamilyInvariants:
    degree: int
    h2_upper: arb
    genus: int | None = None


@dataclass(frozen=True)
class FamilySpec:
    """One member of a family on a host curve.

    ``kind`` is one of ``poly``, ``cn``, ``dn``, ``genus2``.  ``poly`` needs
    ``polynomial``; ``cn`` and ``dn`` need ``n``; ``genus2`` needs ``a`` and
    ``b`` and determines its own host curve.
    """

    kind: str
    curve: EllipticCurveQ
    n: int | None = None
    polynomial: IntPoly | None = None
    a: int | None = None
    b: int | None = None

    def __post_init__(self):
        if self.kind == "poly":
            if self.polynomial is None or self.polynomial.degree < 1:
                raise ConstantPolynomial("family polynomial must be non-constant")
        elif self.kind == "cn":
            if self.n is None or self.n < 1:
                raise ValueError("power family needs n >= 1")
        elif self.kind == "dn":
            if self.n is None or self.n < 1:
                raise ValueError("cyclotomic family needs n >= 1")
        elif self.kind == "genus2":
            if self.a is None or self.b is None:
                raise ValueError("genus-2 family needs a and b")
            _check_genus2(self.a, self.b)
        else:
            raise ValueError(f"unknown family kind {self.kind!r}")

    @classmethod
    def power(cls, E: EllipticCurveQ, n: int) -> "FamilySpec":
        return cls("cn", E, n=n)

    @classmethod
    def cyclo(cls, E: EllipticCurveQ, n: int) -> "FamilySpec":
        return cls("dn", E, n=n)

    @classmethod
    def poly(cls, E: EllipticCurveQ, p: IntPoly | Sequence[int]) -> "FamilySpec":
        if not isinstance(p, IntPoly):
            p = IntPoly(tuple(p))
        return cls("poly", E, polynomial=p)

    @classmethod
    def genus2(cls, a: int, b: int) -> "FamilySpec":
        return cls("genus2", genus2_to_E(a, b).short, a=a, b=b)

    def defining_polynomial(self) -> IntPoly:
        """The polynomial p with p(x1) = y2."""
        if self.kind == "poly":
            return self.polynomial
        if self.kind == "cn":
            return IntPoly.monomial(self.n)
        if self.kind == "dn":
            return cyclotomic(self.n)
        raise ValueError("the genus-2 family is not of the form p(x1) = y2")

    @property
    def family_id(self) -> str:
        if self.kind == "poly":
            return f"poly[{self.polynomial}]"
        if self.kind == "genus2":
            return f"genus2[a={self.a},b={self.b}]"
        return f"{self.kind}[n={self.n}]"


# ---------------------------------------------------------------- arithmetic


@lru_cache(maxsize=4096)
def _factor(n: int) -> tuple[tuple[int, int], ...]:
    if n == 1:
        return ()
    return tuple((int(p), int(e)) for p, e in fmpz(n).factor())


def phi_omega2_mu(n: int) -> tuple[int, int, int]:
    """Euler totient, number of distinct odd primes, Moebius function."""
    if n < 1:
        raise ValueError("n must be positive")
    phi, omega2, mu = 1, 0, 1
    for p, e in _factor(n):
        phi *= (p - 1) * p ** (e - 1)
        omega2 += p != 2
        mu = 0 if e > 1 else -mu
    return phi, omega2, mu


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in _factor(n):
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


@lru_cache(maxsize=1024)
def cyclotomic(n: int) -> IntPoly:
    """n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("n must be positive")
    return IntPoly.from_flint(fmpz_poly.cyclotomic(n))


def cyclotomic_by_moebius(n: int) -> IntPoly:
    """Same polynomial built as a product of (X^d - 1)^mu(n/d) with exact division."""
    num, den = fmpz_poly([1]), fmpz_poly([1])
    for d in divisors(n):
        mu = phi_omega2_mu(n // d)[2]
        factor = fmpz_poly([-1] + [0] * (d - 1) + [1])
        if mu == 1:
            num *= factor
        elif mu == -1:
            den *= factor
    quotient, remainder = divmod(num, den)
    assert remainder == 0
    return IntPoly.from_flint(quotient)


# ---------------------------------------------------------------- invariants


def invariants_poly(E: EllipticCurveQ, p: IntPoly) -> FamilyInvariants:
    """deg = 6 deg p + 9, h2 <= 6(2n+3)(h_W(p) + log m + 2 c6)."""
    n = p.degree
    if n < 1:
        raise ConstantPolynomial("family polynomial must be non-constant")
    m = len(p.nonzero_terms)
    c6 = table1(E).c6
    h2 = 6 * (2 * n + 3) * (weil_height_poly(p) + to_arb(m).log() + 2 * c6)
    return FamilyInvariants(degree=6 * n + 9, h2_upper=h2)


def invariants_Dn(E: EllipticCurveQ, n: int) -> FamilyInvariants:
    if n < 2:
        raise ValueError("the cyclotomic route needs n >= 2")
    phi, omega2, _ = phi_omega2_mu(n)
    c6 = table1(E).c6
    h2 = 6 * (2 * phi + 3) * (2**omega2 * LOG2 + 2 * c6)
    return FamilyInvariants(degree=6 * phi + 9, h2_upper=h2)


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def genus_Cn(E: EllipticCurveQ, n: int) -> tuple[int | None, str]:
    """Genus 4n+2 of the power family, when the lemma's hypotheses hold.

    Returns ``(genus, "")`` or ``(None, reason)``.
    """
    A, B = E.A, E.B
    if _is_square(-3 * A):
        return None, "-3A is a square"
    if _is_square(-3 * E.discriminant):
        return None, "-3 Delta is a square"
    if B * (2 * A**3 + B**2) * (3 * A**3 + 8 * B**2) == 0:
        return None, "B(2A^3+B^2)(3A^3+8B^2) vanishes"
    return 4 * n + 2, ""


# ---------------------------------------------------------------- genus 2


def _check_genus2(a: int, b: int) -> None:
    if a == 0 or a == -b or 3 * a == b:
        raise DegenerateFamily(f"a={a}, b={b}: need a != 0, -b, b/3")


@dataclass(frozen=True)
class Genus2Model:
    """y^2 = a x^6 + b x^4 + b x^2 + a together with its elliptic quotient."""

    a: int
    b: int
    long_coeffs: tuple[int, int, int]  # y^2 = x^3 + c2 x^2 + c1 x + c0
    short: EllipticCurveQ
    relation_constant: int  # (x1 - 3b)(x2 - 3b) = relation_constant
    first_map: Callable = field(repr=False, compare=False)
    second_map: Callable = field(repr=False, compare=False)

    def sextic(self, x) -> Fraction:
        x2 = Fraction(x) ** 2
        return self.a * x2**3 + self.b * x2**2 + self.b * x2 + self.a

    def contains(self, x, y) -> bool:
        return Fraction(y) ** 2 == self.sextic(x)

    def long_to_short(self, X, Y) -> tuple[Fraction, Fraction]:
        return 9 * Fraction(X) + 3 * self.b, 27 * Fraction(Y)

    def short_to_long(self, x, y) -> tuple[Fraction, Fraction]:
        return (Fraction(x) - 3 * self.b) / 9, Fraction(y) / 27


def genus2_to_E(a: int, b: int) -> Genus2Model:
    _check_genus2(a, b)
    A = 27 * b * (3 * a - b)
    B = 27 * (27 * a**3 - 9 * a * b**2 + 2 * b**3)

    def first(x, y):
        x = Fraction(x)
        return 9 * a * x * x + 3 * b, 27 * a * Fraction(y)

    def second(x, y):
        x = Fraction(x)
        if x == 0:
            raise ZeroDivisionError("x = 0 maps to the origin under the second map")
        return 9 * a / (x * x) + 3 * b, 27 * a * Fraction(y) / x**3

    return Genus2Model(a=a, b=b, long_coeffs=(b, a * b, a**3), short=curve_new(A, B, label=f"g2[{a},{b}]"),
                       relation_constant=81 * a * a, first_map=first, second_map=second)
