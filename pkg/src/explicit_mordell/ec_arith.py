"""Exact arithmetic on short Weierstrass curves over the rationals and over prime fields."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional

import gmpy2
from flint import fmpz, nmod_poly
from gmpy2 import mpq, mpz

from .errors import BadReductionPrime, GuardExceeded, PointNotOnCurve, SingularCurve

DEFAULT_SCALAR_GUARD = 5000
MAZUR_MAX_ORDER = 12

_MPQ = type(mpq(0))


def as_mpq(value) -> mpq:
    if isinstance(value, _MPQ):
        return value
    if isinstance(value, str):
        return mpq(value)
    return mpq(value)


@dataclass(frozen=True)
class EllipticCurveQ:
    """The curve y^2 = x^3 + A x + B with integer coefficients."""

    A: int
    B: int
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "A", int(self.A))
        object.__setattr__(self, "B", int(self.B))
        if 4 * self.A**3 + 27 * self.B**2 == 0:
            raise SingularCurve(f"4A^3 + 27B^2 = 0 for A={self.A}, B={self.B}")

    @cached_property
    def discriminant(self) -> int:
        return -16 * (4 * self.A**3 + 27 * self.B**2)

    @cached_property
    def j_invariant(self) -> mpq:
        return mpq(-1728 * (4 * self.A) ** 3, self.discriminant)

    @cached_property
    def infinity(self) -> "ECPoint":
        return ECPoint(self, None, None)

    def contains(self, x, y) -> bool:
        x, y = as_mpq(x), as_mpq(y)
        return y * y == x**3 + self.A * x + self.B

    def point(self, x, y) -> "ECPoint":
        x, y = as_mpq(x), as_mpq(y)
        if not self.contains(x, y):
            raise PointNotOnCurve(f"({x}, {y}) is not on {self}")
        return ECPoint(self, x, y)

    def lift_x(self, x) -> list["ECPoint"]:
        """All rational points with the given x-coordinate."""
        x = as_mpq(x)
        rhs = x**3 + self.A * x + self.B
        if rhs < 0:
            return []
        num, den = rhs.numerator, rhs.denominator
        if not (gmpy2.is_square(num) and gmpy2.is_square(den)):
            return []
        y = mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
        if y == 0:
            return [ECPoint(self, x, y)]
        return [ECPoint(self, x, y), ECPoint(self, x, -y)]

    def __str__(self):
        name = f"{self.label}: " if self.label else ""
        return f"{name}y^2 = x^3 + ({self.A})x + ({self.B})"


@dataclass(frozen=True)
class ECPoint:
    """A rational point; ``x is None`` encodes the point at infinity."""

    curve: EllipticCurveQ
    x: Optional[mpq]
    y: Optional[mpq]

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    @property
    def denominator_root(self) -> int:
        """The integer e with den(x) = e^2 and den(y) = e^3 (0 at infinity)."""
        if self.is_infinity:
            return 0
        return int(gmpy2.isqrt(self.x.denominator))

    @property
    def is_integral(self) -> bool:
        return not self.is_infinity and self.x.denominator == 1

    def __neg__(self) -> "ECPoint":
        if self.is_infinity:
            return self
        return ECPoint(self.curve, self.x, -self.y)

    def __str__(self):
        return "O" if self.is_infinity else f"({self.x}, {self.y})"


def curve_new(A: int, B: int, label: str = "") -> EllipticCurveQ:
    return EllipticCurveQ(A, B, label)


def _check(E: EllipticCurveQ, P: ECPoint) -> None:
    if P.curve != E:
        raise PointNotOnCurve(f"point {P} belongs to {P.curve}, not {E}")
    if not P.is_infinity and not E.contains(P.x, P.y):
        raise PointNotOnCurve(f"{P} does not satisfy the equation of {E}")


def _add_unchecked(E: EllipticCurveQ, P: ECPoint, Q: ECPoint) -> ECPoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.x == Q.x:
        if P.y != Q.y or P.y == 0:
            return E.infinity
        slope = (3 * P.x * P.x + E.A) / (2 * P.y)
    else:
        slope = (Q.y - P.y) / (Q.x - P.x)
    x3 = slope * slope - P.x - Q.x
    y3 = slope * (P.x - x3) - P.y
    return ECPoint(E, x3, y3)


def add(E: EllipticCurveQ, P: ECPoint, Q: ECPoint) -> ECPoint:
    _check(E, P)
    _check(E, Q)
    return _add_unchecked(E, P, Q)


def negate(E: EllipticCurveQ, P: ECPoint) -> ECPoint:
    _check(E, P)
    return -P


def scalar_mul(E: EllipticCurveQ, n: int, P: ECPoint, guard: int = DEFAULT_SCALAR_GUARD) -> ECPoint:
    """[n]P by double-and-add; refuses |n| > guard since coordinates grow like n^2."""
    _check(E, P)
    n = int(n)
    if abs(n) > guard:
        raise GuardExceeded(f"|n| = {abs(n)} exceeds the scalar-multiplication guard {guard}")
    if n < 0:
        return -scalar_mul(E, -n, P, guard)
    result, base = E.infinity, P
    while n:
        if n & 1:
            result = _add_unchecked(E, result, base)
        n >>= 1
        if n:
            base = _add_unchecked(E, base, base)
    return result


def multiples(E: EllipticCurveQ, P: ECPoint, count: int):
    """Yield [1]P, [2]P, ..., [count]P by repeated addition."""
    _check(E, P)
    Q = E.infinity
    for _ in range(count):
        Q = _add_unchecked(E, Q, P)
        yield Q


# ---------------------------------------------------------------- integer cubics


def _eval_cubic(c2, c1, c0, x):
    return ((x + c2) * x + c1) * x + c0


def _bisect_increasing(c2, c1, c0, lo, hi, sign):
    """Integer root of sign*f on [lo, hi] where sign*f is nondecreasing."""
    if lo > hi:
        return None
    f_lo = sign * _eval_cubic(c2, c1, c0, lo)
    f_hi = sign * _eval_cubic(c2, c1, c0, hi)
    if f_lo > 0 or f_hi < 0:
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if sign * _eval_cubic(c2, c1, c0, mid) < 0:
            lo = mid + 1
        else:
            hi = mid
    return lo if _eval_cubic(c2, c1, c0, lo) == 0 else None


def integer_roots_monic_cubic(c2: int, c1: int, c0: int) -> list[int]:
    """All integer roots of x^3 + c2 x^2 + c1 x + c0, found by exact bisection on monotone pieces."""
    c2, c1, c0 = mpz(c2), mpz(c1), mpz(c0)
    bound = 2 * max(abs(c2), gmpy2.isqrt(abs(c1)) + 1, gmpy2.iroot(abs(c0), 3)[0] + 1) + 2
    disc = 4 * c2 * c2 - 12 * c1  # discriminant of the derivative 3x^2 + 2c2 x + c1
    roots = set()
    if disc <= 0:
        r = _bisect_increasing(c2, c1, c0, -bound, bound, 1)
        if r is not None:
            roots.add(r)
    else:
        s = gmpy2.isqrt(disc)
        # real critical points lie in [(-2c2 - s - 1)/6, (-2c2 - s)/6] and [(-2c2 + s)/6, (-2c2 + s + 1)/6]
        left_lo = (-2 * c2 - s - 1) // 6 - 1
        left_hi = -((2 * c2 + s) // 6) + 1
        right_lo = (-2 * c2 + s) // 6 - 1
        right_hi = -((2 * c2 - s - 1) // 6) + 1
        for window in (range(left_lo, left_hi + 1), range(right_lo, right_hi + 1)):
            for x in window:
                if _eval_cubic(c2, c1, c0, x) == 0:
                    roots.add(x)
        for lo, hi, sign in ((-bound, left_lo, 1), (left_hi, right_lo, -1), (right_hi, bound, 1)):
            r = _bisect_increasing(c2, c1, c0, lo, hi, sign)
            if r is not None:
                roots.add(r)
    return sorted(int(r) for r in roots)


# ---------------------------------------------------------------- prime fields


@dataclass(frozen=True)
class CurveFp:
    """Reduction of a short Weierstrass curve modulo a prime."""

    p: int
    A: int
    B: int

    def __post_init__(self):
        object.__setattr__(self, "A", self.A % self.p)
        object.__setattr__(self, "B", self.B % self.p)

    @property
    def is_good(self) -> bool:
        return (4 * self.A**3 + 27 * self.B**2) % self.p != 0 and self.p != 2

    def contains(self, P) -> bool:
        if P is None:
            return True
        x, y = P
        return (y * y - x * x * x - self.A * x - self.B) % self.p == 0


PointFp = Optional[tuple]


def fp_add(C: CurveFp, P: PointFp, Q: PointFp) -> PointFp:
    p = C.p
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        slope = (3 * x1 * x1 + C.A) * pow(2 * y1, -1, p) % p
    else:
        slope = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (slope * slope - x1 - x2) % p
    return x3, (slope * (x1 - x3) - y1) % p


def fp_mul(C: CurveFp, n: int, P: PointFp) -> PointFp:
    if n < 0:
        n = -n
        P = None if P is None else (P[0], (-P[1]) % C.p)
    result = None
    while n:
        if n & 1:
            result = fp_add(C, result, P)
        n >>= 1
        if n:
            P = fp_add(C, P, P)
    return result


def fp_count_points(C: CurveFp) -> int:
    """#E(F_p) by a Legendre-symbol sum; only meant for small p."""
    p = C.p
    total = p + 1
    for x in range(p):
        total += gmpy2.legendre((x * x * x + C.A * x + C.B) % p, p)
    return total


def fp_has_cubic_root(ell: int, A: int, B: int, c: int) -> bool:
    """Whether X^3 + AX + B - c^2 has a root modulo the odd prime ``ell``."""
    ell = int(ell)
    const = (B - c * c) % ell
    A %= ell
    if ell < 64:
        return any((x * x * x + A * x + const) % ell == 0 for x in range(ell))
    cubic = nmod_poly([const, A, 0, 1], ell)
    frobenius = nmod_poly([0, 1], ell).pow_mod(ell, cubic)
    return cubic.gcd(frobenius - nmod_poly([0, 1], ell)).degree() > 0


def reduce_point(E: EllipticCurveQ, P: ECPoint, ell: int) -> PointFp:
    """Reduction of P modulo a prime of good reduction (None is the origin)."""
    if E.discriminant % ell == 0:
        raise BadReductionPrime(f"{ell} divides the discriminant {E.discriminant}")
    _check(E, P)
    if P.is_infinity or P.x.denominator % ell == 0:
        return None
    x = P.x.numerator * pow(int(P.x.denominator), -1, ell) % ell
    y = P.y.numerator * pow(int(P.y.denominator), -1, ell) % ell
    return int(x), int(y)


def valuation(n: int, ell: int) -> int:
    n = int(n)
    if n == 0:
        raise ValueError("valuation of zero")
    k = 0
    while n % ell == 0:
        n //= ell
        k += 1
    return k


def t_valuation(P: ECPoint, ell: int) -> int:
    """v_ell(x/y): the depth of P in the formal group at ell (0 if P is ell-integral)."""
    if P.is_infinity:
        raise ValueError("the uniformiser vanishes at the origin")
    e = P.denominator_root
    return valuation(e, ell) if e % ell == 0 else 0


# ---------------------------------------------------------------- torsion


def _torsion_order_bound(E: EllipticCurveQ, primes_wanted: int = 12) -> int:
    """gcd of #E(F_p) over several good odd primes; the torsion order divides it."""
    g, found = 0, 0
    for p in map(int, _small_primes(3, 2000)):
        if E.discriminant % p == 0:
            continue
        g = gmpy2.gcd(g, fp_count_points(CurveFp(p, E.A, E.B)))
        found += 1
        if g == 1 or found >= primes_wanted:
            break
    return int(g)


def _small_primes(start: int, stop: int):
    p = gmpy2.next_prime(start - 1)
    while p < stop:
        yield p
        p = gmpy2.next_prime(p)


def _square_divisor_roots(n: int) -> list[int]:
    """All y > 0 with y^2 dividing n."""
    roots = [1]
    for prime, exp in fmpz(abs(n)).factor():
        prime = int(prime)
        roots = [r * prime**k for r in roots for k in range(int(exp) // 2 + 1)]
    return sorted(roots)


def _finite_order(E: EllipticCurveQ, P: ECPoint) -> Optional[int]:
    Q = P
    for k in range(1, MAZUR_MAX_ORDER + 1):
        if Q.is_infinity:
            return k
        if Q.x.denominator != 1:
            return None
        Q = _add_unchecked(E, Q, P)
    return None


def torsion_subgroup(E: EllipticCurveQ) -> list[ECPoint]:
    """E(Q)_tors via Nagell-Lutz candidates, filtered by order <= 12."""
    return list(_torsion_cached(E.A, E.B))


@lru_cache(maxsize=256)
def _torsion_cached(A: int, B: int) -> tuple[ECPoint, ...]:
    E = EllipticCurveQ(A, B)
    points = [E.infinity]
    if _torsion_order_bound(E) == 1:
        return tuple(points)
    D = 4 * E.A**3 + 27 * E.B**2
    ys = [0] + _square_divisor_roots(D)
    for y in ys:
        for x in integer_roots_monic_cubic(0, E.A, E.B - y * y):
            for P in E.lift_x(x):
                if P.y == y or P.y == -y:
                    if _finite_order(E, P) is not None and P not in points:
                        points.append(P)
    return tuple(sorted(points, key=_point_sort_key))


def _point_sort_key(P: ECPoint):
    return (0, 0, 0) if P.is_infinity else (1, P.x, P.y)


def point_order(E: EllipticCurveQ, P: ECPoint) -> Optional[int]:
    """Order of P if it is at most 12, else None (infinite order over Q by Mazur)."""
    _check(E, P)
    if P.is_infinity:
        return 1
    Q = P
    for k in range(1, MAZUR_MAX_ORDER + 1):
        if Q.is_infinity:
            return k
        Q = _add_unchecked(E, Q, P)
    return None
