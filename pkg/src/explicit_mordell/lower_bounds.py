"""l-adic lower bounds for the height of non-integral points on p(x1) = y2 curves.

A point whose image is not integral at some prime l outside S has height at
least lambda = hhat(P0) * min a_l^2 l^(2 ceil(d1/d2) - 2), where a_l is the least
multiple of the generator in the kernel of reduction at l.  Comparing lambda
with the explicit upper bound gives the crossover index beyond which every
rational point is a pair of integral points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import gmpy2
from flint import arb, fmpz

from ._rigor import LOG2, lower, to_arb, upper
from .curve_families import IntPoly, phi_omega2_mu
from .ec_arith import (
    CurveFp,
    ECPoint,
    EllipticCurveQ,
    _add_unchecked,
    fp_add,
    reduce_point,
    torsion_subgroup,
)
from .errors import DegreeOrderViolation, HypothesisFailed
from .explicit_constants import table1
from .upper_bounds import POLY_FACTOR, POLY_SHIFT, bound_Cn

A_ELL_CAP = 10_000
BAD_PRIME_SEARCH = 64


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def kernel_membership(E: EllipticCurveQ, P: ECPoint, ell: int, S: Iterable[int] = ()) -> bool:
    """Whether P reduces to the origin modulo ell on the given model."""
    if ell in set(S):
        raise HypothesisFailed(f"{ell} lies in S")
    if P.is_infinity:
        return True
    return P.x.denominator % ell == 0


def m_integral(E: EllipticCurveQ, P0: ECPoint, limit: int = 64) -> int:
    """Number of consecutive integral multiples P0, 2P0, ... (stops at ``limit``)."""
    Q, k = P0, 0
    while k < limit and not Q.is_infinity and Q.is_integral:
        k += 1
        Q = _add_unchecked(E, Q, P0)
    return k


def smallest_prime_outside(S: Iterable[int], start: int = 2) -> int:
    S = set(S)
    p = int(gmpy2.next_prime(start - 1))
    while p in S:
        p = int(gmpy2.next_prime(p))
    return p


def height_exponent(d1: int, d2: int) -> int:
    """2 ceil(d1/d2) - 2."""
    return 2 * _ceil_div(d1, d2) - 2


def a_ell_exact(E: EllipticCurveQ, P0: ECPoint, ell: int) -> int:
    """A certified lower bound for a_ell (exact when it is found).

    Good primes: the order of P0 modulo ell.  Bad primes: a direct search
    over the first multiples; when none lies in the kernel the search
    length plus one is returned, which is still a valid lower bound.
    """
    if ell != 2 and E.discriminant % ell != 0:
        C = CurveFp(ell, E.A, E.B)
        start = reduce_point(E, P0, ell)
        if start is None:
            return 1
        Q, k = start, 1
        while Q is not None:
            Q = fp_add(C, Q, start)
            k += 1
        return k
    Q = P0
    for k in range(1, BAD_PRIME_SEARCH + 1):
        if Q.is_infinity or Q.x.denominator % ell == 0:
            return k
        Q = _add_unchecked(E, Q, P0)
    return BAD_PRIME_SEARCH + 1


@dataclass(frozen=True)
class LowerBoundInput:
    E: EllipticCurveQ
    P0: ECPoint
    d1: int
    hhat_P0: arb
    S: frozenset = frozenset()
    d2: int = 3
    m_integral: int = 0

    @classmethod
    def for_polynomial(cls, E: EllipticCurveQ, P0: ECPoint, p: IntPoly, hhat_P0) -> "LowerBoundInput":
        lead = abs(p.leading)
        S = frozenset(int(q) for q in _prime_divisors(lead))
        return cls(E=E, P0=P0, d1=2 * p.degree, hhat_P0=to_arb(hhat_P0), S=S, d2=3,
                   m_integral=m_integral(E, P0))


def _prime_divisors(n: int) -> list[int]:
    if n <= 1:
        return []
    return [int(p) for p, _ in fmpz(n).factor()]


@dataclass(frozen=True)
class LambdaResult:
    value: arb
    ell: int
    a_ell: int
    exponent: int
    details: dict = field(default_factory=dict, compare=False)


def lambda_lower(inp: LowerBoundInput, sharpen: bool = False, cap: int = A_ELL_CAP) -> LambdaResult:
    """lambda >= hhat(P0) (m+1)^2 l_min^e, optionally sharpened by exact a_l for l < cap."""
    if inp.d1 <= inp.d2:
        raise DegreeOrderViolation(f"need d1 > d2, got d1={inp.d1}, d2={inp.d2}")
    e = height_exponent(inp.d1, inp.d2)
    floor_a = inp.m_integral + 1
    ell_min = smallest_prime_outside(inp.S)
    best = (floor_a * floor_a * ell_min**e, ell_min, floor_a)
    if sharpen and len(torsion_subgroup(inp.E)) == 1:
        best = None
        ell = ell_min
        while ell < cap:
            if best is not None and floor_a * floor_a * ell**e >= best[0]:
                break
            a = max(a_ell_exact(inp.E, inp.P0, ell), floor_a)
            if best is None or a * a * ell**e < best[0]:
                best = (a * a * ell**e, ell, a)
            ell = smallest_prime_outside(inp.S, ell + 1)
        tail = smallest_prime_outside(inp.S, cap)
        if best is None or floor_a * floor_a * tail**e < best[0]:
            best = (floor_a * floor_a * tail**e, tail, floor_a)
    factor, ell, a = best
    return LambdaResult(value=to_arb(lower(inp.hhat_P0)) * factor, ell=ell, a_ell=a, exponent=e)


def lambda_trivial(E: EllipticCurveQ, P0: ECPoint, ell: int, d1: int, d2: int, hhat_P0,
                   S: Iterable[int] = ()) -> arb:
    """hhat(P) >= l^e hhat(P0) when torsion is trivial and P0 is not l-integral."""
    if d1 <= d2:
        raise DegreeOrderViolation(f"need d1 > d2, got d1={d1}, d2={d2}")
    if ell in set(S):
        raise HypothesisFailed(f"{ell} lies in S")
    if len(torsion_subgroup(E)) != 1:
        raise HypothesisFailed("torsion subgroup is not trivial")
    if P0.is_infinity or P0.x.denominator % ell != 0:
        raise HypothesisFailed(f"P0 is integral at {ell}")
    return to_arb(lower(to_arb(hhat_P0))) * ell ** height_exponent(d1, d2)


def trivial_prime(E: EllipticCurveQ, P0: ECPoint) -> int | None:
    """Largest prime dividing the x-denominator of P0, if torsion is trivial."""
    if P0.x.denominator == 1 or len(torsion_subgroup(E)) != 1:
        return None
    return max(_prime_divisors(math.isqrt(int(P0.x.denominator))))


# ---------------------------------------------------------------- crossovers


def _lambda_real(hg: arb, factor: int, ell: int, d1: int, d2: int, exponent: str) -> arb:
    if exponent == "ceil":
        return hg * factor * to_arb(ell) ** height_exponent(d1, d2)
    if exponent == "smooth":
        # 2 d1/d2 - 2 <= 2 ceil(d1/d2) - 2, so this is a weaker but smooth bound.
        return hg * factor * to_arb(ell) ** (to_arb(Fraction(2 * d1, d2)) - 2)
    raise ValueError(f"unknown exponent mode {exponent!r}")


def _least_eventual(holds: Callable[[int], bool], start: int, stop: int) -> int:
    """Least N >= start with holds(k) for all k in [N, stop]."""
    last_fail = start - 1
    for k in range(start, stop + 1):
        if not holds(k):
            last_fail = k
    if last_fail == stop:
        raise HypothesisFailed(f"lower bound never overtakes the upper bound below {stop}")
    return last_fail + 1


def _cyclotomic_crude_upper(E: EllipticCurveQ, f: int) -> arb:
    """Upper bound for the cyclotomic family with 2^omega2(n) <= phi(n) = f."""
    tab = table1(E)
    inner = f * LOG2 + 2 * tab.c6 + POLY_SHIFT + 2 * tab.c1
    return POLY_FACTOR * (2 * f + 3) ** 2 * inner + 4 * tab.c2


@dataclass(frozen=True)
class CrossoverResult:
    n: int
    family: str
    mode: str
    ell: int
    factor: int
    phi_threshold: int | None = None


def crossover_n(E: EllipticCurveQ, family: str, P0: ECPoint, hhat_P0, mode: str = "auto",
                m: int | None = None, ell: int | None = None, exponent: str = "smooth",
                search_limit: int = 300) -> CrossoverResult:
    """Least n beyond which the lower bound for non-integral points beats the upper bound.

    ``mode`` is ``trivial`` (needs ``ell`` dividing the generator's
    x-denominator and trivial torsion), ``general`` (uses the m+1 floor at
    l = 2) or ``auto``.  ``exponent="smooth"`` uses 2 d1/d2 - 2 as in the
    closed-form comparison; ``"ceil"`` uses the exact exponent.

    The scan stops at ``search_limit``.  Past it the lower bound gains a
    factor of at least 2^4 every three steps while the quadratic upper
    bound grows by less than a factor 2, so the comparison cannot flip back.
    """
    hg = to_arb(lower(to_arb(hhat_P0)))
    if mode == "auto":
        ell = trivial_prime(E, P0)
        mode = "trivial" if ell is not None else "general"
    if mode == "trivial":
        if ell is None:
            ell = trivial_prime(E, P0)
        if ell is None or P0.x.denominator % ell:
            raise HypothesisFailed("trivial mode needs l dividing the generator's x-denominator")
        if len(torsion_subgroup(E)) != 1:
            raise HypothesisFailed("trivial mode needs trivial torsion")
        factor = 1
    elif mode == "general":
        if m is None:
            m = m_integral(E, P0)
        ell, factor = 2, (m + 1) ** 2
    else:
        raise ValueError(f"unknown mode {mode!r}")

    def beats(d1: int, upper_bound: arb) -> bool:
        return lower(_lambda_real(hg, factor, ell, d1, 3, exponent)) > upper(upper_bound)

    if family == "cn":
        n = _least_eventual(lambda k: beats(2 * k, bound_Cn(E, k, hg).hhat_upper), 2, search_limit)
        return CrossoverResult(n, family, mode, ell, factor)
    if family == "dn":
        f0 = _least_eventual(lambda f: beats(2 * f, _cyclotomic_crude_upper(E, f)), 2, search_limit)
        # phi(n) >= sqrt(n/2), so phi(n) < f0 forces n < 2 f0^2.
        worst = max((k for k in range(1, 2 * f0 * f0 + 2) if phi_omega2_mu(k)[0] < f0), default=0)
        return CrossoverResult(worst + 1, family, mode, ell, factor, phi_threshold=f0)
    raise ValueError(f"unknown family {family!r}")


def family_lambda(E: EllipticCurveQ, P0: ECPoint, p: IntPoly, hhat_P0) -> tuple[str, arb] | None:
    """Exact-exponent lower bound for non-integral points on p(x1) = y2, with its mode.

    Returns ``("trivial", lam)`` when every nonzero multiple of P0 is
    non-integral (so lam bounds every point other than (O, O)), ``("general",
    lam)`` when lam bounds points that are not pairs of integral points, or
    None when d1 <= d2.
    """
    d1 = 2 * p.degree
    if d1 <= 3:
        return None
    inp = LowerBoundInput.for_polynomial(E, P0, p, hhat_P0)
    ell = trivial_prime(E, P0)
    if ell is not None and ell not in inp.S:
        return "trivial", lambda_trivial(E, P0, ell, d1, 3, hhat_P0, inp.S)
    return "general", lambda_lower(inp).value
