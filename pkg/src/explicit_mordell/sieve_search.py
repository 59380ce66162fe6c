"""Prime-sieve search for rational points on p(x1) = y2 inside E x E.

For every a in the certified box the sieve asks, prime by prime, whether
some point of E(F_l) has y-coordinate p(x([a]g)) mod l.  Values of a that
fail for one prime cannot come from a rational point.  Survivors are decided
exactly by :func:`verify_candidate`.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import gmpy2
import numpy as np
from flint import arb, ctx
from gmpy2 import mpq

from ._rigor import lower, to_arb, upper
from ._sieve_py import sieve_prime as _python_round
from .curve_families import FamilySpec, IntPoly, genus2_to_E
from .ec_arith import (
    ECPoint,
    EllipticCurveQ,
    _add_unchecked,
    integer_roots_monic_cubic,
    scalar_mul,
    torsion_subgroup,
)
from .errors import GuardExceeded, PreconditionViolated, StabilityNotReached
from .heights import generator_height_lower, silverman_band
from .lower_bounds import family_lambda
from .upper_bounds import BoundReport, bound_Cn, bound_Dn, bound_poly

try:
    from ._sieve_kernel import sieve_prime as _compiled_round
except ImportError:  # no compiler at install time
    _compiled_round = None

DEFAULT_NTEST = 25
ESCALATION_FACTOR = 4
# Exact verification refuses candidates whose multiple has more than this many bits.
EXACT_GUARD_BITS = 1 << 24


def available_kernels() -> list[str]:
    return ["compiled", "python"] if _compiled_round is not None else ["python"]


def select_kernel(name: str | None = None) -> Callable:
    """The sieve round implementation: compiled when built, else pure Python.

    ``EXPLICIT_MORDELL_KERNEL=python`` forces the fallback.
    """
    name = name or os.environ.get("EXPLICIT_MORDELL_KERNEL") or ("compiled" if _compiled_round else "python")
    if name == "compiled":
        if _compiled_round is None:
            raise ImportError("the compiled sieve kernel is not built")
        return _compiled_round
    if name == "python":
        return _python_round
    raise ValueError(f"unknown kernel {name!r}")


@dataclass(frozen=True)
class SieveConfig:
    ntest: int = DEFAULT_NTEST
    prime_start: int | None = None
    max_primes: int = 20_000
    parallel_width: int = 1
    kernel: str | None = None
    escalate: bool = True

    def __post_init__(self):
        if self.ntest < 1:
            raise ValueError("ntest must be at least 1")
        if self.parallel_width < 1:
            raise ValueError("parallel_width must be at least 1")


@dataclass
class SieveOutcome:
    survivors: list[int]
    rounds: list[tuple[int, int]]
    stop_reason: str
    verified_points: list = field(default_factory=list)
    last_prime: int = 0

    def as_dict(self) -> dict:
        return {"survivors": list(self.survivors), "rounds": [list(r) for r in self.rounds],
                "stop_reason": self.stop_reason, "last_prime": self.last_prime}


# ---------------------------------------------------------------- sieve


def _residue(q: mpq, p: int) -> int:
    return int(q.numerator) * pow(int(q.denominator), -1, p) % p


def _sieve_primes(E: EllipticCurveQ, g: ECPoint, start: int) -> Iterator[int]:
    """Primes >= start, skipping bad primes and primes in the generator's denominators."""
    bad = abs(E.discriminant) * int(g.x.denominator) * int(g.y.denominator)
    p = int(gmpy2.next_prime(max(start, 3) - 1))
    while True:
        if bad % p:
            yield p
        p = int(gmpy2.next_prime(p))


def _poly_payload(poly: IntPoly, p: int):
    terms = poly.nonzero_terms
    exps = np.array([e for e, _ in terms], dtype=np.int64)
    coeffs = np.array([c % p for _, c in terms], dtype=np.int64)
    dense = np.array([c % p for c in poly.coeffs], dtype=np.int64)
    sparse_cost = sum(max(1, e.bit_length()) * 2 for e, _ in terms)
    return exps, coeffs, dense, poly.degree <= sparse_cost


def _round_mask(kernel, E, g, translates, poly, a_box, p) -> np.ndarray:
    gp = (_residue(g.x, p), _residue(g.y, p))
    exps, coeffs, dense, horner = _poly_payload(poly, p)
    mask = None
    for T in translates:
        start = None if T.is_infinity else (_residue(T.x, p), _residue(T.y, p))
        m = kernel(p, E.A, E.B, start, gp, a_box, exps, coeffs, dense, horner)
        mask = m if mask is None else (mask | m)
    return mask


def sieve_a(E: EllipticCurveQ, g: ECPoint, p_poly: IntPoly, a_box: int, cfg: SieveConfig = SieveConfig(),
            translates: Sequence[ECPoint] | None = None, survivors: Sequence[int] | None = None) -> SieveOutcome:
    """Sieve a in [1, a_box]; stop when nothing survives or ``ntest`` rounds change nothing.

    Rounds are committed in increasing prime order whatever the parallel
    width, so the outcome is deterministic.
    """
    if a_box < 1:
        return SieveOutcome([], [], "EmptyList")
    kernel = select_kernel(cfg.kernel)
    translates = list(translates) if translates else [E.infinity]
    alive = np.zeros(a_box + 1, dtype=np.uint8)
    if survivors is None:
        alive[1:] = 1
    else:
        alive[[a for a in survivors if 1 <= a <= a_box]] = 1
    count = int(alive.sum())
    rounds: list[tuple[int, int]] = []
    if count == 0:
        return SieveOutcome([], rounds, "EmptyList")
    primes = _sieve_primes(E, g, cfg.prime_start or (a_box + 1))
    stable = 1
    used = 0
    last = 0
    pool = ThreadPoolExecutor(cfg.parallel_width) if cfg.parallel_width > 1 else None
    try:
        while True:
            batch = [next(primes) for _ in range(min(cfg.parallel_width, cfg.max_primes - used))]
            if not batch:
                return SieveOutcome(np.flatnonzero(alive).tolist(), rounds, "GuardExceeded", last_prime=last)
            args = [(kernel, E, g, translates, p_poly, a_box, p) for p in batch]
            masks = list(pool.map(lambda a: _round_mask(*a), args)) if pool else [_round_mask(*a) for a in args]
            for p, mask in zip(batch, masks):
                used += 1
                last = p
                alive &= mask
                new_count = int(alive.sum())
                rounds.append((p, new_count))
                stable = stable + 1 if new_count == count else 0
                count = new_count
                if count == 0:
                    return SieveOutcome([], rounds, "EmptyList", last_prime=p)
                if stable > cfg.ntest:
                    return SieveOutcome(np.flatnonzero(alive).tolist(), rounds, "StableNtest", last_prime=p)
    finally:
        if pool is not None:
            pool.shutdown(wait=False, cancel_futures=True)


# ---------------------------------------------------------------- exact verification


def _rational_point_with_y(E: EllipticCurveQ, y2: mpq) -> list[ECPoint]:
    """All rational points of E with the given y-coordinate."""
    f3 = int(y2.denominator)
    f = int(gmpy2.iroot(gmpy2.mpz(f3), 3)[0])
    if f**3 != f3:
        return []
    N = int(y2.numerator)
    roots = integer_roots_monic_cubic(0, E.A * f**4, E.B * f**6 - N * N)
    return [ECPoint(E, mpq(M, f * f), y2) for M in roots]


def _multiple_fits(a: int, hhat_g_upper: float) -> bool:
    # log of the coordinates grows like (2/3) a^2 hhat(g) nats.
    return a * a * hhat_g_upper * 2 / 3 / math.log(2) <= EXACT_GUARD_BITS


def verify_candidate(E: EllipticCurveQ, g: ECPoint, p_poly: IntPoly, a: int, b_box: int | None = None,
                     translate: ECPoint | None = None, hhat_g_upper: float | None = None) -> list[tuple]:
    """Exact decision for one a: every ((x1, +-y1), P2) on the curve with P1 = [a]g + T."""
    if hhat_g_upper is not None and not _multiple_fits(a, hhat_g_upper):
        raise GuardExceeded(f"a = {a} is too large for exact verification")
    P1 = scalar_mul(E, a, g, guard=max(abs(a), 1))
    if translate is not None and not translate.is_infinity:
        P1 = _add_unchecked(E, P1, translate)
    if P1.is_infinity:
        return []
    y2 = mpq(p_poly(P1.x))
    found = []
    for P2 in _rational_point_with_y(E, y2):
        for Q1 in (P1, -P1) if P1.y != 0 else (P1,):
            found.append((Q1, P2))
    return found


# ---------------------------------------------------------------- integral points


def _ball_add(A: arb, P, Q):
    if P is None:
        return Q
    (x1, y1), (x2, y2) = P, Q
    dx = x2 - x1
    if dx.contains(0):
        if P is Q:
            slope = (3 * x1 * x1 + A) / (2 * y1)
        else:
            return "fail"
    else:
        slope = (y2 - y1) / dx
    if not slope.is_finite():
        return "fail"
    x3 = slope * slope - x1 - x2
    return x3, slope * (x1 - x3) - y1


def _ball_multiple_x(E: EllipticCurveQ, P: ECPoint, k: int, T: ECPoint, prec: int):
    """Enclosure of x([k]P + T) computed with interval arithmetic, or None on failure."""
    old = ctx.prec
    ctx.prec = prec
    try:
        A = arb(E.A)
        base = (to_arb(Fraction(int(P.x.numerator), int(P.x.denominator))),
                to_arb(Fraction(int(P.y.numerator), int(P.y.denominator))))
        result = None if T.is_infinity else (arb(int(T.x)), arb(int(T.y)))
        n = k
        while n:
            if n & 1:
                result = _ball_add(A, result, base)
                if result == "fail":
                    return None
            n >>= 1
            if n:
                base = _ball_add(A, base, base)
                if base == "fail":
                    return None
        return None if result is None else +result[0]
    finally:
        ctx.prec = old


def _certified_non_integral(E: EllipticCurveQ, P: ECPoint, k: int, T: ECPoint, hhat_lo: arb, c3: arb) -> bool:
    """Archimedean certificate that [k]P + T is not integral.

    An integral point Q has log max(1, |x(Q)|) >= (2/3) hhat(Q) - 2 c3, so a
    numerical enclosure of |x| below that threshold rules integrality out.
    """
    threshold = (2 * k * k * hhat_lo / 3 - 2 * c3)
    if not lower(threshold) > 0:
        return False
    for prec in (128, 512, 2048):
        x = _ball_multiple_x(E, P, k, T, prec)
        if x is None or not x.is_finite():
            continue
        return lower(threshold) > upper(abs(x).max(arb(1)).log())
    return False


def integral_multiples(E: EllipticCurveQ, P0: ECPoint, torsion: Sequence[ECPoint] | None, k_max: int,
                       S: Sequence[int] = (), exact_limit: int = 32, hhat_P0=None) -> list[ECPoint]:
    """All S-integral points +-[k]P0 + T with 1 <= k <= k_max and T torsion.

    Small k are decided exactly; larger k use the interval certificate (for
    S empty) and fall back to exact arithmetic when it is inconclusive.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    torsion = list(torsion) if torsion is not None else torsion_subgroup(E)
    S = set(S)

    def s_integral(Q: ECPoint) -> bool:
        den = int(Q.x.denominator)
        for p in S:
            while den % p == 0:
                den //= p
        return den == 1

    out: set[ECPoint] = set()
    hhat_lo = to_arb(lower(generator_height_lower(E, P0) if hhat_P0 is None else to_arb(hhat_P0)))
    c3 = silverman_band(E).c3
    multiple = E.infinity
    for k in range(1, k_max + 1):
        if k <= exact_limit:
            multiple = _add_unchecked(E, multiple, P0)
        for T in torsion:
            for sign in (1, -1):
                if not S and k > exact_limit and _certified_non_integral(E, P0 if sign > 0 else -P0, k,
                                                                         T, hhat_lo, c3):
                    continue
                base = multiple if k <= exact_limit else scalar_mul(E, k, P0, guard=k)
                Q = _add_unchecked(E, base if sign > 0 else -base, T)
                if not Q.is_infinity and s_integral(Q):
                    out.add(Q)
    return sorted(out, key=lambda Q: (Q.x, Q.y))


# ---------------------------------------------------------------- pipeline


PointPair = tuple[ECPoint, ECPoint]


def _pair_key(pair: PointPair):
    def key(P):
        return (0, 0, 0) if P.is_infinity else (1, P.x, P.y)
    return key(pair[0]), key(pair[1])


@dataclass
class RationalPointsReport:
    family_id: str
    curve_label: str
    bound: BoundReport
    lower: dict
    sieve: SieveOutcome | None
    points: list[PointPair]
    path: str
    timing: dict
    config: dict


def _bound_for(family: FamilySpec, hg) -> BoundReport:
    E = family.curve
    if family.kind == "cn":
        return bound_Cn(E, family.n, hg)
    if family.kind == "dn":
        return bound_Dn(E, family.n, hg)
    if family.kind == "poly":
        return bound_poly(E, family.polynomial, hg)
    raise ValueError("solve_family handles p(x1) = y2 families; use genus2_solve for the genus-2 family")


def solve_family(E: EllipticCurveQ, g: ECPoint, torsion: Sequence[ECPoint] | None, family: FamilySpec,
                 cfg: SieveConfig = SieveConfig(), hhat_g_lower=None) -> RationalPointsReport:
    """All rational points on the family curve, with provenance."""
    t0 = time.perf_counter()
    if family.curve != E:
        raise PreconditionViolated("family host curve differs from E")
    if g.curve != E or g.is_infinity:
        raise PreconditionViolated("generator must be a finite point of E")
    torsion = list(torsion) if torsion is not None else torsion_subgroup(E)
    hg = to_arb(lower(generator_height_lower(E, g, eps=1e-2) if hhat_g_lower is None else to_arb(hhat_g_lower)))
    if not lower(hg) > 0:
        raise PreconditionViolated("generator has zero height")
    poly = family.defining_polynomial()
    bound = _bound_for(family, hg)
    t_bound = time.perf_counter()

    lam = family_lambda(E, g, poly, hg)
    lower_info = {"mode": None, "lambda": None, "applies": False}
    points: set[PointPair] = {(E.infinity, E.infinity)}
    outcome = None
    if lam is not None:
        mode, value = lam
        lower_info = {"mode": mode, "lambda": value, "applies": lower(value) > upper(bound.hhat_upper)}
    if lower_info["applies"]:
        if lower_info["mode"] == "trivial":
            path = "lower_bound_trivial"
        else:
            path = "lower_bound_integral"
            k_max = math.isqrt(math.floor(upper(bound.hhat_upper / hg)))
            integral = integral_multiples(E, g, torsion, max(k_max, 1), S=_leading_primes(poly), hhat_P0=hg)
            for P1 in integral:
                y2 = mpq(poly(P1.x))
                for P2 in integral:
                    if P2.y == y2:
                        points.add((P1, P2))
    else:
        path = "sieve"
        outcome = _sieve_and_verify(E, g, torsion, poly, bound, cfg, hg)
        points.update(outcome.verified_points)
    t_end = time.perf_counter()
    for P1, P2 in points:
        if not P1.is_infinity:
            assert E.contains(P1.x, P1.y) and E.contains(P2.x, P2.y) and poly(P1.x) == P2.y
    return RationalPointsReport(
        family_id=family.family_id, curve_label=E.label, bound=bound, lower=lower_info, sieve=outcome,
        points=sorted(points, key=_pair_key), path=path,
        timing={"bound": t_bound - t0, "search": t_end - t_bound, "total": t_end - t0},
        config={"ntest": cfg.ntest, "parallel_width": cfg.parallel_width, "max_primes": cfg.max_primes,
                "kernel": cfg.kernel or ("compiled" if _compiled_round else "python"),
                "hhat_g_lower": str(lower(hg))})


def _leading_primes(poly: IntPoly) -> list[int]:
    from .lower_bounds import _prime_divisors

    return _prime_divisors(abs(poly.leading))


def _sieve_and_verify(E, g, torsion, poly, bound, cfg, hg) -> SieveOutcome:
    hg_up = float(upper(hg)) * 1.0001 + 1e-9
    translates = list(torsion)
    outcome = sieve_a(E, g, poly, bound.a_box, cfg, translates=translates)
    ntest = cfg.ntest
    escalated = False
    while True:
        verified, undecided = [], []
        for a in outcome.survivors:
            if not _multiple_fits(a, hg_up):
                undecided.append(a)
                continue
            for T in translates:
                verified.extend(verify_candidate(E, g, poly, a, bound.b_box, translate=T))
        if not undecided or outcome.stop_reason == "EmptyList":
            outcome.verified_points = verified
            return outcome
        if escalated or not cfg.escalate:
            raise StabilityNotReached(f"{len(undecided)} survivors beyond the exact-verification guard",
                                      survivors=undecided)
        ntest *= ESCALATION_FACTOR
        escalated = True
        more = sieve_a(E, g, poly, bound.a_box,
                       SieveConfig(ntest=ntest, prime_start=outcome.last_prime + 1, max_primes=cfg.max_primes,
                                   parallel_width=cfg.parallel_width, kernel=cfg.kernel),
                       translates=translates, survivors=outcome.survivors)
        more.rounds = outcome.rounds + more.rounds
        outcome = more


# ---------------------------------------------------------------- genus 2


@dataclass(frozen=True)
class Genus2Point:
    """A point of y^2 = a x^6 + b x^4 + b x^2 + a; ``x is None`` marks a point at infinity,
    where ``y`` is the limit of y / x^3 (a square root of a)."""

    x: Fraction | None
    y: Fraction

    def __str__(self):
        if self.x is None:
            return "inf+" if self.y > 0 else "inf-"
        return f"({self.x}, {self.y})"


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    return Fraction(n, d) if n * n == q.numerator and d * d == q.denominator else None


def genus2_solve(a: int, b: int, index_bound: int, generator: ECPoint | None = None,
                 torsion: Sequence[ECPoint] | None = None) -> list[Genus2Point]:
    """Rational points of the genus-2 curve given a bound on min(|n1|, |n2|).

    Each candidate Q = n1 P0 + T on the short model is read back through
    both coordinate maps; every returned point is checked exactly.
    """
    model = genus2_to_E(a, b)
    E = model.short
    if generator is None:
        from .cli_reports import builtin_generator

        generator = builtin_generator(E)
        if generator is None:
            raise PreconditionViolated(f"no known generator for {E}; pass one explicitly")
    if generator.curve != E:
        generator = E.point(generator.x, generator.y)
    torsion = list(torsion) if torsion is not None else torsion_subgroup(E)
    found: set[Genus2Point] = set()
    root_a = _rational_sqrt(Fraction(a))

    def add(x, y):
        if x is None:
            if y * y == a:
                found.add(Genus2Point(None, Fraction(y)))
        elif model.contains(x, y):
            found.add(Genus2Point(Fraction(x), Fraction(y)))

    for n1 in range(-index_bound, index_bound + 1):
        base = scalar_mul(E, n1, generator, guard=max(index_bound, 1))
        for T in torsion:
            Q = _add_unchecked(E, base, T)
            if Q.is_infinity:
                if root_a is not None:
                    for s in (root_a, -root_a):
                        add(None, s)  # first map: x = infinity
                        add(Fraction(0), s)  # second map: x = 0
                continue
            xi = (Fraction(Q.x) - 3 * b) / (9 * a)
            yQ = Fraction(Q.y)
            # first map: x^2 = xi, y = yQ / (27 a)
            r = _rational_sqrt(xi)
            if r is not None:
                for x in {r, -r}:
                    add(x, yQ / (27 * a))
            # second map: x^-2 = xi, y = yQ x^3 / (27 a)
            if xi == 0:
                add(None, yQ / (27 * a))
            else:
                r = _rational_sqrt(1 / xi)
                if r is not None:
                    for x in {r, -r}:
                        add(x, yQ * x**3 / (27 * a))
    return sorted(found, key=lambda P: (P.x is not None, P.x or 0, P.y))
