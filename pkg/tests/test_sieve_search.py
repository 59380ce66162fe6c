from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from explicit_mordell.curve_families import FamilySpec, IntPoly, cyclotomic
from explicit_mordell.ec_arith import curve_new, scalar_mul, torsion_subgroup
from explicit_mordell.sieve_search import (
    SieveConfig,
    available_kernels,
    genus2_solve,
    integral_multiples,
    select_kernel,
    sieve_a,
    solve_family,
    verify_candidate,
)
from explicit_mordell.upper_bounds import bound_Cn

E1 = curve_new(1, -1)
G1 = E1.point(1, 1)


def pts(pairs):
    return {(str(a), str(b)) for a, b in pairs}


def test_sieve_c5_on_e1():
    box = bound_Cn(E1, 5, 0.377).a_box
    out = sieve_a(E1, G1, IntPoly.monomial(5), box)
    assert out.survivors == [1]
    assert out.stop_reason == "StableNtest"


def test_sieve_c10_on_e2(curves):
    E2, g2, h2 = curves["E2"]
    out = sieve_a(E2, g2, IntPoly.monomial(10), bound_Cn(E2, 10, h2).a_box)
    assert out.survivors == [] and out.stop_reason == "EmptyList"


def test_verify_candidate_examples():
    assert pts(verify_candidate(E1, G1, IntPoly.monomial(4), 1)) == {("(1, 1)", "(1, 1)"), ("(1, -1)", "(1, 1)")}
    assert pts(verify_candidate(E1, G1, cyclotomic(1), 2)) == {("(2, -3)", "(1, 1)"), ("(2, 3)", "(1, 1)")}
    # x([4]g) has a denominator, so y2 = x1 cannot have cube denominator shape here
    assert verify_candidate(E1, G1, IntPoly.monomial(1), 4) == []


def _planted(a, P2):
    """A linear polynomial p with p(x([a]g)) = y(P2)."""
    x1 = scalar_mul(E1, a, G1).x
    m, e2 = int(x1.numerator), int(x1.denominator)
    return IntPoly((int(P2.y) - m, e2))


@given(st.integers(1, 9), st.sampled_from([(1, 1), (2, -3), (13, 47), (1, -1)]))
def test_planted_solution_survives(a, xy):
    P2 = E1.point(*xy)
    poly = _planted(a, P2)
    out = sieve_a(E1, G1, poly, a + 60, SieveConfig(ntest=10))
    assert a in out.survivors
    found = verify_candidate(E1, G1, poly, a)
    assert any(Q2 == P2 for _, Q2 in found)


def test_round_monotonicity_and_determinism(curves):
    E3, g3, h3 = curves["E3"]
    poly = IntPoly.monomial(3)
    box = bound_Cn(E3, 3, h3).a_box
    serial = sieve_a(E3, g3, poly, box, SieveConfig(parallel_width=1))
    wide = sieve_a(E3, g3, poly, box, SieveConfig(parallel_width=4))
    assert serial.survivors == wide.survivors and serial.stop_reason == wide.stop_reason
    assert serial.rounds == wide.rounds
    counts = [c for _, c in serial.rounds]
    assert counts == sorted(counts, reverse=True)


@pytest.mark.skipif("compiled" not in available_kernels(), reason="compiled kernel not built")
@given(st.integers(0, 10**4), st.integers(1, 12))
def test_kernels_agree(seed, n):
    from explicit_mordell.sieve_search import _round_mask, _sieve_primes

    primes = _sieve_primes(E1, G1, 100 + seed)
    p = next(primes)
    poly = cyclotomic(n) if seed % 2 else IntPoly.monomial(n)
    a = _round_mask(select_kernel("compiled"), E1, G1, [E1.infinity], poly, 400, p)
    b = _round_mask(select_kernel("python"), E1, G1, [E1.infinity], poly, 400, p)
    assert np.array_equal(a, b)


def test_integral_multiples(curves):
    got = {str(P) for P in integral_multiples(E1, G1, torsion_subgroup(E1), 10)}
    assert got == {"(1, 1)", "(1, -1)", "(2, 3)", "(2, -3)", "(13, 47)", "(13, -47)"}
    E2, g2, _ = curves["E2"]
    assert integral_multiples(E2, g2, None, 3) == []
    assert {str(P) for P in integral_multiples(E1, G1, None, 1)} == {"(1, 1)", "(1, -1)"}
    with pytest.raises(ValueError):
        integral_multiples(E1, G1, None, 0)


def test_integral_multiples_certificate_matches_exact():
    fast = integral_multiples(E1, G1, None, 60, exact_limit=4)
    slow = integral_multiples(E1, G1, None, 60, exact_limit=60)
    assert fast == slow


E1_C = {("O", "O"), ("(1, 1)", "(1, 1)"), ("(1, -1)", "(1, 1)")}


@pytest.mark.parametrize("n", [1, 3, 6, 20, 27])
def test_solve_cn_e1(n):
    rep = solve_family(E1, G1, None, FamilySpec.power(E1, n), hhat_g_lower=0.377)
    assert pts(rep.points) == E1_C


def test_solve_d6_e1():
    rep = solve_family(E1, G1, None, FamilySpec.cyclo(E1, 6), hhat_g_lower=0.377)
    assert pts(rep.points) == E1_C | {("(2, 3)", "(2, 3)"), ("(2, -3)", "(2, 3)")}


def test_solve_dn_other_curves(curves):
    for label in ("E2", "E3"):
        E, g, h = curves[label]
        for n in (1, 2, 5, 10):
            assert pts(solve_family(E, g, None, FamilySpec.cyclo(E, n), hhat_g_lower=h).points) == {("O", "O")}


def test_every_reported_point_is_exact():
    for fam in (FamilySpec.cyclo(E1, 6), FamilySpec.poly(E1, IntPoly((1, 1, 1)))):
        rep = solve_family(E1, G1, None, fam, hhat_g_lower=0.377)
        poly = fam.defining_polynomial()
        for P1, P2 in rep.points:
            if P1.is_infinity:
                continue
            assert E1.contains(P1.x, P1.y) and E1.contains(P2.x, P2.y)
            assert mpq(poly(P1.x)) == P2.y
            if rep.sieve is not None:
                a = next(k for k in range(1, 200) if scalar_mul(E1, k, G1).x == P1.x)
                assert a in rep.sieve.survivors


def test_genus2_solve():
    got = genus2_solve(1, 1, 7)
    affine = {(p.x, p.y) for p in got if p.x is not None}
    assert affine == {(Fraction(x), Fraction(y)) for x, y in ((-1, 2), (-1, -2), (0, 1), (0, -1), (1, 2), (1, -2))}
    assert sorted(p.y for p in got if p.x is None) == [-1, 1]
    for x, y in affine:
        assert y * y == x**6 + x**4 + x**2 + 1
