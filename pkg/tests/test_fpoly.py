import pytest
from hypothesis import given, settings, strategies as st
from sympy import Poly, symbols

from milnor_galois.fpoly import (
    FpPoly,
    factor,
    gcd,
    is_irreducible,
    is_prime,
    monic_irreducibles,
    monic_polys,
    prime_factors,
    square_free_decomposition,
)

X = symbols("x")


def to_sympy(f: FpPoly) -> Poly:
    return Poly(list(reversed(f.coeffs)) or [0], X, modulus=f.p)


def from_sympy(g: Poly, p: int) -> FpPoly:
    return FpPoly(p, [int(c) % p for c in reversed(g.all_coeffs())])


@st.composite
def polys(draw, max_deg=8, primes=(2, 3, 5, 7)):
    p = draw(st.sampled_from(primes))
    coeffs = draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=max_deg + 1))
    return FpPoly(p, coeffs)


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert prime_factors(360) == [2, 3, 5]


def test_parse_and_print():
    f = FpPoly.parse(2, "t^3 + t + 1")
    assert f.coeffs == (1, 1, 0, 1)
    assert f.to_str("t") == "t^3 + t + 1"
    assert FpPoly.parse(3, "2*x^2-1").coeffs == (2, 0, 2)
    with pytest.raises(ValueError):
        FpPoly.parse(2, "t^^2")


def test_zero_degree():
    assert FpPoly(5, []).degree == -1
    assert FpPoly(5, [0, 0]).is_zero()


@settings(max_examples=150, deadline=None)
@given(polys(), st.data())
def test_divmod(f, data):
    g = FpPoly(f.p, data.draw(st.lists(st.integers(0, f.p - 1), min_size=1, max_size=5)))
    if g.is_zero():
        with pytest.raises(ZeroDivisionError):
            divmod(f, g)
        return
    q, r = divmod(f, g)
    assert q * g + r == f
    assert r.degree < g.degree


@settings(max_examples=150, deadline=None)
@given(polys(), st.data())
def test_gcd_matches_sympy(f, data):
    g = FpPoly(f.p, data.draw(st.lists(st.integers(0, f.p - 1), min_size=1, max_size=6)))
    if f.is_zero() and g.is_zero():
        return
    expected = from_sympy(to_sympy(f).gcd(to_sympy(g)), f.p).monic()
    assert gcd(f, g) == expected


@settings(max_examples=200, deadline=None)
@given(polys(max_deg=10))
def test_factor_matches_sympy(f):
    if f.degree < 1:
        return
    lead, facs = factor(f, seed=1)
    prod = FpPoly.const(f.p, lead)
    for g, e in facs:
        assert g.is_monic() and is_irreducible(g)
        prod = prod * g**e
    assert prod == f
    _, sym = to_sympy(f).factor_list()
    expected = sorted((from_sympy(g, f.p).monic(), e) for g, e in sym)
    assert sorted(facs) == expected


@settings(max_examples=100, deadline=None)
@given(polys(max_deg=9))
def test_square_free_decomposition(f):
    if f.degree < 1:
        return
    parts = square_free_decomposition(f)
    prod = FpPoly.const(f.p, 1)
    for g, e in parts:
        assert gcd(g, g.derivative()).is_one()
        prod = prod * g**e
    assert prod == f.monic()


@pytest.mark.parametrize("p,d", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 2)])
def test_irreducible_count_by_necklace_formula(p, d):
    from sympy import divisors, mobius

    expected = sum(mobius(d // k) * p**k for k in divisors(d)) // d
    assert len(monic_irreducibles(p, d)) == expected
    brute = [f for f in monic_polys(p, d) if to_sympy(f).is_irreducible]
    assert list(monic_irreducibles(p, d)) == sorted(brute)


@settings(max_examples=100, deadline=None)
@given(polys(max_deg=5), st.integers(0, 6))
def test_shift(f, a):
    g = f.shift(a)
    for x in range(f.p):
        assert g(x) == f((x + a) % f.p)


def test_serialization_round_trip():
    f = FpPoly.parse(3, "x^4 + 2x + 1")
    assert FpPoly.from_dict(f.to_dict()) == f
