import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from milnor_galois.grouprings import (
    GroupRingElement,
    NotUnit,
    PrimeParams,
    all_elements,
    from_tau_basis,
    is_unit,
    nilpotency_holds,
    socle,
    socle_multiplier,
    tau_minus_one_power,
    to_tau_basis,
    unit_inverse,
    unit_test_and_invert,
    valuation,
    verify_socle_lemma,
)

SMALL = [(2, 1, 1), (2, 2, 1), (2, 3, 1), (3, 1, 1), (3, 2, 1), (2, 2, 2), (5, 1, 1)]


def naive_mul(a, b, N, mod):
    out = [0] * N
    for i in range(N):
        for j in range(N):
            out[(i + j) % N] = (out[(i + j) % N] + a[i] * b[j]) % mod
    return out


@st.composite
def ring_and_elements(draw, count=3):
    p, s, i = draw(st.sampled_from(SMALL))
    params = PrimeParams(p, s, i)
    N = p**i
    elems = [
        GroupRingElement(params, i, draw(st.lists(st.integers(0, p**s - 1), min_size=N, max_size=N)))
        for _ in range(count)
    ]
    return params, i, elems


def test_prime_params_validation():
    with pytest.raises(ValueError):
        PrimeParams(4, 1, 1)
    with pytest.raises(ValueError):
        PrimeParams(2, 0, 1)
    assert PrimeParams(3, 2, 1).modulus == 9


def test_valuation():
    assert valuation(0, 2, 3) == 3
    assert valuation(4, 2, 3) == 2
    assert valuation(3, 3, 2) == 1
    assert valuation(5, 3, 2) == 0


def test_tau_has_order_p_to_the_i():
    P = PrimeParams(3, 2, 2)
    t = GroupRingElement.tau(P, 2)
    assert t**9 == GroupRingElement.one(P, 2)
    assert all(t**k != GroupRingElement.one(P, 2) for k in range(1, 9))


def test_small_ring_example():
    # (1 + tau)^2 = 1 + 2 tau + tau^2 = 2 + 2 tau in Z/4[C_2]
    P = PrimeParams(2, 2, 1)
    a = GroupRingElement(P, 1, [1, 1])
    assert (a * a).coeffs == (2, 2)
    assert socle(P, 1).coeffs == (2, 2)


@settings(max_examples=150, deadline=None)
@given(ring_and_elements())
def test_ring_axioms(data):
    params, i, (a, b, c) = data
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == GroupRingElement.zero(params, i)
    assert a * GroupRingElement.one(params, i) == a


@settings(max_examples=150, deadline=None)
@given(ring_and_elements(count=2))
def test_multiplication_matches_convolution(data):
    params, i, (a, b) = data
    N = params.order(i)
    assert list((a * b).coeffs) == naive_mul(list(a.coeffs), list(b.coeffs), N, params.modulus)


@settings(max_examples=150, deadline=None)
@given(ring_and_elements(count=1))
def test_tau_basis_round_trip(data):
    params, i, (a,) = data
    assert from_tau_basis(params, i, to_tau_basis(a)) == a


@settings(max_examples=150, deadline=None)
@given(ring_and_elements(count=1))
def test_tau_basis_reconstructs(data):
    params, i, (a,) = data
    c = to_tau_basis(a)
    acc = GroupRingElement.zero(params, i)
    for k, ck in enumerate(c):
        acc = acc + tau_minus_one_power(params, i, k) * ck
    assert acc == a


@settings(max_examples=150, deadline=None)
@given(ring_and_elements(count=1))
def test_unit_criterion(data):
    params, i, (a,) = data
    inv = unit_test_and_invert(a)
    if a.augmentation() % params.p:
        assert inv is not None and a * inv == GroupRingElement.one(params, i)
    else:
        assert inv is None
        with pytest.raises(NotUnit):
            unit_inverse(a)


@pytest.mark.parametrize("p,s,i", [(2, 2, 1), (3, 1, 1), (2, 1, 2)])
def test_unit_criterion_brute_force(p, s, i):
    params = PrimeParams(p, s, i)
    ring = list(all_elements(params, i))
    one = GroupRingElement.one(params, i)
    for a in ring:
        has_inverse = any(a * b == one for b in ring)
        assert has_inverse == is_unit(a)


@pytest.mark.parametrize("p,s,i", [(2, 2, 1), (3, 1, 1), (2, 1, 2)])
def test_socle_in_every_principal_ideal_brute_force(p, s, i):
    params = PrimeParams(p, s, i)
    ring = list(all_elements(params, i))
    target = socle(params, i)
    for b in ring:
        if b.is_zero():
            continue
        ideal = {g * b for g in ring}
        assert target in ideal
        assert socle_multiplier(b) * b == target


@pytest.mark.parametrize("p,s,i", SMALL)
def test_nilpotency(p, s, i):
    params = PrimeParams(p, s, i)
    assert nilpotency_holds(params, i)
    # the exponent p^i is sharp
    almost = tau_minus_one_power(params, i, params.order(i) - 1) * p ** (s - 1)
    assert not almost.is_zero()


def test_socle_requires_level():
    with pytest.raises(ValueError):
        socle(PrimeParams(2, 2, 1), 0)


def test_sampled_mode():
    rep = verify_socle_lemma(PrimeParams(3, 3, 2), 2, exhaustive=False, samples=200, rng=random.Random(1))
    assert rep["mode"] == "sampled" and rep["checked"] == 200 and rep["verified"]


def test_serialization_round_trip():
    P = PrimeParams(3, 2, 1)
    for coeffs in itertools.islice(itertools.product(range(9), repeat=3), 0, 500, 37):
        a = GroupRingElement(P, 1, coeffs)
        assert GroupRingElement.from_dict(a.to_dict()) == a
