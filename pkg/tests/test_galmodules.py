import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from oracles import jordan_partition

from milnor_galois.galmodules import (
    LIFT_FAILED,
    NOT_THEOREM_SHAPE,
    DecompositionCertificate,
    GModulePresentation,
    certificate_from_jordan,
    decompose_tower,
    jordan_decompose_mod_p,
    lift_basis,
    orbit_columns,
    partition_from_ranks,
    permutation_module,
    rank_sequence,
    reduce_mod,
    regular_module,
    socle_criterion,
    tower_compatibility_check,
    tower_of,
    verify_free_decomposition,
)
from milnor_galois.grouprings import PrimeParams
from milnor_galois.modp_linalg import MatrixModPS, has_trivial_kernel, inverse, is_invertible


def module(p, s, n, rows):
    return GModulePresentation(PrimeParams(p, s, n), len(rows), MatrixModPS.from_rows(p, s, rows))


def random_invertible(p, s, size, rng):
    while True:
        P = MatrixModPS.from_rows(p, s, [[rng.randrange(p**s) for _ in range(size)] for _ in range(size)])
        if is_invertible(P):
            return P


def random_unipotent(p, size, rng):
    # upper unitriangular, then conjugated: (sigma - 1) is nilpotent of index <= size
    rows = [[int(i == j) if j <= i else rng.randrange(p) for j in range(size)] for i in range(size)]
    U = MatrixModPS.from_rows(p, 1, rows)
    P = random_invertible(p, 1, size, rng)
    return P @ U @ inverse(P)


def group_exponent(p, size):
    n = 0
    while p**n < size:
        n += 1
    return n


# reference examples


def test_jordan_examples():
    assert jordan_decompose_mod_p(module(2, 1, 1, [[0, 1], [1, 0]])) == [2]
    assert jordan_decompose_mod_p(regular_module(PrimeParams(2, 1, 2))) == [4]
    assert jordan_decompose_mod_p(module(3, 1, 1, [[1]])) == [1]


def test_trivial_module_certificate():
    M = module(3, 2, 1, [[1]])
    rep = verify_free_decomposition(M, DecompositionCertificate.of([([1], 0)]))
    assert rep.verified and rep.ranks == (1, 0)


def test_regular_module_single_vector_at_level_zero_fails_spanning():
    M = regular_module(PrimeParams(2, 2, 1))
    rep = verify_free_decomposition(M, DecompositionCertificate.of([([1, 0], 0)]))
    assert not rep.verified and rep.failure_reason == "spanning"


def test_lift_regular():
    M = regular_module(PrimeParams(3, 2, 1))
    prev = DecompositionCertificate.of([([1, 0, 0], 1)])
    assert lift_basis(M, prev) == prev
    with pytest.raises(ValueError):
        lift_basis(M, DecompositionCertificate.of([([1, 0, 0], 0)]))


def test_not_theorem_shape():
    # order-3 action with a single Jordan block of size 2 mod 3
    M = module(3, 1, 1, [[0, 2], [1, 2]])
    res = decompose_tower([M])
    assert res.report.failure_reason == NOT_THEOREM_SHAPE
    assert res.jordan_blocks == [2]
    assert jordan_partition(M.action.to_rows(), 3) == [2]


def test_lift_failure_reports_stage():
    # diag(1, -1) mod 4: mod 2 it is trivial, but -1 is not fixed at level 0
    M = module(2, 2, 1, [[1, 0], [0, 3]])
    res = decompose_tower(tower_of(M))
    assert res.report.failure_reason == LIFT_FAILED
    assert res.report.stage == 2
    assert res.report.details["check"] == "level_invariance"


def test_incompatible_tower_rejected():
    M2 = regular_module(PrimeParams(2, 2, 1))
    bad = module(2, 1, 1, [[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        decompose_tower([bad, M2])


def test_compatibility_check_detects_perturbation():
    M = regular_module(PrimeParams(2, 3, 1), 2)
    res = decompose_tower(tower_of(M))
    assert tower_compatibility_check(res.certificates, 2)
    assert tower_compatibility_check(res.certificates[:1], 2)
    coords, level = res.certificates[1].generators[0]
    bumped = (tuple((coords[0] + 1,) + coords[1:]), level)
    certs = list(res.certificates)
    certs[1] = DecompositionCertificate(((bumped),) + certs[1].generators[1:])
    assert not tower_compatibility_check(certs, 2)


@pytest.mark.parametrize("p,n,s,k", [(2, 1, 3, 3), (3, 2, 2, 2), (2, 2, 3, 1)])
def test_regular_tower(p, n, s, k):
    res = decompose_tower(tower_of(regular_module(PrimeParams(p, s, n), k)))
    assert res.report.verified
    assert all(r == (0,) * n + (k,) for r in res.stage_ranks)


# properties


@st.composite
def permutation_data(draw):
    p, n = draw(st.sampled_from([(2, 1), (2, 2), (3, 1)]))
    s = draw(st.integers(1, 3))
    levels = draw(st.lists(st.integers(0, n), min_size=1, max_size=4))
    return PrimeParams(p, s, n), levels


@settings(max_examples=60, deadline=None)
@given(permutation_data())
def test_permutation_module_ranks_match_orbit_counts(data):
    params, levels = data
    M = permutation_module(params, [params.p**i for i in levels])
    res = decompose_tower(tower_of(M))
    assert res.report.verified
    counts = Counter(levels)
    expected = tuple(counts.get(i, 0) for i in range(params.n + 1))
    assert all(r == expected for r in res.stage_ranks)
    assert tower_compatibility_check(res.certificates, params.p)
    assert sum(r * params.p**i for i, r in enumerate(expected)) == M.rank


@settings(max_examples=40, deadline=None)
@given(permutation_data(), st.integers(0, 10**6))
def test_conjugated_permutation_module(data, seed):
    """Either a verified decomposition with orbit-count ranks, or an explicit lift failure."""
    params, levels = data
    M = permutation_module(params, [params.p**i for i in levels])
    P = random_invertible(params.p, params.s, M.rank, random.Random(seed))
    Mc = GModulePresentation(params, M.rank, P @ M.action @ inverse(P))
    res = decompose_tower(tower_of(Mc))
    counts = Counter(levels)
    expected = tuple(counts.get(i, 0) for i in range(params.n + 1))
    assert res.stage_ranks[0] == expected
    if res.report.verified:
        assert all(r == expected for r in res.stage_ranks)
    else:
        assert res.report.failure_reason == LIFT_FAILED
    if set(levels) == {params.n}:
        assert res.report.verified


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(1, 8), st.integers(0, 10**6))
def test_jordan_matches_rank_oracle(p, size, seed):
    rng = random.Random(seed)
    A = random_unipotent(p, size, rng)
    M = GModulePresentation(PrimeParams(p, 1, group_exponent(p, size)), size, A)
    blocks = jordan_decompose_mod_p(M)
    assert blocks == jordan_partition(A.to_rows(), p)
    assert blocks == partition_from_ranks(rank_sequence(M))
    Q = random_invertible(p, 1, size, rng)
    Mq = GModulePresentation(M.params, size, inverse(Q) @ A @ Q)
    assert jordan_decompose_mod_p(Mq) == blocks


@settings(max_examples=60, deadline=None)
@given(permutation_data(), st.data())
def test_socle_criterion_matches_annihilator_check(data, draw):
    params, levels = data
    M = permutation_module(params, [params.p**i for i in levels])
    level = draw.draw(st.integers(0, params.n))
    # sigma^(p^level) must fix v for the level-level action to make sense
    fixed = [i for i, lv in enumerate(levels) if lv <= level]
    if not fixed:
        return
    v = [0] * M.rank
    starts = [sum(params.p**x for x in levels[:k]) for k in range(len(levels))]
    for k in fixed:
        for j in range(params.p ** levels[k]):
            v[starts[k] + j] = draw.draw(st.integers(0, params.modulus - 1))
    cols = orbit_columns(M, v, level)
    free = has_trivial_kernel(MatrixModPS.from_columns(params.p, params.s, cols, M.rank))
    assert socle_criterion(M, v, level) == free


def test_reduce_mod_and_serialization():
    M = regular_module(PrimeParams(3, 2, 1), 2)
    assert reduce_mod(M, 1).params.s == 1
    assert GModulePresentation.from_dict(M.to_dict()) == M
    cert = certificate_from_jordan(reduce_mod(M, 1))
    assert DecompositionCertificate.from_dict(cert.to_dict()) == cert
