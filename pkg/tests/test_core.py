from fractions import Fraction
from math import factorial, prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svsec.core import (
    AbundanceClass,
    HoraceInapplicable,
    InputError,
    MultiIndex,
    SecantProblem,
    abundance,
    ambient_count,
    bc_window,
    critical_values,
    expected_dimension,
    expected_rank,
    horace_numbers,
    normalize,
    parse_tuple,
)


def binom_by_factorials(a, b):
    return factorial(a + b) // (factorial(a) * factorial(b))


@pytest.mark.parametrize(
    "n, d, N",
    [((1, 1, 1), (3, 3, 3), 64), ((2, 2, 2), (3, 3, 3), 1000), ((2, 2, 2), (2, 3, 3), 600)],
)
def test_ambient_count(n, d, N):
    assert ambient_count(n, d) == N


def test_ambient_count_length_mismatch():
    with pytest.raises(InputError):
        ambient_count((1, 2), (3,))


@pytest.mark.parametrize(
    "n, d, m, rank",
    [((2,), (4,), 5, 15), ((2, 2, 2), (3, 3, 3), 142, 994), ((2, 2, 2), (3, 3, 3), 143, 1000)],
)
def test_expected_rank(n, d, m, rank):
    assert expected_rank(n, d, m) == rank
    assert expected_dimension(n, d, m) == rank - 1


@pytest.mark.parametrize(
    "n, d, crit",
    [((1, 1, 1), (3, 3, 3), (16, 16)), ((2, 2, 2), (3, 3, 3), (142, 143)), ((2, 2, 2), (1, 3, 3), (42, 43))],
)
def test_critical_values(n, d, crit):
    assert critical_values(n, d) == crit


@pytest.mark.parametrize(
    "m, cls",
    [(142, AbundanceClass.SUBABUNDANT), (143, AbundanceClass.SUPERABUNDANT)],
)
def test_abundance(m, cls):
    assert abundance((2, 2, 2), (3, 3, 3), m) is cls


def test_equiabundant_is_both():
    cls = abundance((1, 1, 1), (3, 3, 3), 16)
    assert cls is AbundanceClass.EQUIABUNDANT
    assert cls.is_sub and cls.is_super


@pytest.mark.parametrize("r, s, eps", [(143, 66, 5), (142, 65, 4)])
def test_horace_numbers(r, s, eps):
    hn = horace_numbers((2, 2, 2), (3, 3, 3), r)
    assert (hn.s_r, hn.eps_r) == (s, eps)


def test_horace_numbers_zero_numerator():
    # (|n|+1) r = N_{n,d(1)}: N_{(1,1),(2,3)} = 3*4 = 12 = 3*4
    hn = horace_numbers((1, 1), (3, 3), 4)
    assert (hn.s_r, hn.eps_r) == (0, 0)


def test_horace_numbers_negative_is_error():
    with pytest.raises(HoraceInapplicable, match="inapplicable"):
        horace_numbers((2, 2, 2), (3, 3, 3), 10)


@pytest.mark.parametrize(
    "n, d, m, inside",
    [((2, 2, 2), (2, 3, 3), 77, True), ((2, 2, 2), (2, 3, 3), 80, False), ((2, 2, 2), (1, 3, 3), 72, True)],
)
def test_bc_window(n, d, m, inside):
    assert bc_window(n, d, m) is inside


@pytest.mark.parametrize(
    "n, d, out",
    [
        ((3, 1, 2), (3, 4, 3), ((1, 2, 3), (4, 3, 3))),
        ((2, 2), (5, 3), ((2, 2), (3, 5))),
        ((1, 2, 3), (3, 3, 3), ((1, 2, 3), (3, 3, 3))),
    ],
)
def test_normalize(n, d, out):
    assert normalize(n, d) == out


def test_problem_validation():
    with pytest.raises(InputError):
        SecantProblem((1, 1), (3, 3), 0)
    with pytest.raises(InputError):
        SecantProblem((0, 1), (3, 3), 1)
    with pytest.raises(InputError):
        SecantProblem((), (), 1)


def test_multi_index():
    a = MultiIndex((3, 2))
    assert a.total == 5
    assert a.reduce(2) == (1, 2)
    assert a.dominates(MultiIndex((3, 1)))
    with pytest.raises(InputError):
        a.reduce(4)


def test_parse_tuple():
    assert parse_tuple("2, 2,3") == (2, 2, 3)
    with pytest.raises(InputError):
        parse_tuple("2,x")


# -- properties --------------------------------------------------------------

dims = st.integers(1, 50)
pairs = st.lists(st.tuples(dims, dims), min_size=1, max_size=4)


@given(pairs)
def test_ambient_count_matches_factorials(ps):
    n, d = zip(*ps)
    assert ambient_count(n, d) == prod(binom_by_factorials(a, b) for a, b in ps)


@given(pairs)
def test_critical_values_gap(ps):
    n, d = zip(*ps)
    lo, hi = critical_values(n, d)
    q = sum(n) + 1
    assert hi - lo in (0, 1)
    assert (hi == lo) == (ambient_count(n, d) % q == 0)
    assert Fraction(lo) <= Fraction(ambient_count(n, d), q) <= hi


@given(st.lists(st.tuples(st.integers(1, 8), st.integers(1, 8)), min_size=1, max_size=4), st.integers(0, 3))
def test_abundance_matches_critical_values(ps, shift):
    n, d = zip(*ps)
    lo, hi = critical_values(n, d)
    if lo - shift >= 1:
        assert abundance(n, d, lo - shift).is_sub
    assert abundance(n, d, hi + shift).is_super


@given(st.lists(st.tuples(st.integers(1, 8), st.integers(1, 8)), min_size=1, max_size=4), st.integers(1, 3000))
def test_horace_reconstruction(ps, r):
    n, d = zip(*ps)
    dim = sum(n)
    d1 = (d[0] - 1,) + d[1:]
    try:
        hn = horace_numbers(n, d, r)
    except HoraceInapplicable:
        assert (dim + 1) * r < prod(binom_by_factorials(a, b) for a, b in zip(n, d1))
        return
    assert (dim + 1) * r == prod(binom_by_factorials(a, b) for a, b in zip(n, d1)) + dim * hn.s_r + hn.eps_r
    assert 0 <= hn.eps_r < dim and hn.s_r >= 0


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(1, 9), st.integers(1, 9)), min_size=1, max_size=5), st.randoms(use_true_random=False))
def test_permutation_invariance(ps, rnd):
    n, d = zip(*ps)
    shuffled = list(ps)
    rnd.shuffle(shuffled)
    n2, d2 = zip(*shuffled)
    assert normalize(n, d) == normalize(n2, d2)
    assert normalize(*normalize(n, d)) == normalize(n, d)
    assert ambient_count(n, d) == ambient_count(n2, d2)
    assert critical_values(n, d) == critical_values(n2, d2)
    assert expected_rank(n, d, 7) == expected_rank(n2, d2, 7)
