from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronord.dvr import (
    LocalScalar,
    NotAUnit,
    NotLocal,
    ResidueScalar,
    format_scalar,
    is_local,
    is_prime,
    parse_scalar,
    reduce,
    unit_inverse,
    valuation,
)

PRIMES = st.sampled_from([2, 3, 5, 7])
nonzero = st.integers(-10**6, 10**6).filter(bool)


def test_valuation_examples():
    assert valuation(18, 3) == 2
    assert valuation(Fraction(5, 9), 3) == -2
    assert valuation(0, 3) == float("inf")


def test_reduce_and_inverse():
    assert reduce(Fraction(1, 2), 3) == 2
    assert unit_inverse(2, 3) == Fraction(1, 2)
    with pytest.raises(NotAUnit):
        unit_inverse(6, 3)
    with pytest.raises(NotLocal):
        reduce(Fraction(1, 3), 3)


def test_is_prime():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


@given(nonzero, nonzero, PRIMES)
def test_valuation_is_additive(a, b, p):
    assert valuation(a * b, p) == valuation(a, p) + valuation(b, p)


@given(nonzero, nonzero, PRIMES)
def test_valuation_ultrametric(a, b, p):
    if a + b:
        assert valuation(a + b, p) >= min(valuation(a, p), valuation(b, p))


@given(st.integers(-1000, 1000), st.integers(1, 1000).filter(lambda d: d % 3), PRIMES)
def test_reduce_is_a_ring_map(a, d, p):
    x = Fraction(a, d)
    if not is_local(x, p):
        return
    assert reduce(x * x, p) == reduce(x, p) ** 2 % p
    assert reduce(x + 1, p) == (reduce(x, p) + 1) % p


@given(st.fractions(max_denominator=10**4))
def test_scalar_text_round_trip(x):
    assert parse_scalar(format_scalar(x)) == x


def test_wrapped_scalars():
    a = LocalScalar(Fraction(2, 5), 3)
    assert (a + 1).value == Fraction(7, 5)
    assert a.is_unit() and a.inverse().value == Fraction(5, 2)
    assert a.reduce() == ResidueScalar(1, 3)
    with pytest.raises(NotLocal):
        LocalScalar(Fraction(1, 3), 3)
