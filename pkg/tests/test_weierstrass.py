import random

import pytest
from hypothesis import given, settings, strategies as st

from fgl_lab.rings import ZpLocal, Zmod
from fgl_lab.series import SeriesError, TruncatedSeries
from fgl_lab.weierstrass import (WeierstrassError, check_distinguished, division_precision,
                                 weierstrass_degree, weierstrass_divide, weierstrass_prepare)


def uni(coeffs, order, ring, var="z"):
    return TruncatedSeries.from_coeffs(coeffs, var, order, ring)


def test_already_distinguished():
    r = Zmod(2, 6)
    prep = weierstrass_prepare(uni([0, 2, 1], 8, r))
    assert prep.degree == 2
    assert prep.unit == uni([1], 8, r)
    assert prep.distinguished == uni([0, 2, 1], 8, r)
    unit, dist = weierstrass_prepare(uni([3, 1], 8, Zmod(3, 4)))
    assert unit == uni([1], 8, Zmod(3, 4)) and dist == uni([3, 1], 8, Zmod(3, 4))


def test_multiplicative_three_series():
    r = Zmod(3, 5)
    prep = weierstrass_prepare(uni([0, 3, 3, 1], 10, r))
    assert prep.distinguished == uni([0, 3, 3, 1], 10, r)
    assert prep.unit == uni([1], 10, r)
    assert prep.precision == 3  # v = 1, 10 // 3 = 3


def test_exact_input_needs_modulus():
    f = uni([0, 3, 3, 1], 10, ZpLocal(3))
    with pytest.raises(SeriesError):
        weierstrass_prepare(f)
    assert weierstrass_prepare(f, M=4).degree == 3


def test_infinite_height_rejected():
    with pytest.raises(WeierstrassError):
        weierstrass_degree(uni([0, 3], 6, Zmod(3, 2)))


def test_division_examples():
    r = Zmod(2, 5)
    q, rem = weierstrass_divide(uni([0, 0, 1], 6, r), uni([2, 1], 6, r))
    assert q == uni([-2, 1], 6, r)
    assert rem == uni([4], 6, r)
    P = uni([0, 2, 1], 6, r)
    assert weierstrass_divide(P, P) == (uni([1], 6, r), uni([], 6, r))
    assert weierstrass_divide(uni([1], 6, r), P) == (uni([], 6, r), uni([1], 6, r))
    with pytest.raises(SeriesError):
        weierstrass_divide(uni([1], 6, Zmod(2, 4)), P)


def test_check_distinguished():
    r = Zmod(3, 3)
    assert check_distinguished(uni([3, 6, 1], 5, r)) == 2
    with pytest.raises(SeriesError):
        check_distinguished(uni([1, 6, 1], 5, r))
    with pytest.raises(SeriesError):
        check_distinguished(uni([3, 6, 2], 5, r))


def test_division_precision():
    assert division_precision(1, 3, 2, 8) == 0
    assert division_precision(1, 3, 10, 8) == 3
    assert division_precision(2, 2, 16, 8) == 8


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5]), st.integers(1, 4))
def test_prepare_identity(seed, p, d):
    rng = random.Random(seed)
    M, N = 6, 12
    r = Zmod(p, M)
    mod = p ** M
    coeffs = [p * rng.randrange(mod) for _ in range(d)] + [rng.randrange(1, p) + p * rng.randrange(mod)]
    coeffs += [rng.randrange(mod) for _ in range(N - d - 1)]
    f = uni(coeffs, N, r)
    prep = weierstrass_prepare(f)
    assert prep.degree == d
    assert prep.unit * prep.distinguished == f
    assert check_distinguished(prep.distinguished.truncate(d + 1)) == d
    assert r.is_unit(prep.unit.constant_term)
    q, rem = weierstrass_divide(f, prep.distinguished)
    assert all(e[0] < d for e in rem.terms)
