from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fgl_lab.rings import (QQ, ZZ, NotAUnitError, Ring, RingError, ZpLocal, Zmod,
                           common_ring, is_prime, valuation)


def test_primes():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_valuation():
    assert valuation(12, 2) == 2
    assert valuation(Fraction(5, 9), 3) == -2
    assert valuation(0, 5) is None


def test_canonical_forms():
    assert ZZ(Fraction(6, 3)) == 2 and isinstance(ZZ(Fraction(6, 3)), int)
    assert Zmod(2, 3)(-1) == 7
    assert Zmod(3, 2)(Fraction(1, 2)) == 5
    assert ZpLocal(3)(Fraction(1, 2)) == Fraction(1, 2)


def test_membership_errors():
    with pytest.raises(RingError):
        ZZ(Fraction(1, 2))
    with pytest.raises(RingError):
        ZpLocal(3)(Fraction(1, 3))
    with pytest.raises(RingError):
        Zmod(2, 4)(Fraction(1, 2))
    with pytest.raises(RingError):
        ZZ(1.5)
    assert QQ.contains(Fraction(1, 3))


def test_bad_descriptors():
    with pytest.raises(RingError):
        ZpLocal(4)
    with pytest.raises(RingError):
        Zmod(3, 0)
    with pytest.raises(RingError):
        Ring("Reals")


def test_units_and_inverses():
    assert ZZ.is_unit(-1) and not ZZ.is_unit(2)
    assert ZpLocal(3).inverse(2) == Fraction(1, 2)
    assert Zmod(5, 2).inverse(2) == 13
    with pytest.raises(NotAUnitError):
        Zmod(5, 2).inverse(5)
    assert Zmod(5, 2).valuation(0) == 2
    assert Zmod(5, 2).valuation(10) == 1


def test_convert_is_a_natural_map():
    assert Zmod(3, 2).convert(10, Zmod(3, 4)) == 1
    with pytest.raises(RingError):
        Zmod(3, 4).convert(1, Zmod(3, 2))
    with pytest.raises(RingError):
        ZZ.convert(1, Zmod(3, 2))
    with pytest.raises(RingError):
        common_ring(ZZ, QQ)


def test_json_and_text():
    r = Zmod(7, 3)
    assert Ring.from_json(r.to_json()) == r
    assert QQ.format(Fraction(-3, 4)) == "-3/4"
    assert QQ.parse(" 5/10 ") == Fraction(1, 2)
    with pytest.raises(RingError):
        QQ.parse("abc")
    with pytest.raises(RingError):
        QQ.parse(3)


@given(st.integers(), st.integers())
def test_residues_agree_with_integers(a, b):
    r = Zmod(3, 4)
    assert r(a * b) == r(r(a) * r(b))
    assert r(a + b) == r(r(a) + r(b))
