from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fgl_lab.rings import QQ, ZZ, RingError, ZpLocal, Zmod
from fgl_lab.series import (Precision, SeriesError, TruncatedSeries, compose, divide,
                            invert_unit, multiply_exact, reverse, variables)


def uni(coeffs, order, ring=ZZ, var="x"):
    return TruncatedSeries.from_coeffs(coeffs, var, order, ring)


def test_difference_of_squares():
    x = TruncatedSeries.var("x", ("x",), 4)
    assert (1 + x) * (1 - x) == uni([1, 0, -1], 4)


def test_binomial_square():
    x, y = variables(("x", "y"), 3)
    f = (x + y) * (x + y)
    assert f.terms == {(2, 0): 1, (1, 1): 2, (0, 2): 1}


def test_padic_square():
    x = TruncatedSeries.var("x", ("x",), 3, Zmod(2, 3))
    assert (1 + 4 * x) * (1 + 4 * x) == TruncatedSeries.one(("x",), 3, Zmod(2, 3))


def test_canonical_sparse_form():
    f = TruncatedSeries(("x",), 3, ZZ, {(0,): 0, (1,): 2, (5,): 7})
    assert f.terms == {(1,): 2}
    with pytest.raises(SeriesError):
        TruncatedSeries(("x",), 0)


def test_truncation_takes_min_order():
    assert (uni([1, 1], 5) + uni([0, 1], 3)).order == 3


def test_mismatches():
    with pytest.raises(SeriesError):
        uni([1], 3) + uni([1], 3, var="y")
    with pytest.raises((SeriesError, RingError)):
        uni([1], 3) + uni([1], 3, ring=QQ)


def test_compose_examples():
    x = TruncatedSeries.var("x", ("x",), 5)
    assert compose(x + x ** 2, {"x": 2 * x}) == 2 * x + 4 * x ** 2
    g = uni([0, 3, 1, 4], 5)
    assert compose(x, {"x": g}) == g
    xy = ("x", "y")
    F = TruncatedSeries(xy, 5, ZZ, {(1, 0): 1, (0, 1): 1, (1, 1): 1})
    s = TruncatedSeries.var("s", ("s",), 5)
    assert compose(F, {"x": s, "y": s}) == 2 * s + s ** 2
    with pytest.raises(SeriesError):
        compose(x, {"x": 1 + x})


def test_reverse_examples():
    x = TruncatedSeries.var("x", ("x",), 5)
    assert reverse(x) == x
    assert reverse(x + x ** 2) == uni([0, 1, -1, 2, -5], 5)
    log1p = TruncatedSeries(("x",), 4, ZpLocal(5), {(1,): 1, (2,): Fraction(-1, 2), (3,): Fraction(1, 3)})
    assert reverse(log1p) == TruncatedSeries(("x",), 4, ZpLocal(5),
                                             {(1,): 1, (2,): Fraction(1, 2), (3,): Fraction(1, 6)})
    with pytest.raises(SeriesError):
        reverse(2 * x)


def test_invert_unit_examples():
    assert invert_unit(uni([1], 3)) == uni([1], 3)
    assert invert_unit(uni([1, 1], 4)) == uni([1, -1, 1, -1], 4)
    r = ZpLocal(3)
    assert invert_unit(uni([2, 1], 3, r, "z")) == TruncatedSeries(
        ("z",), 3, r, {(0,): Fraction(1, 2), (1,): Fraction(-1, 4), (2,): Fraction(1, 8)})
    with pytest.raises(SeriesError):
        invert_unit(uni([3, 1], 3, r))


def test_divide_and_exact_products():
    f = uni([2, 3, 1], 6)
    g = uni([1, 1], 6)
    assert divide(f, g) == uni([2, 1], 6)
    a = uni([0, 1, 1], 4)
    b = uni([1, 1], 6)
    assert multiply_exact(a, b).order == 4
    assert multiply_exact(a.divide_by_var("x"), uni([0, 1], 5)).order == 4


def test_structural_helpers():
    x, y = variables(("x", "y"), 6)
    f = 1 + x + 2 * x * y + y ** 3
    assert f.specialize_zero("y") == 1 + x
    assert f.shift("x").order == 7
    assert f.shift("x").coefficient((2, 1)) == 2
    assert f.rename({"x": "u"}).vars == ("u", "y")
    assert f.degree_in("y") == 3
    assert f.derivative("x") == (1 + 2 * y).truncate(5)
    assert (x * x).divide_by_var("x") == x.truncate(5)
    with pytest.raises(SeriesError):
        (1 + x).divide_by_var("x")
    assert f.extend(("x", "y", "w")).drop_vars(("w",)) == f
    assert f.coefficients_in("y")[(0, 0)] == {0: 1, 3: 1}


def test_display_and_json():
    f = uni([1, 0, -1], 4)
    assert str(f) == "1 - x^2 + O(4)"
    g = TruncatedSeries(("x", "y"), 5, Zmod(3, 2), {(1, 2): 4, (0, 1): 8})
    assert TruncatedSeries.from_json(g.to_json()) == g
    assert TruncatedSeries.from_json(g.dumps()) == g
    h = TruncatedSeries(("x",), 3, QQ, {(1,): Fraction(-3, 4)})
    assert h.to_json()["terms"] == [{"exp": [1], "coeff": "-3/4"}]
    with pytest.raises(SeriesError):
        TruncatedSeries.from_json({"vars": ["x"], "order": 3, "ring": {"tag": "ExactInt"},
                                   "terms": [{"exp": [1, 2], "coeff": "1"}]})


def test_precision_bounds():
    with pytest.raises(ValueError):
        Precision(0)
    with pytest.raises(ValueError):
        Precision(4, 0)


coeff = st.integers(-20, 20)


def series_in(vars, order):
    n = len(vars)
    exps = st.tuples(*[st.integers(0, order - 1)] * n).filter(lambda e: sum(e) < order)
    return st.dictionaries(exps, coeff, max_size=8).map(lambda t: TruncatedSeries(vars, order, ZZ, t))


@settings(max_examples=50, deadline=None)
@given(series_in(("x", "y"), 6), series_in(("x", "y"), 6), series_in(("x", "y"), 6))
def test_ring_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert f * g == g * f
    assert f * (g + h) == f * g + f * h
    assert (f * g) * h == f * (g * h)


def admissible(order):
    return st.lists(coeff, min_size=0, max_size=order - 2).map(
        lambda cs: uni([0, 1] + cs, order))


@settings(max_examples=40, deadline=None)
@given(admissible(8), admissible(8), admissible(8))
def test_compose_associative(f, g, h):
    x = "x"
    assert compose(compose(f, {x: g}), {x: h}) == compose(f, {x: compose(g, {x: h})})


@settings(max_examples=40, deadline=None)
@given(admissible(8))
def test_reverse_round_trip(f):
    g = reverse(f)
    x = TruncatedSeries.var("x", ("x",), 8)
    assert compose(f, {"x": g}) == x
    assert compose(g, {"x": f}) == x


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([1, -1]), st.lists(coeff, max_size=7))
def test_invert_unit_round_trip(c0, rest):
    f = uni([c0] + rest, 8)
    assert f * invert_unit(f) == TruncatedSeries.one(("x",), 8)


@settings(max_examples=40, deadline=None)
@given(series_in(("x", "y"), 5), series_in(("x", "y"), 5))
def test_padic_agrees_with_integers(f, g):
    r = Zmod(3, 2)
    assert (f * g).change_ring(r) == f.change_ring(r) * g.change_ring(r)
    assert (f - g).change_ring(r) == f.change_ring(r) - g.change_ring(r)
