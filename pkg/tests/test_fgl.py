import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fgl_lab.fgl import (FGLError, FormalGroupLaw, NonIntegralError, NSeries, builtin,
                         check_axioms, custom, divided_p_series, fgl_from_log, formal_inverse,
                         formal_sum, honda, honda_log, make_builtin, n_series, p_series,
                         weierstrass_height)
from fgl_lab.rings import QQ, ZZ, ZpLocal, Zmod
from fgl_lab.series import TruncatedSeries, compose

XY = ("x", "y")


def uni(coeffs, order, ring=ZZ, var="x"):
    return TruncatedSeries.from_coeffs(coeffs, var, order, ring)


def test_builtins():
    assert make_builtin("additive", 6).series.terms == {(1, 0): 1, (0, 1): 1}
    assert make_builtin("multiplicative", 6).series.terms == {(1, 0): 1, (0, 1): 1, (1, 1): 1}
    G = make_builtin("multiplicative", 6, Zmod(2, 6))
    assert G.ring == Zmod(2, 6)
    with pytest.raises(FGLError):
        make_builtin("formal", 6)


def test_from_log():
    x = TruncatedSeries.var("x", ("x",), 6, QQ)
    assert fgl_from_log(x, 6).series == TruncatedSeries(XY, 6, QQ, {(1, 0): 1, (0, 1): 1})
    G = fgl_from_log(honda_log(2, 1, 5), 5, ZpLocal(2))
    assert check_axioms(G).passed
    two = p_series(G, 2).change_ring(Zmod(2, 1))
    assert two == uni([0, 0, 1], 5, Zmod(2, 1))


def test_honda_three():
    G = honda(3, 1, 10)
    three = p_series(G, 3).change_ring(Zmod(3, 1))
    assert three == uni([0, 0, 0, 1], 10, Zmod(3, 1))


def test_non_integral_log_reported():
    log = TruncatedSeries(("x",), 4, QQ, {(1,): 1, (2,): Fraction(1, 3)})
    with pytest.raises(NonIntegralError) as info:
        fgl_from_log(log, 4, ZpLocal(3))
    assert info.value.p == 3


def test_axiom_failures_are_data():
    assert check_axioms(make_builtin("additive", 8)).passed
    assert check_axioms(make_builtin("multiplicative", 8)).passed
    bad = custom(TruncatedSeries(XY, 5, ZZ, {(1, 0): 1, (0, 1): 1, (2, 0): 1}))
    report = check_axioms(bad)
    assert not report.passed
    assert report["unit"].monomial == "x^2"


def test_formal_sums():
    G = make_builtin("multiplicative", 6)
    x, z = (TruncatedSeries.var(v, ("x", "z"), 6) for v in ("x", "z"))
    assert formal_sum(G, [x]) == x
    assert formal_sum(G, [x, z]) == x + z + x * z
    xs = G.x()
    assert formal_sum(G, [xs, xs, xs]) == uni([0, 3, 3, 1], 6)
    assert formal_sum(G, []).is_zero()
    with pytest.raises(FGLError):
        formal_sum(G, [1 + xs])


def test_inverses():
    assert formal_inverse(make_builtin("additive", 6)) == uni([0, -1], 6)
    assert formal_inverse(make_builtin("multiplicative", 4)) == uni([0, -1, 1, -1], 4)
    for G in (make_builtin("multiplicative", 8), honda(2, 2, 8)):
        assert formal_sum(G, [G.x(), formal_inverse(G)]).is_zero()


def test_n_series_examples():
    assert n_series(make_builtin("additive", 6), 5).series == uni([0, 5], 6)
    G = make_builtin("multiplicative", 6)
    assert n_series(G, 3).series == uni([0, 3, 3, 1], 6)
    minus = n_series(G, -1).series
    assert minus * (1 + G.x()) == -G.x()
    with pytest.raises(FGLError):
        NSeries(2, uni([0, 3], 4))


def test_divided_p_series():
    assert divided_p_series(make_builtin("additive", 6), 5) == uni([5], 5)
    assert divided_p_series(make_builtin("multiplicative", 6), 2) == uni([2, 1], 5)
    assert divided_p_series(make_builtin("multiplicative", 6), 3) == uni([3, 3, 1], 5)


def test_heights():
    assert weierstrass_height(make_builtin("multiplicative", 12, ZpLocal(2)), 2) == (2, 1)
    assert weierstrass_height(honda(2, 2, 12), 2) == (4, 2)
    assert weierstrass_height(honda(3, 2, 12), 3) == (9, 2)


def test_parse_builtin_and_json():
    G = builtin("honda:2", 3, 10)
    assert G.label == "honda:2@3"
    assert FormalGroupLaw.from_json(G.to_json()) == G
    with pytest.raises(FGLError):
        builtin("honda:2")
    with pytest.raises(FGLError):
        builtin("lazard", 3)


@settings(max_examples=15, deadline=None)
@given(st.integers(-6, 6), st.integers(-6, 6), st.sampled_from(["multiplicative", "honda2"]))
def test_n_series_additivity(m, n, law):
    G = make_builtin("multiplicative", 8) if law == "multiplicative" else honda(2, 2, 8)
    lhs = n_series(G, m + n).series
    rhs = G(n_series(G, m).series, n_series(G, n).series)
    assert lhs == rhs


@settings(max_examples=15, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4))
def test_n_series_multiplicativity(m, n):
    G = honda(3, 1, 8)
    inner = n_series(G, n).series
    assert n_series(G, m * n).series == compose(n_series(G, m).series, {"x": inner})


@pytest.mark.parametrize("G", [make_builtin("additive", 12), make_builtin("multiplicative", 12),
                               honda(2, 1, 12), honda(2, 2, 12), honda(3, 1, 12), honda(3, 2, 12)],
                         ids=lambda G: G.label)
def test_constructed_laws_satisfy_axioms(G):
    assert check_axioms(G).passed
