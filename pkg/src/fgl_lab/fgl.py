"""Formal group laws, formal sums, n-series and divided p-series."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from .rings import QQ, ZZ, Ring, RingError, Zmod, ZpLocal, is_prime
from .series import Precision, TruncatedSeries, compose, invert_unit, multiply_exact, reverse
from .weierstrass import weierstrass_degree

XY = ("x", "y")

ADDITIVE = "Additive"
MULTIPLICATIVE = "Multiplicative"
FROM_LOG = "FromLog"
CUSTOM = "Custom"


class FGLError(ValueError):
    pass


class NonIntegralError(FGLError):
    def __init__(self, monomial, coefficient, p):
        self.monomial = monomial
        self.coefficient = coefficient
        self.p = p
        super().__init__(f"coefficient {coefficient} of {monomial} is not {p}-integral")


@dataclass(frozen=True)
class FormalGroupLaw:
    series: TruncatedSeries
    kind: str = CUSTOM
    log: Optional[TruncatedSeries] = None
    label: str = ""

    def __post_init__(self):
        if self.series.vars != XY:
            raise FGLError(f"a formal group law is a series in (x, y), got {self.series.vars}")

    @property
    def ring(self) -> Ring:
        return self.series.ring

    @property
    def order(self) -> int:
        return self.series.order

    def __str__(self):
        return f"{self.label or self.kind}: F(x, y) = {self.series}"

    def __call__(self, a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
        """``a +_G b``."""
        return formal_sum(self, [a, b])

    def change_ring(self, ring: Ring) -> "FormalGroupLaw":
        return FormalGroupLaw(self.series.change_ring(ring), self.kind, self.log, self.label)

    def truncate(self, order: int) -> "FormalGroupLaw":
        log = self.log.truncate(order) if self.log is not None else None
        return FormalGroupLaw(self.series.truncate(order), self.kind, log, self.label)

    def x(self) -> TruncatedSeries:
        return TruncatedSeries.var("x", ("x",), self.order, self.ring)

    def to_json(self) -> dict:
        out = self.series.to_json()
        out["kind"] = self.kind
        if self.label:
            out["label"] = self.label
        if self.log is not None:
            out["log"] = self.log.to_json()
        return out

    @classmethod
    def from_json(cls, data) -> "FormalGroupLaw":
        if isinstance(data, str):
            data = json.loads(data)
        series = TruncatedSeries.from_json(data)
        log = TruncatedSeries.from_json(data["log"]) if data.get("log") else None
        return cls(series, data.get("kind", CUSTOM), log, data.get("label", ""))


# -- constructors --------------------------------------------------------

def _order(precision) -> int:
    if precision is None:
        return Precision().order
    if isinstance(precision, int):
        return precision
    return precision.order


def make_builtin(kind: str, precision=None, ring: Ring = ZZ) -> FormalGroupLaw:
    """The additive law ``x + y`` or the multiplicative law ``x + y + xy``."""
    N = _order(precision)
    name = kind.capitalize() if kind.islower() else kind
    if name == ADDITIVE:
        terms = {(1, 0): 1, (0, 1): 1}
    elif name == MULTIPLICATIVE:
        terms = {(1, 0): 1, (0, 1): 1, (1, 1): 1}
    else:
        raise FGLError(f"unknown builtin law {kind!r}")
    return FormalGroupLaw(TruncatedSeries(XY, N, ring, terms), name, label=name.lower())


def custom(series: TruncatedSeries) -> FormalGroupLaw:
    return FormalGroupLaw(series, CUSTOM, label="custom")


def honda_log(p: int, height: int, precision=None) -> TruncatedSeries:
    """``sum_k x**(p**(h*k)) / p**k`` truncated at the working order."""
    if not is_prime(p):
        raise FGLError(f"{p} is not prime")
    if height < 1:
        raise FGLError(f"height must be >= 1, got {height}")
    N = _order(precision)
    terms = {}
    k = 0
    while p ** (height * k) < N:
        terms[(p ** (height * k),)] = Fraction(1, p ** k)
        k += 1
    return TruncatedSeries(("x",), N, QQ, terms)


def honda(p: int, height: int, precision=None, ring: Optional[Ring] = None) -> FormalGroupLaw:
    """The p-typical law with Honda logarithm of the given height.

    Coefficients are p-integral, so the law is retagged to ``Z_(p)`` unless
    another ring is requested.
    """
    log = honda_log(p, height, precision)
    G = fgl_from_log(log, precision, ring=ring or ZpLocal(p))
    return FormalGroupLaw(G.series, FROM_LOG, log, label=f"honda:{height}@{p}")


def fgl_from_log(log: TruncatedSeries, precision=None, ring: Optional[Ring] = None) -> FormalGroupLaw:
    """``F(x, y) = exp(log x + log y)`` with ``exp`` the reversion of ``log``.

    The computation runs over the rationals; ``ring`` retags the result
    (``Z_(p)`` or ``Z/p^M``) after checking p-integrality.
    """
    log._require_univariate()
    N = min(_order(precision), log.order) if precision is not None else log.order
    log = log.truncate(N)
    if log.ring.tag != "Rational":
        log = TruncatedSeries(log.vars, N, QQ, log.terms)
    log = log.rename({log.vars[0]: "x"})
    if log.constant_term != 0 or log.coefficient((1,)) == 0:
        raise FGLError("a logarithm must start x + (higher terms)")
    exp = reverse(log)
    x = TruncatedSeries.var("x", XY, N, QQ)
    y = TruncatedSeries.var("y", XY, N, QQ)
    total = compose(log, {"x": x}) + compose(log, {"x": y})
    F = compose(exp, {"x": total})
    if ring is not None and ring != QQ:
        F = _retag(F, ring)
    G = FormalGroupLaw(F, FROM_LOG, log, label="from-log")
    report = check_axioms(G)
    if not report.passed:
        raise FGLError(f"law built from a logarithm fails its axioms: {report}")
    return G


def _retag(F: TruncatedSeries, ring: Ring) -> TruncatedSeries:
    for exp, c in F.items():
        try:
            ring.normalize(c)
        except RingError:
            raise NonIntegralError(F._monomial(exp), c, ring.p) from None
    return TruncatedSeries(F.vars, F.order, ring, F.terms)


def builtin(name: str, p: Optional[int] = None, precision=None, ring: Optional[Ring] = None) -> FormalGroupLaw:
    """Parse ``additive``, ``multiplicative`` or ``honda:h`` (needs ``p``)."""
    name = name.strip().lower()
    if name in ("additive", "multiplicative"):
        return make_builtin(name, precision, ring or ZZ)
    if name.startswith("honda"):
        _, _, h = name.partition(":")
        if p is None:
            raise FGLError("a Honda law needs a prime")
        try:
            height = int(h or 1)
        except ValueError:
            raise FGLError(f"bad Honda height in {name!r}") from None
        return honda(p, height, precision, ring)
    raise FGLError(f"unknown formal group law {name!r}")


# -- axioms --------------------------------------------------------------

@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    monomial: Optional[str] = None
    expected: Optional[str] = None
    found: Optional[str] = None

    def to_json(self):
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class AxiomReport:
    order: int
    checks: List[AxiomCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __str__(self):
        parts = []
        for c in self.checks:
            if c.passed:
                parts.append(f"{c.name}: pass")
            else:
                parts.append(f"{c.name}: FAIL at {c.monomial} ({c.found} != {c.expected})")
        return f"axioms to order {self.order}: " + "; ".join(parts)

    def to_json(self):
        return {"order": self.order, "passed": self.passed,
                "checks": [c.to_json() for c in self.checks]}


def _compare(name, lhs: TruncatedSeries, rhs: TruncatedSeries) -> AxiomCheck:
    diff = lhs - rhs
    if not diff:
        return AxiomCheck(name, True)
    exp, _ = diff.items()[0]
    ring = lhs.ring
    return AxiomCheck(name, False, diff._monomial(exp) or "1",
                      ring.format(rhs.coefficient(exp)), ring.format(lhs.coefficient(exp)))


def check_axioms(G: FormalGroupLaw) -> AxiomReport:
    """Unit, commutativity and associativity of ``G`` to its order."""
    F = G.series
    N, ring = F.order, F.ring
    x, y = TruncatedSeries.var("x", XY, N, ring), TruncatedSeries.var("y", XY, N, ring)
    zero = TruncatedSeries.zero(XY, N, ring)
    left = _compare("unit", compose(F, {"x": x, "y": zero}), x)
    right = _compare("unit", compose(F, {"x": zero, "y": y}), y)
    unit = left if not left.passed else right
    comm = _compare("commutativity", compose(F, {"x": y, "y": x}), F)
    xyw = ("x", "y", "w")
    X, Y, W = (TruncatedSeries.var(v, xyw, N, ring) for v in xyw)
    Fxy = compose(F, {"x": X, "y": Y})
    Fyw = compose(F, {"x": Y, "y": W})
    assoc = _compare("associativity", compose(F, {"x": Fxy, "y": W}), compose(F, {"x": X, "y": Fyw}))
    return AxiomReport(N, [unit, comm, assoc])


# -- derived series ------------------------------------------------------

def formal_sum(G: FormalGroupLaw, terms: Sequence[TruncatedSeries],
               like: Optional[TruncatedSeries] = None) -> TruncatedSeries:
    """Left fold of ``+_G``; the empty sum is the zero series shaped like ``like``."""
    terms = list(terms)
    if not terms:
        if like is None:
            return TruncatedSeries.zero(("x",), G.order, G.ring)
        return TruncatedSeries.zero(like.vars, like.order, like.ring)
    for t in terms:
        if t.constant_term != 0:
            raise FGLError(f"formal sums need zero constant terms, got {t}")
    acc = terms[0]
    for t in terms[1:]:
        acc = compose(G.series, {"x": acc, "y": t})
    return acc


def formal_inverse(G: FormalGroupLaw) -> TruncatedSeries:
    """The series ``i(x)`` with ``F(x, i(x)) = 0``, by Newton iteration."""
    F, N, ring = G.series, G.order, G.ring
    x = TruncatedSeries.var("x", ("x",), N, ring)
    inv = -x
    if N <= 2:
        return inv
    Fy = F.derivative("y")
    for _ in range(N.bit_length() + 2):
        err = compose(F, {"x": x, "y": inv})
        if not err:
            return inv
        slope = compose(Fy, {"x": x.truncate(Fy.order), "y": inv.truncate(Fy.order)})
        inv = inv - multiply_exact(err, invert_unit(slope)).truncate(N)
    raise FGLError("formal inverse did not converge")


@dataclass(frozen=True)
class NSeries:
    n: int
    series: TruncatedSeries

    def __post_init__(self):
        s = self.series
        if s.constant_term != 0:
            raise FGLError("an n-series has zero constant term")
        if s.order > 1 and s.coefficient((1,)) != s.ring.normalize(self.n):
            raise FGLError(f"linear coefficient of [{self.n}] should be {self.n}")


def n_series(G: FormalGroupLaw, n: int) -> NSeries:
    """``[n]_G(x)``; addition chains for ``|n| > 8``, ``[-n] = i([n])``."""
    x = G.x()
    if n < 0:
        pos = n_series(G, -n).series
        return NSeries(n, compose(formal_inverse(G), {"x": pos}))
    if n == 0:
        return NSeries(0, TruncatedSeries.zero(("x",), G.order, G.ring))
    if n <= 8:
        acc = x
        for _ in range(n - 1):
            acc = G(acc, x)
        return NSeries(n, acc)
    half = n_series(G, n // 2).series
    acc = G(half, half)
    if n % 2:
        acc = G(acc, x)
    return NSeries(n, acc)


def p_series(G: FormalGroupLaw, p: int) -> TruncatedSeries:
    return n_series(G, p).series


def divided_p_series(G: FormalGroupLaw, p: int) -> TruncatedSeries:
    """``[p]_G(x) / x``, known one degree less than ``[p]_G``."""
    return p_series(G, p).divide_by_var("x")


def weierstrass_height(G: FormalGroupLaw, p: int):
    """``(d, h)``: Weierstrass degree of ``[p]_G`` mod ``p`` and ``h`` with ``d = p**h``.

    ``h`` is ``None`` when ``d`` is not a power of ``p`` (not a formal group
    law over a p-local ring). Raises ``WeierstrassError`` when ``[p]_G``
    vanishes mod ``p`` through the truncation order.
    """
    ring = G.ring
    if ring.p is not None and ring.p != p:
        raise FGLError(f"law over {ring} used at p = {p}")
    pser = p_series(G, p).change_ring(Zmod(p, 1))
    d = weierstrass_degree(pser)
    h, q = 0, 1
    while q < d:
        q *= p
        h += 1
    return d, (h if q == d else None)
