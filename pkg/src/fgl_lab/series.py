"""Sparse multivariate power series truncated at a total degree.

A :class:`TruncatedSeries` stores the coefficients of all monomials of
total degree ``< order``; everything at or above ``order`` is unknown.
Ring operations keep the smaller of the operand orders, composition keeps
the smallest order among the series involved.

Example::

    >>> x = TruncatedSeries.var("x", ("x",), 4)
    >>> print((1 + x) * (1 - x))
    1 - x^2 + O(4)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .rings import QQ, ZZ, Number, Ring, RingError, common_ring

Exponent = Tuple[int, ...]


class SeriesError(ValueError):
    """Raised for incompatible series (variables, rings) or bad input."""


@dataclass(frozen=True)
class Precision:
    """Working sizes: total-degree order ``N`` and optional p-adic ``M``."""

    order: int = 16
    padic: Optional[int] = None

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if self.padic is not None and self.padic < 1:
            raise ValueError(f"p-adic precision must be >= 1, got {self.padic}")


def grlex_key(exp: Exponent):
    return (sum(exp), exp)


class TruncatedSeries:
    __slots__ = ("vars", "order", "ring", "_terms", "_hash")

    def __init__(self, vars: Sequence[str], order: int, ring: Ring = ZZ,
                 terms: Optional[Mapping[Exponent, Number]] = None):
        vars = tuple(vars)
        if len(set(vars)) != len(vars):
            raise SeriesError(f"repeated variable in {vars}")
        if order < 1:
            raise SeriesError(f"truncation order must be >= 1, got {order}")
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != len(vars) or min(exp, default=0) < 0:
                raise SeriesError(f"bad exponent {exp} for variables {vars}")
            if sum(exp) < order:
                clean[exp] = clean.get(exp, 0) + ring.normalize(c)
        self.vars = vars
        self.order = order
        self.ring = ring
        self._terms = {}
        for exp, c in clean.items():
            c = ring.normalize(c)
            if c != 0:
                self._terms[exp] = c
        self._hash = None

    @classmethod
    def _raw(cls, vars, order, ring, terms) -> "TruncatedSeries":
        # terms must already be canonical
        obj = cls.__new__(cls)
        obj.vars = vars
        obj.order = order
        obj.ring = ring
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, vars, order, ring=ZZ):
        return cls._raw(tuple(vars), order, ring, {})

    @classmethod
    def const(cls, value, vars, order, ring=ZZ):
        vars = tuple(vars)
        return cls(vars, order, ring, {(0,) * len(vars): value})

    @classmethod
    def one(cls, vars, order, ring=ZZ):
        return cls.const(1, vars, order, ring)

    @classmethod
    def var(cls, name, vars, order, ring=ZZ):
        vars = tuple(vars)
        if name not in vars:
            raise SeriesError(f"{name!r} not among {vars}")
        exp = tuple(int(v == name) for v in vars)
        return cls(vars, order, ring, {exp: 1})

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, var="x", order=None, ring=ZZ):
        """Univariate series ``sum(c_i * var**i)``."""
        coeffs = list(coeffs)
        if order is None:
            order = max(len(coeffs), 1)
        return cls((var,), order, ring, {(i,): c for i, c in enumerate(coeffs)})

    # -- inspection ---------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.vars)

    @property
    def terms(self) -> Dict[Exponent, Number]:
        return dict(self._terms)

    def items(self):
        """Nonzero terms in graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, exp) -> Number:
        if isinstance(exp, Mapping):
            exp = tuple(exp.get(v, 0) for v in self.vars)
        elif isinstance(exp, int):
            exp = (exp,)
        return self._terms.get(tuple(exp), 0)

    def __getitem__(self, exp):
        return self.coefficient(exp)

    @property
    def constant_term(self) -> Number:
        return self._terms.get((0,) * self.nvars, 0)

    def valuation(self) -> int:
        """Lowest total degree present; ``order`` for the zero series."""
        return min((sum(e) for e in self._terms), default=self.order)

    def degree_in(self, var: str) -> int:
        i = self._index(var)
        return max((e[i] for e in self._terms), default=-1)

    def coeffs(self):
        """Dense coefficient list of a univariate series (length ``order``)."""
        self._require_univariate()
        out = [0] * self.order
        for (i,), c in self._terms.items():
            out[i] = c
        return out

    def _index(self, var):
        try:
            return self.vars.index(var)
        except ValueError:
            raise SeriesError(f"variable {var!r} not among {self.vars}") from None

    def _require_univariate(self):
        if self.nvars != 1:
            raise SeriesError(f"expected a univariate series, got variables {self.vars}")

    # -- structural changes -------------------------------------------

    def truncate(self, order: int) -> "TruncatedSeries":
        order = min(order, self.order)
        return self._raw(self.vars, order, self.ring,
                         {e: c for e, c in self._terms.items() if sum(e) < order})

    def change_ring(self, ring: Ring) -> "TruncatedSeries":
        if ring == self.ring:
            return self
        terms = {}
        for e, c in self._terms.items():
            c = ring.convert(c, self.ring)
            if c != 0:
                terms[e] = c
        return self._raw(self.vars, self.order, ring, terms)

    def extend(self, vars: Sequence[str]) -> "TruncatedSeries":
        """View the series inside a larger variable list."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        missing = set(self.vars) - set(vars)
        if missing:
            raise SeriesError(f"cannot drop variables {sorted(missing)}")
        pos = [vars.index(v) for v in self.vars]
        terms = {}
        for e, c in self._terms.items():
            new = [0] * len(vars)
            for i, k in zip(pos, e):
                new[i] = k
            terms[tuple(new)] = c
        return self._raw(vars, self.order, self.ring, terms)

    def drop_vars(self, vars: Sequence[str]) -> "TruncatedSeries":
        """Remove variables that do not occur in any term."""
        idx = [self._index(v) for v in vars]
        for e in self._terms:
            if any(e[i] for i in idx):
                raise SeriesError(f"variables {list(vars)} occur in {self}")
        keep = [i for i in range(self.nvars) if i not in idx]
        return self._raw(tuple(self.vars[i] for i in keep), self.order, self.ring,
                         {tuple(e[i] for i in keep): c for e, c in self._terms.items()})

    def rename(self, mapping: Mapping[str, str]) -> "TruncatedSeries":
        vars = tuple(mapping.get(v, v) for v in self.vars)
        if len(set(vars)) != len(vars):
            raise SeriesError(f"renaming collides: {vars}")
        return self._raw(vars, self.order, self.ring, dict(self._terms))

    def specialize_zero(self, var: str) -> "TruncatedSeries":
        """Set ``var = 0`` (the variable is kept, with exponent 0 everywhere)."""
        i = self._index(var)
        return self._raw(self.vars, self.order, self.ring,
                         {e: c for e, c in self._terms.items() if e[i] == 0})

    def shift(self, var: str, k: int = 1) -> "TruncatedSeries":
        """Multiply by ``var**k``; the known range grows by ``k`` as well."""
        i = self._index(var)
        terms = {}
        for e, c in self._terms.items():
            e = list(e)
            e[i] += k
            terms[tuple(e)] = c
        return self._raw(self.vars, self.order + k, self.ring, terms)

    def divide_by_var(self, var: str, k: int = 1) -> "TruncatedSeries":
        """Exact division by ``var**k``; the result is known to ``order - k``."""
        i = self._index(var)
        if self.order - k < 1:
            raise SeriesError("nothing left after division")
        terms = {}
        for e, c in self._terms.items():
            if e[i] < k:
                raise SeriesError(f"{self} is not divisible by {var}^{k}")
            e = list(e)
            e[i] -= k
            terms[tuple(e)] = c
        return self._raw(self.vars, self.order - k, self.ring, terms)

    def map_coefficients(self, fn) -> "TruncatedSeries":
        return TruncatedSeries(self.vars, self.order, self.ring,
                               {e: fn(c) for e, c in self._terms.items()})

    def coefficients_in(self, var: str) -> Dict[Exponent, Dict[int, Number]]:
        """Group terms by the exponents of the other variables.

        Returns ``{rest_exponent: {k: coefficient of var**k}}`` where
        ``rest_exponent`` is the exponent vector with ``var``'s slot zeroed.
        """
        i = self._index(var)
        out: Dict[Exponent, Dict[int, Number]] = {}
        for e, c in self._terms.items():
            rest = e[:i] + (0,) + e[i + 1:]
            out.setdefault(rest, {})[e[i]] = c
        return out

    def derivative(self, var: Optional[str] = None) -> "TruncatedSeries":
        if var is None:
            self._require_univariate()
            var = self.vars[0]
        i = self._index(var)
        if self.order < 2:
            raise SeriesError("derivative of an order-1 series is unknown")
        terms = {}
        for e, c in self._terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                terms[tuple(e2)] = e[i] * c
        return TruncatedSeries(self.vars, self.order - 1, self.ring, terms)

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.vars != self.vars:
                raise SeriesError(f"variable mismatch: {self.vars} vs {other.vars}")
            common_ring(self.ring, other.ring)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return TruncatedSeries.const(other, self.vars, self.order, self.ring)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        order = min(self.order, other.order)
        terms = {e: c for e, c in self._terms.items() if sum(e) < order}
        norm = self.ring.normalize
        for e, c in other._terms.items():
            if sum(e) >= order:
                continue
            s = norm(terms.get(e, 0) + c)
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return self._raw(self.vars, order, self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        norm = self.ring.normalize
        return self._raw(self.vars, self.order, self.ring,
                         {e: norm(-c) for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _multiply(self, other, min(self.order, other.order))

    __rmul__ = __mul__

    def scale(self, c) -> "TruncatedSeries":
        c = self.ring.normalize(c)
        norm = self.ring.normalize
        terms = {}
        for e, v in self._terms.items():
            v = norm(v * c)
            if v:
                terms[e] = v
        return self._raw(self.vars, self.order, self.ring, terms)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise SeriesError(f"only non-negative integer powers, got {n!r}")
        result = TruncatedSeries.one(self.vars, self.order, self.ring)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = TruncatedSeries.const(other, self.vars, self.order, self.ring)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.vars == other.vars and self.order == other.order
                and self.ring == other.ring and self._terms == other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, self.order, self.ring, frozenset(self._terms.items())))
        return self._hash

    def agrees_with(self, other: "TruncatedSeries", order: Optional[int] = None) -> bool:
        """Equality after truncating both sides to a common order."""
        order = min(self.order, other.order, order or self.order)
        return self.truncate(order) == other.truncate(order)

    # -- printing / serialization -------------------------------------

    def _monomial(self, exp) -> str:
        parts = []
        for v, k in zip(self.vars, exp):
            if k == 1:
                parts.append(v)
            elif k > 1:
                parts.append(f"{v}^{k}")
        return "*".join(parts)

    def __str__(self):
        if not self._terms:
            return f"O({self.order})"
        out = []
        display = sorted(self._terms.items(), key=lambda t: (sum(t[0]), tuple(-k for k in t[0])))
        for exp, c in display:
            mono = self._monomial(exp)
            neg = c < 0
            a = -c if neg else c
            text = self.ring.format(a)
            if "/" in text and mono:
                text = f"({text})"
            if mono:
                body = mono if a == 1 else f"{text}*{mono}"
            else:
                body = text
            if not out:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(out) + f" + O({self.order})"

    def __repr__(self):
        return f"TruncatedSeries({self}, vars={self.vars}, ring={self.ring})"

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "order": self.order,
            "ring": self.ring.to_json(),
            "terms": [{"exp": list(e), "coeff": self.ring.format(c)} for e, c in self.items()],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data) -> "TruncatedSeries":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            ring = Ring.from_json(data["ring"])
            vars = data["vars"]
            order = int(data["order"])
            terms = {}
            for t in data["terms"]:
                exp = tuple(t["exp"])
                if exp in terms:
                    raise SeriesError(f"duplicate exponent {list(exp)}")
                terms[exp] = ring.parse(t["coeff"])
        except (KeyError, TypeError, RingError) as exc:
            raise SeriesError(f"malformed series JSON: {exc}") from exc
        return cls(vars, order, ring, terms)


# -- multiplication kernel ---------------------------------------------

def _integerize(terms, ring):
    """Scale coefficients to integers; returns (denominator, terms)."""
    if ring.tag in ("ExactInt", "PAdicTruncated"):
        return 1, terms
    den = 1
    for c in terms.values():
        if isinstance(c, Fraction):
            den = lcm(den, c.denominator)
    if den == 1:
        return 1, terms
    return den, {e: int(c * den) for e, c in terms.items()}


def _pack(exp, base):
    k = 0
    for e in exp:
        k = k * base + e
    return k


def _unpack(k, base, n):
    out = [0] * n
    for i in range(n - 1, -1, -1):
        k, out[i] = divmod(k, base)
    return tuple(out)


def _multiply(a: TruncatedSeries, b: TruncatedSeries, order: int) -> TruncatedSeries:
    ring = a.ring
    n = a.nvars
    if not a._terms or not b._terms:
        return TruncatedSeries._raw(a.vars, order, ring, {})
    if len(a._terms) > len(b._terms):
        a, b = b, a
    da, ta = _integerize(a._terms, ring)
    db, tb = _integerize(b._terms, ring)
    base = order
    la = sorted(((sum(e), _pack(e, base), c) for e, c in ta.items() if sum(e) < order))
    lb = sorted(((sum(e), _pack(e, base), c) for e, c in tb.items() if sum(e) < order))
    acc: Dict[int, int] = {}
    get = acc.get
    for dega, ka, ca in la:
        lim = order - dega
        if lim <= 0:
            break
        for degb, kb, cb in lb:
            if degb >= lim:
                break
            k = ka + kb
            acc[k] = get(k, 0) + ca * cb
    den = da * db
    terms = {}
    if ring.tag == "PAdicTruncated":
        mod = ring.modulus
        for k, v in acc.items():
            v %= mod
            if v:
                terms[_unpack(k, base, n)] = v
    elif den == 1:
        for k, v in acc.items():
            if v:
                terms[_unpack(k, base, n)] = v
    else:
        for k, v in acc.items():
            if v:
                q = Fraction(v, den)
                terms[_unpack(k, base, n)] = q.numerator if q.denominator == 1 else q
    return TruncatedSeries._raw(a.vars, order, ring, terms)


def multiply_exact(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Product keeping every coefficient the operands determine.

    If ``a`` is known below degree ``Na`` and ``b`` starts in degree ``vb``,
    the product is known below ``min(Na + vb, Nb + va)``.
    """
    b = a._coerce(b)
    order = min(a.order + b.valuation(), b.order + a.valuation())
    return _multiply(a, b, order)


# -- composition -------------------------------------------------------

def _is_plain_variable(s: TruncatedSeries) -> Optional[int]:
    if len(s._terms) != 1:
        return None
    (exp, c), = s._terms.items()
    if c != 1 or sum(exp) != 1:
        return None
    return exp.index(1)


def compose(f: TruncatedSeries, assignment: Mapping[str, TruncatedSeries]) -> TruncatedSeries:
    """Substitute series for the variables of ``f``.

    All substituted series share one variable list and ring and must have
    zero constant term. Variables of ``f`` left out of ``assignment`` must
    also appear in the target variable list; they are kept as they are.
    """
    if not assignment:
        return f
    subs = list(assignment.values())
    target_vars = subs[0].vars
    for name, s in assignment.items():
        if name not in f.vars:
            raise SeriesError(f"{name!r} is not a variable of f {f.vars}")
        if s.vars != target_vars:
            raise SeriesError(f"substituted series disagree on variables: {s.vars} vs {target_vars}")
        common_ring(f.ring, s.ring)
        if s.constant_term != 0:
            raise SeriesError(f"substituted series for {name!r} has nonzero constant term")
    order = min([f.order] + [s.order for s in subs])
    full = []
    for v in f.vars:
        if v in assignment:
            full.append(assignment[v].truncate(order))
        elif v in target_vars:
            full.append(TruncatedSeries.var(v, target_vars, order, f.ring))
        else:
            raise SeriesError(f"variable {v!r} neither substituted nor present in {target_vars}")
    return _compose(f, full, target_vars, order)


def _compose(f, subs, target_vars, order):
    ring = f.ring
    m = len(target_vars)
    trivial = {}
    nontrivial = []
    for i, s in enumerate(subs):
        j = _is_plain_variable(s)
        if j is not None:
            trivial[i] = j
        else:
            nontrivial.append(i)
    # group f's terms by nontrivial exponents; the trivial part is a monomial
    groups: Dict[Exponent, Dict[Exponent, Number]] = {}
    for e, c in f._terms.items():
        key = tuple(e[i] for i in nontrivial)
        mono = [0] * m
        for i, j in trivial.items():
            mono[j] += e[i]
        mono = tuple(mono)
        if sum(mono) >= order:
            continue
        g = groups.setdefault(key, {})
        g[mono] = ring.normalize(g.get(mono, 0) + c)
    polys = {k: TruncatedSeries(target_vars, order, ring, t) for k, t in groups.items()}
    powers = [[TruncatedSeries.one(target_vars, order, ring)] for _ in nontrivial]
    nsubs = [subs[i] for i in nontrivial]

    def power(slot, k):
        lst = powers[slot]
        while len(lst) <= k:
            lst.append(lst[-1] * nsubs[slot])
        return lst[k]

    def evaluate(slot, table):
        if slot == len(nontrivial):
            total = TruncatedSeries.zero(target_vars, order, ring)
            for poly in table.values():
                total = total + poly
            return total
        by_first: Dict[int, Dict[Exponent, TruncatedSeries]] = {}
        for key, poly in table.items():
            by_first.setdefault(key[0], {})[key[1:]] = poly
        total = TruncatedSeries.zero(target_vars, order, ring)
        for k in sorted(by_first):
            inner = evaluate(slot + 1, by_first[k])
            if not inner:
                continue
            if k and nsubs[slot].valuation() * k >= order:
                continue
            total = total + (inner * power(slot, k) if k else inner)
        return total

    return evaluate(0, polys)


def reverse(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse of a univariate series ``f = a x + ...``."""
    f._require_univariate()
    if f.constant_term != 0:
        raise SeriesError("reverse needs zero constant term")
    a1 = f.coefficient((1,))
    if not f.ring.is_unit(a1):
        raise SeriesError(f"linear coefficient {a1} is not a unit in {f.ring}")
    var = f.vars[0]
    N = f.order
    x = TruncatedSeries.var(var, f.vars, N, f.ring)
    g = x.scale(f.ring.inverse(a1))
    if N <= 2:
        return g
    fprime = f.derivative()
    for _ in range(N.bit_length() + 2):
        err = compose(f, {var: g}) - x
        if not err:
            return g
        slope = invert_unit(compose(fprime, {var: g.truncate(fprime.order)}))
        g = g - multiply_exact(err, slope).truncate(N)
    if compose(f, {var: g}) != x:
        raise SeriesError("reversion failed to converge")
    return g


def invert_unit(f: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse of a series whose constant term is a unit."""
    c0 = f.constant_term
    if not f.ring.is_unit(c0):
        raise SeriesError(f"constant term {c0} is not a unit in {f.ring}")
    one = TruncatedSeries.one(f.vars, f.order, f.ring)
    y = one.scale(f.ring.inverse(c0))
    for _ in range(f.order.bit_length() + 2):
        err = one - f * y
        if not err:
            return y
        y = y + y * err
    raise SeriesError("unit inversion failed to converge")


def divide(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """``f / g`` for a series ``g`` with unit constant term."""
    return f * invert_unit(g)


def variables(names: Sequence[str], order: int, ring: Ring = ZZ):
    """All coordinate variables of a polynomial ring, as series."""
    names = tuple(names)
    return tuple(TruncatedSeries.var(v, names, order, ring) for v in names)


__all__ = [
    "Precision", "TruncatedSeries", "SeriesError", "compose", "reverse",
    "invert_unit", "divide", "multiply_exact", "variables", "grlex_key", "QQ", "ZZ",
]
