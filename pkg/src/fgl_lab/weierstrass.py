"""Weierstrass preparation and division over truncated p-adic integers.

A univariate series ``f`` over ``Z/p^M`` whose reduction mod ``p`` is
nonzero factors uniquely as ``unit * P`` with ``P`` a distinguished
polynomial: monic of degree ``d`` (the first degree with a unit
coefficient) and all lower coefficients divisible by ``p``.

Only the coefficients of ``f`` below its truncation order ``N`` are known.
The unknown tail ``z**N * t`` changes ``P`` by a multiple of
``p**(v * (N // d))`` where ``v`` is the smallest valuation among the
lower coefficients of ``P``; the reported ``precision`` is that bound,
capped at ``M``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .rings import PADIC, Ring, Zmod
from .series import SeriesError, TruncatedSeries


class WeierstrassError(SeriesError):
    """Raised when ``f`` vanishes mod ``p`` through the truncation order."""


@dataclass(frozen=True)
class Preparation:
    unit: TruncatedSeries
    distinguished: TruncatedSeries
    degree: int
    precision: int        # guaranteed p-adic digits of ``distinguished``
    lower_valuation: int  # min valuation of the non-leading coefficients

    def __iter__(self):
        yield self.unit
        yield self.distinguished


def _residue_ring(f: TruncatedSeries, M=None) -> Ring:
    ring = f.ring
    if ring.tag == PADIC:
        if M is not None and M != ring.M:
            return Zmod(ring.p, min(M, ring.M))
        return ring
    if M is None or ring.p is None:
        raise SeriesError(f"Weierstrass preparation needs Z/p^M coefficients, got {ring}")
    return Zmod(ring.p, M)


def weierstrass_degree(f: TruncatedSeries) -> int:
    """First degree whose coefficient is a unit mod p."""
    f._require_univariate()
    p = f.ring.p
    for (i,), c in sorted(f._terms.items()):
        if f.ring.is_unit(c):
            return i
    raise WeierstrassError(
        f"series vanishes mod {p} below degree {f.order}: no Weierstrass degree at this truncation")


def _pmul(a: List[int], b: List[int], mod: int) -> List[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return [c % mod for c in out]


def _psub(a, b, mod):
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return [(x - y) % mod for x, y in zip(a, b)]


def _add_scaled(a, b, k, mod):
    """``a + k*b`` mod ``mod``."""
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return [(x + k * y) % mod for x, y in zip(a, b)]


def _strip(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _inverse_mod_p(h0: List[int], p: int, n: int) -> List[int]:
    """Inverse of a power series mod (p, z**n)."""
    inv0 = pow(h0[0], -1, p)
    out = [0] * n
    for k in range(n):
        acc = 1 if k == 0 else 0
        for i in range(1, min(k, len(h0) - 1) + 1):
            acc -= h0[i] * out[k - i]
        out[k] = acc * inv0 % p
    return out


def lower_valuation(poly: List[int], d: int, ring: Ring) -> int:
    return min((ring.valuation(c) for c in poly[:d]), default=ring.M)


def division_precision(lower_val: int, d: int, known_below: int, M: int) -> int:
    """p-adic digits of a remainder mod P that survive an unknown tail.

    ``known_below`` is the first unknown degree of the dividend. ``z**k``
    reduces mod ``P`` to a multiple of ``p**(v * (k // d))``.
    """
    if known_below < d:
        return 0
    return min(M, lower_val * (known_below // d))


def weierstrass_prepare(f: TruncatedSeries, M=None) -> Preparation:
    """Factor ``f = unit * distinguished`` over ``Z/p^M``.

    ``M`` is only needed when ``f`` has exact p-local coefficients.
    """
    f._require_univariate()
    ring = _residue_ring(f, M)
    f = f.change_ring(ring)
    p, mod, N = ring.p, ring.modulus, f.order
    d = weierstrass_degree(f)
    coeffs = f.coeffs()
    var = f.vars[0]
    if d == 0:
        return Preparation(f, TruncatedSeries.one(f.vars, N, ring), 0, ring.M, ring.M)

    g = [0] * d + [1]
    h = list(coeffs[d:])
    h0 = [c % p for c in h]
    h0_inv = _inverse_mod_p(h0, p, d)
    pk = 1
    for _ in range(1, ring.M):
        pk *= p
        err = _psub(coeffs, _pmul(g, h, mod), mod)
        if not any(err):
            break
        e = [(c // pk) % p for c in err]
        b = _pmul(e[:d], h0_inv, p)[:d]
        rest = _psub(e, _pmul(b, h0, p), p)
        a = rest[d:]
        g = _add_scaled(g, b, pk, mod)
        h = _add_scaled(h, a, pk, mod)
    if any(_psub(coeffs, _pmul(g, h, mod), mod)):
        raise SeriesError("Hensel lifting did not close; this is a bug")
    unit = TruncatedSeries.from_coeffs(_strip(h), var, N, ring)
    dist = TruncatedSeries.from_coeffs(g, var, N, ring)
    v = lower_valuation(g, d, ring)
    return Preparation(unit, dist, d, division_precision(v, d, N, ring.M), v)


def check_distinguished(P: TruncatedSeries) -> int:
    """Degree of a distinguished polynomial, or ``SeriesError``."""
    P._require_univariate()
    ring = P.ring
    if ring.tag != PADIC:
        raise SeriesError(f"distinguished polynomials live over Z/p^M, got {ring}")
    coeffs = _strip(P.coeffs())
    d = len(coeffs) - 1
    if d < 0 or coeffs[d] != 1:
        raise SeriesError(f"{P} is not monic")
    if any(ring.is_unit(c) for c in coeffs[:d]):
        raise SeriesError(f"{P} has a unit coefficient below its degree")
    return d


def poly_divmod(h: List[int], P: List[int], mod: int) -> Tuple[List[int], List[int]]:
    """Long division by a monic polynomial ``P``."""
    d = len(P) - 1
    r = [c % mod for c in h]
    if len(r) <= d:
        return [], r
    q = [0] * (len(r) - d)
    for k in range(len(r) - 1, d - 1, -1):
        c = r[k]
        if c:
            q[k - d] = c
            for j in range(d + 1):
                r[k - d + j] = (r[k - d + j] - c * P[j]) % mod
    return q, r[:d]


def weierstrass_divide(h: TruncatedSeries, distinguished: TruncatedSeries):
    """``h = quotient * distinguished + remainder`` with ``deg remainder < d``.

    The division is exact on the stored coefficients of ``h``. The
    remainder is only guaranteed mod ``p**division_precision(...)`` once
    the unknown tail of ``h`` is taken into account.
    """
    if h.ring != distinguished.ring:
        raise SeriesError(f"ring mismatch: {h.ring} vs {distinguished.ring}")
    h._require_univariate()
    if h.vars != distinguished.vars:
        raise SeriesError(f"variable mismatch: {h.vars} vs {distinguished.vars}")
    d = check_distinguished(distinguished)
    P = distinguished.coeffs()[:d + 1]
    q, r = poly_divmod(_strip(h.coeffs()), P, h.ring.modulus)
    var, N, ring = h.vars[0], h.order, h.ring
    return (TruncatedSeries.from_coeffs(q, var, N, ring),
            TruncatedSeries.from_coeffs(r, var, N, ring))
