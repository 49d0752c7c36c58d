"""Normal forms in ``R[[z]] / (g(z))`` for the rings attached to ``BC_p``.

Two relations matter: the p-series ``[p]_G(z)`` (the ring of ``BC_p``) and
the divided p-series ``<p>_G(z)`` (the quotient by the transfer ideal).
A relation with a unit coefficient mod p is replaced by its distinguished
polynomial, and elements are reduced by polynomial division
(``WeierstrassPoly``). A relation that is the constant ``c`` just reduces
coefficients mod ``c`` (``ConstantQuotient``); this is what the additive
law gives for the transfer quotient.

Precision. Reduced elements have coefficients in ``Z/p^k`` with ``k`` the
guaranteed precision of the relation. In a series in ``z`` and other
variables, the coefficient of a monomial of degree ``a`` in the other
variables is a polynomial in ``z`` known only below degree ``N - a``; its
remainder is certified mod ``p**min(k, v * ((N - a) // d))`` and is
reduced mod that power (coefficients with no certified digits are
dropped). With this convention reduction is a ring homomorphism onto a
well-defined quotient, and equal normal forms mean equal elements to the
certified precision.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Tuple

from .fgl import FormalGroupLaw, divided_p_series, n_series, p_series
from .rings import PADIC, QQ, RATIONAL, Ring, RingError, Zmod, valuation
from .series import Precision, SeriesError, TruncatedSeries, invert_unit, multiply_exact
from .weierstrass import (WeierstrassError, division_precision, lower_valuation,
                          poly_divmod, weierstrass_prepare)

DEFAULT_PADIC = 8

WEIERSTRASS = "WeierstrassPoly"
CONSTANT = "ConstantQuotient"


class UnsupportedHeightError(ValueError):
    """The relation vanishes mod p through the truncation order."""


class InsufficientPrecisionError(ValueError):
    def __init__(self, message, required_order=None):
        self.required_order = required_order
        if required_order is not None:
            message = f"{message} (needs order >= {required_order})"
        super().__init__(message)


def _sizes(G: FormalGroupLaw, precision) -> Tuple[int, int]:
    if precision is None:
        precision = Precision(G.order, DEFAULT_PADIC)
    elif isinstance(precision, int):
        precision = Precision(G.order, precision)
    N = min(precision.order, G.order)
    M = precision.padic or DEFAULT_PADIC
    if G.ring.tag == PADIC:
        M = min(M, G.ring.M)
    return N, M


def _residues(f: TruncatedSeries, p: int, M: int) -> TruncatedSeries:
    ring = Zmod(p, M)
    try:
        return f.change_ring(ring)
    except RingError as exc:
        raise SeriesError(f"cannot reduce {f.ring} coefficients mod {p}^{M}: {exc}") from None


@dataclass(frozen=True)
class PreparedQuotientRing:
    p: int
    kind: str                       # "bcp" or "transfer"
    relation: TruncatedSeries       # univariate in z, over the law's ring
    backend: str
    coeff_ring: Ring                # Z/p^k, k = guaranteed precision
    degree: Optional[int] = None    # WeierstrassPoly: d
    distinguished: Optional[TruncatedSeries] = None
    lower_valuation: Optional[int] = None
    constant: Optional[int] = None  # ConstantQuotient: c
    working_precision: int = DEFAULT_PADIC
    var: str = "z"

    @property
    def precision(self) -> int:
        return self.coeff_ring.M

    @property
    def order(self) -> int:
        return self.relation.order

    def __str__(self):
        if self.backend == WEIERSTRASS:
            poly = str(self.distinguished).rsplit(" + O(", 1)[0]
            return f"Z/{self.p}^{self.precision}[z]/({poly})"
        return f"Z/{self.p}^{self.precision}[[z]]  (relation: constant {self.constant})"

    # -- precision ----------------------------------------------------

    def digits(self, known_below: int) -> int:
        """Certified p-adic digits of a remainder whose dividend is known below ``known_below``."""
        if self.backend == CONSTANT:
            return self.precision
        return division_precision(self.lower_valuation, self.degree, known_below, self.precision)

    def precision_profile(self, f: TruncatedSeries) -> dict:
        """``{a: digits}`` for each degree ``a`` in the variables other than z."""
        return {a: self.digits(f.order - a) for a in range(f.order)}

    # -- reduction ----------------------------------------------------

    def at_precision(self, k: int) -> "PreparedQuotientRing":
        """The same quotient with coefficients reduced mod ``p**k``."""
        k = min(k, self.precision)
        ring = Zmod(self.p, k)
        dist = self.distinguished.change_ring(ring) if self.distinguished is not None else None
        return replace(self, coeff_ring=ring, distinguished=dist)

    def coerce(self, f: TruncatedSeries) -> TruncatedSeries:
        if self.var not in f.vars:
            raise SeriesError(f"variable {self.var!r} missing from {f.vars}")
        return _residues(f, self.p, self.precision)

    def reduce(self, f: TruncatedSeries) -> TruncatedSeries:
        """Canonical representative of ``f`` (reduced coefficient-wise in z)."""
        f = self.coerce(f)
        if self.backend == CONSTANT:
            return f
        i = f.vars.index(self.var)
        d = self.degree
        P = self.distinguished.coeffs()[:d + 1]
        mod = self.coeff_ring.modulus
        p = self.p
        terms = {}
        for rest, by_power in f.coefficients_in(self.var).items():
            a = sum(rest)
            k = self.digits(f.order - a)
            if k <= 0:
                continue
            poly = [0] * (max(by_power) + 1)
            for j, c in by_power.items():
                poly[j] = c
            _, r = poly_divmod(poly, P, mod)
            pk = p ** k
            for j, c in enumerate(r):
                c %= pk
                if c:
                    e = list(rest)
                    e[i] = j
                    terms[tuple(e)] = c
        return TruncatedSeries(f.vars, f.order, self.coeff_ring, terms)

    def mul(self, a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
        return self.reduce(self.coerce(a) * self.coerce(b))

    def add(self, a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
        return self.reduce(self.coerce(a) + self.coerce(b))

    def is_zero(self, f: TruncatedSeries) -> bool:
        return self.reduce(f).is_zero()

    def equal(self, a: TruncatedSeries, b: TruncatedSeries) -> bool:
        return self.reduce(self.coerce(a) - self.coerce(b)).is_zero()

    # -- normal forms -------------------------------------------------

    def basis(self) -> List[TruncatedSeries]:
        """Module basis ``1, z, ..., z^(d-1)`` of a WeierstrassPoly ring."""
        self._require_poly()
        return [TruncatedSeries((self.var,), self.order, self.coeff_ring, {(j,): 1})
                for j in range(self.degree)]

    def element(self, coeffs) -> TruncatedSeries:
        return self.reduce(TruncatedSeries.from_coeffs(coeffs, self.var, self.order, self.coeff_ring))

    def random_element(self, rng: random.Random) -> TruncatedSeries:
        self._require_poly()
        mod = self.coeff_ring.modulus
        return self.element([rng.randrange(mod) for _ in range(self.degree)])

    def _require_poly(self):
        if self.backend != WEIERSTRASS:
            raise SeriesError(f"{self.backend} ring has no finite normal-form basis")

    def to_json(self) -> dict:
        backend = {"tag": self.backend}
        if self.backend == WEIERSTRASS:
            backend["degree"] = self.degree
            backend["distinguished"] = self.distinguished.to_json()
            backend["lower_valuation"] = self.lower_valuation
        else:
            backend["c"] = str(self.constant)
        return {
            "kind": self.kind,
            "p": self.p,
            "relation": self.relation.to_json(),
            "backend": backend,
            "precision": {"order": self.order, "padic": self.working_precision,
                          "guaranteed": self.precision},
        }


def _prepared(kind, p, relation, M) -> PreparedQuotientRing:
    try:
        prep = weierstrass_prepare(_residues(relation, p, M))
    except WeierstrassError as exc:
        raise UnsupportedHeightError(str(exc)) from None
    if prep.precision < 1:
        need = prep.degree * -(-1 // max(prep.lower_valuation, 1)) + 1
        raise InsufficientPrecisionError(
            f"the distinguished polynomial of degree {prep.degree} has no certified digits",
            required_order=max(need, prep.degree))
    ring = Zmod(p, prep.precision)
    dist = prep.distinguished.change_ring(ring)
    v = lower_valuation(dist.coeffs(), prep.degree, ring)
    return PreparedQuotientRing(p, kind, relation, WEIERSTRASS, ring, prep.degree, dist, v,
                                working_precision=M)


def build_bcp_ring(G: FormalGroupLaw, p: int, precision=None) -> PreparedQuotientRing:
    """``R[[z]] / [p]_G(z)`` in Weierstrass normal form.

    Raises ``UnsupportedHeightError`` when ``[p]_G`` vanishes mod ``p``
    through the truncation order (e.g. the additive law); the transfer
    quotient still exists in that case.
    """
    N, M = _sizes(G, precision)
    rel = p_series(G.truncate(N), p).rename({"x": "z"})
    try:
        return _prepared("bcp", p, rel, M)
    except UnsupportedHeightError:
        raise UnsupportedHeightError(
            f"[{p}]_G(z) vanishes mod {p} below degree {N}: infinite height at this truncation; "
            f"use build_transfer_quotient instead") from None


def build_transfer_quotient(G: FormalGroupLaw, p: int, precision=None) -> PreparedQuotientRing:
    """``R[[z]] / <p>_G(z)``: the quotient by the transfer ideal."""
    N, M = _sizes(G, precision)
    rel = divided_p_series(G.truncate(N), p).rename({"x": "z"})
    if all(e == (0,) for e in rel.terms):
        c = rel.constant_term
        k = valuation(c, p) if c != 0 else M
        if k is None or k < 0:
            raise SeriesError(f"relation constant {c} is not {p}-integral")
        if k == 0:
            raise SeriesError(f"relation constant {c} is a unit: the quotient is the zero ring")
        k = min(k, M)
        return PreparedQuotientRing(p, "transfer", rel, CONSTANT, Zmod(p, k), constant=c,
                                    working_precision=M)
    try:
        return _prepared("transfer", p, rel, M)
    except UnsupportedHeightError as exc:
        raise UnsupportedHeightError(f"<{p}>_G(z) is nonconstant with no unit coefficient mod {p}: {exc}") from None


@dataclass(frozen=True)
class TransferIdeal:
    generator: TruncatedSeries
    ambient: Optional[PreparedQuotientRing]

    def __post_init__(self):
        p = self.ambient.p if self.ambient is not None else None
        c = self.generator.constant_term
        if p is not None and Fraction(c) != p and self.generator.ring.tag != PADIC:
            raise SeriesError(f"transfer ideal generator must have constant term {p}, got {c}")

    def contains(self, f: TruncatedSeries) -> bool:
        """Membership of an element of the ambient ring, to the common precision."""
        if self.ambient is None:
            raise SeriesError("no ambient BC_p model at this height")
        R = self.ambient
        q = build_from_relation("transfer", R.p, self.generator, R.working_precision)
        k = min(R.precision, q.precision)
        return q.at_precision(k).is_zero(R.at_precision(k).reduce(f))


def build_from_relation(kind, p, relation, M) -> PreparedQuotientRing:
    return _prepared(kind, p, relation, M)


def transfer_ideal(G: FormalGroupLaw, p: int, precision=None) -> TransferIdeal:
    N, _ = _sizes(G, precision)
    gen = divided_p_series(G.truncate(N), p).rename({"x": "z"})
    try:
        ambient = build_bcp_ring(G, p, precision)
    except UnsupportedHeightError:
        ambient = None
    return TransferIdeal(gen, ambient)


# -- linear algebra over Z/p^k -----------------------------------------

def _val(x: int, p: int, k: int) -> int:
    x %= p ** k
    if x == 0:
        return k
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def smith_kernel(rows: List[List[int]], p: int, k: int):
    """Kernel of an integer matrix acting on ``(Z/p^k)^n``.

    Returns ``(free, torsion)``: ``free`` spans the solutions coming from
    zero pivots, ``torsion`` lists ``(valuation, vector)`` for pivots of
    valuation ``0 < e < k`` (solutions that only exist mod ``p^k``).
    """
    mod = p ** k
    A = [[c % mod for c in row] for row in rows]
    m = len(A)
    n = len(A[0]) if A else 0
    V = [[int(i == j) for j in range(n)] for i in range(n)]  # columns transform
    pivots = []
    r = 0
    while r < min(m, n):
        best = None
        for i in range(r, m):
            for j in range(r, n):
                if A[i][j]:
                    v = _val(A[i][j], p, k)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        e, i, j = best
        A[r], A[i] = A[i], A[r]
        for row in A:
            row[r], row[j] = row[j], row[r]
        for row in V:
            row[r], row[j] = row[j], row[r]
        piv = A[r][r]
        unit = pow(piv // p ** e, -1, mod)
        A[r] = [c * unit % mod for c in A[r]]
        for i2 in range(m):
            if i2 != r and A[i2][r]:
                f = A[i2][r] // p ** e
                A[i2] = [(a - f * b) % mod for a, b in zip(A[i2], A[r])]
        for j2 in range(r + 1, n):
            if A[r][j2]:
                f = A[r][j2] // p ** e
                for row in A:
                    row[j2] = (row[j2] - f * row[r]) % mod
                for row in V:
                    row[j2] = (row[j2] - f * row[r]) % mod
        pivots.append(e)
        r += 1
    free, torsion = [], []
    for j in range(n):
        col = [V[i][j] for i in range(n)]
        e = pivots[j] if j < len(pivots) else k
        if e == k:
            free.append(col)
        elif e > 0:
            torsion.append((e, [c * p ** (k - e) % mod for c in col]))
    return free, torsion


def echelon(vectors: List[List[int]], p: int, k: int) -> List[List[int]]:
    """Row echelon form over ``Z/p^k`` with pivots normalized to powers of p."""
    mod = p ** k
    rows = [[c % mod for c in v] for v in vectors if any(c % mod for c in v)]
    out = []
    n = len(rows[0]) if rows else 0
    for col in range(n):
        cands = [(_val(r[col], p, k), idx) for idx, r in enumerate(rows) if r[col]]
        if not cands:
            continue
        e, idx = min(cands)
        piv = rows.pop(idx)
        unit = pow(piv[col] // p ** e, -1, mod)
        piv = [c * unit % mod for c in piv]
        rows = [[(a - (r[col] // p ** e) * b) % mod for a, b in zip(r, piv)] for r in rows]
        rows = [r for r in rows if any(r)]
        for o in out:
            f = o[col] // p ** e
            if f:
                o[:] = [(a - f * b) % mod for a, b in zip(o, piv)]
        out.append(piv)
    return out


@dataclass
class InvariantSubring:
    ring: PreparedQuotientRing
    basis: List[TruncatedSeries]
    torsion: List[Tuple[int, TruncatedSeries]] = field(default_factory=list)
    acting: List[int] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def precision(self) -> int:
        return self.ring.precision

    def _vector(self, f):
        f = self.ring.reduce(f)
        return [f.coefficient((j,)) for j in range(self.ring.degree)]

    def contains(self, f: TruncatedSeries) -> bool:
        """Membership in the span of ``basis`` (to the ring's precision)."""
        p, k = self.ring.p, self.precision
        vec = self._vector(f)
        rows = echelon([self._vector(b) for b in self.basis], p, k)
        mod = p ** k
        for row in rows:
            col = next(j for j, c in enumerate(row) if c)
            e = _val(row[col], p, k)
            if vec[col] % p ** e:
                return False
            f_ = vec[col] // p ** e
            vec = [(a - f_ * b) % mod for a, b in zip(vec, row)]
        return not any(vec)


def fpx_invariants(ring: PreparedQuotientRing, G: FormalGroupLaw, p: int) -> InvariantSubring:
    """Elements of ``R[[z]]/[p]_G(z)`` fixed by ``z -> [i]_G(z)`` for all ``i`` in ``F_p^x``."""
    if ring.kind != "bcp" or ring.backend != WEIERSTRASS:
        raise SeriesError("F_p^x invariants are computed in the BC_p model")
    if p == 2:
        return InvariantSubring(ring, ring.basis(), [], [])
    d, k = ring.degree, ring.precision
    N = ring.order
    if ring.digits(N) < 1:
        raise InsufficientPrecisionError("no certified digits at degree 0", required_order=2 * d)
    rows = []
    acting = list(range(2, p))
    Gt = G.truncate(N)
    for i in acting:
        s = n_series(Gt, i).series.rename({"x": "z"})
        s = ring.coerce(s)
        power = TruncatedSeries.one(("z",), N, ring.coeff_ring)
        cols = []
        for j in range(d):
            img = ring.reduce(power)
            col = [img.coefficient((t,)) for t in range(d)]
            col[j] -= 1
            cols.append(col)
            power = power * s
        rows.extend([cols[j][t] for j in range(d)] for t in range(d))
    free, torsion = smith_kernel(rows, p, k)
    basis_vecs = echelon(free, p, k)
    basis = [ring.element(v) for v in basis_vecs]
    tors = [(e, ring.element(v)) for e, v in torsion]
    return InvariantSubring(ring, basis, tors, acting)


def act(ring: PreparedQuotientRing, G: FormalGroupLaw, i: int, f: TruncatedSeries) -> TruncatedSeries:
    """``f(z) -> f([i]_G(z))`` reduced in ``ring``."""
    from .series import compose
    N = min(f.order, ring.order)
    s = n_series(G.truncate(N), i).series.rename({"x": "z"})
    s = ring.coerce(s)
    f = ring.coerce(f).truncate(N)
    if f.vars != ("z",):
        s = s.extend(f.vars)
    return ring.reduce(compose(f, {"z": s}))


# -- ideal membership over torsion-free rings -----------------------------

@dataclass(frozen=True)
class Membership:
    member: Optional[bool]      # None: inconclusive
    order: int                  # certified to this order (members) / limiting degree
    detail: str = ""

    def to_json(self):
        status = {True: "member", False: "non-member", None: "inconclusive"}[self.member]
        out = {"status": status, "order": self.order}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class IntersectionCertificate:
    in_z: Membership
    in_divided: Membership
    in_p_series: Membership
    quotient: Optional[TruncatedSeries]
    verified: Optional[bool]

    def to_json(self):
        return {
            "in_z": self.in_z.to_json(),
            "in_divided_p_series": self.in_divided.to_json(),
            "in_p_series": self.in_p_series.to_json(),
            "quotient": self.quotient.to_json() if self.quotient is not None else None,
            "verified": self.verified,
        }


def _integral_in(ring: Ring, c) -> bool:
    return ring.contains(c)


def _divide_over_q(f: TruncatedSeries, g: TruncatedSeries, ring: Ring):
    """``f / g`` over QQ, then the first degree where it leaves ``ring``."""
    N = min(f.order, g.order)
    fq = TruncatedSeries(f.vars, N, QQ, f.terms)
    gq = TruncatedSeries(g.vars, N, QQ, g.terms)
    q = fq * invert_unit(gq)
    for (i,), c in q.items():
        if not _integral_in(ring, c):
            return q, i
    return q, None


def ideal_intersection_witness(G: FormalGroupLaw, p: int, f: TruncatedSeries) -> IntersectionCertificate:
    """Membership of ``f(z)`` in ``(z)``, ``(<p>_G(z))`` and ``([p]_G(z))``.

    Over a torsion-free ring the quotient by ``<p>_G`` is unique over the
    rationals, so a non-integral coefficient certifies non-membership;
    integrality is certified to the known order. When ``f`` lies in the
    first two ideals, the quotient ``q`` with ``f = q * [p]_G(z)`` is
    returned and checked.
    """
    ring = G.ring
    if ring.tag == PADIC:
        raise SeriesError("the intersection lemma needs a torsion-free coefficient ring")
    f._require_univariate()
    f = f.rename({f.vars[0]: "z"})
    if f.ring != ring:
        f = TruncatedSeries(f.vars, f.order, ring, f.terms)
    div = divided_p_series(G, p).rename({"x": "z"})
    pser = p_series(G, p).rename({"x": "z"})

    in_z = Membership(f.constant_term == 0, f.order,
                      "" if f.constant_term == 0 else "nonzero constant term")
    _, bad = _divide_over_q(f, div, ring)
    n1 = min(f.order, div.order)
    in_div = Membership(True, n1) if bad is None else \
        Membership(False, bad, f"quotient leaves {ring} in degree {bad}")

    if not in_z.member:
        in_p = Membership(False, 0, "not divisible by z")
        return IntersectionCertificate(in_z, in_div, in_p, None, None)
    if f.order < 2:
        in_p = Membership(None, f.order, "nothing known beyond the constant term")
        return IntersectionCertificate(in_z, in_div, in_p, None, None)
    fz = f.divide_by_var("z")
    q, bad = _divide_over_q(fz, div, ring)
    if bad is not None:
        in_p = Membership(False, bad + 1, f"quotient by [p] leaves {ring} in degree {bad}")
        return IntersectionCertificate(in_z, in_div, in_p, None, None)
    q = TruncatedSeries(q.vars, q.order, ring, q.terms)
    product = multiply_exact(q, pser)
    n = min(product.order, f.order)
    verified = product.truncate(n) == f.truncate(n)
    in_p = Membership(True, n)
    return IntersectionCertificate(in_z, in_div, in_p, q, verified)


# -- injectivity --------------------------------------------------------

@dataclass(frozen=True)
class InjectivityVerdict:
    element: TruncatedSeries
    augmentation: int
    transfer_image: TruncatedSeries
    both_vanish: bool
    element_vanishes: bool
    digits: int                 # precision of the check
    consistent: bool

    @property
    def verdict(self) -> str:
        return "zero" if self.both_vanish else "nonzero"

    def to_json(self):
        return {
            "element": self.element.to_json(),
            "augmentation": str(self.augmentation),
            "transfer_image": self.transfer_image.to_json(),
            "verdict": self.verdict,
            "digits": self.digits,
            "consistent": self.consistent,
        }


@dataclass
class InjectivityContext:
    bcp: PreparedQuotientRing
    transfer: PreparedQuotientRing

    @property
    def digits(self) -> int:
        return min(self.bcp.precision, self.transfer.precision)

    def check(self, f: TruncatedSeries) -> InjectivityVerdict:
        k = self.digits
        p = self.bcp.p
        f = self.bcp.at_precision(k).reduce(f)
        aug = f.specialize_zero("z").constant_term
        image = self.transfer.at_precision(k).reduce(f)
        both = aug == 0 and image.is_zero()
        # kernel elements are multiples of p^(k-1)
        small = all(c % p ** (k - 1) == 0 for c in f.terms.values())
        consistent = (not both) or small
        return InjectivityVerdict(f, aug, image, both, f.is_zero(), k, consistent)


def injectivity_context(G: FormalGroupLaw, p: int, precision=None) -> InjectivityContext:
    if G.ring.tag == RATIONAL:
        raise SeriesError("over the rationals p is a unit; use a p-local law")
    return InjectivityContext(build_bcp_ring(G, p, precision), build_transfer_quotient(G, p, precision))


def injectivity_check(G: FormalGroupLaw, p: int, f: TruncatedSeries, precision=None) -> InjectivityVerdict:
    """Images of ``f`` under ``z -> 0`` and under reduction mod the transfer ideal.

    Both images vanish only for elements divisible by ``p**(k-1)`` at
    ``k`` certified digits; ``consistent`` records that this holds.
    """
    return injectivity_context(G, p, precision).check(f)


@dataclass
class InjectivityReport:
    samples: int
    failures: List[InjectivityVerdict]
    digits: int

    @property
    def passed(self) -> bool:
        return not self.failures


def injectivity_property(G: FormalGroupLaw, p: int, precision=None, samples: int = 200,
                         seed: int = 0) -> InjectivityReport:
    """Random nonzero normal forms: none may vanish under both maps."""
    ctx = injectivity_context(G, p, precision)
    rng = random.Random(seed)
    failures = []
    done = 0
    while done < samples:
        f = ctx.bcp.at_precision(ctx.digits).random_element(rng)
        if f.is_zero():
            continue
        done += 1
        v = ctx.check(f)
        if v.both_vanish:
            failures.append(v)
    return InjectivityReport(samples, failures, ctx.digits)
