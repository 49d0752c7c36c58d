"""Total power operations and the Ando criterion.

A candidate power operation is data: the image of the coordinate ``x`` as
a series in ``(z, x)`` plus an action on coefficients. It is extended to
all series in ``x`` by substitution and compared, in the quotient by the
transfer ideal, against the product ``prod_i (x +_G [i]_G(z))`` over
``i = 0, ..., p-1``.

Comparisons happen on masked normal forms (see ``quotient``), so two
reductions agree exactly when the underlying series agree to the
certified precision. A mismatch is therefore always a genuine violation;
agreement only counts once the certified range reaches the ``x^p`` term.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Union

from .fgl import FormalGroupLaw, n_series
from .quotient import (PreparedQuotientRing, UnsupportedHeightError, build_bcp_ring,
                       build_transfer_quotient, _sizes)
from .rings import ZZ, Ring
from .series import Precision, SeriesError, TruncatedSeries, compose, grlex_key

ZX = ("z", "x")

SATISFIED = "Satisfied"
VIOLATED = "Violated"
INCONCLUSIVE = "Inconclusive"

BUILTIN_CANDIDATES = ("adams", "frobenius", "identity", "identity-control")


class PowerOperationError(ValueError):
    pass


# -- coefficient actions -----------------------------------------------

def _identity(c):
    return c


def _check_ring_map(sigma: Callable, ring: Ring, samples: int = 20, seed: int = 0):
    rng = random.Random(seed)
    if ring.normalize(sigma(ring.normalize(1))) != ring.normalize(1):
        raise PowerOperationError("coefficient action does not fix 1")
    for _ in range(samples):
        a = ring.normalize(rng.randint(-50, 50))
        b = ring.normalize(rng.randint(-50, 50))
        if ring.normalize(sigma(ring.normalize(a + b))) != ring.normalize(sigma(a) + sigma(b)):
            raise PowerOperationError(f"coefficient action is not additive at {a}, {b}")
        if ring.normalize(sigma(ring.normalize(a * b))) != ring.normalize(sigma(a) * sigma(b)):
            raise PowerOperationError(f"coefficient action is not multiplicative at {a}, {b}")


@dataclass(frozen=True)
class TotalPowerOperation:
    p: int
    G: FormalGroupLaw
    image_of_x: TruncatedSeries
    coefficient_action: Union[str, Callable] = "identity"
    label: str = "custom"
    transfer: Optional[PreparedQuotientRing] = None

    @property
    def order(self) -> int:
        return self.image_of_x.order

    @property
    def sigma(self) -> Callable:
        if self.coefficient_action == "identity":
            return _identity
        return self.coefficient_action

    def __call__(self, f: TruncatedSeries) -> TruncatedSeries:
        return apply_power_operation(self, f)

    def to_json(self) -> dict:
        action = self.coefficient_action if isinstance(self.coefficient_action, str) else "custom"
        return {"p": self.p, "label": self.label, "image_of_x": self.image_of_x.to_json(),
                "coefficient_action": action}


def _in_zx(f: TruncatedSeries) -> TruncatedSeries:
    if not set(f.vars) <= set(ZX):
        raise PowerOperationError(f"image of x must be a series in z and x, got {f.vars}")
    return f.extend(ZX) if f.vars != ZX else f


def make_power_operation(p: int, G: FormalGroupLaw, image_of_x: TruncatedSeries,
                         coefficient_action="identity", precision=None,
                         label: str = "custom") -> TotalPowerOperation:
    """A candidate ``Psi`` determined by ``Psi(x)`` and its action on coefficients."""
    image = _in_zx(image_of_x)
    if image.constant_term != 0:
        raise PowerOperationError("image of x must have zero constant term")
    if coefficient_action != "identity":
        if not callable(coefficient_action):
            raise PowerOperationError(f"unknown coefficient action {coefficient_action!r}")
        _check_ring_map(coefficient_action, G.ring)
    N, M = _sizes(G, precision)
    transfer = build_transfer_quotient(G, p, Precision(N, M))
    image = image.truncate(min(N, image.order))
    transfer.reduce(image)
    return TotalPowerOperation(p, G, image, coefficient_action, label, transfer)


def candidate(name: str, G: FormalGroupLaw, p: int, precision=None) -> TotalPowerOperation:
    """Builtin candidates: ``adams``, ``frobenius`` and the ``identity`` control."""
    N, _ = _sizes(G, precision)
    x = TruncatedSeries.var("x", ZX, N, G.ring)
    z = TruncatedSeries.var("z", ZX, N, G.ring)
    if name == "adams":
        image = (1 + x) ** p - 1
    elif name == "frobenius":
        image = x ** p - z ** (p - 1) * x
    elif name in ("identity", "identity-control"):
        image = x
    else:
        raise PowerOperationError(f"unknown candidate {name!r}; builtins: {', '.join(BUILTIN_CANDIDATES)}")
    return make_power_operation(p, G, image, "identity", precision, label=name)


def candidate_from_json(data: dict, G: FormalGroupLaw, precision=None) -> TotalPowerOperation:
    try:
        p = int(data["p"])
        image = TruncatedSeries.from_json(data["image_of_x"])
    except (KeyError, TypeError, ValueError) as exc:
        raise PowerOperationError(f"malformed candidate: {exc}") from None
    action = data.get("coefficient_action", "identity")
    if action != "identity":
        raise PowerOperationError(f"only the identity coefficient action can be read from JSON, got {action!r}")
    image = TruncatedSeries(image.vars, image.order, G.ring, image.terms)
    return make_power_operation(p, G, image, action, precision, label=data.get("label", "custom"))


# -- the product and the operation --------------------------------------

def lubin_product(G: FormalGroupLaw, p: int, precision=None) -> TruncatedSeries:
    """``prod_{i=0}^{p-1} (x +_G [i]_G(z))`` in ``(z, x)``, not reduced."""
    N, _ = _sizes(G, precision)
    G = G.truncate(N)
    x = TruncatedSeries.var("x", ZX, N, G.ring)
    out = x
    for i in range(1, p):
        s = n_series(G, i).series.rename({"x": "z"}).extend(ZX)
        out = out * G(x, s)
    return out


def apply_power_operation(psi: TotalPowerOperation, f: TruncatedSeries) -> TruncatedSeries:
    """``Psi(f)`` reduced in the transfer quotient; ``f`` is a series in ``x``."""
    if f.vars != ("x",):
        raise PowerOperationError(f"power operations act on series in x, got {f.vars}")
    T = psi.transfer
    sigma = psi.sigma
    f = f.map_coefficients(sigma) if sigma is not _identity else f
    N = min(f.order, psi.order)
    f = T.coerce(f.rename({"x": "z"})).rename({"z": "x"}).truncate(N).extend(ZX)
    image = T.coerce(psi.image_of_x).truncate(N)
    return T.reduce(compose(f, {"x": image}))


# -- verdicts -------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    monomial: tuple
    lhs: int
    rhs: int

    def label(self) -> str:
        parts = []
        for name, e in zip(ZX, self.monomial):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"

    def to_json(self):
        return {"monomial": self.label(), "exp": list(self.monomial),
                "lhs": str(self.lhs), "rhs": str(self.rhs)}


@dataclass(frozen=True)
class AndoVerdict:
    status: str
    order: int
    precision: int                       # guaranteed digits of the transfer quotient
    certified_degree: int                # x-degrees below this carry certified digits
    profile: Dict[int, int] = field(default_factory=dict)
    witness: Optional[Witness] = None
    unit_gap: Optional[TruncatedSeries] = None
    product: Optional[TruncatedSeries] = None
    image: Optional[TruncatedSeries] = None
    p: int = 0
    label: str = ""

    def __post_init__(self):
        if self.status == VIOLATED and self.witness is None:
            raise PowerOperationError("a Violated verdict needs a witness")

    @property
    def exit_code(self) -> int:
        return {SATISFIED: 0, VIOLATED: 1, INCONCLUSIVE: 2}[self.status]

    def __str__(self):
        head = f"{self.status} (p={self.p}, {self.label}, order {self.order}, {self.precision} digits)"
        if self.witness is not None:
            w = self.witness
            mod = self.product.ring.modulus
            head += (f"; first mismatch at {w.label()}: product {_signed(w.lhs, mod)}"
                     f" vs candidate {_signed(w.rhs, mod)}")
        if self.unit_gap is not None:
            mod = self.unit_gap.ring.modulus
            g = self.unit_gap
            signed = TruncatedSeries(g.vars, g.order, ZZ, {e: _signed(c, mod) for e, c in g.terms.items()})
            gap = str(signed).rsplit(" + O(", 1)[0]
            head += f"; product = ({gap}) * candidate"
        return head

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "p": self.p,
            "candidate": self.label,
            "order": self.order,
            "precision": self.precision,
            "certified_x_degree": self.certified_degree,
            "precision_profile": {str(a): k for a, k in sorted(self.profile.items())},
            "witness": self.witness.to_json() if self.witness else None,
            "unit_gap": self.unit_gap.to_json() if self.unit_gap is not None else None,
        }
        if self.product is not None:
            out["reduced_product"] = self.product.to_json()
            out["reduced_candidate"] = self.image.to_json()
        return out


def _signed(c: int, mod: int) -> int:
    """Representative of ``c`` mod ``mod`` closest to zero, for display."""
    c %= mod
    return c - mod if 2 * c > mod else c


def _first_mismatch(a: TruncatedSeries, b: TruncatedSeries) -> Optional[Witness]:
    keys = sorted(set(a.terms) | set(b.terms), key=grlex_key)
    for e in keys:
        x, y = a.coefficient(e), b.coefficient(e)
        if x != y:
            return Witness(e, x, y)
    return None


def _z_part(f: TruncatedSeries, a: int) -> TruncatedSeries:
    """Coefficient of ``x^a`` as a series in z (kept in ``(z, x)``)."""
    terms = {(e[0], 0): c for e, c in f.terms.items() if e[1] == a}
    return TruncatedSeries(f.vars, f.order, f.ring, terms)


def quotient_inverse(T: PreparedQuotientRing, r: TruncatedSeries) -> Optional[TruncatedSeries]:
    """Inverse in the quotient, or ``None`` when ``r`` is not a unit."""
    r = T.reduce(r)
    c0 = r.coefficient((0,) * r.nvars)
    if not T.coeff_ring.is_unit(c0):
        return None
    u = TruncatedSeries.const(T.coeff_ring.inverse(c0), r.vars, r.order, T.coeff_ring)
    for _ in range(4 * (T.precision + (T.degree or 1)) + 8):
        nxt = T.reduce(u * (2 - r * u))
        if nxt == u:
            return u
        u = nxt
    raise SeriesError("unit inversion in the quotient did not stabilize")


def unit_gap(T: PreparedQuotientRing, product: TruncatedSeries, image: TruncatedSeries):
    """A unit ``u`` in the quotient with ``product = u * image``, if one exists."""
    for a in range(image.order):
        c = _z_part(image, a)
        if c.is_zero():
            continue
        inv = quotient_inverse(T, c)
        if inv is None:
            continue
        u = T.reduce(_z_part(product, a) * inv)
        if quotient_inverse(T, u) is None:
            return None
        if T.reduce(u * image) == product:
            return u.drop_vars(("x",))
        return None
    return None


def ando_check(G: FormalGroupLaw, p: int, psi: TotalPowerOperation, precision=None) -> AndoVerdict:
    """Compare the reduced product with ``Psi(x)`` in the transfer quotient.

    ``Violated`` carries the first graded-lex monomial in ``(z, x)`` where
    the normal forms differ. ``Inconclusive`` means the certified range of
    x-degrees stops at or below ``p``.
    """
    if psi.p != p:
        raise PowerOperationError(f"candidate is for p = {psi.p}, not {p}")
    N, M = _sizes(G, precision)
    N = min(N, psi.order)
    T = build_transfer_quotient(G, p, Precision(N, M))
    if psi.transfer is None or psi.transfer != T:
        psi = TotalPowerOperation(psi.p, psi.G, psi.image_of_x.truncate(N),
                                  psi.coefficient_action, psi.label, T)
    lhs = T.reduce(lubin_product(G, p, Precision(N, M)))
    x = TruncatedSeries.var("x", ("x",), N, G.ring)
    rhs = apply_power_operation(psi, x)
    profile = {a: T.digits(N - a) for a in range(N)}
    certified = next((a for a in range(N) if profile[a] == 0), N)
    common = dict(order=N, precision=T.precision, certified_degree=certified, profile=profile,
                  product=lhs, image=rhs, p=p, label=psi.label)
    w = _first_mismatch(lhs, rhs)
    if w is not None:
        return AndoVerdict(VIOLATED, witness=w, unit_gap=unit_gap(T, lhs, rhs), **common)
    if certified <= p:
        return AndoVerdict(INCONCLUSIVE, **common)
    return AndoVerdict(SATISFIED, **common)


# -- consistency checks --------------------------------------------------

@dataclass
class CheckReport:
    name: str
    results: List[tuple] = field(default_factory=list)   # (identity, passed, detail)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.results)

    def add(self, identity, ok, detail=""):
        self.results.append((identity, bool(ok), detail))

    def to_json(self):
        return {"name": self.name, "passed": self.passed,
                "results": [{"identity": i, "passed": ok, "detail": d} for i, ok, d in self.results]}


def _random_x_series(rng, N, ring):
    coeffs = [rng.randint(-5, 5) for _ in range(rng.randint(1, N))]
    return TruncatedSeries.from_coeffs(coeffs, "x", N, ring)


def check_multiplicativity_mod_transfer(psi: TotalPowerOperation, samples: int = 100,
                                        seed: int = 0, order: Optional[int] = None) -> CheckReport:
    """Sampled ring-map identities for ``Psi`` in the transfer quotient."""
    N = order or psi.order
    ring = psi.G.ring
    T = psi.transfer
    rng = random.Random(seed)
    report = CheckReport("multiplicativity")
    x = TruncatedSeries.var("x", ("x",), N, ring)
    px = psi(x)
    acc = TruncatedSeries.one(ZX, N, T.coeff_ring)
    for n in range(1, 5):
        acc = T.mul(acc, px)
        report.add(f"Psi(x^{n}) = Psi(x)^{n}", psi(x ** n) == acc)
    for k in range(samples):
        f = _random_x_series(rng, N, ring)
        g = _random_x_series(rng, N, ring)
        pf, pg = psi(f), psi(g)
        report.add(f"sample {k}: Psi(fg) = Psi(f)Psi(g)", psi(f * g) == T.mul(pf, pg))
        report.add(f"sample {k}: Psi(f+g) = Psi(f)+Psi(g)", psi(f + g) == T.add(pf, pg))
        c = rng.randint(-9, 9)
        sc = T.coerce(TruncatedSeries.const(psi.sigma(ring.normalize(c)), ZX, N, ring))
        report.add(f"sample {k}: Psi(cf) = sigma(c)Psi(f)", psi(f.scale(c)) == T.mul(sc, pf))
    return report


def fpx_invariance_check(G: FormalGroupLaw, p: int, precision=None) -> CheckReport:
    """``z -> [j]_G(z)`` fixes the product modulo ``[p]_G(z)`` for every unit ``j`` mod ``p``.

    Laws of infinite height (the additive law) are checked in the transfer
    quotient instead, where the same substitution applies.
    """
    N, M = _sizes(G, precision)
    report = CheckReport("fpx-invariance")
    if p == 2:
        report.add("F_2^x is trivial", True, "vacuous")
        return report
    try:
        R = build_bcp_ring(G, p, Precision(N, M))
    except UnsupportedHeightError:
        R = build_transfer_quotient(G, p, Precision(N, M))
    L = R.coerce(lubin_product(G, p, Precision(N, M)))
    base = R.reduce(L)
    for j in range(2, p):
        s = R.coerce(n_series(G.truncate(N), j).series.rename({"x": "z"}).extend(ZX))
        moved = R.reduce(compose(L, {"z": s}))
        w = _first_mismatch(moved, base)
        detail = f"{R.precision} digits, relation {R.kind}"
        if w is not None:
            detail += f"; mismatch at {w.label()}"
        report.add(f"j = {j}", w is None, detail)
    return report
