"""Coefficient rings for truncated power series.

Four rings are supported:

* ``ZZ``            exact integers
* ``QQ``            exact rationals
* ``ZpLocal(p)``    rationals whose denominators are prime to ``p``
* ``Zmod(p, M)``    residues modulo ``p**M`` (truncated p-adic integers)

Values are plain Python ``int`` or ``fractions.Fraction`` objects; a
``Ring`` only knows how to put them in canonical form, decide units and
invert them. Canonical representatives: integral rationals are stored as
``int``, residues mod ``p**M`` live in ``[0, p**M)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

Number = Union[int, Fraction]

EXACT_INT = "ExactInt"
RATIONAL = "Rational"
PLOCAL = "PLocalRational"
PADIC = "PAdicTruncated"

_TAGS = (EXACT_INT, RATIONAL, PLOCAL, PADIC)


class RingError(ValueError):
    """Raised when a value does not belong to a ring, or rings disagree."""


class NotAUnitError(RingError):
    """Raised when inverting a non-unit."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def valuation(value: Number, p: int) -> Optional[int]:
    """p-adic valuation of a nonzero rational; ``None`` for zero."""
    if value == 0:
        return None
    value = Fraction(value)
    v = 0
    num, den = value.numerator, value.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class Ring:
    tag: str
    p: Optional[int] = None
    M: Optional[int] = None

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise RingError(f"unknown ring tag {self.tag!r}")
        if self.tag in (PLOCAL, PADIC):
            if self.p is None or not is_prime(self.p):
                raise RingError(f"{self.tag} needs a prime p, got {self.p!r}")
        if self.tag == PADIC:
            if self.M is None or self.M < 1:
                raise RingError(f"PAdicTruncated needs M >= 1, got {self.M!r}")

    # -- descriptions -------------------------------------------------

    @property
    def modulus(self) -> Optional[int]:
        return self.p ** self.M if self.tag == PADIC else None

    @property
    def is_exact(self) -> bool:
        return self.tag != PADIC

    @property
    def is_field(self) -> bool:
        return self.tag == RATIONAL

    def __str__(self):
        if self.tag == EXACT_INT:
            return "ZZ"
        if self.tag == RATIONAL:
            return "QQ"
        if self.tag == PLOCAL:
            return f"Z_({self.p})"
        return f"Z/{self.p}^{self.M}"

    def to_json(self) -> dict:
        out = {"tag": self.tag}
        if self.p is not None:
            out["p"] = self.p
        if self.M is not None:
            out["M"] = self.M
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Ring":
        try:
            return cls(data["tag"], data.get("p"), data.get("M"))
        except (KeyError, TypeError) as exc:
            raise RingError(f"malformed ring descriptor {data!r}") from exc

    # -- values -------------------------------------------------------

    def __call__(self, value) -> Number:
        return self.normalize(value)

    def normalize(self, value) -> Number:
        """Canonical form of ``value`` in this ring, or ``RingError``."""
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise RingError(f"cannot interpret {value!r} as a coefficient")
        tag = self.tag
        if tag == PADIC:
            return _to_residue(value, self.p, self.modulus)
        if isinstance(value, Fraction):
            if value.denominator == 1:
                return value.numerator
            if tag == EXACT_INT:
                raise RingError(f"{value} is not an integer")
            if tag == PLOCAL and value.denominator % self.p == 0:
                raise RingError(f"{value} is not {self.p}-integral")
        return value

    def contains(self, value) -> bool:
        try:
            self.normalize(value)
        except RingError:
            return False
        return True

    def is_zero(self, value: Number) -> bool:
        return value == 0

    def is_unit(self, value: Number) -> bool:
        tag = self.tag
        if tag == EXACT_INT:
            return value in (1, -1)
        if tag == RATIONAL:
            return value != 0
        if value == 0:
            return False
        return Fraction(value).numerator % self.p != 0

    def inverse(self, value: Number) -> Number:
        if not self.is_unit(value):
            raise NotAUnitError(f"{value} is not a unit in {self}")
        if self.tag == PADIC:
            return pow(value, -1, self.modulus)
        return self.normalize(1 / Fraction(value))

    def valuation(self, value: Number) -> Optional[int]:
        """p-adic valuation; for ``Zmod`` the valuation of 0 is ``M``."""
        if self.p is None:
            raise RingError(f"{self} has no distinguished prime")
        if self.tag == PADIC and value % self.modulus == 0:
            return self.M
        return valuation(value, self.p)

    def convert(self, value: Number, source: "Ring") -> Number:
        """Map a value of ``source`` into this ring along the natural map."""
        if self.tag == PADIC and source.tag == PADIC:
            if source.p != self.p or source.M < self.M:
                raise RingError(f"no natural map {source} -> {self}")
        elif source.tag == PADIC and self.tag != PADIC:
            raise RingError(f"no natural map {source} -> {self}")
        return self.normalize(value)

    def format(self, value: Number) -> str:
        value = Fraction(value)
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"

    def parse(self, text: str) -> Number:
        if not isinstance(text, str):
            raise RingError(f"coefficients are serialized as strings, got {text!r}")
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise RingError(f"malformed coefficient {text!r}") from exc
        return self.normalize(value)


def _to_residue(value: Number, p: int, modulus: int) -> int:
    if isinstance(value, Fraction):
        if value.denominator % p == 0:
            raise RingError(f"{value} is not {p}-integral")
        return value.numerator * pow(value.denominator, -1, modulus) % modulus
    return value % modulus


ZZ = Ring(EXACT_INT)
QQ = Ring(RATIONAL)


def ZpLocal(p: int) -> Ring:
    return Ring(PLOCAL, p)


def Zmod(p: int, M: int) -> Ring:
    return Ring(PADIC, p, M)


def common_ring(a: Ring, b: Ring) -> Ring:
    if a != b:
        raise RingError(f"ring mismatch: {a} vs {b}")
    return a
