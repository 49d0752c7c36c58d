"""Stage bookkeeping for the tower ``MX_1 -> MX_2 -> ... -> MU``.

For a localization of the target theory, each map ``MX_{m-1} -> MX_m``
is either an equivalence after localizing (nothing to extend) or a stage
where an obstruction to extending an orientation can live. The rules:

* rationally, every stage ``m > 1`` is an equivalence;
* p-locally, stage ``m`` is an equivalence unless ``m`` is a power of p;
* K(n)- and E(n)-locally, additionally every stage ``m > p**n`` is one.

Stage 1 (the complex orientation itself) is never an equivalence.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import List, Optional

from .rings import is_prime

RATIONAL = "Rational"
PLOCAL = "PLocal"
KN_LOCAL = "KnLocal"
EN_LOCAL = "EnLocal"

EQUIVALENCE = "Equivalence"
POTENTIAL_OBSTRUCTION = "PotentialObstruction"


class LocalizationError(ValueError):
    pass


@dataclass(frozen=True)
class LocalizationSpec:
    kind: str
    p: Optional[int] = None
    n: Optional[int] = None

    def __post_init__(self):
        if self.kind == RATIONAL:
            if self.p is not None or self.n is not None:
                raise LocalizationError("rational localization takes no prime or height")
            return
        if self.kind not in (PLOCAL, KN_LOCAL, EN_LOCAL):
            raise LocalizationError(f"unknown localization kind {self.kind!r}")
        if self.p is None or not is_prime(self.p):
            raise LocalizationError(f"{self.kind} needs a prime p, got {self.p!r}")
        if self.kind == PLOCAL:
            if self.n is not None:
                raise LocalizationError("p-local localization takes no height")
        elif self.n is None or self.n < 0:
            raise LocalizationError(f"{self.kind} needs a height n >= 0, got {self.n!r}")

    def __str__(self):
        if self.kind == RATIONAL:
            return "Q"
        if self.kind == PLOCAL:
            return f"({self.p})"
        letter = "K" if self.kind == KN_LOCAL else "E"
        return f"{letter}({self.n})@{self.p}"

    def to_json(self):
        out = {"kind": self.kind}
        if self.p is not None:
            out["p"] = self.p
        if self.n is not None:
            out["n"] = self.n
        return out


def Rational() -> LocalizationSpec:
    return LocalizationSpec(RATIONAL)


def PLocal(p: int) -> LocalizationSpec:
    return LocalizationSpec(PLOCAL, p)


def KnLocal(p: int, n: int) -> LocalizationSpec:
    return LocalizationSpec(KN_LOCAL, p, n)


def EnLocal(p: int, n: int) -> LocalizationSpec:
    return LocalizationSpec(EN_LOCAL, p, n)


_CHROMATIC = re.compile(r"^([KE])\((\d+)\)@(\d+)$")
_LOCAL = re.compile(r"^\((\d+)\)$")


def parse_localization(text: str) -> LocalizationSpec:
    """``Q``, ``(p)``, ``K(n)@p`` or ``E(n)@p``."""
    s = text.strip().replace(" ", "")
    if s in ("Q", "rational", "Rational"):
        return Rational()
    m = _LOCAL.match(s)
    if m:
        return PLocal(int(m.group(1)))
    m = _CHROMATIC.match(s)
    if m:
        letter, n, p = m.group(1), int(m.group(2)), int(m.group(3))
        return (KnLocal if letter == "K" else EnLocal)(p, n)
    raise LocalizationError(f"cannot parse localization {text!r}; expected Q, (p), K(n)@p or E(n)@p")


def is_power_of(m: int, p: int) -> bool:
    while m % p == 0:
        m //= p
    return m == 1


@dataclass(frozen=True)
class StageReport:
    m: int
    status: str
    rule: str

    def to_json(self):
        return {"m": self.m, "status": self.status, "rule": self.rule}


def stage_status(m: int, spec: LocalizationSpec) -> StageReport:
    if not isinstance(m, int) or m < 1:
        raise LocalizationError(f"stages are indexed from 1, got {m!r}")
    if m == 1:
        return StageReport(1, POTENTIAL_OBSTRUCTION, "stage 1 carries the complex orientation")
    if spec.kind == RATIONAL:
        return StageReport(m, EQUIVALENCE, "m > 1: rational equivalence")
    p = spec.p
    if not is_power_of(m, p):
        return StageReport(m, EQUIVALENCE, f"m is not a power of {p}")
    if spec.kind in (KN_LOCAL, EN_LOCAL) and m > p ** spec.n:
        return StageReport(m, EQUIVALENCE, f"m > {p}^{spec.n}")
    if spec.kind == PLOCAL:
        return StageReport(m, POTENTIAL_OBSTRUCTION, f"m is a power of {p}")
    return StageReport(m, POTENTIAL_OBSTRUCTION, f"m is a power of {p} and m <= {p}^{spec.n}")


def obstruction_stages(spec: LocalizationSpec, max_m: int) -> List[int]:
    if max_m < 1:
        raise LocalizationError(f"max stage must be >= 1, got {max_m}")
    return [m for m in range(1, max_m + 1)
            if stage_status(m, spec).status == POTENTIAL_OBSTRUCTION]


def _stage_note(m: int, spec: LocalizationSpec) -> str:
    if m == 1:
        return "orientations of MX_1: complex orientations of the target"
    return (f"extending across MX_{m - 1} -> MX_{m} is a lifting problem through a pullback "
            f"square of orientation spaces; the fiber is controlled by the space F_{m}")


def tower_report(spec: LocalizationSpec, max_m: int, format: str = "json"):
    """Stage table for ``1 <= m <= max_m``; ``format`` is ``json`` (a list) or ``text``."""
    stages = [stage_status(m, spec) for m in range(1, max_m + 1)]
    if format == "json":
        return [s.to_json() for s in stages]
    if format != "text":
        raise LocalizationError(f"unknown format {format!r}")
    obstructions = [s.m for s in stages if s.status == POTENTIAL_OBSTRUCTION]
    lines = [f"tower for {spec}, stages 1..{max_m}",
             f"potential obstructions at: {', '.join(map(str, obstructions))}", ""]
    width = len(str(max_m))
    for s in stages:
        lines.append(f"  m={s.m:<{width}}  {s.status:<21}  {s.rule}")
        if s.status == POTENTIAL_OBSTRUCTION:
            lines.append(f"  {'':<{width + 2}}  {'':<21}  {_stage_note(s.m, spec)}")
    bound = 1 if spec.kind == RATIONAL else spec.p ** spec.n if spec.kind != PLOCAL else None
    if bound is not None and bound <= max_m:
        top = obstructions[-1]
        lines.append("")
        lines.append(f"after localizing, MX_{top} -> MU is an equivalence")
    return "\n".join(lines)


def dumps(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2)
