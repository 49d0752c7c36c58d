"""Command-line front end: ``fgl-lab <command> [flags]``.

Every command prints a report ``{"body": ..., "metadata": ...}``. The body
is deterministic (sorted keys, no timestamps) and embeds the inputs, so
``rerun(report)`` reproduces it. Exit codes:

    0   success / Satisfied / Equivalence
    1   Violated (witness in the report), or failed axioms
    2   Inconclusive
    10  usage error or unknown flag
    11  malformed series JSON
    12  composite p
    13  missing file
    14  order, precision or stage bound out of range
    15  unsupported height
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, fields
from typing import Optional

from . import __version__
from .fgl import (FGLError, FormalGroupLaw, builtin, check_axioms, divided_p_series,
                  fgl_from_log, p_series, weierstrass_height)
from .power import PowerOperationError, ando_check, candidate, candidate_from_json, BUILTIN_CANDIDATES
from .quotient import (InsufficientPrecisionError, UnsupportedHeightError, build_bcp_ring,
                       build_transfer_quotient, fpx_invariants)
from .rings import QQ, RingError, ZZ, ZpLocal, is_prime
from .series import Precision, SeriesError, TruncatedSeries
from .tower import LocalizationError, parse_localization, tower_report
from .weierstrass import WeierstrassError

COMMANDS = ("fgl-info", "pseries", "quotient", "invariants", "ando-check", "tower")
DEFAULT_ORDER = 16
DEFAULT_PADIC = 8
MAX_ORDER = 64
MAX_PADIC = 64
MAX_STAGE = 100000
ENV_PRECISION = "FGL_LAB_DEFAULT_PRECISION"

EXIT_OK, EXIT_VIOLATED, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_USAGE, EXIT_SERIES, EXIT_COMPOSITE, EXIT_MISSING, EXIT_BOUNDS, EXIT_HEIGHT = 10, 11, 12, 13, 14, 15


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


@dataclass
class RunConfig:
    command: str
    fgl: str = "multiplicative"
    p: Optional[int] = None
    order: int = DEFAULT_ORDER
    precision: int = DEFAULT_PADIC
    psi: Optional[str] = None
    format: str = "json"
    output: Optional[str] = None
    localization: Optional[str] = None
    max: int = 100
    fgl_data: Optional[dict] = None     # inline contents of an --fgl file
    psi_data: Optional[dict] = None     # inline contents of a --psi file

    def inputs(self) -> dict:
        """Everything that determines the report body."""
        out = asdict(self)
        if self.command == "tower":
            keep = ("command", "localization", "max")
        else:
            keep = ("command", "fgl", "fgl_data", "p", "order", "precision")
            if self.command == "ando-check":
                keep += ("psi", "psi_data")
        return {k: out[k] for k in keep if out[k] is not None}


# -- parsing -------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fgl-lab", description="Formal group laws, p-series and the Ando criterion.")
    parser.add_argument("--version", action="version", version=f"fgl-lab {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="JSON file with default values for these flags")
        cmd.add_argument("--format", choices=("json", "text"))
        cmd.add_argument("--output", help="write the report here instead of stdout")
        if name == "tower":
            cmd.add_argument("--localization", help="Q, (p), K(n)@p or E(n)@p")
            cmd.add_argument("--max", type=int, help="last stage to report")
            continue
        cmd.add_argument("--fgl", help="additive, multiplicative, honda:h, or a JSON file")
        cmd.add_argument("--p", type=int)
        cmd.add_argument("--order", type=int, help=f"truncation order N (default {DEFAULT_ORDER})")
        cmd.add_argument("--precision", type=int, help=f"p-adic precision M (default {DEFAULT_PADIC})")
        if name == "ando-check":
            cmd.add_argument("--psi", help=f"{', '.join(BUILTIN_CANDIDATES)}, or a JSON file")
    return parser


def _read_json(path: str, what: str):
    if not os.path.exists(path):
        raise CliError(EXIT_MISSING, f"{what} file not found: {path}")
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_SERIES, f"{what} file {path} is not valid JSON: {exc}") from None


def _looks_like_file(spec: str) -> bool:
    return spec.endswith(".json") or os.sep in spec or os.path.exists(spec)


def parse_config(argv=None, environ=None) -> RunConfig:
    """Flags override the config file, which overrides the environment and defaults."""
    environ = os.environ if environ is None else environ
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise CliError(EXIT_USAGE, f"a command is required: {', '.join(COMMANDS)}")
    values = {}
    env_m = environ.get(ENV_PRECISION)
    if env_m:
        try:
            values["precision"] = int(env_m)
        except ValueError:
            raise CliError(EXIT_USAGE, f"{ENV_PRECISION} must be an integer, got {env_m!r}") from None
    if args.config:
        data = _read_json(args.config, "config")
        if not isinstance(data, dict):
            raise CliError(EXIT_USAGE, "config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)} - {"command"}
        unknown = set(data) - known
        if unknown:
            raise CliError(EXIT_USAGE, f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(data)
    for key, value in vars(args).items():
        if key not in ("command", "config") and value is not None:
            values[key] = value
    try:
        cfg = RunConfig(args.command, **values)
    except TypeError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    return validate(cfg)


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.command not in COMMANDS:
        raise CliError(EXIT_USAGE, f"unknown command {cfg.command!r}")
    for key in ("order", "precision", "max"):
        if not isinstance(getattr(cfg, key), int):
            raise CliError(EXIT_USAGE, f"{key} must be an integer")
    if not 1 <= cfg.order <= MAX_ORDER:
        raise CliError(EXIT_BOUNDS, f"order must be in 1..{MAX_ORDER}, got {cfg.order}")
    if not 1 <= cfg.precision <= MAX_PADIC:
        raise CliError(EXIT_BOUNDS, f"precision must be in 1..{MAX_PADIC}, got {cfg.precision}")
    if not 1 <= cfg.max <= MAX_STAGE:
        raise CliError(EXIT_BOUNDS, f"max must be in 1..{MAX_STAGE}, got {cfg.max}")
    if cfg.p is not None and not is_prime(cfg.p):
        raise CliError(EXIT_COMPOSITE, f"p must be prime, got {cfg.p}")
    if cfg.format not in ("json", "text"):
        raise CliError(EXIT_USAGE, f"unknown format {cfg.format!r}")
    if cfg.command == "tower":
        if cfg.localization is None:
            raise CliError(EXIT_USAGE, "tower needs --localization")
        try:
            spec = parse_localization(cfg.localization)
        except LocalizationError as exc:
            code = EXIT_COMPOSITE if "prime" in str(exc) else EXIT_USAGE
            raise CliError(code, str(exc)) from None
        cfg.localization = str(spec)
        return cfg
    if cfg.command != "fgl-info" and cfg.p is None:
        raise CliError(EXIT_USAGE, f"{cfg.command} needs --p")
    if cfg.fgl_data is None and _looks_like_file(cfg.fgl):
        cfg.fgl_data = _read_json(cfg.fgl, "formal group law")
    if cfg.command == "ando-check":
        if cfg.psi is None:
            raise CliError(EXIT_USAGE, "ando-check needs --psi")
        if cfg.psi_data is None and cfg.psi not in BUILTIN_CANDIDATES:
            if not _looks_like_file(cfg.psi):
                raise CliError(EXIT_USAGE, f"unknown candidate {cfg.psi!r}")
            cfg.psi_data = _read_json(cfg.psi, "candidate")
    return cfg


# -- running -------------------------------------------------------------

def load_law(cfg: RunConfig) -> FormalGroupLaw:
    prec = Precision(cfg.order, cfg.precision)
    ring = ZpLocal(cfg.p) if cfg.p is not None else ZZ
    if cfg.fgl_data is not None:
        data = cfg.fgl_data
        try:
            series = TruncatedSeries.from_json(data)
        except (SeriesError, RingError, KeyError, TypeError, ValueError) as exc:
            raise CliError(EXIT_SERIES, f"malformed series JSON: {exc}") from None
        if len(series.vars) == 1:
            log = TruncatedSeries(("x",), min(series.order, cfg.order), QQ, series.terms)
            return fgl_from_log(log, prec, ring if cfg.p is not None else None)
        try:
            return FormalGroupLaw.from_json(data).truncate(min(series.order, cfg.order))
        except (FGLError, SeriesError) as exc:
            raise CliError(EXIT_SERIES, f"malformed law: {exc}") from None
    name = cfg.fgl
    if "@" in name:
        name, _, p = name.partition("@")
        if cfg.p is not None and int(p) != cfg.p:
            raise CliError(EXIT_USAGE, f"--fgl names p = {p} but --p is {cfg.p}")
    try:
        return builtin(name, cfg.p, prec, ring if not name.startswith("honda") else None)
    except FGLError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None


def _precision(cfg):
    return Precision(cfg.order, cfg.precision)


def _fgl_info(cfg):
    G = load_law(cfg)
    report = check_axioms(G)
    body = {"law": G.to_json(), "axioms": report.to_json()}
    if cfg.p is not None:
        try:
            d, h = weierstrass_height(G, cfg.p)
            body["height"] = {"weierstrass_degree": d, "height": h}
        except WeierstrassError:
            body["height"] = {"weierstrass_degree": None, "height": None}
    text = f"{G}\n{report}"
    if "height" in body:
        text += f"\nWeierstrass degree of [{cfg.p}] mod {cfg.p}: {body['height']['weierstrass_degree']}" \
                f" (height {body['height']['height']})"
    return body, text, EXIT_OK if report.passed else EXIT_VIOLATED


def _pseries(cfg):
    G = load_law(cfg)
    p = cfg.p
    ps = p_series(G, p)
    dp = divided_p_series(G, p)
    body = {"p_series": ps.to_json(), "divided_p_series": dp.to_json()}
    text = f"[{p}](x) = {ps}\n<{p}>(x) = {dp}"
    try:
        d, h = weierstrass_height(G, p)
        body["height"] = {"weierstrass_degree": d, "height": h}
        text += f"\nWeierstrass degree mod {p}: {d} (height {h})"
    except WeierstrassError:
        body["height"] = {"weierstrass_degree": None, "height": None}
        text += f"\n[{p}](x) vanishes mod {p} to order {ps.order}"
    return body, text, EXIT_OK


def _quotient(cfg):
    G = load_law(cfg)
    body, lines = {}, []
    for key, build in (("bcp", build_bcp_ring), ("transfer", build_transfer_quotient)):
        try:
            R = build(G, cfg.p, _precision(cfg))
            body[key] = R.to_json()
            lines.append(f"{key}: {R}")
        except UnsupportedHeightError as exc:
            body[key] = {"error": "unsupported-height", "detail": str(exc)}
            lines.append(f"{key}: unsupported ({exc})")
    code = EXIT_OK if any("error" not in v for v in body.values()) else EXIT_HEIGHT
    return body, "\n".join(lines), code


def _invariants(cfg):
    G = load_law(cfg)
    R = build_bcp_ring(G, cfg.p, _precision(cfg))
    inv = fpx_invariants(R, G, cfg.p)
    body = {"ring": R.to_json(), "rank": inv.rank, "precision": inv.precision,
            "basis": [b.to_json() for b in inv.basis],
            "torsion": [{"valuation": e, "element": t.to_json()} for e, t in inv.torsion]}
    lines = [f"invariants of {R} under F_{cfg.p}^x: rank {inv.rank}"]
    lines += [f"  {b}" for b in inv.basis]
    lines += [f"  torsion (p^{e}): {t}" for e, t in inv.torsion]
    return body, "\n".join(lines), EXIT_OK


def _ando(cfg):
    G = load_law(cfg)
    prec = _precision(cfg)
    try:
        if cfg.psi_data is not None:
            psi = candidate_from_json(cfg.psi_data, G, prec)
        else:
            psi = candidate(cfg.psi, G, cfg.p, prec)
    except (SeriesError, RingError) as exc:
        raise CliError(EXIT_SERIES, f"malformed candidate: {exc}") from None
    except PowerOperationError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    v = ando_check(G, cfg.p, psi, prec)
    return {"verdict": v.to_json()}, str(v), v.exit_code


def _tower(cfg):
    spec = parse_localization(cfg.localization)
    stages = tower_report(spec, cfg.max, "json")
    body = {"localization": spec.to_json(), "stages": stages,
            "obstruction_stages": [s["m"] for s in stages if s["status"] == "PotentialObstruction"]}
    return body, tower_report(spec, cfg.max, "text"), EXIT_OK


_HANDLERS = {"fgl-info": _fgl_info, "pseries": _pseries, "quotient": _quotient,
             "invariants": _invariants, "ando-check": _ando, "tower": _tower}


def run(cfg: RunConfig):
    """``(exit_code, report, text)`` for a validated config."""
    try:
        body, text, code = _HANDLERS[cfg.command](cfg)
    except UnsupportedHeightError as exc:
        body, text, code = {"error": "unsupported-height", "detail": str(exc)}, str(exc), EXIT_HEIGHT
    except InsufficientPrecisionError as exc:
        body = {"error": "insufficient-precision", "detail": str(exc),
                "required_order": exc.required_order}
        text, code = str(exc), EXIT_INCONCLUSIVE
    body = {"command": cfg.command, "inputs": cfg.inputs(), "result": body}
    report = {"body": body, "metadata": {
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "version": __version__, "exit_code": code}}
    return code, report, text


def dumps_body(report) -> str:
    return json.dumps(report["body"], sort_keys=True, indent=2)


def rerun(report) -> dict:
    """Re-run the inputs embedded in a report; returns the new report."""
    inputs = dict(report["body"]["inputs"])
    cfg = validate(RunConfig(**inputs))
    return run(cfg)[1]


def write_atomic(path: str, text: str):
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".fgl-lab-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        code, report, text = run(cfg)
    except CliError as exc:
        print(f"fgl-lab: {exc}", file=sys.stderr)
        return exc.code
    except (SeriesError, RingError, FGLError) as exc:
        print(f"fgl-lab: {exc}", file=sys.stderr)
        return EXIT_SERIES
    if cfg.format == "json":
        out = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        out = text + "\n"
    if cfg.output:
        write_atomic(cfg.output, out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
