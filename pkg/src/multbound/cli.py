"""Command-line front end.

Every command prints one JSON report on stdout; diagnostics go to stderr.
Numbers are exact rationals rendered as ``"p/q"`` strings.  Settings are
resolved as flag, then ``MULTBOUND_*`` environment variable, then default.

Exit codes: 0 ok, 2 bad input, 3 bound exceeded oracle length, 4 local
length did not stabilize, 5 region not lower saturated, 6 tolerance needs
``m > m_max``, 7 Gröbner limits exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import platform
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .derbound import (
    DEFAULT_CAP,
    check_hypothesis_mod_prime,
    group_profile,
    grouped_simplex_bound,
    lemma_chain_witness,
    simplex_bound,
    upsilon_set,
    vanishing_staircase,
    verify_bound_at_point,
)
from .groebner import (
    DEFAULT_CONFIRM,
    DEFAULT_MAX_ORDER,
    INFINITE,
    GroebnerLimitError,
    IdealPresentation,
    NonStabilizationError,
    buchberger,
    local_length_at_point,
)
from .polynomial import ParseError
from .staircase import restrict, simplex_staircase, staircase_from_json, volume_delta
from .volgrid import (
    GridSpec,
    SaturationError,
    ToleranceError,
    decimal_string,
    estimate_volume,
    halfspace_region,
    refine_to_tolerance,
    simplex_region,
    staircase_region,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VIOLATION = 3
EXIT_NO_STABILIZATION = 4
EXIT_SATURATION = 5
EXIT_TOLERANCE = 6
EXIT_GROEBNER = 7

ENV_PREFIX = "MULTBOUND_"
DEFAULT_M_MAX = 1 << 12


class InputError(ValueError):
    pass


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _setting(args: argparse.Namespace, name: str, default, cast=int):
    value = getattr(args, name, None)
    if value is not None:
        return value
    env = os.environ.get(ENV_PREFIX + name.upper())
    if env is not None:
        try:
            return cast(env)
        except ValueError as exc:
            raise InputError(f"bad value for {ENV_PREFIX}{name.upper()}: {env!r}") from exc
    return default


def _parse_rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(part.strip()) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse rational list {text!r}") from exc


def _parse_render(text: str | None) -> int | None:
    if text is None:
        return None
    kind, _, digits = text.partition(":")
    if kind != "decimal" or not digits.isdigit():
        raise InputError(f"--render expects decimal:k, got {text!r}")
    return int(digits)


def _load_json(source: str) -> tuple[Any, dict]:
    """Load JSON from a file path or an inline ``{...}`` string."""
    if source.lstrip().startswith(("{", "[")):
        raw = source.encode()
        origin = {"inline": True}
    else:
        try:
            raw = Path(source).read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {source}: {exc}") from exc
        origin = {"path": source}
    origin["sha256"] = hashlib.sha256(raw).hexdigest()
    try:
        return json.loads(raw), origin
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {source}: {exc}") from exc


def _load_ideal(source: str) -> tuple[IdealPresentation, dict]:
    payload, origin = _load_json(source)
    try:
        return IdealPresentation.from_json(payload), origin
    except (KeyError, TypeError) as exc:
        raise InputError(f"ideal JSON needs 'n' and 'generators': {exc}") from exc


def _point(text: str, n: int) -> list[Fraction]:
    point = _parse_rationals(text)
    if len(point) != n:
        raise InputError(f"point {text!r} has {len(point)} coordinates, ideal has n={n}")
    return point


def _render_value(value, digits: int | None):
    if value == INFINITE:
        return "infinite"
    if isinstance(value, Fraction):
        if digits is None:
            return _frac_str(value)
        return {"exact": _frac_str(value), "decimal": decimal_string(value, digits)}
    return value


# commands


def cmd_bound(args, ctx) -> tuple[dict, int]:
    ideal, origin = _load_ideal(args.ideal)
    ctx["inputs"]["ideal"] = origin
    point = _point(args.point, ideal.n)
    cap = _setting(args, "cap", DEFAULT_CAP)
    threads = ctx["threads"]
    if not args.verify:
        cert = vanishing_staircase(ideal, point, cap, threads=threads)
        return {"certificate": cert.to_json()}, EXIT_OK
    confirm = _setting(args, "confirm", DEFAULT_CONFIRM)
    max_order = _setting(args, "max_order", DEFAULT_MAX_ORDER)
    result = verify_bound_at_point(ideal, point, cap, confirm, max_order, threads=threads)
    return result.to_json(), EXIT_OK if result.holds else EXIT_VIOLATION


def cmd_length(args, ctx) -> tuple[dict, int]:
    ideal, origin = _load_ideal(args.ideal)
    ctx["inputs"]["ideal"] = origin
    point = _point(args.point, ideal.n)
    report = local_length_at_point(
        ideal,
        point,
        confirm=_setting(args, "confirm", DEFAULT_CONFIRM),
        max_order=_setting(args, "max_order", DEFAULT_MAX_ORDER),
    )
    return {"length": report.to_json()}, EXIT_OK


def cmd_chain(args, ctx) -> tuple[dict, int]:
    ideal, origin = _load_ideal(args.ideal)
    ctx["inputs"]["ideal"] = origin
    if args.staircase is not None:
        payload, sorigin = _load_json(args.staircase)
        ctx["inputs"]["staircase"] = sorigin
        sigma = staircase_from_json(payload)
        target = ideal
        source = "file"
    else:
        point = _point(args.point, ideal.n)
        cert = vanishing_staircase(ideal, point, _setting(args, "cap", DEFAULT_CAP))
        if cert.staircase is None:
            return {"note": cert.note, "chain": None}, EXIT_OK
        sigma = cert.staircase
        target = ideal.translate(point)
        source = "vanishing staircase at point, ideal translated to the origin"
    report = lemma_chain_witness(sigma, target)
    return {
        "staircase": sigma.to_json(),
        "staircase_source": source,
        "chain": report.to_json(),
        "certifies": f"dim_Q(A/I) >= {len(sigma)}" if report.success else None,
    }, EXIT_OK


def cmd_profile(args, ctx) -> tuple[dict, int]:
    prime, origin = _load_ideal(args.prime)
    ctx["inputs"]["prime"] = origin
    profile = upsilon_set(prime)
    out: dict = {"profile": profile.to_json()}
    if args.d is not None:
        d = _parse_rationals(args.d)
        if len(d) != prime.n:
            raise InputError(f"--d has {len(d)} weights, prime has n={prime.n}")
        eps = Fraction(args.eps)
        value = simplex_bound(d, eps, profile.sigma)
        groups = group_profile(d, profile.sigma)
        grouped = grouped_simplex_bound(groups, eps, profile.s)
        out["simplex_bound"] = _render_value(value, ctx["digits"])
        out["grouped"] = {
            "groups": [[_frac_str(w), k, delta] for w, k, delta in groups],
            "bound": _render_value(grouped, ctx["digits"]),
        }
        if args.ideal is not None:
            ideal, iorigin = _load_ideal(args.ideal)
            ctx["inputs"]["ideal"] = iorigin
            sigma = simplex_staircase(d, eps)
            check = check_hypothesis_mod_prime(ideal, buchberger(prime), sigma)
            out["hypothesis"] = {
                "staircase_cardinality": len(sigma),
                "restricted_cardinality": len(restrict(sigma, profile.upsilon)),
                **check.to_json(),
            }
    return out, EXIT_OK


def cmd_simplex(args, ctx) -> tuple[dict, int]:
    d = _parse_rationals(args.d)
    eps = Fraction(args.eps)
    sigma = simplex_staircase(d, eps)
    n = len(d)
    volume = eps**n / math.factorial(n) * math.prod(d)
    out = {
        "staircase": sigma.to_json(),
        "cardinality": len(sigma),
        "volume_delta_of_staircase": volume_delta(sigma),
        "simplex_volume": _render_value(volume, ctx["digits"]),
    }
    if args.sigma is not None:
        profile_sigma = [int(x) for x in args.sigma.split(",")]
        bound = simplex_bound(d, eps, profile_sigma)
        out["profile_sigma"] = profile_sigma
        out["bound"] = _render_value(bound, ctx["digits"])
    return out, EXIT_OK


def _region(payload: dict):
    kind = payload.get("kind")
    if kind == "simplex":
        return simplex_region(payload["d"], payload["eps"])
    if kind == "staircase":
        pts = payload.get("points", [])
        n = payload.get("n", len(pts[0]) if pts else None)
        if n is None:
            raise InputError("staircase region needs 'n' or at least one point")
        sigma = staircase_from_json({"n": n, "points": pts, **(
            {"expect_cardinality": payload["expect_cardinality"]} if "expect_cardinality" in payload else {}
        )})
        return staircase_region(sigma, payload.get("which", "delta"))
    if kind == "halfspaces":
        return halfspace_region(payload["rows"])
    raise InputError(f"unknown region kind {kind!r}")


def cmd_volume(args, ctx) -> tuple[dict, int]:
    payload, origin = _load_json(args.region)
    ctx["inputs"]["region"] = origin
    try:
        pred = _region(payload)
    except (KeyError, TypeError) as exc:
        raise InputError(f"incomplete region spec: {exc}") from exc
    if args.tol is not None:
        m_max = _setting(args, "m_max", DEFAULT_M_MAX)
        estimate = refine_to_tolerance(pred, args.N, Fraction(args.tol), m_max)
    else:
        if args.m is None:
            raise InputError("volume needs --m or --tol")
        estimate = estimate_volume(pred, GridSpec(args.N, args.m))
    return {"region": pred.description, "estimate": estimate.to_json(ctx["digits"])}, EXIT_OK


COMMANDS = {
    "bound": cmd_bound,
    "length": cmd_length,
    "chain": cmd_chain,
    "profile": cmd_profile,
    "simplex": cmd_simplex,
    "volume": cmd_volume,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multbound",
        description="Certified lower bounds for local multiplicities.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--render", help="add decimal renderings, e.g. decimal:6")
    common.add_argument("--threads", type=int, help="worker threads for frontier evaluation")
    common.add_argument("--no-timing", action="store_true", help="omit the timing block")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", parents=[common], help="vanishing-derivative bound at a point")
    p.add_argument("--ideal", required=True, help="ideal JSON file or inline JSON")
    p.add_argument("--point", required=True, help="comma-separated rationals")
    p.add_argument("--cap", type=int)
    p.add_argument("--confirm", type=int)
    p.add_argument("--max-order", dest="max_order", type=int)
    p.add_argument("--verify", action="store_true", help="compare with the Gröbner length oracle")

    p = sub.add_parser("length", parents=[common], help="local length via Gröbner bases")
    p.add_argument("--ideal", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--confirm", type=int)
    p.add_argument("--max-order", dest="max_order", type=int)

    p = sub.add_parser("chain", parents=[common], help="monomial chain witness for a staircase")
    p.add_argument("--ideal", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--staircase", help="staircase JSON file or inline JSON")
    group.add_argument("--point", help="use the vanishing staircase at this point")
    p.add_argument("--cap", type=int)

    p = sub.add_parser("profile", parents=[common], help="transcendence profile of a prime ideal")
    p.add_argument("--prime", required=True)
    p.add_argument("--d", help="comma-separated positive weights")
    p.add_argument("--eps", default="1")
    p.add_argument("--ideal", help="check derivative hypothesis of this ideal on the simplex staircase")

    p = sub.add_parser("simplex", parents=[common], help="weighted simplex staircase and volume formulas")
    p.add_argument("--d", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--sigma", help="comma-separated 0/1 transcendence profile")

    p = sub.add_parser("volume", parents=[common], help="grid sandwich volume estimate")
    p.add_argument("--region", required=True, help="region JSON file or inline JSON")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--tol")
    p.add_argument("--m-max", dest="m_max", type=int)
    return parser


def _canonical_args(args: argparse.Namespace) -> dict:
    skip = {"no_timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def run(argv: Sequence[str] | None = None) -> tuple[dict | None, int]:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        ctx = {
            "inputs": {},
            "digits": _parse_render(_setting(args, "render", None, cast=str)),
            "threads": max(1, _setting(args, "threads", 1)),
        }
        result, code = COMMANDS[args.command](args, ctx)
    except (InputError, ParseError, ValueError, KeyError, ArithmeticError) as exc:
        if isinstance(exc, (SaturationError, ToleranceError)):
            return _failure(args, exc)
        print(f"error: {exc}", file=sys.stderr)
        return None, EXIT_INPUT
    except (NonStabilizationError, GroebnerLimitError) as exc:
        return _failure(args, exc)
    report = {
        "command": args.command,
        "arguments": _canonical_args(args),
        "inputs": ctx["inputs"],
        "result": result,
        "result_sha256": hashlib.sha256(
            json.dumps(result, sort_keys=True).encode()
        ).hexdigest(),
        "versions": {"multbound": __version__, "python": platform.python_version()},
    }
    if not args.no_timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    if code == EXIT_VIOLATION:
        print("error: bound exceeds oracle length (implementation bug)", file=sys.stderr)
    return report, code


def _failure(args, exc) -> tuple[dict, int]:
    codes = {
        NonStabilizationError: EXIT_NO_STABILIZATION,
        SaturationError: EXIT_SATURATION,
        ToleranceError: EXIT_TOLERANCE,
        GroebnerLimitError: EXIT_GROEBNER,
    }
    code = next(c for t, c in codes.items() if isinstance(exc, t))
    print(f"error: {exc}", file=sys.stderr)
    error: dict = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, NonStabilizationError):
        error["trace"] = [list(t) for t in exc.trace]
    if isinstance(exc, ToleranceError):
        error["required_m"] = exc.required_m
    return {"command": args.command, "arguments": _canonical_args(args), "error": error}, code


def main(argv: Sequence[str] | None = None) -> int:
    report, code = run(argv)
    if report is not None:
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
