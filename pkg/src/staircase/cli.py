"""Command-line entry point.

Exit codes: 0 success, 2 domain error (bad input, no class, malformed word),
3 positivity or verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .atf import ClosureViolationError, QuadInvariantError, RayMissesSideError, limit_run
from .classes import (
    NonPositiveDenominatorError,
    class_from_text,
    obstruction_mu,
    volume_at_acc,
    volume_squared,
)
from .export import atomic_write, dumps, format_float, quad_to_svg, trace_to_json
from .scalars import format_scalar, parse_scalar, sign, sqrt_to_float, to_float
from .triples import (
    blocked_interval,
    check_word,
    identity_suite,
    iter_classes,
    staircase_limits,
    tree_enumerate,
    triple_at,
    verify_triple,
)

EXIT_OK, EXIT_DOMAIN, EXIT_FAILED = 0, 2, 3
DEFAULT_MAX_DEPTH = 20


class DomainError(ValueError):
    pass


class VerificationFailure(RuntimeError):
    pass


def max_depth() -> int:
    raw = os.environ.get("STAIRCASE_MAX_DEPTH")
    if raw is None:
        return DEFAULT_MAX_DEPTH
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"STAIRCASE_MAX_DEPTH must be an integer, got {raw!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _exact_and_float(x) -> dict:
    return {"exact": format_scalar(x), "float": to_float(x)}


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"not a rational number: {text!r}") from None


def cmd_class(args) -> int:
    E = class_from_text(args.center)
    sys.stdout.write(json.dumps(E.to_json()) + "\n")
    return EXIT_OK


def cmd_tree(args) -> int:
    if args.depth > max_depth():
        raise DomainError(f"depth {args.depth} exceeds the guard {max_depth()} "
                          "(set STAIRCASE_MAX_DEPTH to override)")
    triples = tree_enumerate(args.n, args.depth)
    rows, failures = [], 0
    for T in triples:
        report = verify_triple(T)
        identities = identity_suite(T)
        ok = report.ok and all(identities.values())
        failures += not ok
        rows.append({**T.to_json(), "ok": ok, "axioms": report.as_dict(), "identities": identities})
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["word", "left", "mid", "right", "ok"])
        for T, row in zip(triples, rows):
            writer.writerow([T.word, T.left.label, T.mid.label, T.right.label, row["ok"]])
        text = buf.getvalue()
    else:
        text = dumps({"n": args.n, "depth": args.depth, "count": len(rows),
                      "all_pass": failures == 0, "triples": rows})
    _emit(text, args.out)
    if failures:
        print(f"{failures} triple(s) failed verification", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_limits(args) -> int:
    T = triple_at(args.n, check_word(args.word))
    limits = staircase_limits(T)
    J = blocked_interval(T)
    V = volume_at_acc(limits.b_inf, limits.z_inf)
    doc = {
        "n": args.n,
        "word": args.word,
        "blocking_class": T.right.to_json(),
        "b_E": _exact_and_float(limits.b_inf),
        "z_E": _exact_and_float(limits.z_inf),
        "V": _exact_and_float(V),
        "interval": [_exact_and_float(J.lower), _exact_and_float(J.upper)],
    }
    _emit(dumps(doc), args.out)
    return EXIT_OK


def cmd_atf(args) -> int:
    if args.k_max < 0:
        raise DomainError("--k-max must be non-negative")
    T = triple_at(args.n, check_word(args.word))
    b = parse_scalar(args.b) if args.b else None
    trace = limit_run(T, args.k_max, b)
    out = Path(args.out) if args.out else None
    doc = trace_to_json(trace)
    want_svg = args.svg or args.format == "svg"
    if out is None:
        sys.stdout.write(dumps(doc))
        if want_svg:
            raise DomainError("--svg needs --out")
        return EXIT_OK
    atomic_write(out / "trace.json", dumps(doc))
    if want_svg:
        for step in trace.steps:
            atomic_write(out / f"step_{step.k:03d}.svg",
                         quad_to_svg(step.quad, title=f"k = {step.k}"))
    return EXIT_OK


def _z_grid(args) -> list:
    zs = [parse_scalar(z) for z in args.z or []]
    if args.samples:
        lo, hi = _parse_rational(args.z_min), _parse_rational(args.z_max)
        if args.samples == 1:
            zs.append(lo)
        else:
            zs.extend(lo + (hi - lo) * i / (args.samples - 1) for i in range(args.samples))
    if not zs:
        raise DomainError("no z values: give --z or --samples")
    return zs


def cmd_envelope(args) -> int:
    b = _parse_rational(args.b)
    if not 0 <= b < 1:
        raise DomainError(f"blow-up size {b} outside [0, 1)")
    if args.depth > max_depth():
        raise DomainError(f"depth {args.depth} exceeds the guard {max_depth()}")
    classes = iter_classes(tree_enumerate(args.n, args.depth))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["z", "volume", "best_mu", "best_class"])
    for z in _z_grid(args):
        if sign(z) <= 0:
            raise DomainError(f"z must be positive, got {format_scalar(z)}")
        best, best_class = None, ""
        for E in classes:
            try:
                mu = obstruction_mu(E, b, z)
            except NonPositiveDenominatorError:
                continue
            if best is None or sign(mu - best) > 0:
                best, best_class = mu, E.label
        writer.writerow([
            format_float(to_float(z)),
            format_float(sqrt_to_float(volume_squared(b, z))),
            "" if best is None else format_float(to_float(best)),
            best_class,
        ])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="staircase",
        description="Exact staircase, generating-triple and ATF computations for H_b.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("class", help="quasi-perfect class with a given center")
    p.add_argument("center", help='center as "p/q", an integer, or "[7;4]"')
    p.set_defaults(func=cmd_class)

    p = sub.add_parser("tree", help="enumerate and verify generating triples")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("limits", help="staircase limits and blocked interval of a triple")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--word", default="")
    p.add_argument("--out")
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("atf", help="trace of y-mutations at the limit blow-up size")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--word", default="")
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--b", help="override the blow-up size (rational or quadratic text)")
    p.add_argument("--format", choices=["json", "svg"], default="json")
    p.add_argument("--svg", action="store_true", help="also write one SVG per step")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_atf)

    p = sub.add_parser("envelope", help="best enumerated obstruction against the volume curve")
    p.add_argument("--b", required=True)
    p.add_argument("--z", action="append", help="exact z value; may repeat")
    p.add_argument("--z-min", default="1")
    p.add_argument("--z-max", default="8")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--format", choices=["csv"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_envelope)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QuadInvariantError, RayMissesSideError, ClosureViolationError,
            VerificationFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
