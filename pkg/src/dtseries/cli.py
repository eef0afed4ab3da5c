"""Command line interface: ``python -m dtseries {compute,theta,joyce,selftest}``."""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional

from .engine import DEFAULT_MAX_RANK, DTEngine, order_to_prec
from .geometry import NSVec, SheafClass
from .joyce import s_coeff, u_coeff
from .qseries import QSeries, format_fraction
from .theta import (EnumerationError, InvalidXiError, RadiusTooSmall, XiData,
                    indefinite_theta, indefinite_theta_bruteforce, validate_xi)

CACHE_ENV = "DTSERIES_CACHE_DIR"

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dtseries", description="Exact DT(r, l) generating series on the local projective plane.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fmt = dict(choices=["json", "csv", "text"], default="text", help="output format")

    p = sub.add_parser("compute", help="compute DT(r, l, Delta) for Delta up to an order")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--c1", type=int, required=True)
    p.add_argument("--order", type=_nonnegative, required=True)
    p.add_argument("--cache-dir", default=None, help=f"cache directory (default: ${CACHE_ENV} if set)")
    p.add_argument("--format", **fmt)
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--max-rank", type=_positive, default=DEFAULT_MAX_RANK)
    p.add_argument("--raw", action="store_true", help="print the q-series instead of Delta rows")
    p.add_argument("--evaluate", action="store_true",
                   help="also print the truncated series evaluated at tau = i (floating point, diagnostic only)")

    p = sub.add_parser("theta", help="expand an indefinite theta datum read from a JSON file")
    p.add_argument("xi_file")
    p.add_argument("--prec", type=Fraction, default=Fraction(1))
    p.add_argument("--oracle", action="store_true", help="cross-check against box summation")
    p.add_argument("--radius", type=_positive, default=12)
    p.add_argument("--format", **fmt)

    p = sub.add_parser("joyce", help="evaluate S and U on a list of classes 'r:x,y r:x,y ...'")
    p.add_argument("classes", nargs="+")
    p.add_argument("--format", **fmt)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--cache-dir", default=None)
    return parser


# --- rendering ---------------------------------------------------------------


def _render_rows(header: List[str], rows: List[List[str]], fmt: str, meta: dict) -> str:
    if fmt == "json":
        doc = dict(meta)
        doc["rows"] = rows
        return json.dumps(doc, sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue().rstrip("\n")
    widths = [max(len(h), *(len(str(r[i])) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = [" ".join(f"{m}: {v}" for m, v in meta.items())]
    lines.append("  ".join(h.rjust(w) for h, w in zip(header, widths)))
    for row in rows:
        lines.append("  ".join(str(c).rjust(w) for c, w in zip(row, widths)))
    return "\n".join(lines)


def _series_rows(series: QSeries) -> List[List[str]]:
    return [[format_fraction(e), format_fraction(c)] for e, c in series.items()]


def evaluate_at_i(series: QSeries) -> complex:
    q = cmath.exp(-2 * cmath.pi)
    return sum(float(c) * q ** float(e) for e, c in series.items())


# --- commands ----------------------------------------------------------------


def cmd_compute(args) -> int:
    if args.rank < 1:
        raise UsageError("--rank must be at least 1")
    if args.rank > args.max_rank:
        raise UsageError(f"--rank {args.rank} exceeds --max-rank {args.max_rank}")
    cache_dir = args.cache_dir or os.environ.get(CACHE_ENV) or None
    engine = DTEngine(max_rank=args.max_rank, jobs=args.jobs, cache_dir=cache_dir)
    record = engine.dt_series(args.rank, args.c1, args.order)
    meta = {"r": args.rank, "l": args.c1, "order": args.order}
    if args.raw:
        series = record.series.truncate(order_to_prec(args.rank, args.order))
        meta["prec"] = format_fraction(series.prec)
        print(_render_rows(["exponent", "coefficient"], _series_rows(series), args.format, meta))
    else:
        rows = [[d, format_fraction(v)] for d, v in sorted(record.values.items())]
        if args.format != "json":
            rows = [[str(d), v] for d, v in rows]
        print(_render_rows(["delta", "dt"], rows, args.format, meta))
    if args.evaluate:
        value = evaluate_at_i(record.series)
        print(f"# value at tau = i: {value.real:.12g}", file=sys.stderr if args.format == "json" else sys.stdout)
    return EXIT_OK


def cmd_theta(args) -> int:
    try:
        xi = XiData.load(args.xi_file)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"cannot read datum: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    problems = validate_xi(xi)
    if problems:
        for line in problems:
            print(line, file=sys.stderr)
        return EXIT_VALIDATION
    series = indefinite_theta(xi, args.prec)
    meta = {"prec": format_fraction(series.prec)}
    if args.oracle:
        try:
            slow = indefinite_theta_bruteforce(xi, args.prec, args.radius)
            meta["oracle"] = "MATCH" if slow == series else "MISMATCH"
        except RadiusTooSmall as exc:
            meta["oracle"] = f"INCONCLUSIVE ({exc})"
    print(_render_rows(["exponent", "coefficient"], _series_rows(series), args.format, meta))
    if meta.get("oracle") == "MISMATCH":
        return EXIT_INTERNAL
    return EXIT_OK


def parse_class(text: str) -> SheafClass:
    try:
        r, rest = text.split(":")
        x, y = rest.split(",")
        return SheafClass(int(r), NSVec(int(x), int(y)))
    except ValueError as exc:
        raise UsageError(f"cannot parse class {text!r}; expected r:x,y") from exc


def cmd_joyce(args) -> int:
    classes = [parse_class(t) for t in args.classes]
    s, u = s_coeff(classes), u_coeff(classes)
    rows = [["S", str(s)], ["U", format_fraction(u)]]
    print(_render_rows(["coefficient", "value"], rows, args.format, {"classes": " ".join(args.classes)}))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .acceptance import run_all
    results = run_all(quick=args.quick, cache_dir=args.cache_dir)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else ("FAIL" if r.gating else "INFO-FAIL")
        print(f"[{status:9}] {r.number:>2} {r.name.ljust(width)} {r.seconds:7.2f}s  {r.detail}")
    ok = all(r.passed for r in results if r.gating)
    print("all criteria passed" if ok else "some criteria failed")
    return EXIT_OK if ok else EXIT_VALIDATION


COMMANDS = {"compute": cmd_compute, "theta": cmd_theta, "joyce": cmd_joyce, "selftest": cmd_selftest}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dtseries: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidXiError as exc:
        print(f"dtseries: invalid datum: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (EnumerationError, AssertionError) as exc:
        print(f"dtseries: internal check failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"dtseries: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:  # cache problems among others
        print(f"dtseries: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
