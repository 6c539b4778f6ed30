"""Command-line interface.

Exit status: 0 on success, 1 for input or configuration errors, 2 when a
required quantity is numerically undefined (degenerate moments).
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

import numpy as np

from . import tables
from .capm import CRITERIA, AnalysisOptions, analyze_asset, build_report, rank_assets
from .errors import DataError, DegenerateError
from .moments import MomentSet, compute_moments
from .sample import DEFAULT_DROP_THRESHOLD, TRANSFORMS, load_panel, make_pairs
from .solver import quartic_loss
from .synth import KINDS, GeneratorSpec, generate

log = logging.getLogger("leastquartic")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """Argument errors are input errors: exit 1 rather than argparse's 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _data_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("input", nargs=None if required else "?", help="wide price CSV")
    p.add_argument("--market", required=required, help="market proxy column")
    p.add_argument("--transform", choices=TRANSFORMS, default="levels")
    p.add_argument("--drop-threshold", type=float, default=DEFAULT_DROP_THRESHOLD,
                   help="drop columns with a larger fraction of missing cells")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="leastquartic",
                     description="Least-quartic beta and co-moment analysis.")
    parser.add_argument("-v", "--verbose", action="store_true")
    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("summary", parents=[fmt], help="per-series descriptive statistics")
    _data_args(p)

    p = sub.add_parser("comoments", parents=[fmt], help="standardized co-moments per asset")
    _data_args(p)

    p = sub.add_parser("fit", parents=[fmt], help="LS, LQ and Theil-Sen slopes")
    _data_args(p)
    p.add_argument("--asset", help="single asset (default: every asset)")

    p = sub.add_parser("rank", parents=[fmt], help="top assets by slope")
    _data_args(p)
    p.add_argument("--by", choices=CRITERIA, default="lq")
    p.add_argument("--top", dest="top_n", type=int, default=10)

    p = sub.add_parser("loss-curve", parents=[fmt], help="quartic loss over a grid of slopes")
    _data_args(p, required=False)
    p.add_argument("--asset")
    p.add_argument("--coefficients", metavar="MU40,MU31,MU22,MU13,MU04",
                   help="evaluate explicit moments instead of a data file")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)

    p = sub.add_parser("simulate", parents=[fmt], help="emit synthetic (x, y) pairs")
    p.add_argument("--kind", choices=KINDS, default="bivariate_normal")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--sigma-x", type=float, default=1.0)
    p.add_argument("--sigma-y", type=float, default=1.0)
    p.add_argument("--contamination", type=float, default=None)
    return parser


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    if not start < stop:
        raise DataError("--from must be smaller than --to")
    if not step > 0:
        raise DataError("--step must be positive")
    k = int(np.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(k + 1)


def _coefficient_moments(text: str) -> MomentSet:
    try:
        m40, m31, m22, m13, m04 = (float(v) for v in text.split(","))
    except ValueError:
        raise DataError("--coefficients needs five comma-separated numbers") from None
    nan = float("nan")
    return MomentSet(n=None, mu20=nan, mu02=nan, mu11=nan, mu30=nan, mu03=nan,
                     mu21=nan, mu12=nan, mu40=m40, mu04=m04, mu31=m31, mu13=m13,
                     mu22=m22)


def _run(args: argparse.Namespace) -> tuple[list[dict], tuple[str, ...], int]:
    if args.command == "simulate":
        spec = GeneratorSpec(kind=args.kind, n=args.n, sigma_x=args.sigma_x,
                             sigma_y=args.sigma_y, rho=args.rho,
                             contamination=args.contamination, seed=args.seed)
        return tables.pair_records(generate(spec)), tables.PAIR_FIELDS, EXIT_OK

    if args.command == "loss-curve":
        grid = _grid(args.start, args.stop, args.step)
        if args.coefficients:
            ms = _coefficient_moments(args.coefficients)
        else:
            if not (args.input and args.market and args.asset):
                raise DataError("loss-curve needs INPUT, --market and --asset, or --coefficients")
            panel = load_panel(args.input, args.market, args.drop_threshold)
            ms = compute_moments(make_pairs(panel, args.asset, args.transform))
        return tables.curve_records(grid, quartic_loss(ms, grid)), tables.CURVE_FIELDS, EXIT_OK

    panel = load_panel(args.input, args.market, args.drop_threshold)
    options = AnalysisOptions(transform=args.transform)

    if args.command == "fit" and args.asset:
        row = analyze_asset(panel, args.asset, options)
        if not row.ok:
            sys.stderr.write(f"leastquartic: {args.asset}: {row.error}\n")
            code = EXIT_NUMERIC if "degenerate" in row.flags else EXIT_INPUT
            return tables.fit_records([row]), tables.FIT_FIELDS, code
        return tables.fit_records([row]), tables.FIT_FIELDS, EXIT_OK

    report = build_report(panel, options)
    if args.command == "summary":
        return tables.summary_records(report), tables.SUMMARY_FIELDS, EXIT_OK
    if args.command == "comoments":
        return tables.comoment_records(report.rows), tables.COMOMENT_FIELDS, EXIT_OK
    if args.command == "fit":
        return tables.fit_records(report.rows), tables.FIT_FIELDS, EXIT_OK
    if args.command == "rank":
        table = rank_assets(report.rows, args.by, args.top_n)
        return tables.rank_records(table), tables.RANK_FIELDS, EXIT_OK
    raise DataError(f"unknown command {args.command!r}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        records, fields, code = _run(args)
    except DegenerateError as exc:
        sys.stderr.write(f"leastquartic: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except DataError as exc:
        sys.stderr.write(f"leastquartic: {exc}\n")
        return EXIT_INPUT
    sys.stdout.write(tables.render(records, fields, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
