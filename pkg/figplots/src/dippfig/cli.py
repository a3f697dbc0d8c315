"""Command line: render one figure from a sweep CSV.

Exit codes: 0 success, 2 bad arguments or schema/selection errors.
"""
from __future__ import annotations

import argparse
import sys

from .plots import FIGURES, NoDataError, PlotSpec, SchemaError, render


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(t) for t in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from exc
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dippfig", description="Render sweep CSVs into the standard figures"
    )
    parser.add_argument("--input", required=True, help="sweep CSV path")
    parser.add_argument("--figure", required=True, choices=sorted(FIGURES),
                        help="figure id")
    parser.add_argument("--output", required=True,
                        help="image path (.png or .svg)")
    parser.add_argument("--x-range", type=_range, metavar="LO:HI")
    parser.add_argument("--y-range", type=_range, metavar="LO:HI")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(args.input, args.figure, args.output, args.x_range, args.y_range)
    try:
        path = render(spec)
    except (SchemaError, NoDataError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
