"""Command-line entry point: render one figure from one CSV."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .exceptions import FigureError
from .plots import KINDS, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tpa-plot",
        description="Render figures from sweep CSV exports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("plot", help="render one figure kind from one CSV")
    p.add_argument("--in", dest="input", required=True, help="input CSV path")
    p.add_argument("--kind", required=True, choices=list(KINDS), help="figure kind")
    p.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not Path(args.input).exists():
        print(f"error: input file not found: {args.input}", file=sys.stderr)
        return 1
    try:
        render(args.kind, args.input, args.out)
    except FigureError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
