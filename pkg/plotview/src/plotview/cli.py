"""Command-line entry point: CSVs in, figure panels out."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import PlotSpec, RenderError, render


def parse_panels(spec: str):
    panels = []
    for part in spec.split(";"):
        i, j = (int(v) for v in part.split(","))
        panels.append((i, j))
    return tuple(panels)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plotview",
        description="Render reachable-set projection CSVs into PNG panels")
    parser.add_argument("--input", action="append", required=True,
                        help="projection CSV (repeatable)")
    parser.add_argument("--out", default="plots", help="output directory")
    parser.add_argument("--panels", default="1,2;3,4;4,5",
                        help='coordinate pairs, e.g. "1,2;3,4;4,5"')
    parser.add_argument("--labels", default=None,
                        help="comma-separated draw order (subset of labels)")
    parser.add_argument("--stem", default="panel", help="output file prefix")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        inputs=[Path(p) for p in args.input],
        output_dir=Path(args.out),
        panels=parse_panels(args.panels),
        labels=None if args.labels is None else args.labels.split(","),
        stem=args.stem,
        dpi=args.dpi,
    )
    try:
        written = render(spec)
    except (RenderError, OSError) as exc:
        print(f"plotview: error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
