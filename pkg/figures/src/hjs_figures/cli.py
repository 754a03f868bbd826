"""Command line: `figures render --spec spec.json` or positional CSVs."""
import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .render import FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render the two-panel ensemble-dynamics figure from "
                    "hjs-lab series CSVs (PNG and SVG).")
    sub = parser.add_subparsers(dest="command", required=True)
    ren = sub.add_parser("render", help="render a figure")
    ren.add_argument("csvs", nargs="*", help="series.csv inputs, one per kappa")
    ren.add_argument("--spec", help="JSON figure spec "
                     '({"inputs": [...], "labels": [...], "output": ...})')
    ren.add_argument("--labels", nargs="*", default=None,
                     help="legend labels, one per CSV (default: file stems)")
    ren.add_argument("--out", default="ensemble_dynamics",
                     help="output path stem (suffixes .png/.svg added)")
    ren.add_argument("--panels", default="both",
                     choices=("position", "momentum", "both"))
    ren.add_argument("--hj-band", action="store_true",
                     help="add the flow-dispersion band as a separate panel")
    sub.add_parser("version", help="print the package version")
    return parser


def _spec_from_args(args) -> FigureSpec:
    if args.spec:
        payload = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        return FigureSpec(
            inputs=tuple(payload["inputs"]),
            labels=tuple(payload.get("labels")
                         or [Path(p).stem for p in payload["inputs"]]),
            output=Path(payload.get("output", args.out)),
            panels=payload.get("panels", args.panels),
            hj_band=bool(payload.get("hj_band", args.hj_band)))
    if not args.csvs:
        raise SchemaError("no input CSVs given (positional or --spec)")
    labels = args.labels or [Path(p).parent.name or Path(p).stem
                             for p in args.csvs]
    return FigureSpec(inputs=tuple(args.csvs), labels=tuple(labels),
                      output=Path(args.out), panels=args.panels,
                      hj_band=args.hj_band)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(__version__)
        return 0
    try:
        written = render(_spec_from_args(args))
    except (SchemaError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
