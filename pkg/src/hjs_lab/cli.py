"""Command-line interface: `hjs-lab run | list-scenarios | version`."""
import argparse
import sys
from pathlib import Path

from . import __version__
from .config import SCENARIOS, parse_config
from .errors import ConfigurationError
from .scenarios import run_scenario


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hjs-lab",
        description="Scenario runner for the deformed Hamilton-Jacobi / "
                    "linear complex-field system in one dimension.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario from a config file")
    run.add_argument("config", help="path to a key = value config file")
    run.add_argument("--outdir", default=None,
                     help="output directory (overrides the config)")
    run.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE", help="override a config entry")

    sub.add_parser("list-scenarios", help="list available scenarios")
    sub.add_parser("version", help="print the package version")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(__version__)
        return 0
    if args.command == "list-scenarios":
        for name in SCENARIOS:
            print(name)
        return 0
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    overrides = {}
    for item in args.overrides:
        if "=" not in item:
            print(f"error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return 2
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    try:
        cfg = parse_config(text, overrides=overrides)
        status = run_scenario(cfg, outdir=args.outdir)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    if status == 1:
        print("tolerance failure (see report.json)", file=sys.stderr)
    elif status == 3:
        print("numerical blow-up (see report.json)", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
