"""Command-line front end for figure regeneration."""

from __future__ import annotations

import argparse
import sys

from .make import MissingScenarioError, make_figures, make_sensitivity_figure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="firmsim-figures",
        description="Rebuild figures and tables from simulator CSV exports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_main = sub.add_parser("figures", help="the four main figures + two tables")
    p_main.add_argument("input_dir", help="directory with <Scenario>_mean.csv files")
    p_main.add_argument("output_dir")
    p_main.add_argument("--expect", nargs="*", default=None,
                        help="scenario names that must be present")

    p_sens = sub.add_parser("sensitivity", help="per-grid-point profitability plot")
    p_sens.add_argument("manifest_dir", help="sweep output directory with manifest.json")
    p_sens.add_argument("output_dir")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "figures":
            created = make_figures(args.input_dir, args.output_dir,
                                   expect=args.expect)
        else:
            created = make_sensitivity_figure(args.manifest_dir, args.output_dir)
    except (MissingScenarioError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in created:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
