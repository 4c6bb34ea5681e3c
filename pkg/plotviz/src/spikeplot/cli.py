"""Command line: render figures from a spikempc run directory."""

from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .render import plot_controls, plot_traces


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spikeplot",
        description="Render membrane-potential and control-input figures "
                    "from a run directory (trace.csv, control.csv, report.json).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("traces", "one potentials figure per module"),
        ("controls", "control-input time series"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--in", dest="run_dir", required=True,
                         help="run directory with the CSV/JSON outputs")
        cmd.add_argument("--out", dest="out_dir", required=True,
                         help="directory for the rendered images")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "traces":
            for path in plot_traces(args.run_dir, args.out_dir):
                print(f"wrote {path}")
        else:
            print(f"wrote {plot_controls(args.run_dir, args.out_dir)}")
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
