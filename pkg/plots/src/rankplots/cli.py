"""plots <input.csv> [more.csv ...] [--out fig.svg] [--png]

All inputs must carry the same experiment id; statistics are taken from the
`.summary.json` sidecars written next to each CSV.  Emits SVG by default.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .reader import SchemaError
from .render import PlotJob, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plots", description=__doc__)
    parser.add_argument("inputs", nargs="+", help="experiment CSV files")
    parser.add_argument("--out", default="fig.svg", help="output figure path")
    parser.add_argument("--png", action="store_true", help="emit PNG instead of SVG")
    parser.add_argument("--linear", action="store_true",
                        help="plot probabilities on a linear axis instead of log_q")
    args = parser.parse_args(argv)
    fmt = "png" if args.png else "svg"
    try:
        job = PlotJob(tuple(Path(p) for p in args.inputs), Path(args.out), fmt, not args.linear)
        render(job)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
