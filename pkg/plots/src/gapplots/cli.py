"""Command line entry: plots <kind> <csv...> -o <image>."""

from __future__ import annotations

import argparse
import sys

from .figures import RENDERERS, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plots",
                                     description="render figures from derham-gap CSV logs")
    parser.add_argument("kind", choices=sorted(RENDERERS))
    parser.add_argument("csvs", nargs="+", help="input CSV file(s)")
    parser.add_argument("-o", "--out", required=True, help="output image (SVG/PNG)")
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.csvs, args.out)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
