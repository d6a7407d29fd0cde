"""render subcommand: sweep CSVs in, figure PNGs out.

All inputs are validated before any figure is opened, so a failing run
leaves no partial image behind.  Exit 2 names the offending input problem
(missing column, empty file, unusable field grid).
"""

import argparse
import sys

import numpy as np

from .presets import RENDERERS, PresetError
from .reading import EmptyInput, SchemaError, read_field, read_rows, split_inputs


def _merge_rows(paths):
    tables = [read_rows(p) for p in paths]
    if len(tables) == 1:
        return tables[0]
    return {k: np.concatenate([t[k] for t in tables]) for k in tables[0]}


def cmd_render(args):
    row_paths, fields = split_inputs(args.inputs)
    if not row_paths:
        raise PresetError("no row CSV among the inputs")
    cols = _merge_rows(row_paths)
    for path in fields.values():
        read_field(path)  # validate every field file up front
    written = RENDERERS[args.preset](cols, fields, args.out)
    for path in written:
        print(path)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="splitspin-plots",
                                 description="render splitspin sweep artifacts")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render a figure preset from CSV inputs")
    p.add_argument("--preset", required=True, choices=sorted(RENDERERS))
    p.add_argument("--in", dest="inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_render)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SchemaError, EmptyInput, PresetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
