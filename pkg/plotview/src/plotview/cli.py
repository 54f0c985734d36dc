"""Command line: render figures from simulation CSV directories."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .recipes import recipe, recipe_names
from .render import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotview", description="Render figures from blockadesim CSV outputs"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render one figure (or all) from a results directory")
    p.add_argument("--preset", required=True,
                   help="figure id (see preset-list), or 'all' for every applicable figure")
    p.add_argument("--in", dest="in_dir", required=True, help="directory with the CSV files")
    p.add_argument("--out", dest="out_dir", required=True, help="directory for the images")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("preset-list", help="list figure ids")
    p.set_defaults(func=cmd_preset_list)
    return parser


def cmd_render(args) -> int:
    names = recipe_names() if args.preset == "all" else [args.preset]
    rendered = 0
    for name in names:
        r = recipe(name)
        if args.preset == "all":
            from pathlib import Path

            if not all((Path(args.in_dir) / f).exists() for f, _ in r.inputs):
                continue
        print(render(r, args.in_dir, args.out_dir))
        rendered += 1
    if rendered == 0:
        raise FileNotFoundError("no renderable figure inputs found in the input directory")
    return 0


def cmd_preset_list(args) -> int:
    for name in recipe_names():
        r = recipe(name)
        files = ", ".join(f for f, _ in r.inputs)
        print(f"{name:8s} <- {files}{'  [log-y]' if r.logy else ''}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
