"""Command line: render one figure from a limitspec output directory.

    python -m limitspec_plots.cli render portrait --in run/ --out fig.png

Input files are located by their documented names inside --in; individual
roles can be overridden (e.g. --spectrum run/spectrum_os.csv). Exit codes:
0 success, 2 bad arguments or schema mismatch.
"""

import argparse
import glob
import os
import sys

from . import SchemaError, __version__
from .render import DEFAULT_LEVELS, RENDERERS, FigureSpec

# role -> (default filename pattern, figure kinds that require it)
_ROLES = {
    "graph": ("graph.csv", ("portrait",)),
    "spectrum": ("spectrum_*.csv", ()),
    "wkb": ("wkb.csv", ()),
    "pseudo": ("pseudo.csv", ("pseudo",)),
    "omega": ("omega.csv", ()),
    "growth": ("growth_*.json", ("growth",)),
}


def _locate(indir: str, kind: str, overrides: dict[str, str | None]):
    inputs = {}
    for role, (pattern, required_by) in _ROLES.items():
        if overrides.get(role):
            inputs[role] = overrides[role]
            continue
        hits = sorted(glob.glob(os.path.join(indir, pattern)))
        if hits:
            inputs[role] = hits[0]
        elif kind in required_by:
            raise SchemaError(
                f"figure kind {kind!r} needs {pattern} in {indir}")
    # keep only what the renderer uses
    wanted = {"portrait": ("graph", "spectrum", "wkb"),
              "pseudo": ("pseudo", "omega", "graph"),
              "growth": ("growth",)}[kind]
    return {r: p for r, p in inputs.items() if r in wanted}


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="limitspec-plots")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render one figure")
    r.add_argument("kind", choices=sorted(RENDERERS))
    r.add_argument("--in", dest="indir", required=True,
                   help="limitspec output directory")
    r.add_argument("--out", required=True,
                   help="image path; format from extension (.png/.svg)")
    r.add_argument("--levels", type=float, nargs="+",
                   default=list(DEFAULT_LEVELS),
                   help="log10 contour levels (pseudo)")
    r.add_argument("--window", type=float, nargs=4, default=None,
                   metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    for role in _ROLES:
        r.add_argument(f"--{role}", default=None,
                       help=f"override the {role} input file")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    overrides = {role: getattr(args, role) for role in _ROLES}
    try:
        inputs = _locate(args.indir, args.kind, overrides)
        spec = FigureSpec(kind=args.kind, inputs=inputs, out=args.out,
                          window=tuple(args.window) if args.window else None,
                          levels=tuple(args.levels))
        path = RENDERERS[args.kind](spec)
    except (SchemaError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
