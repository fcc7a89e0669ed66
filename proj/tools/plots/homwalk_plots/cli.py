# SPDX-License-Identifier: Apache-2.0
# Copyright the homwalk authors
"""plot --kind K --in CSV --out PNG"""

import argparse
import sys
from pathlib import Path

from .figures import KINDS, FigureSpec, render
from .schema import SchemaError


def main(argv=None):
    p = argparse.ArgumentParser(prog="plot", description="Render a homwalk experiment CSV and "
                                "write independently recomputed fits to slopes.json.")
    p.add_argument("--kind", required=True, choices=sorted(KINDS))
    p.add_argument("--in", dest="input", required=True, type=Path, help="experiment CSV")
    p.add_argument("--out", required=True, type=Path, help="output image (PNG, SVG or PDF)")
    p.add_argument("--slopes", type=Path, help="slopes JSON path (default: slopes.json "
                   "next to --out)")
    p.add_argument("--no-fit", action="store_true", help="omit fit overlays")
    args = p.parse_args(argv)
    spec = FigureSpec(args.kind, args.input, args.out, not args.no_fit, args.slopes)
    try:
        render(spec)
    except SchemaError as e:
        print(f"plot: schema error: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"plot: {e}", file=sys.stderr)
        return 1
    return 0
