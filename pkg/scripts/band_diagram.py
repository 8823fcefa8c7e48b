#!/usr/bin/env python3
"""Dump the cluster-band diagram data for a range of anisotropies.

Produces one CSV per delta (rows: n, k, lo, hi), ready for any plotting tool:

    python3 scripts/band_diagram.py --deltas 1.5,2,4 --nmax 6 --outdir out/
"""

import argparse
import os

from xxzbands.cli import main as cli_main


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--deltas", default="1.5,2,4")
    ap.add_argument("--nmax", type=int, default=6)
    ap.add_argument("--outdir", default=".")
    args = ap.parse_args()

    os.makedirs(args.outdir, exist_ok=True)
    for delta in (float(d) for d in args.deltas.split(",")):
        out = os.path.join(args.outdir, f"bands_delta{delta:g}.csv")
        cli_main([
            "bands", "--delta", str(delta), "--nmax", str(args.nmax),
            "--format", "csv", "--output", out,
        ])
        print(f"wrote {out}")


if __name__ == "__main__":
    main()
