#!/usr/bin/env python3
"""Sweep the truncated-fiber dispersion against the analytic droplet energy.

    python3 scripts/dispersion_sweep.py --delta 2 --n 3 --points 64 --gap-cap 40
"""

import argparse

from xxzbands.cli import main as cli_main


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=float, default=2.0)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--points", type=int, default=64)
    ap.add_argument("--gap-cap", type=int, default=40)
    ap.add_argument("--output", default=None)
    args = ap.parse_args()

    argv = [
        "fiber", "--delta", str(args.delta), "--n", str(args.n),
        "--theta-points", str(args.points), "--gap-cap", str(args.gap_cap),
        "--format", "csv",
    ]
    if args.output:
        argv += ["--output", args.output]
    raise SystemExit(cli_main(argv))


if __name__ == "__main__":
    main()
