#!/usr/bin/env python3
"""Sensitivity turnover versus chemical reaction rate.

Scans the full/intensity/phase/shot-noise sensitivity bounds over a
logarithmic rate grid for a few detunings and writes one CSV per detuning.
The interior minimum of the full bound is the optimal-rate turnover.
"""

import argparse
import pathlib

from spectrosens import cli


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=pathlib.Path, default=pathlib.Path("out"))
    parser.add_argument("--detunings", type=float, nargs="+",
                        default=[20.0, 40.0, 100.0])
    parser.add_argument("--points", type=int, default=25)
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for eps in args.detunings:
        path = args.out / f"turnover_eps{eps:g}.csv"
        argv = ["sweep",
                "--axis1", f"rate,log,1e-6,1e2,{args.points}",
                "--set", f"detuning_a_mhz={eps}",
                "--out", str(path)]
        if args.workers:
            argv += ["--workers", str(args.workers)]
        code = cli.main(argv)
        print(f"{path}: exit {code}")


if __name__ == "__main__":
    main()
