#!/usr/bin/env python3
"""Regime classification map over the detuning x reaction-rate plane.

Writes a 2D sweep CSV whose `regime` column labels each grid point as
photon-shot-noise limited (PSNL), chemically limited (CL), intermediate (IR),
or unclassified.
"""

import argparse
import pathlib

from spectrosens import cli


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=pathlib.Path,
                        default=pathlib.Path("out/regime_map.csv"))
    parser.add_argument("--detuning-points", type=int, default=21)
    parser.add_argument("--rate-points", type=int, default=17)
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)

    argv = ["sweep",
            "--axis1", f"detuning,linear,0,100,{args.detuning_points}",
            "--axis2", f"rate,log,1e-6,1e2,{args.rate_points}",
            "--out", str(args.out)]
    if args.workers:
        argv += ["--workers", str(args.workers)]
    code = cli.main(argv)
    print(f"{args.out}: exit {code}")


if __name__ == "__main__":
    main()
