#!/usr/bin/env python3
"""Cross sections, variance ratios, and sensitivities versus detuning.

Produces the detuning-resolved CSV used to inspect the even/odd symmetry of
the absorption and dispersion cross sections and the complementary structure
of the two variance channels.
"""

import argparse
import pathlib

from spectrosens import cli


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=pathlib.Path,
                        default=pathlib.Path("out/detuning_scan.csv"))
    parser.add_argument("--span", type=float, default=100.0,
                        help="scan from -span to +span MHz")
    parser.add_argument("--points", type=int, default=101)
    parser.add_argument("--rate", type=float, default=1e-4,
                        help="both reaction rates, MHz")
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)

    argv = ["sweep",
            "--axis1", f"detuning,linear,{-args.span},{args.span},{args.points}",
            "--set", f"rate_a_mhz={args.rate}",
            "--set", f"rate_b_mhz={args.rate}",
            "--out", str(args.out)]
    if args.workers:
        argv += ["--workers", str(args.workers)]
    code = cli.main(argv)
    print(f"{args.out}: exit {code}")


if __name__ == "__main__":
    main()
