"""Closed-form volume constants against Monte Carlo, k = 1..4.

Writes one CSV row per k and prints the deviation in stderr units.
"""

import argparse
import sys

from elpp import SeedSpec, volume_mc
from elpp.experiments import csv_lines


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--t", type=float, default=1.0)
    ap.add_argument("--budget", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out", default="volume_check.csv")
    args = ap.parse_args()

    header = ("k", "t", "B", "exact", "mc_mean", "mc_stderr", "samples", "sigmas")
    rows = []
    for k in (1, 2, 3, 4):
        est = volume_mc(k, args.t, args.budget, args.samples, SeedSpec(args.seed, k))
        sig = abs(est.mc_mean - est.exact) / est.mc_stderr
        rows.append((k, args.t, args.budget, est.exact, est.mc_mean,
                     est.mc_stderr, args.samples, sig))
        print(f"k={k}: exact={est.exact:.7f} mc={est.mc_mean:.7f} "
              f"({sig:.2f} stderr)")
    params = {"samples": args.samples, "t": args.t, "B": args.budget}
    with open(args.out, "w") as fh:
        for line in csv_lines("volume-check", params, args.seed, header, rows):
            fh.write(line + "\n")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
