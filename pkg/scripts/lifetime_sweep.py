"""Lifetime and accesses-to-failure for each leveler over a range of tree heights.

    python3 scripts/lifetime_sweep.py --levels 10 12 14 16 --wmax 10000 > sweep.csv
"""

import argparse
import csv
import sys
import time

from nvoram.config import SimConfig
from nvoram.sim import run_simulation


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--levels", type=int, nargs="+", default=[10, 12, 14, 16])
    p.add_argument("--levelers", nargs="+", default=["none", "startgap", "eoram"])
    p.add_argument("--wmax", type=int, default=10_000)
    p.add_argument("--freq", type=int, default=1000)
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    args = p.parse_args()

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["levels", "wear_leveler", "seed", "accesses_at_failure",
                  "lifetime_fraction", "overhead_fraction", "seconds"])
    for levels in args.levels:
        for leveler in args.levelers:
            for seed in args.seeds:
                t = time.perf_counter()
                rep = run_simulation(SimConfig(levels=levels, wear_leveler=leveler,
                                               wmax=args.wmax, freq=args.freq, seed=seed))
                lt = rep.lifetime_fraction
                out.writerow([levels, leveler, seed, rep.failure_access,
                              f"{float(lt):.6f}" if lt is not None else "",
                              f"{float(rep.overhead_fraction):.6g}",
                              f"{time.perf_counter() - t:.1f}"])
                sys.stdout.flush()


if __name__ == "__main__":
    main()
