"""Per-level write statistics with and without E-ORAM after a fixed number of accesses.

Prints mean, min and max writes per node for every level, which shows the
exponential fall-off of plain Path ORAM and how far grouping flattens it.
"""

import argparse
import csv
import sys

from nvoram.config import SimConfig
from nvoram.sim import run_simulation
from nvoram.wear import coefficient_of_variation, level_summary


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--levels", type=int, default=12)
    p.add_argument("--accesses", type=int, default=10**6)
    p.add_argument("--freq", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["wear_leveler", "level", "mean", "min", "max"])
    for leveler in ("none", "eoram"):
        rep = run_simulation(SimConfig(levels=args.levels, wear_leveler=leveler, freq=args.freq,
                                       wmax=2**62, max_accesses=args.accesses, seed=args.seed))
        for row in level_summary(rep.counters, args.levels):
            out.writerow([leveler, row["level"], f"{row['mean']:.2f}", row["min"], row["max"]])
        print(f"# {leveler}: coefficient of variation "
              f"{coefficient_of_variation(rep.counters):.4f}", file=sys.stderr)


if __name__ == "__main__":
    main()
