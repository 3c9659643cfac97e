"""Expected per-node write rate of every E-ORAM group relative to ideal leveling.

Assumes movements level each group perfectly, so what remains is the
imbalance between groups that the static partition leaves behind.
"""

import argparse

from nvoram.eoram.partition import group_write_rates, partition


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--top", type=int, default=10, help="show this many hottest groups")
    args = p.parse_args()

    table = partition(args.levels)
    ideal = args.levels / table.node_count
    ranked = sorted(group_write_rates(table), key=lambda gr: gr[1], reverse=True)
    print("level  index  size  rate/ideal")
    for g, rate in ranked[:args.top]:
        print(f"{g.mfan_level:>5}  {g.mfan_index:>5}  {g.size:>4}  {rate / ideal:.4f}")


if __name__ == "__main__":
    main()
