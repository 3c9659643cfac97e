"""Command-line entry point: ``nvoram <subcommand>``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace

import numpy as np

from nvoram.config import ConfigError, load_compare_configs, load_config
from nvoram.eoram.partition import MAX_LEVELS, group_of, partition
from nvoram.eoram.remap import mismatches
from nvoram.eoram.table import ROW_BITS, serialize_table, table_to_bytes, write_table_file
from nvoram.fast import level_counts
from nvoram.oram import leaf_stream
from nvoram.sim import (SimulationError, TraceError, compare, format_table, mfan_overhead,
                        run_simulation)
from nvoram.tree import level_of

EXIT_OK, EXIT_CONFIG, EXIT_SIM, EXIT_MISMATCH = 0, 1, 2, 3
GROUP_DUMP_LIMIT = 12


def _levels(text: str) -> int:
    value = int(text)
    if not 1 <= value <= MAX_LEVELS:
        raise argparse.ArgumentTypeError(f"levels must be in [1, {MAX_LEVELS}]")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.out is not None:
        config = replace(config, out_dir=args.out)
    report = run_simulation(config)
    sys.stdout.write(report.to_json())
    return EXIT_OK


def cmd_compare(args) -> int:
    rows = compare(load_compare_configs(args.config), threads=args.threads)
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(format_table(rows))
    return EXIT_OK


def cmd_dist(args) -> int:
    counts = np.zeros((1 << args.levels) - 1, dtype=np.int64)
    for block in leaf_stream(args.levels, args.accesses, args.seed):
        counts += level_counts(block, args.levels)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["node_id", "level", "writes"])
    for node, writes in enumerate(counts.tolist()):
        w.writerow([node, level_of(node), writes])
    return EXIT_OK


def partition_dump(levels: int, with_groups: bool) -> dict:
    table = partition(levels)
    out = {
        "levels": levels,
        "K": table.mfan_level,
        "table_bits": ROW_BITS * levels,
        "rows": [{"level": l, "is_mfan": r.is_mfan, "partner_level": r.partner_level,
                  "level_from": r.level_from, "level_to": r.level_to}
                 for l, r in enumerate(table.rows)],
    }
    if with_groups:
        groups = {}
        for node in range(table.node_count):
            g, role, _ = group_of(node, table)
            entry = groups.setdefault(g.mfan_node, {"mfan": g.mfan_node, "level": g.mfan_level,
                                                    "index": g.mfan_index, "partners": []})
            if role == "partner":
                entry["partners"].append(node)
        out["groups"] = sorted(groups.values(), key=lambda e: e["mfan"])
    return out


def cmd_partition_dump(args) -> int:
    table = partition(args.levels)
    if args.table_out:
        write_table_file(args.table_out, table)
    if args.bits:
        bits = serialize_table(table)
        print(bits)
        print(f"# {len(bits)} bits, {len(table_to_bytes(table)) - 6} payload bytes",
              file=sys.stderr)
        return EXIT_OK
    with_groups = args.groups if args.groups is not None else args.levels <= GROUP_DUMP_LIMIT
    print(json.dumps(partition_dump(args.levels, with_groups), indent=2))
    return EXIT_OK


def cmd_verify_remap(args) -> int:
    table = partition(args.levels)
    sizes = sorted({g.size for g in _distinct_groups(table)})
    bad = 0
    for size in sizes:
        found = mismatches(size, args.swaps)
        bad += len(found)
        status = "ok" if not found else f"{len(found)} mismatches"
        print(f"group size {size}: swaps 0..{args.swaps}: {status}")
    return EXIT_MISMATCH if bad else EXIT_OK


def _distinct_groups(table):
    for l, row in enumerate(table.rows):
        if row.is_mfan:
            yield table.group(l, 0)


def cmd_overhead(args) -> int:
    print(float(mfan_overhead(args.levels, args.freq)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nvoram",
                                description="Path ORAM wear simulation on endurance-limited memory")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one configuration")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=_non_negative)
    s.add_argument("--out", help="directory for report.json and histogram.csv")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("compare", help="run several levelers and normalise to baseline")
    s.add_argument("--config", required=True)
    s.add_argument("--threads", type=_positive)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("dist", help="per-node write counts without wear leveling (CSV)")
    s.add_argument("--levels", type=_levels, required=True)
    s.add_argument("--accesses", type=_non_negative, required=True)
    s.add_argument("--seed", type=_non_negative, default=0)
    s.set_defaults(func=cmd_dist)

    s = sub.add_parser("partition-dump", help="show the static grouping table")
    s.add_argument("--levels", type=_levels, required=True)
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True)
    fmt.add_argument("--bits", action="store_true")
    s.add_argument("--groups", action=argparse.BooleanOptionalAction, default=None)
    s.add_argument("--table-out", help="also write the binary lookup-table file")
    s.set_defaults(func=cmd_partition_dump)

    s = sub.add_parser("verify-remap", help="check the remap formulas against explicit swaps")
    s.add_argument("--levels", type=_levels, required=True)
    s.add_argument("--swaps", type=_non_negative, required=True)
    s.set_defaults(func=cmd_verify_remap)

    s = sub.add_parser("overhead", help="analytic extra-write fraction 2(K+1)/(XL)")
    s.add_argument("--levels", type=_levels, required=True)
    s.add_argument("--freq", type=_positive, required=True)
    s.set_defaults(func=cmd_overhead)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, TraceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as e:
        print(f"simulation error: {e}", file=sys.stderr)
        return EXIT_SIM


if __name__ == "__main__":
    sys.exit(main())
