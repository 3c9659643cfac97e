"""Experiment orchestration: workloads, traces, simulation runs, comparisons."""

from __future__ import annotations

import json
import logging
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

from nvoram import fast
from nvoram.config import ConfigError, SimConfig
from nvoram.eoram.leveler import EoramLeveler
from nvoram.eoram.partition import node_groups, partition
from nvoram.eoram.schedule import BALANCED, spread_interval
from nvoram.memory import NodeMemory, NoLeveling
from nvoram.oram import READ, WRITE, OramState, StashOverflow, leaf_stream
from nvoram.startgap import StartGap
from nvoram.wear import WearMap, failure_threshold, histogram_csv, level_summary

log = logging.getLogger(__name__)

TRACE_LINE = re.compile(r"^([RW]) 0x([0-9a-fA-F]+)$")
FLOAT_DIGITS = 10


class SimulationError(RuntimeError):
    pass


class TraceError(ValueError):
    def __init__(self, path, lineno: int, line: str):
        super().__init__(f"{path}:{lineno}: malformed trace line {line!r}")
        self.lineno = lineno


class TraceOp(NamedTuple):
    op: str
    address: int

    def block(self, block_bytes: int, max_blocks: int) -> int:
        return (self.address // block_bytes) % max_blocks


def load_trace(path: str | os.PathLike) -> Iterator[TraceOp]:
    """Stream ``R 0x...`` / ``W 0x...`` lines; blank lines and ``#`` comments skipped."""
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            m = TRACE_LINE.match(line)
            if m is None:
                raise TraceError(path, lineno, line)
            yield TraceOp(m.group(1), int(m.group(2), 16))


def zipf_sampler(n: int, theta: float, rng: np.random.Generator, batch: int = 4096):
    weights = 1.0 / np.arange(1, n + 1, dtype=np.float64) ** theta
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    while True:
        yield from np.searchsorted(cdf, rng.random(batch), side="right").tolist()


def workload_ops(config: SimConfig, rng: np.random.Generator) -> Iterator[tuple[str, int]]:
    wl = config.workload
    nblocks = config.block_count
    if wl.kind == "trace":
        for op in load_trace(wl.trace):
            yield (WRITE if op.op == "W" else READ), op.block(config.block_bytes, nblocks)
        return
    if wl.kind == "zipf":
        blocks = zipf_sampler(nblocks, wl.theta, rng)
    else:
        blocks = (b for chunk in iter(lambda: rng.integers(0, nblocks, 4096).tolist(), None)
                  for b in chunk)
    for b in blocks:
        yield (WRITE if rng.random() < wl.write_fraction else READ), b


def make_leveler(config: SimConfig):
    n = config.node_count
    if config.wear_leveler == "eoram":
        return EoramLeveler(partition(config.levels), config.freq, config.scheduler)
    if config.wear_leveler == "startgap":
        sg = config.startgap
        return StartGap(n, sg.regions, sg.psi, sg.randomizer_seed)
    return NoLeveling(n)


class FastReplay:
    """Wear-only replay of leaf blocks through a jitted leveler kernel."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.levels = config.levels
        self.wmax = config.wmax
        leveler = config.wear_leveler
        n = config.node_count
        if leveler == "startgap":
            sg = make_leveler(config)
            self.startgap = sg
            size = sg.physical_count
            self._args = (sg.randomizer, np.asarray(sg.start, np.int64),
                          np.asarray(sg.gap, np.int64), np.asarray(sg.write_ctr, np.int64),
                          sg.region_size, sg.psi)
            self._kernel = fast.run_startgap
        elif leveler == "eoram":
            table = partition(config.levels)
            groups = node_groups(table)
            k = table.mfan_level
            self.table = table
            self.phys_of = np.arange(n, dtype=np.int64)
            self.log_of = np.arange(n, dtype=np.int64)
            self.executed = np.zeros(n, dtype=np.int64)
            size = n
            self._args = (self.phys_of, self.log_of, groups.size, groups.offset,
                          self.executed, config.freq, k, config.scheduler == BALANCED,
                          spread_interval(config.freq, k))
            self._kernel = fast.run_eoram
        else:
            size = n
            self._args = ()
            self._kernel = fast.run_none
        self.wear = np.zeros(size, dtype=np.int64)
        self.state = fast.new_state(failure_threshold(size, Fraction(config.failed_fraction)))

    @property
    def accesses(self) -> int:
        return int(self.state[fast.CTR])

    @property
    def failure_access(self) -> int | None:
        v = int(self.state[fast.FAIL_AT])
        return v if v >= 0 else None

    @property
    def movements(self) -> int:
        return int(self.state[fast.MOVES])

    @property
    def movement_writes(self) -> int:
        return int(self.state[fast.MOVE_WRITES])

    def feed(self, leaves: np.ndarray) -> int:
        """Replay leaves until exhausted or the device fails; returns how many were used."""
        leaves = np.ascontiguousarray(leaves, dtype=np.int64)
        return int(self._kernel(leaves, self.levels, self.wear, self.wmax, self.state,
                                *self._args))


@dataclass
class SimReport:
    config: SimConfig
    accesses: int
    failure_access: int | None
    total_node_writes: int
    movements: int
    movement_writes: int
    counters: np.ndarray = field(repr=False)
    max_stash: int | None = None
    mode: str = "leaf-stream"

    @property
    def failed(self) -> bool:
        return self.failure_access is not None

    @property
    def lifetime_fraction(self) -> Fraction | None:
        if not self.failed:
            return None
        return Fraction(self.failure_access * self.config.levels,
                        self.config.node_count * self.config.wmax)

    @property
    def overhead_fraction(self) -> Fraction:
        if not self.accesses:
            return Fraction(0)
        return Fraction(self.movement_writes, self.accesses * self.config.levels)

    def analytic_overhead(self) -> Fraction | None:
        if self.config.wear_leveler != "eoram":
            return None
        return mfan_overhead(self.config.levels, self.config.freq)

    def to_dict(self) -> dict:
        c = self.config
        lt = self.lifetime_fraction
        analytic = self.analytic_overhead()
        return {
            "wear_leveler": c.wear_leveler,
            "L": c.levels,
            "Z": c.bucket_slots,
            "wmax": c.wmax,
            "seed": c.seed,
            "mode": self.mode,
            "accesses": self.accesses,
            "failed": self.failed,
            "accesses_at_failure": self.failure_access,
            "lifetime_fraction": _fmt(lt),
            "total_node_writes": self.total_node_writes,
            "movements": self.movements,
            "movement_writes": self.movement_writes,
            "overhead_fraction": _fmt(self.overhead_fraction),
            "overhead_analytic": _fmt(analytic),
            "failed_fraction": c.failed_fraction,
            "spare_lines": len(self.counters) - c.node_count,
            "psi": c.startgap.psi if c.wear_leveler == "startgap" else None,
            "max_stash": self.max_stash,
            "levels": [{k: _fmt(v) if isinstance(v, float) else v for k, v in row.items()}
                       for row in level_summary(self.counters, c.levels)],
            "config": c.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def write(self, out_dir: str | os.PathLike) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(self.to_json())
        (out / "histogram.csv").write_text(histogram_csv(self.counters))


def _fmt(x):
    if x is None:
        return None
    return round(float(x), FLOAT_DIGITS)


def mfan_overhead(levels: int, freq: int) -> Fraction:
    """Extra node writes per regular node write: 2(K+1)/(XL)."""
    k = partition(levels).mfan_level
    return Fraction(2 * (k + 1), freq * levels)


def _uses_fast_path(config: SimConfig) -> bool:
    return config.workload.kind == "uniform" and not config.full_oram


def run_simulation(config: SimConfig) -> SimReport:
    """Run one configuration until the device fails or the access cap is hit."""
    config.validate()
    if _uses_fast_path(config):
        report = _run_fast(config)
    else:
        report = _run_engine(config)
    if config.out_dir:
        report.write(config.out_dir)
    return report


def _run_fast(config: SimConfig) -> SimReport:
    replay = FastReplay(config)
    next_note = config.progress_every
    for block in leaf_stream(config.levels, config.max_accesses, config.seed):
        replay.feed(block)
        if replay.failure_access is not None:
            break
        if replay.accesses >= next_note:
            log.info("%s L=%d: %d accesses, max wear %d", config.wear_leveler,
                     config.levels, replay.accesses, int(replay.wear.max()))
            next_note += config.progress_every
    return SimReport(config, replay.accesses, replay.failure_access,
                     int(replay.wear.sum()), replay.movements, replay.movement_writes,
                     replay.wear.copy())


def _run_engine(config: SimConfig) -> SimReport:
    rng = np.random.default_rng(config.seed)
    leveler = make_leveler(config)
    wear = WearMap(leveler.physical_count, config.wmax, Fraction(config.failed_fraction),
                   lines_per_node=config.bucket_slots)
    memory = NodeMemory(leveler, wear)
    state = OramState.create(config.levels, config.bucket_slots, config.block_count,
                             config.stash_capacity, seed=config.seed + 1, memory=memory)
    shadow: dict[int, int] = {}
    for i, (op, block) in enumerate(workload_ops(config, rng)):
        if i >= config.max_accesses:
            break
        if op == READ and block not in state.posmap:
            op = WRITE  # first touch of a block initialises it
        try:
            got, _ = state.access(op, block, payload=i if op == WRITE else None)
        except StashOverflow as e:
            raise SimulationError(str(e)) from e
        if op == WRITE:
            shadow[block] = i
        elif got != shadow[block]:
            raise SimulationError(f"block {block} returned stale data at access {i + 1}")
        if memory.failure_access is not None:
            break
        if state.access_count % config.progress_every == 0:
            log.info("%s L=%d: %d accesses", config.wear_leveler, config.levels,
                     state.access_count)
    return SimReport(config, state.access_count, memory.failure_access, wear.total_writes,
                     memory.movements, memory.movement_writes, wear.counters.copy(),
                     max_stash=state.max_stash, mode="oram-engine")


def _run_member(config: SimConfig) -> SimReport:
    return run_simulation(config)


def compare(configs: list[SimConfig], threads: int | None = None) -> list[dict]:
    """Run several levelers on one geometry/workload and normalise to baseline.

    Member ``i`` runs with seed ``seed + i``.  The baseline is the no-leveling
    run if present, otherwise the first config.
    """
    if len(configs) < 2:
        raise ConfigError("compare needs at least two configs")
    first = configs[0]
    for c in configs[1:]:
        if (c.levels, c.wmax, c.workload) != (first.levels, first.wmax, first.workload):
            raise ConfigError("compared configs must share levels, wmax and workload")
    members = [replace(c, seed=c.seed + i, out_dir=None) for i, c in enumerate(configs)]
    if threads is None:
        threads = int(os.environ.get("NVORAM_THREADS", "1") or 1)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(_run_member, members))
    else:
        reports = [run_simulation(c) for c in members]
    base_idx = next((i for i, c in enumerate(members) if c.wear_leveler == "none"), 0)
    base = reports[base_idx].failure_access
    rows = []
    for r in reports:
        norm = (Fraction(r.failure_access, base)
                if r.failure_access is not None and base else None)
        rows.append({
            "wear_leveler": r.config.wear_leveler,
            "seed": r.config.seed,
            "accesses_at_failure": r.failure_access,
            "normalized_to_baseline": _fmt(norm),
            "lifetime_fraction": _fmt(r.lifetime_fraction),
            "overhead_fraction": _fmt(r.overhead_fraction),
        })
    return rows


def format_table(rows: list[dict]) -> str:
    cols = list(rows[0])
    cells = [[str(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)
