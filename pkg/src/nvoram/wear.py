"""Per-node endurance accounting, the 1% failure rule, and the lifetime metric."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from nvoram.tree import level_of

DEFAULT_FAILED_FRACTION = Fraction(1, 100)


class LifetimeError(RuntimeError):
    pass


def failure_threshold(size: int, fraction: Fraction | float | str) -> int:
    """Largest failed-node count that is still tolerated."""
    return int(Fraction(fraction) * size)


class WearMap:
    """Write counters for every physical node.

    Counters are per node: a bucket is always rewritten as a whole, so all
    ``lines_per_node`` lines of a node wear in lockstep and line-level
    fractions equal node-level fractions.
    """

    def __init__(self, size: int, wmax: int, failed_fraction=DEFAULT_FAILED_FRACTION,
                 lines_per_node: int = 1):
        if size < 1 or wmax < 1:
            raise ValueError("size and wmax must be positive")
        self.counters = np.zeros(size, dtype=np.int64)
        self.wmax = wmax
        self.failed_fraction = Fraction(failed_fraction)
        self.lines_per_node = lines_per_node
        self.threshold = failure_threshold(size, self.failed_fraction)
        self.failed_count = 0
        self.failed = False
        self.total_writes = 0

    @property
    def size(self) -> int:
        return len(self.counters)

    def record_write(self, node: int) -> bool:
        """Count one write; True only on the write that first fails the device."""
        c = int(self.counters[node]) + 1
        self.counters[node] = c
        self.total_writes += 1
        if c == self.wmax:
            self.failed_count += 1
            if not self.failed and self.failed_count > self.threshold:
                self.failed = True
                return True
        return False

    def failed_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.counters >= self.wmax)


def lifetime(accesses_at_failure: int, levels: int, node_count: int, wmax: int,
             failed: bool = True) -> Fraction:
    """Path writes achieved before failure over the writes perfect leveling allows."""
    if not failed:
        raise LifetimeError("lifetime is only defined once the device has failed")
    return Fraction(accesses_at_failure * levels, node_count * wmax)


@dataclass
class LifetimeReport:
    levels: int
    node_count: int
    wmax: int
    total_oram_accesses: int
    total_node_writes: int
    failure_access_index: int | None
    counters: np.ndarray = field(repr=False)

    @property
    def failed(self) -> bool:
        return self.failure_access_index is not None

    @property
    def lifetime_fraction(self) -> Fraction:
        return lifetime(self.failure_access_index or 0, self.levels,
                        self.node_count, self.wmax, self.failed)


def level_summary(counters: np.ndarray, levels: int) -> list[dict]:
    """Mean/min/max writes per tree level (counters indexed by node id)."""
    rows = []
    for l in range(levels):
        seg = counters[(1 << l) - 1:(1 << (l + 1)) - 1]
        rows.append({"level": l, "mean": float(seg.mean()),
                     "min": int(seg.min()), "max": int(seg.max())})
    return rows


def write_histogram(counters: np.ndarray, levels: int | None = None) -> tuple[list[tuple[int, int, int]], list[dict]]:
    """Per-node ``(node_id, level, writes)`` rows and the per-level summary.

    ``counters`` may be longer than the tree (Start-Gap spare slots); the
    level column then refers to the slot id read as a tree position.
    """
    rows = [(i, level_of(i), int(w)) for i, w in enumerate(counters)]
    if levels is None:
        levels = level_of(len(counters) - 1) + 1
    return rows, level_summary(counters[: (1 << levels) - 1], levels)


def histogram_csv(counters: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node_id", "level", "writes"])
    for i, w_ in enumerate(counters.tolist()):
        w.writerow([i, level_of(i), w_])
    return buf.getvalue()


def coefficient_of_variation(counters: np.ndarray) -> float:
    m = counters.mean()
    return float(counters.std() / m) if m else 0.0
