"""Bucket memory addressed by logical node id and routed through a wear leveler.

Levelers own the logical -> physical map; the memory owns the physical
cells and the wear counters, and every write lands on a physical cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Protocol

from nvoram.wear import WearMap


@dataclass(frozen=True)
class MovementRecord:
    kind: str
    reads: tuple[int, ...]
    writes: tuple[int, ...]
    group: Any = None


class WearLeveler(Protocol):
    name: str
    physical_count: int

    def translate(self, node: int) -> int: ...

    def on_access(self, memory: "NodeMemory") -> list[MovementRecord]: ...

    def on_write(self, phys: int, memory: "NodeMemory") -> MovementRecord | None: ...


class NoLeveling:
    name = "none"

    def __init__(self, node_count: int):
        self.physical_count = node_count
        self.ctr = 0

    def translate(self, node: int) -> int:
        return node

    def on_access(self, memory):
        self.ctr += 1
        return []

    def on_write(self, phys, memory):
        return None


class NodeMemory:
    """Physical cells plus wear.  ``cells`` may be ``None`` when only wear is
    tracked (no payloads)."""

    def __init__(self, leveler: WearLeveler, wear: WearMap, store_data: bool = True):
        if wear.size != leveler.physical_count:
            raise ValueError("wear map size must match the leveler's physical slot count")
        self.leveler = leveler
        self.wear = wear
        self.cells: list | None = [None] * leveler.physical_count if store_data else None
        self.movements = 0
        self.movement_writes = 0
        self.failure_access: int | None = None
        self.accesses = 0

    def begin_access(self) -> list[MovementRecord]:
        self.accesses += 1
        records = self.leveler.on_access(self)
        for rec in records:
            self._count(rec)
        return records

    def read(self, node: int):
        if self.cells is None:
            return None
        return self.cells[self.leveler.translate(node)]

    def write(self, node: int, bucket=None) -> int:
        phys = self.leveler.translate(node)
        if self.cells is not None:
            self.cells[phys] = bucket
        self.charge(phys)
        rec = self.leveler.on_write(phys, self)
        if rec is not None:
            self._count(rec)
        return phys

    def charge(self, phys: int) -> None:
        if self.wear.record_write(phys) and self.failure_access is None:
            self.failure_access = self.accesses

    def swap_cells(self, a: int, b: int) -> None:
        if self.cells is not None:
            self.cells[a], self.cells[b] = self.cells[b], self.cells[a]

    def move_cell(self, src: int, dst: int) -> None:
        if self.cells is not None:
            self.cells[dst] = self.cells[src]
            self.cells[src] = None

    def _count(self, rec: MovementRecord) -> None:
        if rec.writes:
            self.movements += 1
            self.movement_writes += len(rec.writes)
