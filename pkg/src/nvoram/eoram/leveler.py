"""E-ORAM wear leveler: executed MFAN movements plus closed-form translation."""

from __future__ import annotations

import numpy as np

from nvoram.eoram.partition import (GroupRef, NodeGroups, PartitionTable, array_index_to_node,
                                    group_of, node_groups)
from nvoram.eoram.remap import mfan_position, partner_position
from nvoram.eoram.schedule import BALANCED, SchedulerState, schedule, swaps_so_far
from nvoram.memory import MovementRecord


def translate(node: int, ctr: int, table: PartitionTable, freq: int, mode: str) -> int:
    """Physical home of logical ``node`` once the counter reads ``ctr``.

    Needs nothing but the counter and the static table.
    """
    group, role, y = group_of(node, table)
    if group.is_singleton:
        return node
    s = swaps_so_far(group.mfan_level, group.mfan_index, ctr, freq, table.mfan_level, mode)
    if role == "mfan":
        idx = mfan_position(s, group.size)
    else:
        idx = partner_position(y, s, group.size)
    return array_index_to_node(idx, group)


def translate_all(ctr: int, groups: NodeGroups, freq: int, k: int, mode: str) -> np.ndarray:
    """Vectorised :func:`translate` over every node."""
    n = len(groups.size)
    level, index, size = groups.group_level, groups.group_index, groups.size
    if ctr <= 0:
        return np.arange(n, dtype=np.int64)
    if mode == BALANCED:
        d = max(1, freq // (k + 1))
        instant = (level + 1) * d
        last = np.where(ctr >= instant, (ctr - instant) // freq, -1)
        s = np.where(last >= index, ((last - index) >> level) + 1, 0)
    else:
        s = (ctr // freq) >> level
    s = np.where(level > k, 0, s)
    is_mfan = groups.y < 0
    partner = np.maximum(size - 1, 1)
    idx = np.where(is_mfan, (size - 1) - s % size,
                   (groups.y + (s + groups.y) // partner) % size)
    phys = np.where(idx == size - 1, groups.mfan_node, groups.offset + idx)
    return np.where(size == 1, np.arange(n, dtype=np.int64), phys)


class EoramLeveler:
    """Keeps an explicit logical<->physical map that is updated by each
    executed movement; :func:`translate` must always agree with it."""

    name = "eoram"

    def __init__(self, table: PartitionTable, freq: int = 10_000, mode: str = BALANCED):
        self.table = table
        self.sched = SchedulerState(freq=freq, mode=mode, mfan_level=table.mfan_level)
        self.physical_count = table.node_count
        self.phys_of = list(range(table.node_count))
        self.log_of = list(range(table.node_count))
        self.executed: dict[tuple[int, int], int] = {}
        self._groups: NodeGroups | None = None

    @property
    def ctr(self) -> int:
        return self.sched.ctr

    @property
    def groups(self) -> NodeGroups:
        if self._groups is None:
            self._groups = node_groups(self.table)
        return self._groups

    def translate(self, node: int) -> int:
        return self.phys_of[node]

    def on_access(self, memory) -> list[MovementRecord]:
        self.sched.tick()
        return [self.perform_movement(g, memory) for g in schedule(self.sched, self.table)]

    def on_write(self, phys, memory):
        return None

    def perform_movement(self, group: GroupRef, memory=None) -> MovementRecord:
        """Swap the MFAN with its left neighbour: 2 node reads, 2 node writes."""
        key = (group.mfan_level, group.mfan_index)
        if group.is_singleton:
            return MovementRecord("mfan", (), (), key)
        s = self.executed.get(key, 0)
        src = array_index_to_node(mfan_position(s, group.size), group)
        dst = array_index_to_node(mfan_position(s + 1, group.size), group)
        mfan, other = self.log_of[src], self.log_of[dst]
        self.phys_of[mfan], self.phys_of[other] = dst, src
        self.log_of[src], self.log_of[dst] = other, mfan
        self.executed[key] = s + 1
        if memory is not None:
            memory.swap_cells(src, dst)
            memory.charge(src)
            memory.charge(dst)
        return MovementRecord("mfan", (src, dst), (src, dst), key)

    def mapping(self) -> np.ndarray:
        return np.asarray(self.phys_of, dtype=np.int64)
