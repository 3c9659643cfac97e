"""Static grouping of ORAM tree nodes into MFAN / partner groups.

Each group holds one frequently written node (the MFAN) and a run of
partner nodes taken from a single, colder level.  The per-level metadata
is small enough to keep on chip; everything else (group membership,
partner offsets) is recomputed from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from nvoram.tree import index_in_level, level_of

MAX_LEVELS = 64


class LevelRow(NamedTuple):
    """One lookup-table entry.

    MFAN levels store the level their partners live on plus the range of
    MFAN levels sharing it.  Partner levels store their own level and the
    MFAN range they serve.  A singleton MFAN level points at itself.
    """

    is_mfan: bool
    partner_level: int
    level_from: int
    level_to: int


@dataclass(frozen=True)
class GroupRef:
    mfan_level: int
    mfan_index: int
    size: int
    offset: int | None

    @property
    def mfan_node(self) -> int:
        return (1 << self.mfan_level) - 1 + self.mfan_index

    @property
    def is_singleton(self) -> bool:
        return self.size == 1


class Membership(NamedTuple):
    group: GroupRef
    role: str  # "mfan" or "partner"
    y: int | None


@dataclass(frozen=True)
class PartitionTable:
    levels: int
    rows: tuple[LevelRow, ...]

    @property
    def mfan_level(self) -> int:
        """K: the deepest level whose nodes are MFANs (possibly of singleton groups)."""
        return max(l for l, row in enumerate(self.rows) if row.is_mfan)

    @property
    def node_count(self) -> int:
        return (1 << self.levels) - 1

    def is_singleton_level(self, level: int) -> bool:
        row = self.rows[level]
        return row.is_mfan and row.partner_level == level

    def span(self, level: int) -> int:
        """Number of MFAN levels sharing this row's partner level."""
        row = self.rows[level]
        return row.level_to - row.level_from + 1

    def chunk_size(self, level: int) -> int:
        """Partner nodes reserved per MFAN level of this row's range.

        Rounded down to a multiple of ``2**level_to`` so that every MFAN in
        the range gets a whole number of partners; the remainder of the
        partner level (empty whenever the span is a power of two) is left
        as singleton groups.
        """
        row = self.rows[level]
        unit = 1 << row.level_to
        return ((1 << row.partner_level) // (self.span(level) * unit)) * unit

    def part_size(self, mfan_level: int) -> int:
        return self.chunk_size(mfan_level) >> mfan_level

    def group(self, mfan_level: int, mfan_index: int) -> GroupRef:
        if not 0 <= mfan_level < self.levels or not self.rows[mfan_level].is_mfan:
            raise ValueError(f"level {mfan_level} is not an MFAN level")
        if not 0 <= mfan_index < (1 << mfan_level):
            raise ValueError(f"index {mfan_index} outside level {mfan_level}")
        if self.is_singleton_level(mfan_level):
            return GroupRef(mfan_level, mfan_index, 1, None)
        part = self.part_size(mfan_level)
        return GroupRef(mfan_level, mfan_index, part + 1,
                        _offset(self, mfan_level, mfan_index))

    def groups(self) -> Iterator[GroupRef]:
        """All groups, MFAN groups level by level, then leftover partner singletons."""
        for l, row in enumerate(self.rows):
            if row.is_mfan:
                for j in range(1 << l):
                    yield self.group(l, j)
        for l, row in enumerate(self.rows):
            if not row.is_mfan:
                used = self.span(l) * self.chunk_size(l)
                for pos in range(used, 1 << l):
                    yield GroupRef(l, pos, 1, None)


def partition(levels: int) -> PartitionTable:
    """Build the grouping table for a tree of ``levels`` levels.

    A subtree forest of height ``h`` pairs its top ``h // 2`` levels with
    its bottom level, then recurses on the levels in between.  A forest of
    height one becomes singleton groups.
    """
    if not 1 <= levels <= MAX_LEVELS:
        raise ValueError(f"levels must be in [1, {MAX_LEVELS}], got {levels}")
    rows = [LevelRow(False, 0, 0, 0)] * levels
    top, height = 0, levels
    while height > 0:
        if height == 1:
            rows[top] = LevelRow(True, top, top, top)
            break
        t = height // 2
        bottom = top + height - 1
        for i in range(top, top + t):
            rows[i] = LevelRow(True, bottom, top, top + t - 1)
        rows[bottom] = LevelRow(False, bottom, top, top + t - 1)
        top, height = top + t, height - t - 1
    return PartitionTable(levels, tuple(rows))


def _offset(table: PartitionTable, mfan_level: int, mfan_index: int) -> int:
    row = table.rows[mfan_level]
    chunk = table.chunk_size(mfan_level)
    chunk_id = mfan_level - row.level_from
    return ((1 << row.partner_level) - 1 + chunk_id * chunk
            + mfan_index * (chunk >> mfan_level))


def offset(group: GroupRef, table: PartitionTable) -> int:
    """First partner node of ``group``: level start + chunk start + part start."""
    if group.is_singleton:
        raise ValueError(f"singleton group at node {group.mfan_node} has no partners")
    return _offset(table, group.mfan_level, group.mfan_index)


def group_of(node: int, table: PartitionTable) -> Membership:
    if not 0 <= node < table.node_count:
        raise ValueError(f"node {node} outside tree of {table.levels} levels")
    level = level_of(node)
    row = table.rows[level]
    pos = index_in_level(node)
    if row.is_mfan:
        return Membership(table.group(level, pos), "mfan", None)
    chunk = table.chunk_size(level)
    chunk_id = pos // chunk
    if chunk_id >= table.span(level):
        return Membership(GroupRef(level, pos, 1, None), "mfan", None)
    mfan_level = row.level_from + chunk_id
    part = chunk >> mfan_level
    within = pos - chunk_id * chunk
    return Membership(table.group(mfan_level, within // part), "partner", within % part)


def array_index_to_node(idx: int, group: GroupRef) -> int:
    """Physical node behind slot ``idx`` of a group's rotation array."""
    if not 0 <= idx < group.size:
        raise ValueError(f"index {idx} outside group of size {group.size}")
    if idx == group.size - 1:
        return group.mfan_node
    return group.offset + idx


@dataclass(frozen=True)
class NodeGroups:
    """Per-node group membership as flat arrays, for vectorised or jitted use.

    ``y`` is -1 for MFAN (and singleton) nodes; ``offset`` is -1 for
    singletons.
    """

    group_level: np.ndarray
    group_index: np.ndarray
    size: np.ndarray
    offset: np.ndarray
    mfan_node: np.ndarray
    y: np.ndarray


def node_groups(table: PartitionTable) -> NodeGroups:
    n = table.node_count
    g_level = np.empty(n, dtype=np.int64)
    g_index = np.empty(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    off = np.full(n, -1, dtype=np.int64)
    y = np.full(n, -1, dtype=np.int64)
    for l, row in enumerate(table.rows):
        first = (1 << l) - 1
        pos = np.arange(1 << l, dtype=np.int64)
        nodes = first + pos
        if row.is_mfan:
            g_level[nodes] = l
            g_index[nodes] = pos
            if not table.is_singleton_level(l):
                chunk = table.chunk_size(l)
                part = chunk >> l
                size[nodes] = part + 1
                off[nodes] = ((1 << row.partner_level) - 1
                              + (l - row.level_from) * chunk + pos * part)
            continue
        chunk = table.chunk_size(l)
        chunk_id = pos // chunk
        leftover = chunk_id >= table.span(l)
        g_level[nodes[leftover]] = l
        g_index[nodes[leftover]] = pos[leftover]
        keep = ~leftover
        mfan_level = row.level_from + chunk_id[keep]
        part = chunk >> mfan_level
        within = pos[keep] - chunk_id[keep] * chunk
        g_level[nodes[keep]] = mfan_level
        g_index[nodes[keep]] = within // part
        size[nodes[keep]] = part + 1
        y[nodes[keep]] = within % part
        off[nodes[keep]] = first + chunk_id[keep] * chunk + (within // part) * part
    mfan = (np.int64(1) << g_level) - 1 + g_index
    return NodeGroups(g_level, g_index, size, off, mfan, y)


def group_write_rates(table: PartitionTable) -> list[tuple[GroupRef, float]]:
    """Expected writes per node per access for every group, assuming perfect
    intra-group leveling.  Diagnostic for checking the threshold choice."""
    out = []
    for g in table.groups():
        if g.is_singleton:
            out.append((g, 2.0 ** -g.mfan_level))
            continue
        partner_level = level_of(g.offset)
        rate = 2.0 ** -g.mfan_level + (g.size - 1) * 2.0 ** -partner_level
        out.append((g, rate / g.size))
    return out
