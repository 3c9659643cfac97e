"""Functional Path ORAM: position map, stash, path read and greedy write-back.

Encryption is not modelled; what matters for wear is that every access
rewrites all buckets on the path it read.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from nvoram.memory import NodeMemory, NoLeveling
from nvoram.tree import TreeGeometry, path_nodes
from nvoram.wear import WearMap

READ = "read"
WRITE = "write"
DEFAULT_STASH = 200
LEAF_BATCH = 1 << 16


class OramError(RuntimeError):
    pass


class StashOverflow(OramError):
    def __init__(self, access_count: int, occupancy: int, capacity: int):
        super().__init__(
            f"stash overflow at access {access_count}: {occupancy} > {capacity} entries"
        )
        self.access_count = access_count
        self.occupancy = occupancy
        self.capacity = capacity


class UnallocatedBlock(OramError):
    pass


@dataclass(frozen=True)
class AccessRecord:
    op: str
    block: int
    leaf: int
    path: tuple[int, ...]
    stash_occupancy_after: int


@dataclass
class OramState:
    geometry: TreeGeometry
    memory: NodeMemory
    max_blocks: int
    stash_capacity: int = DEFAULT_STASH
    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    check: bool = False

    def __post_init__(self):
        self.posmap: dict[int, int] = {}
        self.stash: dict[int, tuple[int, object]] = {}
        self.access_count = 0
        self.max_stash = 0
        self._depth = self.geometry.levels - 1
        self._leaf_buf: list[int] = []

    @classmethod
    def create(cls, levels: int, bucket_slots: int = 4, max_blocks: int | None = None,
               stash_capacity: int = DEFAULT_STASH, seed: int = 0, memory=None,
               check: bool = False) -> "OramState":
        geo = TreeGeometry(levels, bucket_slots)
        if memory is None:
            memory = NodeMemory(NoLeveling(geo.node_count),
                                WearMap(geo.node_count, wmax=2**62))
        return cls(geo, memory, max_blocks if max_blocks is not None else geo.leaf_count,
                   stash_capacity, np.random.default_rng(seed), check)

    def random_leaf(self) -> int:
        if not self._leaf_buf:
            self._leaf_buf = self.rng.integers(
                0, self.geometry.leaf_count, size=1024).tolist()[::-1]
        return self._leaf_buf.pop()

    def place(self, block: int, leaf: int, payload, node: int | None = None) -> None:
        """Seed a block directly into a bucket (or the stash) without an access.
        For hand-built scenarios; does not charge wear."""
        self.posmap[block] = leaf
        if node is None:
            self.stash[block] = (leaf, payload)
            return
        if node not in path_nodes(self.geometry, leaf):
            raise ValueError(f"node {node} is not on the path to leaf {leaf}")
        cells = self.memory.cells
        phys = self.memory.leveler.translate(node)
        bucket = list(cells[phys] or ())
        if len(bucket) >= self.geometry.bucket_slots:
            raise ValueError(f"bucket {node} is full")
        bucket.append((block, leaf, payload))
        cells[phys] = tuple(bucket)

    def blocks_in_tree(self) -> dict[int, int]:
        """block id -> logical node, scanning every bucket."""
        found: dict[int, int] = {}
        for node in range(self.geometry.node_count):
            for block, _, _ in self.memory.read(node) or ():
                if block in found:
                    raise OramError(f"block {block} stored twice")
                found[block] = node
        return found

    def access(self, op: str, block: int, payload=None, new_leaf: int | None = None):
        return oram_access(self, op, block, payload, new_leaf)


def oram_access(state: OramState, op: str, block: int, payload=None,
                new_leaf: int | None = None):
    """One Path ORAM access; returns ``(payload or None, AccessRecord)``.

    ``new_leaf`` forces the remap target (for hand-built scenarios).
    """
    if not 0 <= block < state.max_blocks:
        raise ValueError(f"block {block} outside [0, {state.max_blocks})")
    if op not in (READ, WRITE):
        raise ValueError(f"unknown op {op!r}")
    geo = state.geometry
    leaf = state.posmap.get(block)
    if leaf is None:
        if op == READ:
            raise UnallocatedBlock(f"block {block} has never been written")
        leaf = state.random_leaf()
    state.access_count += 1
    mem = state.memory
    mem.begin_access()

    path = path_nodes(geo, leaf)
    stash = state.stash
    for node in path:
        for b, b_leaf, data in mem.read(node) or ():
            stash[b] = (b_leaf, data)
    before = set(stash) | {block} if state.check else None

    if op == READ:
        result = stash[block][1]
    else:
        result = None
    fresh = state.random_leaf() if new_leaf is None else new_leaf
    state.posmap[block] = fresh
    stash[block] = (fresh, payload if op == WRITE else stash[block][1])

    _write_back(state, leaf, path)

    occ = len(stash)
    state.max_stash = max(state.max_stash, occ)
    if state.check:
        after = set(stash)
        for node in path:
            after.update(b for b, _, _ in mem.read(node) or ())
        if after != before:
            raise OramError(f"block conservation violated at access {state.access_count}")
    if occ > state.stash_capacity:
        raise StashOverflow(state.access_count, occ, state.stash_capacity)
    return result, AccessRecord(op, block, leaf, tuple(path), occ)


def _write_back(state: OramState, leaf: int, path: list[int]) -> None:
    """Drain the stash into the path, filling the deepest bucket first; at
    each bucket the lowest block ids that may live there go first.  Buckets
    are then written root first."""
    depth = state._depth
    z = state.geometry.bucket_slots
    by_level: list[list[int]] = [[] for _ in range(depth + 1)]
    for b, (b_leaf, _) in state.stash.items():
        by_level[depth - (b_leaf ^ leaf).bit_length()].append(b)
    pool: list[int] = []
    buckets = []
    for level in range(depth, -1, -1):
        if by_level[level]:
            pool.extend(by_level[level])
            pool.sort(reverse=True)
        take = [pool.pop() for _ in range(min(z, len(pool)))]
        buckets.append((path[level], take))
    stash = state.stash
    mem = state.memory
    for node, take in reversed(buckets):
        mem.write(node, tuple((b, *stash.pop(b)) for b in take))


def leaf_stream(levels: int, count: int, rng_seed: int,
                batch: int = LEAF_BATCH) -> Iterator[np.ndarray]:
    """Uniform leaf indices in blocks of ``batch``; deterministic per seed."""
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = np.random.default_rng(rng_seed)
    leaves = 1 << (levels - 1)
    done = 0
    while done < count:
        n = min(batch, count - done)
        yield rng.integers(0, leaves, size=n, dtype=np.int64)
        done += n


def iter_leaves(levels: int, count: int, rng_seed: int) -> Iterator[int]:
    for block in leaf_stream(levels, count, rng_seed):
        yield from block.tolist()
