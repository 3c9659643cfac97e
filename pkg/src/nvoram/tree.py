"""Path ORAM tree geometry with breadth-first (heap-style) node numbering."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class TreeGeometry:
    """Shape of a full binary ORAM tree.

    Node 0 is the root; level ``l`` holds node ids ``2**l - 1`` through
    ``2**(l+1) - 2`` and leaves sit on level ``levels - 1``.
    """

    levels: int
    bucket_slots: int = 4
    block_bytes: int = 64

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        if self.bucket_slots < 1:
            raise ValueError(f"bucket_slots must be >= 1, got {self.bucket_slots}")
        if self.block_bytes < 1:
            raise ValueError(f"block_bytes must be >= 1, got {self.block_bytes}")

    @property
    def node_count(self) -> int:
        return (1 << self.levels) - 1

    @property
    def leaf_count(self) -> int:
        return 1 << (self.levels - 1)

    def level_nodes(self, level: int) -> range:
        return range((1 << level) - 1, (1 << (level + 1)) - 1)


def level_of(node: int) -> int:
    return (node + 1).bit_length() - 1


def index_in_level(node: int) -> int:
    return node - ((1 << level_of(node)) - 1)


def parent(node: int) -> int:
    if node <= 0:
        raise ValueError("root has no parent")
    return (node - 1) // 2


def children(node: int) -> tuple[int, int]:
    return 2 * node + 1, 2 * node + 2


def path_nodes(geometry: TreeGeometry, leaf_index: int) -> list[int]:
    """Node ids from the root down to leaf ``leaf_index``."""
    if not 0 <= leaf_index < geometry.leaf_count:
        raise ValueError(
            f"leaf_index {leaf_index} outside [0, {geometry.leaf_count})"
        )
    depth = geometry.levels - 1
    return [(1 << l) - 1 + (leaf_index >> (depth - l)) for l in range(geometry.levels)]


def node_on_path(geometry: TreeGeometry, leaf_index: int, level: int) -> int:
    return (1 << level) - 1 + (leaf_index >> (geometry.levels - 1 - level))


def expected_writes_per_node(geometry: TreeGeometry, level: int, accesses: int) -> Fraction:
    """Expected writes to one node of ``level`` after ``accesses`` uniform path accesses."""
    if not 0 <= level < geometry.levels:
        raise ValueError(f"level {level} outside [0, {geometry.levels})")
    return Fraction(accesses, 1 << level)


def ideal_writes_per_node(geometry: TreeGeometry, accesses: int) -> Fraction:
    """Per-node writes if every bucket wore evenly."""
    if accesses < 0:
        raise ValueError("accesses must be non-negative")
    return Fraction(accesses * geometry.levels, geometry.node_count)
