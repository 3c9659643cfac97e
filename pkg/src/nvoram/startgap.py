"""Region-based Start-Gap applied at ORAM-node granularity.

Logical nodes first pass through a static keyed permutation, then the
intermediate address space is cut into equal regions.  Each region owns
one spare slot (the gap) and a start register; every ``psi`` writes to a
region the gap moves down by one slot, and once it wraps the start
register advances, rotating the whole region by one.
"""

from __future__ import annotations

import random

import numpy as np

from nvoram.memory import MovementRecord

MASK64 = (1 << 64) - 1
ROUNDS = 4


def _round_fn(x: np.ndarray, key: int, bits: int) -> np.ndarray:
    z = (x + np.uint64(key)) * np.uint64(0x9E3779B97F4A7C15)
    z ^= z >> np.uint64(29)
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(32)
    return z & np.uint64((1 << bits) - 1)


def _feistel(x: np.ndarray, keys: list[int], half: int) -> np.ndarray:
    mask = np.uint64((1 << half) - 1)
    left, right = x >> np.uint64(half), x & mask
    for k in keys:
        left, right = right, left ^ _round_fn(right, k, half)
    return (left << np.uint64(half)) | right


def feistel_table(n: int, seed: int) -> np.ndarray:
    """Keyed bijection of ``range(n)`` (4-round Feistel with cycle walking)."""
    if n < 1:
        raise ValueError("domain must be non-empty")
    half = max(1, (max(n - 1, 1).bit_length() + 1) // 2)
    rng = random.Random(seed)
    keys = [rng.getrandbits(64) for _ in range(ROUNDS)]
    out = _feistel(np.arange(n, dtype=np.uint64), keys, half)
    lim = np.uint64(n)
    pending = out >= lim
    while pending.any():
        out[pending] = _feistel(out[pending], keys, half)
        pending = out >= lim
    return out.astype(np.int64)


class StartGap:
    name = "startgap"

    def __init__(self, node_count: int, regions: int = 256, psi: int = 100,
                 randomizer_seed: int | None = 0):
        if regions < 1 or psi < 1:
            raise ValueError("regions and psi must be positive")
        self.node_count = node_count
        self.regions = min(regions, node_count)
        self.region_size = -(-node_count // self.regions)
        self.psi = psi
        self.randomizer_seed = randomizer_seed
        if randomizer_seed is None:
            self.randomizer = np.arange(node_count, dtype=np.int64)
        else:
            self.randomizer = feistel_table(node_count, randomizer_seed)
        self._rand = self.randomizer.tolist()
        self.start = [0] * self.regions
        self.gap = [self.region_size] * self.regions
        self.write_ctr = [0] * self.regions
        self.gap_movements = 0
        self.physical_count = self.regions * (self.region_size + 1)

    def translate(self, node: int) -> int:
        m = self.region_size
        r, la = divmod(self._rand[node], m)
        pa = (la + self.start[r]) % m
        if pa >= self.gap[r]:
            pa += 1
        return r * (m + 1) + pa

    def on_access(self, memory):
        return []

    def on_write(self, phys: int, memory=None) -> MovementRecord | None:
        m = self.region_size
        r = phys // (m + 1)
        self.write_ctr[r] += 1
        if self.write_ctr[r] % self.psi:
            return None
        return self.move_gap(r, memory)

    def move_gap(self, r: int, memory=None) -> MovementRecord:
        m = self.region_size
        base = r * (m + 1)
        g = self.gap[r]
        if g == 0:
            src, dst = base + m, base
            self.gap[r] = m
            self.start[r] = (self.start[r] + 1) % m
        else:
            src, dst = base + g - 1, base + g
            self.gap[r] = g - 1
        self.gap_movements += 1
        if memory is not None:
            memory.move_cell(src, dst)
            memory.charge(dst)
        return MovementRecord("gap", (src,), (dst,), r)

    def mapping(self) -> np.ndarray:
        return np.array([self.translate(v) for v in range(self.node_count)], dtype=np.int64)
