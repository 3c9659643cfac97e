"""When each group's MFAN moves, driven only by the global access counter.

Naive mode moves every group of levels ``0..k`` at once at each multiple
of ``X``, where ``k`` is how many times two divides the checkpoint number
(capped at K).  Balanced mode moves the same groups over the same period
but one at a time: in window ``c`` (accesses ``cX .. cX+X``) level ``r``
moves group ``c mod 2**r`` at counter value ``cX + (r+1)*D`` with
``D = X // (K+1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from nvoram.eoram.partition import GroupRef, PartitionTable

NAIVE = "naive"
BALANCED = "balanced"
MODES = (NAIVE, BALANCED)

COUNTER_BITS = 64


def two_adic_valuation(c: int) -> int:
    return (c & -c).bit_length() - 1


def spread_interval(freq: int, mfan_level: int) -> int:
    return max(1, freq // (mfan_level + 1))


def check_frequency(freq: int, mfan_level: int) -> None:
    if freq < mfan_level + 1:
        raise ValueError(
            f"wear-leveling frequency {freq} must be >= K+1 = {mfan_level + 1}"
        )


def due_levels(ctr: int, freq: int, mfan_level: int, mode: str) -> list[tuple[int, int]]:
    """(level, window) pairs whose groups move when the counter reads ``ctr``.

    In naive mode every group of the returned level moves; in balanced mode
    only group ``window mod 2**level``.
    """
    if ctr <= 0:
        return []
    if mode == NAIVE:
        if ctr % freq:
            return []
        c = ctr // freq
        k = min(mfan_level, two_adic_valuation(c))
        return [(r, c) for r in range(k + 1)]
    if mode != BALANCED:
        raise ValueError(f"unknown scheduler mode {mode!r}")
    d = spread_interval(freq, mfan_level)
    m = ctr % freq
    if m == 0:
        # instant (r+1)*D == X lands on the first access of the next window
        m, c = freq, ctr // freq - 1
    else:
        c = ctr // freq
    if m % d:
        return []
    r = m // d - 1
    if r > mfan_level:
        return []
    return [(r, c)]


def swaps_so_far(mfan_level: int, mfan_index: int, ctr: int, freq: int,
                 k: int, mode: str) -> int:
    """Number of movements group (mfan_level, mfan_index) has made once the
    counter reads ``ctr`` (movements at ``ctr`` itself included)."""
    if mfan_level > k or ctr <= 0:
        return 0
    if mode == NAIVE:
        return (ctr // freq) >> mfan_level
    if mode != BALANCED:
        raise ValueError(f"unknown scheduler mode {mode!r}")
    instant = (mfan_level + 1) * spread_interval(freq, k)
    if ctr < instant:
        return 0
    last_window = (ctr - instant) // freq
    if last_window < mfan_index:
        return 0
    return ((last_window - mfan_index) >> mfan_level) + 1


@dataclass
class SchedulerState:
    freq: int
    mode: str
    mfan_level: int
    ctr: int = 0
    movements: int = field(default=0)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown scheduler mode {self.mode!r}")
        check_frequency(self.freq, self.mfan_level)

    @property
    def spread_interval(self) -> int:
        return spread_interval(self.freq, self.mfan_level)

    def tick(self) -> int:
        self.ctr += 1
        if self.ctr >= 1 << COUNTER_BITS:
            raise OverflowError("access counter exceeded 64 bits")
        return self.ctr


def schedule(state: SchedulerState, table: PartitionTable) -> list[GroupRef]:
    """Groups to move at the current counter value (call after ``tick``)."""
    out = []
    for level, window in due_levels(state.ctr, state.freq, state.mfan_level, state.mode):
        if state.mode == NAIVE:
            out.extend(table.group(level, j) for j in range(1 << level))
        else:
            out.append(table.group(level, window % (1 << level)))
    return out
