"""Closed-form positions inside a group's rotation array.

The group is laid out as ``[P0, P1, ..., P(n-2), MFAN]``.  Each movement
swaps the MFAN with its left neighbour, wrapping from slot 0 to slot n-1,
so the location of every member depends only on the swap count.
"""

from __future__ import annotations


def mfan_position(swaps: int, size: int) -> int:
    if size < 1 or swaps < 0:
        raise ValueError("size must be >= 1 and swaps >= 0")
    return (size - 1) - swaps % size


def partner_position(y: int, swaps: int, size: int) -> int:
    if not 0 <= y < size - 1:
        raise ValueError(f"partner index {y} outside [0, {size - 1})")
    return (y + (swaps + y) // (size - 1)) % size


def simulate_swaps(size: int, swaps: int) -> list[int]:
    """Reference rotation: ``arr[k]`` is the member at slot ``k`` after
    ``swaps`` explicit MFAN swaps.  Members are partner indices
    ``0..size-2`` and ``size-1`` for the MFAN."""
    arr = list(range(size))
    at = size - 1
    for _ in range(swaps):
        left = (at - 1) % size
        arr[at], arr[left] = arr[left], arr[at]
        at = left
    return arr


def mismatches(size: int, max_swaps: int) -> list[tuple[int, int, int]]:
    """(swaps, member, slot) triples where the formulas disagree with
    :func:`simulate_swaps`, for every swap count up to ``max_swaps``."""
    bad = []
    arr = list(range(size))
    at = size - 1
    for s in range(max_swaps + 1):
        if s:
            left = (at - 1) % size
            arr[at], arr[left] = arr[left], arr[at]
            at = left
        for slot, member in enumerate(arr):
            if member == size - 1:
                got = mfan_position(s, size)
            else:
                got = partner_position(member, s, size)
            if got != slot:
                bad.append((s, member, got))
    return bad
