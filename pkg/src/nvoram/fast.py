"""Jitted wear replay for leaf streams (no payloads, no stash).

Each kernel consumes one block of leaf indices and mirrors, write for
write, what :class:`nvoram.memory.NodeMemory` does with the matching
leveler: movements at the start of an access, then the path buckets
written root first.  Kernel state lives in a small int64 vector so blocks
can be chained and the run stopped at the exact failing access.
"""

from __future__ import annotations

import numpy as np
from numba import njit

CTR, FAILED, THRESHOLD, FAIL_AT, MOVES, MOVE_WRITES = range(6)


def new_state(threshold: int, ctr: int = 0) -> np.ndarray:
    st = np.zeros(6, dtype=np.int64)
    st[CTR] = ctr
    st[THRESHOLD] = threshold
    st[FAIL_AT] = -1
    return st


@njit(cache=True, inline="always")
def _charge(wear, p, wmax, st):
    c = wear[p] + 1
    wear[p] = c
    if c == wmax:
        st[FAILED] += 1
        if st[FAILED] > st[THRESHOLD] and st[FAIL_AT] < 0:
            st[FAIL_AT] = st[CTR]


@njit(cache=True)
def run_none(leaves, levels, wear, wmax, st):
    depth = levels - 1
    for t in range(leaves.shape[0]):
        st[CTR] += 1
        leaf = leaves[t]
        for l in range(levels):
            _charge(wear, (1 << l) - 1 + (leaf >> (depth - l)), wmax, st)
        if st[FAIL_AT] >= 0:
            return t + 1
    return leaves.shape[0]


@njit(cache=True, inline="always")
def _move(m_node, wear, wmax, st, phys_of, log_of, size, offset, executed):
    n = size[m_node]
    if n == 1:
        return
    s = executed[m_node]
    i_src = (n - 1) - s % n
    i_dst = (n - 1) - (s + 1) % n
    src = m_node if i_src == n - 1 else offset[m_node] + i_src
    dst = m_node if i_dst == n - 1 else offset[m_node] + i_dst
    a = log_of[src]
    b = log_of[dst]
    phys_of[a] = dst
    phys_of[b] = src
    log_of[src] = b
    log_of[dst] = a
    executed[m_node] = s + 1
    st[MOVES] += 1
    st[MOVE_WRITES] += 2
    _charge(wear, src, wmax, st)
    _charge(wear, dst, wmax, st)


@njit(cache=True)
def run_eoram(leaves, levels, wear, wmax, st, phys_of, log_of, size, offset,
              executed, freq, k, balanced, spread):
    depth = levels - 1
    for t in range(leaves.shape[0]):
        ctr = st[CTR] + 1
        st[CTR] = ctr
        if balanced:
            m = ctr % freq
            c = ctr // freq
            if m == 0:
                m = freq
                c -= 1
            if m % spread == 0:
                r = m // spread - 1
                if r <= k:
                    _move((1 << r) - 1 + c % (1 << r), wear, wmax, st,
                          phys_of, log_of, size, offset, executed)
        elif ctr % freq == 0:
            c = ctr // freq
            top = 0
            while top < k and (c >> (top + 1)) << (top + 1) == c:
                top += 1
            for r in range(top + 1):
                first = (1 << r) - 1
                for j in range(1 << r):
                    _move(first + j, wear, wmax, st, phys_of, log_of, size,
                          offset, executed)
        leaf = leaves[t]
        for l in range(levels):
            _charge(wear, phys_of[(1 << l) - 1 + (leaf >> (depth - l))], wmax, st)
        if st[FAIL_AT] >= 0:
            return t + 1
    return leaves.shape[0]


@njit(cache=True)
def run_startgap(leaves, levels, wear, wmax, st, perm, start, gap, wctr,
                 region_size, psi):
    depth = levels - 1
    m = region_size
    for t in range(leaves.shape[0]):
        st[CTR] += 1
        leaf = leaves[t]
        for l in range(levels):
            a = perm[(1 << l) - 1 + (leaf >> (depth - l))]
            r = a // m
            pa = (a % m + start[r]) % m
            if pa >= gap[r]:
                pa += 1
            base = r * (m + 1)
            _charge(wear, base + pa, wmax, st)
            wctr[r] += 1
            if wctr[r] % psi == 0:
                g = gap[r]
                if g == 0:
                    dst = base
                    gap[r] = m
                    start[r] = (start[r] + 1) % m
                else:
                    dst = base + g
                    gap[r] = g - 1
                st[MOVES] += 1
                st[MOVE_WRITES] += 1
                _charge(wear, dst, wmax, st)
        if st[FAIL_AT] >= 0:
            return t + 1
    return leaves.shape[0]


def level_counts(leaves: np.ndarray, levels: int) -> np.ndarray:
    """Per-node write counts for a leaf block with no leveling (vectorised)."""
    counts = np.zeros((1 << levels) - 1, dtype=np.int64)
    leaf_hist = np.bincount(leaves, minlength=1 << (levels - 1))
    for l in range(levels - 1, -1, -1):
        counts[(1 << l) - 1:(1 << (l + 1)) - 1] += leaf_hist
        if l:
            leaf_hist = leaf_hist.reshape(-1, 2).sum(axis=1)
    return counts
