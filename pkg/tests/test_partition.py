from fractions import Fraction

import numpy as np
import pytest

from nvoram.eoram.partition import (GroupRef, array_index_to_node, group_of, group_write_rates,
                                    node_groups, offset, partition)
from nvoram.tree import level_of

FIVE_LEVEL_GROUPS = {
    0: list(range(15, 23)),
    1: list(range(23, 27)),
    2: list(range(27, 31)),
    3: [7, 8],
    4: [9, 10],
    5: [11, 12],
    6: [13, 14],
}


def groups_by_membership(table):
    out = {}
    for node in range(table.node_count):
        g, role, y = group_of(node, table)
        entry = out.setdefault(g.mfan_node, {"partners": {}, "group": g})
        if role == "partner":
            entry["partners"][y] = node
        else:
            assert node == g.mfan_node
    return out


def test_five_level_groups():
    table = partition(5)
    assert table.mfan_level == 2
    found = groups_by_membership(table)
    assert {m: [e["partners"][y] for y in sorted(e["partners"])] for m, e in found.items()} \
        == FIVE_LEVEL_GROUPS


@pytest.mark.parametrize("levels,k", [(1, 0), (2, 0), (3, 1), (5, 2), (8, 5), (16, 12), (32, 27)])
def test_mfan_level(levels, k):
    assert partition(levels).mfan_level == k


def test_sixteen_level_layout():
    rows = partition(16).rows
    assert all(rows[l].partner_level == 15 for l in range(8))
    assert all(rows[l].partner_level == 14 for l in range(8, 11))
    assert rows[11].partner_level == 13
    assert rows[12] == (True, 12, 12, 12)
    assert [r.is_mfan for r in rows] == [True] * 13 + [False] * 3


@pytest.mark.parametrize("levels", range(1, 65))
def test_mfan_levels_are_contiguous(levels):
    table = partition(levels)
    k = table.mfan_level
    assert [r.is_mfan for r in table.rows] == [True] * (k + 1) + [False] * (levels - k - 1)
    for l, row in enumerate(table.rows):
        if row.is_mfan:
            assert row.level_from <= l <= row.level_to
            for other in range(row.level_from, row.level_to + 1):
                assert table.rows[other].partner_level == row.partner_level
            if not table.is_singleton_level(l):
                assert table.part_size(l) >= 1


def test_offset_examples():
    table = partition(5)
    assert offset(table.group(1, 0), table) == 23
    assert offset(table.group(0, 0), table) == 15
    assert offset(table.group(2, 1), table) == 9
    with pytest.raises(ValueError):
        offset(GroupRef(3, 0, 1, None), table)


def test_group_of_examples():
    table = partition(5)
    g, role, y = group_of(1, table)
    assert (g.mfan_level, g.mfan_index, role) == (1, 0, "mfan")
    g, role, y = group_of(26, table)
    assert (g.mfan_level, g.mfan_index, role, y) == (1, 0, "partner", 3)
    g, role, y = group_of(12, table)
    assert (g.mfan_node, role, y) == (5, "partner", 1)


def test_array_index_to_node_examples():
    table = partition(5)
    g = table.group(1, 0)
    assert array_index_to_node(4, g) == 1
    assert array_index_to_node(3, g) == 26
    assert array_index_to_node(0, g) == 23


@pytest.mark.parametrize("levels", range(1, 15))
def test_partition_is_total(levels):
    table = partition(levels)
    seen = np.zeros(table.node_count, dtype=int)
    total = 0
    for g in table.groups():
        total += g.size
        seen[g.mfan_node] += 1
        if not g.is_singleton:
            members = [array_index_to_node(i, g) for i in range(g.size - 1)]
            assert len({level_of(m) for m in members}) == 1
            assert level_of(members[0]) > g.mfan_level
            seen[members] += 1
    assert total == table.node_count
    assert (seen == 1).all()


@pytest.mark.parametrize("levels", [1, 3, 5, 7, 10, 12])
def test_node_groups_arrays_match_group_of(levels):
    table = partition(levels)
    ng = node_groups(table)
    for node in range(table.node_count):
        g, role, y = group_of(node, table)
        assert ng.group_level[node] == g.mfan_level
        assert ng.group_index[node] == g.mfan_index
        assert ng.size[node] == g.size
        assert ng.mfan_node[node] == g.mfan_node
        assert ng.y[node] == (-1 if y is None else y)
        assert ng.offset[node] == (-1 if g.is_singleton else g.offset)


def test_group_balance_five_levels():
    accesses = Fraction(1)
    ideal = Fraction(5, 31) * accesses
    root = (accesses + 8 * accesses / 16) / 9
    assert root == accesses / 6
    # the root group sits exactly 1/30 above ideal
    assert abs(root / ideal - 1) == Fraction(1, 30)
    level1 = (accesses / 2 + 4 * accesses / 16) / 5
    assert 1 - level1 / ideal == Fraction(7, 100)
    rates = {g.mfan_node: Fraction(r).limit_denominator(1 << 20)
             for g, r in group_write_rates(partition(5))}
    assert rates[0] == root and rates[1] == level1


def test_threshold_diagnostic_stays_near_ideal():
    # with perfect intra-group leveling the hottest group sits ~12.5% above ideal
    table = partition(16)
    ideal = 16 / table.node_count
    worst = max(r for g, r in group_write_rates(table))
    assert worst / ideal < 1.13


def test_partition_rejects_bad_levels():
    for bad in (0, 65):
        with pytest.raises(ValueError):
            partition(bad)
