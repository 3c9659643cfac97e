from fractions import Fraction

import numpy as np
import pytest

from nvoram.fast import level_counts
from nvoram.oram import leaf_stream
from nvoram.tree import (TreeGeometry, children, expected_writes_per_node, ideal_writes_per_node,
                         index_in_level, level_of, parent, path_nodes)


def ancestors_by_parent(levels, leaf):
    """Oracle: walk up from the leaf node with parent = (id - 1) // 2."""
    node = (1 << (levels - 1)) - 1 + leaf
    out = [node]
    while node:
        node = (node - 1) // 2
        out.append(node)
    return out[::-1]


@pytest.mark.parametrize("levels,leaf,expected", [
    (3, 0, [0, 1, 3]),
    (1, 0, [0]),
    (3, 3, [0, 2, 6]),
])
def test_path_nodes_examples(levels, leaf, expected):
    assert path_nodes(TreeGeometry(levels), leaf) == expected
    assert ancestors_by_parent(levels, leaf) == expected


@pytest.mark.parametrize("leaf", [-1, 4])
def test_path_nodes_rejects_bad_leaf(leaf):
    with pytest.raises(ValueError):
        path_nodes(TreeGeometry(3), leaf)


def test_geometry_counts():
    g = TreeGeometry(5)
    assert g.node_count == 31
    assert g.leaf_count == 16
    assert list(g.level_nodes(2)) == [3, 4, 5, 6]
    with pytest.raises(ValueError):
        TreeGeometry(0)


@pytest.mark.parametrize("levels", range(1, 13))
def test_indexing_exhaustive(levels):
    geo = TreeGeometry(levels)
    for node in range(geo.node_count):
        lvl = level_of(node)
        assert (1 << lvl) - 1 <= node <= (1 << (lvl + 1)) - 2
        assert index_in_level(node) == node - ((1 << lvl) - 1)
        if lvl < levels - 1:
            for child in children(node):
                assert parent(child) == node
    for leaf in range(geo.leaf_count):
        path = path_nodes(geo, leaf)
        assert path == ancestors_by_parent(levels, leaf)
        assert [level_of(n) for n in path] == list(range(levels))


def test_expected_writes_examples():
    g5 = TreeGeometry(5)
    n = 1000
    assert expected_writes_per_node(g5, 0, n) == n
    assert expected_writes_per_node(g5, 4, n) == Fraction(n, 16)
    g10 = TreeGeometry(10)
    assert expected_writes_per_node(g10, 0, 1) / expected_writes_per_node(g10, 9, 1) == 512
    with pytest.raises(ValueError):
        expected_writes_per_node(g5, 5, 1)


def test_ideal_writes_examples():
    assert ideal_writes_per_node(TreeGeometry(5), 31) == 5
    assert ideal_writes_per_node(TreeGeometry(1), 7) == 7
    assert ideal_writes_per_node(TreeGeometry(3), 8) == Fraction(24, 7)


@pytest.mark.parametrize("levels", [1, 2, 5, 10, 16])
def test_expected_writes_sum_to_path_writes(levels):
    geo = TreeGeometry(levels)
    a = 12345
    total = sum((1 << l) * expected_writes_per_node(geo, l, a) for l in range(levels))
    assert total == a * levels
    assert ideal_writes_per_node(geo, a) * geo.node_count == a * levels


def test_monte_carlo_level_means():
    levels, accesses = 10, 10**6
    counts = np.zeros((1 << levels) - 1, dtype=np.int64)
    for block in leaf_stream(levels, accesses, rng_seed=7):
        counts += level_counts(block, levels)
    geo = TreeGeometry(levels)
    for l in range(levels):
        seg = counts[(1 << l) - 1:(1 << (l + 1)) - 1]
        ratio = seg.mean() / float(expected_writes_per_node(geo, l, accesses))
        assert 0.98 <= ratio <= 1.02
