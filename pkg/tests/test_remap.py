import pytest
from hypothesis import given
from hypothesis import strategies as st

from nvoram.eoram.remap import mfan_position, mismatches, partner_position, simulate_swaps


@pytest.mark.parametrize("swaps,size,expected", [(0, 5, 4), (1, 5, 3), (0, 1, 0)])
def test_mfan_position_examples(swaps, size, expected):
    assert mfan_position(swaps, size) == expected


@pytest.mark.parametrize("y,swaps,size,expected", [(3, 1, 5, 4), (0, 0, 5, 0), (0, 5, 5, 1)])
def test_partner_position_examples(y, swaps, size, expected):
    assert partner_position(y, swaps, size) == expected
    assert simulate_swaps(size, swaps).index(y) == expected


def test_partner_position_rejects_mfan_slot():
    with pytest.raises(ValueError):
        partner_position(4, 0, 5)


def test_rotation_sequence():
    # [P1, P2, P3, P4, MFAN]: first swap with P4, second with P3
    assert simulate_swaps(5, 1) == [0, 1, 2, 4, 3]
    assert simulate_swaps(5, 2) == [0, 1, 4, 2, 3]


def test_formulas_match_explicit_swaps_exhaustive():
    bad = [(size, m) for size in range(1, 34) for m in mismatches(size, 10 * size)]
    assert bad == []


@given(st.integers(2, 200), st.integers(0, 10**6), st.data())
def test_positions_form_permutation(size, swaps, data):
    slots = [partner_position(y, swaps, size) for y in range(size - 1)]
    slots.append(mfan_position(swaps, size))
    assert sorted(slots) == list(range(size))
    y = data.draw(st.integers(0, size - 2))
    # the whole arrangement repeats every size*(size-1) swaps
    assert partner_position(y, swaps + size * (size - 1), size) == partner_position(y, swaps, size)
