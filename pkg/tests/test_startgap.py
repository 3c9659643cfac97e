import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvoram.memory import NodeMemory
from nvoram.startgap import StartGap, feistel_table
from nvoram.wear import WearMap


class SlotModel:
    """Reference: each region is a list of physical slots holding the region-local
    line index or None for the gap; a gap move copies the line just before the
    gap (wrapping from the spare slot to slot 0)."""

    def __init__(self, regions, m):
        self.m = m
        self.slots = [list(range(m)) + [None] for _ in range(regions)]

    def move(self, r):
        s = self.slots[r]
        g = s.index(None)
        src = g - 1 if g else self.m
        s[g], s[src] = s[src], None

    def phys(self, r, la):
        return r * (self.m + 1) + self.slots[r].index(la)


def mapping_from_model(sg, model):
    out = []
    for v in range(sg.node_count):
        r, la = divmod(int(sg.randomizer[v]), sg.region_size)
        out.append(model.phys(r, la))
    return out


def test_fresh_identity():
    sg = StartGap(64, regions=4, psi=100, randomizer_seed=None)
    assert sg.region_size == 16 and sg.physical_count == 68
    assert sg.mapping().tolist() == [r * 17 + i for r in range(4) for i in range(16)]


def test_single_gap_move_remaps_one_slot():
    sg = StartGap(64, regions=4, psi=100, randomizer_seed=None)
    before = sg.mapping()
    sg.move_gap(2)
    after = sg.mapping()
    changed = np.flatnonzero(before != after)
    assert changed.tolist() == [2 * 16 + 15]
    assert after[47] == before[47] + 1


def test_psi_threshold():
    sg = StartGap(64, regions=4, psi=100, randomizer_seed=None)
    for _ in range(99):
        assert sg.on_write(0) is None
    rec = sg.on_write(0)
    assert rec is not None and sg.gap[0] == 15 and sg.gap_movements == 1


def test_full_cycle_advances_start():
    sg = StartGap(64, regions=4, psi=100, randomizer_seed=None)
    before = sg.mapping()
    for _ in range(100 * 17):
        sg.on_write(0)
    assert sg.start[0] == 1 and sg.gap[0] == 16
    after = sg.mapping()
    # region 0 rotated by one slot; the others untouched
    assert after[:16].tolist() == [(i + 1) % 16 for i in range(16)]
    assert np.array_equal(after[16:], before[16:])


@pytest.mark.parametrize("n,regions,seed", [(64, 4, None), (1023, 256, 0), (511, 7, 5), (3, 256, 1)])
def test_translation_matches_slot_model(n, regions, seed):
    sg = StartGap(n, regions=regions, psi=1, randomizer_seed=seed)
    model = SlotModel(sg.regions, sg.region_size)
    rng = np.random.default_rng(n)
    for step in range(3000):
        r = int(rng.integers(sg.regions))
        sg.move_gap(r)
        model.move(r)
        if step % 97 == 0 or step < 40:
            assert sg.mapping().tolist() == mapping_from_model(sg, model)


def test_bijection_during_long_run():
    n = 1023  # L = 10
    sg = StartGap(n, regions=256, psi=100, randomizer_seed=3)
    rng = np.random.default_rng(0)
    occupied = set(range(sg.physical_count))
    for i, node in enumerate(rng.integers(0, n, 10**6).tolist()):
        sg.on_write(sg.translate(node))
        if i % 1000 == 0:
            m = sg.mapping()
            assert len(set(m.tolist())) == n and set(m.tolist()) <= occupied
            gaps = {r * (sg.region_size + 1) + sg.gap[r] for r in range(sg.regions)}
            assert not gaps & set(m.tolist())


def test_payloads_survive_gap_movement():
    n = 200
    sg = StartGap(n, regions=8, psi=3, randomizer_seed=9)
    memory = NodeMemory(sg, WearMap(sg.physical_count, wmax=2**62))
    rng = np.random.default_rng(2)
    shadow = {}
    for i in range(20_000):
        v = int(rng.integers(n))
        if rng.random() < 0.5:
            memory.write(v, ("payload", i))
            shadow[v] = ("payload", i)
        else:
            assert memory.read(v) == shadow.get(v)


def test_uniform_writes_level_out():
    n, regions, psi = 32, 4, 4
    sg = StartGap(n, regions=regions, psi=psi, randomizer_seed=1)
    memory = NodeMemory(sg, WearMap(sg.physical_count, wmax=2**62), store_data=False)
    m = sg.region_size
    writes = 100 * psi * (m + 1) * m * regions  # >= 100 start cycles per region
    for v in np.random.default_rng(4).integers(0, n, writes).tolist():
        memory.write(v)
    assert sg.gap_movements >= 100 * (m + 1) * m * regions // 2
    w = memory.wear.counters
    assert w.max() / w.mean() <= 1.1


@settings(max_examples=50)
@given(st.integers(1, 5000), st.integers(0, 2**32))
def test_feistel_is_a_bijection(n, seed):
    t = feistel_table(n, seed)
    assert sorted(t.tolist()) == list(range(n))


def test_feistel_depends_on_seed():
    assert not np.array_equal(feistel_table(1000, 1), feistel_table(1000, 2))
    assert np.array_equal(feistel_table(1000, 1), feistel_table(1000, 1))


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        StartGap(10, regions=0)
    with pytest.raises(ValueError):
        StartGap(10, psi=0)
    with pytest.raises(ValueError):
        feistel_table(0, 1)
