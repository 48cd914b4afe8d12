import random

from hypothesis import given, settings
from hypothesis import strategies as st

from gcsim.cache import CacheSet, NrpTracker, Op, Outcome
from gcsim.catalog import TechClass

from checks import hybrid_exhaustive, hybrid_set, lru_exhaustive, run_against_oracle

R, W = Op.READ, Op.WRITE


def plain(ways):
    return CacheSet(ways, TechClass.SRAM)


def test_lookup_basics():
    s = plain(2)
    assert s.lookup(7) is None
    s.access(R, 7)
    way7 = s.lookup(7)
    assert way7 is not None
    s.access(R, 8)
    assert s.lookup(7) == way7


def test_lru_victim():
    s = plain(2)
    for tag in ("A", "B", "A"):
        s.access(R, tag)
    res = s.access(R, "C")
    assert res.outcome is Outcome.MISS
    assert res.victim.tag == "B"


def test_write_hit_sets_dirty_without_victim():
    s = plain(2)
    s.access(R, 1)
    res = s.access(W, 1, payload=5)
    assert res.hit and res.victim is None
    assert s.ways[s.lookup(1)].dirty


def test_clean_victim_reported():
    s = plain(1)
    s.access(R, 1)
    res = s.access(R, 2)
    assert res.victim.tag == 1 and not res.victim.dirty
    assert res.reads == []  # clean victims need no readout


def test_lru_matches_stack_oracle_exhaustively():
    assert lru_exhaustive(8) == sum(4**n for n in range(1, 9))


def test_hybrid_exhaustive_against_oracle_short():
    assert hybrid_exhaustive(4) == sum(8**n for n in range(1, 5))


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("RW"), st.integers(0, 9)), min_size=1, max_size=60),
       st.booleans())
def test_hybrid_long_sequences_with_evictions(seq, mru):
    run_against_oracle(seq, mru=mru)


def test_hybrid_swap_example():
    s = hybrid_set(1, 2)
    s.access(R, "Y")
    s.access(R, "Y")  # promoted into the single GC way
    s.access(R, "X")  # miss into STT
    res = s.access(R, "X")
    assert res.outcome is Outcome.HIT_STT_WAY
    assert res.victim is None
    assert s.lookup("X") == 0 and s.lookup("Y") in (1, 2)


def test_hybrid_gc_hit_keeps_membership():
    s = hybrid_set()
    s.access(R, 1)
    s.access(R, 1)
    way = s.lookup(1)
    res = s.access(R, 1)
    assert res.outcome is Outcome.HIT_GC_WAY and s.lookup(1) == way


def test_nrp_literal_tick():
    s = plain(4)
    s.access(W, 1)
    for _ in range(30):
        assert s.nrp_tick() == []
    expired = s.nrp_tick()
    assert [v.tag for v in expired] == [1] and expired[0].dirty
    line = s.ways[expired[0].way]
    assert not line.valid and not line.dirty and line.nrp_counter == 0


def test_nrp_tracker_invalidates_at_31_epochs():
    epoch = 35_000_000  # 1.12 ms / 32 in ps
    s = plain(4)
    tr = NrpTracker(epoch)
    res = s.access(W, 1, now_ps=0)
    tr.reset(0, s, res.way, 0)
    assert tr.advance(31 * epoch - 1) == []
    out = tr.advance(31 * epoch)
    assert [(t, v.tag) for t, _, v in out] == [(31 * epoch, 1)]
    assert 31 * epoch == 1_085_000_000


def test_nrp_rewrites_every_30us_never_expire():
    epoch = 35_000_000
    s = plain(2)
    tr = NrpTracker(epoch)
    for k in range(200):
        t = k * 30_000_000
        assert tr.advance(t) == []
        res = s.access(W, 1, now_ps=t)
        tr.reset(0, s, res.way, t)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_nrp_tracker_agrees_with_literal_ticks(seed):
    """Random writes/reads over time: the lazy tracker invalidates the same lines
    at the same ticks as calling nrp_tick on every epoch boundary."""
    rng = random.Random(seed)
    epoch = 100
    literal = plain(4)
    lazy = plain(4)
    tracker = NrpTracker(epoch, saturate=7)
    t = 0
    for _ in range(150):
        t_next = t + rng.randrange(0, 400)
        # literal: tick at every boundary crossed
        lit_out = []
        for boundary in range(t // epoch + 1, t_next // epoch + 1):
            lit_out += [(boundary * epoch, v.tag) for v in literal.nrp_tick(saturate=7)]
        lazy_out = [(tick, v.tag) for tick, _, v in tracker.advance(t_next)]
        assert sorted(lit_out) == sorted(lazy_out)
        t = t_next
        op = rng.choice((R, W))
        tag = rng.randrange(6)
        lit_res = literal.access(op, tag, now_ps=t)
        lazy_res = lazy.access(op, tag, now_ps=t)
        assert lit_res.outcome == lazy_res.outcome
        for w in lazy_res.writes:
            tracker.reset(0, lazy, w.way, t)
        assert literal.contents() == lazy.contents()
        for way, line in enumerate(lazy.ways):
            assert tracker.counter(line) == literal.ways[way].nrp_counter
