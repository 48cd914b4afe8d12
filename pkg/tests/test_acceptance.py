"""Acceptance suite: one test per criterion, run at the stated tolerances.

A summary line per criterion is printed at the end of the pytest run (see
conftest.py). Slow shipped-config runs are cached so that criteria 4, 7 and 12
share them.
"""
import random
import time
from fractions import Fraction
from pathlib import Path

from gcsim import report
from gcsim.catalog import Level, TechClass, builtin_params, dram_params
from gcsim.cli import main, resolve_config_path, shipped_configs
from gcsim.config import load_run_config, preset, validate
from gcsim.energy import LINE_BITS
from gcsim.engine import Simulator, simulate, simulate_run, trace_from_spec
from gcsim.trace import Trace, TraceHeader, TraceRecord, gen_random

from checks import hybrid_exhaustive, lru_exhaustive, run_against_oracle
from oracles import FIELDS, reprice

GOLDEN = Path(__file__).parent / "golden" / "published_params.txt"

_shipped = {}


def shipped(name):
    """First run of a shipped config, cached for the session."""
    if name not in _shipped:
        _shipped[name] = simulate_run(load_run_config(resolve_config_path(name)))
    return _shipped[name]


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


# -- 1 -------------------------------------------------------------------------

def test_criterion_01_parameter_fidelity(record_property):
    """Published technology parameters match the golden tables exactly (< 1 s)."""
    with Timer() as tm:
        checked = 0
        for line in GOLDEN.read_text().splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            level, tech, field, expected = line.split()
            if level == "DRAM":
                actual = getattr(dram_params(), field)
            elif level == "LLC-HYBRID":
                actual = getattr(builtin_params(Level.LLC, TechClass(tech), hybrid=True), field)
            else:
                actual = getattr(builtin_params(Level(level), TechClass(tech)), field)
            if expected == "-":
                assert actual is None, (level, tech, field)
            else:
                assert str(actual) == expected, (level, tech, field, actual)
            checked += 1
    record_property("detail", f"{checked} fields, {tm.seconds:.2f} s")
    assert tm.seconds < 1


# -- 2 -------------------------------------------------------------------------

def test_criterion_02_refresh_occupancy(record_property):
    """Idle 10 ms on one GC 256-row subarray: busy 0.0686% +- 0.001 pp, 2285 or 2286 events (< 1 s)."""
    with Timer() as tm:
        # 16 KB direct-mapped: 256 sets of one way, one 256-row subarray
        h = preset("all-sram").replace_level("L1D", tech="GC", capacity_bytes=16 << 10, associativity=1)
        sim = Simulator(h)
        assert sim.l1d.plan.total_subarrays == 1 and sim.l1d.plan.rows_per_subarray == 256
        rep = sim.run(Trace(TraceHeader(), []), duration_ps=10 * 10**9)
    st = rep.levels["L1D"]
    busy_pct = st.refresh_busy_fraction * 100
    expected_pct = Fraction(3, 4375) * 100
    record_property("detail", f"events {st.refresh_events}, busy {float(busy_pct):.6f}%, {tm.seconds:.2f} s")
    assert st.refresh_events in (2285, 2286)
    assert abs(busy_pct - expected_pct) <= Fraction(1, 1000)
    assert rep.total_time_ps == 10 * 10**9
    assert tm.seconds < 1


# -- 3 -------------------------------------------------------------------------

def _dominance_hierarchy(tech):
    # SRAM L1/L2 so the LLC is the only refreshing array; the LLC is kept
    # small so a desk-scale trace spans a full GC retention window
    return preset("all-sram").replace_level("LLC", tech=tech, capacity_bytes=256 << 10, associativity=16)


def test_criterion_03_edram_refresh_dominance(record_property):
    """eDRAM:GC per-bit refresh power ~104.8x (1%); low-access trace: eDRAM LLC refresh > 90%, GC < 10% (< 30 s)."""
    with Timer() as tm:
        gc = builtin_params(Level.LLC, TechClass.GC)
        ed = builtin_params(Level.LLC, TechClass.EDRAM)
        ratio = (Fraction(ed.refresh_energy_pj_per_bit) / ed.retention_ps()) / (
            Fraction(gc.refresh_energy_pj_per_bit) / gc.retention_ps())
        assert abs(ratio / Fraction("104.8") - 1) < Fraction(1, 100)

        # L1-resident reads every 36 cycles; the LLC sees no demand traffic after warmup
        trace = gen_random(220_000, 16 << 10, seed=3, gap=34).materialize()
        shares = {}
        for tech in ("EDRAM", "GC"):
            rep = simulate(_dominance_hierarchy(tech), trace, warmup_records=2000)
            led = rep.ledger
            llc_rate = Fraction(rep.levels["LLC"].lookups * 10**6, rep.total_time_ps)
            assert llc_rate < 1, f"{llc_rate} LLC accesses per us"
            assert rep.total_time_ps > gc.retention_ps()
            shares[tech] = Fraction(led.level("LLC").refresh_aj, led.cache_aj)
    record_property("detail", f"ratio {float(ratio):.2f}x, eDRAM {float(shares['EDRAM']):.3f}, "
                              f"GC {float(shares['GC']):.3f}, {tm.seconds:.1f} s")
    assert shares["EDRAM"] > Fraction(9, 10)
    assert shares["GC"] < Fraction(1, 10)
    assert tm.seconds < 30


# -- 4 -------------------------------------------------------------------------

COUNT_FIELDS = ("demand_lookups", "demand_hits", "demand_misses", "writeback_lookups", "writeback_hits",
                "writeback_misses", "dirty_evictions", "clean_evictions", "writebacks_out")


def _counts(rep):
    out = {(n, f): getattr(st, f) for n, st in rep.levels.items() for f in COUNT_FIELDS}
    out["dram.reads"] = rep.ledger.dram.reads
    out["dram.writes"] = rep.ledger.dram.writes
    return out


def _shipped_traces():
    """Distinct (trace block, seed, warmup) triples over all shipped configs."""
    seen = {}
    for name in shipped_configs():
        rc = load_run_config(resolve_config_path(name))
        key = (tuple(sorted((k, str(v)) for k, v in rc.trace.items())), rc.seed, rc.warmup_records)
        seen.setdefault(key, (name, rc))
    return list(seen.values())


def _half_write_trace(n, seed):
    """Alternating reads and writes with random payloads.

    Reads stay in a 16 KB hot region; 30% of writes stream into a 4 MB cold
    region, so L1 misses are write misses and reach L2 and the LLC.
    """
    rng = random.Random(seed)
    hot, cold = (16 << 10) // 64, (4 << 20) // 64
    recs = []
    for i in range(n):
        data = rng.getrandbits(LINE_BITS)
        if i % 2 == 0:
            recs.append(TraceRecord(0, 0, "R", 64 * rng.randrange(hot), data))
        elif rng.random() < 0.3:
            recs.append(TraceRecord(0, 0, "W", 64 * (hot + rng.randrange(cold)), data))
        else:
            recs.append(TraceRecord(0, 0, "W", 64 * rng.randrange(hot), data))
    return Trace(TraceHeader(data_bearing=True), recs)


def test_criterion_04_iso_capacity_equivalence(record_property):
    """ALL-GC-CAP and ALL-SRAM: identical counts on every shipped trace; dynamic energy ratio per level in [0.48, 0.58] (< 60 s)."""
    with Timer() as tm:
        traces = _shipped_traces()
        for name, rc in traces:
            if name in ("all-sram", "all-gc-cap"):
                # these two shipped configs are exactly the presets on the loop trace
                assert load_run_config(resolve_config_path("all-sram")).hierarchy == preset("all-sram")
                assert load_run_config(resolve_config_path("all-gc-cap")).hierarchy == preset("all-gc-cap")
                sram, gc = shipped("all-sram"), shipped("all-gc-cap")
            else:
                trace = trace_from_spec(rc.trace, rc.seed).materialize()
                sram = simulate(preset("all-sram"), trace, rc.warmup_records)
                gc = simulate(preset("all-gc-cap"), trace, rc.warmup_records)
            assert _counts(gc) == _counts(sram), name

        trace = _half_write_trace(100_000, 5)
        gc = simulate(preset("all-gc-cap"), trace, warmup_records=20_000)
        sram = simulate(preset("all-sram"), trace, warmup_records=20_000)
        ratios = {}
        for name in ("L1I", "L1D", "L2", "LLC"):
            a, b = gc.ledger.level(name).dynamic_aj, sram.ledger.level(name).dynamic_aj
            if b == 0:
                assert a == 0  # no traffic at this level (no instruction fetches)
                continue
            ratios[name] = Fraction(a, b)
        gc_dyn = sum(lv.dynamic_aj for lv in gc.ledger.levels.values())
        sram_dyn = sum(lv.dynamic_aj for lv in sram.ledger.levels.values())
    record_property("detail", f"{len(traces)} traces; " + ", ".join(
        f"{k} {float(v):.4f}" for k, v in ratios.items()) + f"; {tm.seconds:.1f} s")
    assert gc_dyn < sram_dyn
    assert set(ratios) == {"L1D", "L2", "LLC"}
    for name, r in ratios.items():
        assert Fraction(48, 100) <= r <= Fraction(58, 100), (name, float(r))
    assert tm.seconds < 60


# -- 5 -------------------------------------------------------------------------

def _asym_l1d():
    return preset("all-gc-cap").replace_level("L1D", asymmetric_writes=True)


def test_criterion_05_asymmetric_writes(record_property):
    """Identical rewrites cost 512 x same-bit; random payloads 0.5 +- 0.02 dissimilar; energy within bounds; model default 0.76."""
    gc_l1 = builtin_params(Level.L1, TechClass.GC)
    same, full = LINE_BITS * gc_l1.same_bit_aj_per_bit(), LINE_BITS * gc_l1.write_aj_per_bit()

    # identical rewrite of one line: fill first, then 1000 write hits with the same data
    line = random.Random(1).getrandbits(LINE_BITS)
    recs = [TraceRecord(0, 0, "W", 0, line)] * 1001
    rep = simulate(_asym_l1d(), Trace(TraceHeader(data_bearing=True), recs), warmup_records=1)
    lv = rep.ledger.level("L1D")
    assert lv.writes == 1000 and lv.dynamic_write_aj == 1000 * same
    assert lv.dissimilar_bits == 0

    # uniform random payloads
    trace = gen_random(20_000, 16 << 10, write_ratio=1.0, seed=21, data="random")
    rep = simulate(_asym_l1d(), trace, warmup_records=0, record_events=True)
    lv = rep.ledger.level("L1D")
    frac = Fraction(lv.dissimilar_bits, lv.total_write_bits)
    assert lv.writes >= 10_000
    assert abs(frac - Fraction(1, 2)) <= Fraction(2, 100)
    for ev in rep.events:
        if ev[0] == "W" and ev[1] == "L1D":
            d = ev[4]
            aj = d * gc_l1.write_aj_per_bit() + (LINE_BITS - d) * gc_l1.same_bit_aj_per_bit()
            assert same <= aj <= full
    assert same * lv.writes <= lv.dynamic_write_aj <= full * lv.writes

    # payload-less writes fall back to the similarity model
    l2 = validate(preset("all-gc-cap"))["L2"].config
    assert str(l2.default_similarity()) == "0.76"
    record_property("detail", f"rewrite {same / 10**6} pJ/write, random dissimilar {float(frac):.4f}")


# -- 6 -------------------------------------------------------------------------

def test_criterion_06_overlap(record_property):
    """Alternating write/read to one subarray: 100% overlapped; writes only: 0%."""
    h = preset("all-gc-cap").replace_level("L1D", overlap=True)
    sim = Simulator(h)
    plan = sim.l1d.plan
    # two lines in different sets; both first fills land in the same way
    a, b = 0, 64
    recs = [TraceRecord(0, 0, "R", a), TraceRecord(0, 0, "R", b)]
    for _ in range(500):
        recs += [TraceRecord(0, 0, "W", a), TraceRecord(0, 0, "R", b)]
    rep = sim.run(Trace(TraceHeader(), recs))
    cset_a = sim.l1d.caches[0].get_set(0)
    cset_b = sim.l1d.caches[0].get_set(1)
    from gcsim.geometry import locate
    sub_a = locate(0, cset_a.lookup(0), plan)[0]
    sub_b = locate(1, cset_b.lookup(0), plan)[0]
    assert sub_a == sub_b
    alternating = rep.overlapped_write_fraction

    writes_only = simulate(h, Trace(TraceHeader(), [TraceRecord(0, 0, "R", a)]
                                    + [TraceRecord(0, 0, "W", a)] * 500)).overlapped_write_fraction
    record_property("detail", f"alternating {float(alternating):.3f}, writes-only {float(writes_only):.3f}")
    assert alternating == 1
    assert rep.levels["L1D"].overlapped_writes == 500
    assert writes_only == 0


# -- 7 -------------------------------------------------------------------------

def test_criterion_07_working_set_capacity(record_property):
    """12 MB loop: ALL-GC-AREA (16 MB LLC) cuts DRAM reads by > 90% versus ALL-SRAM (8 MB) (< 60 s)."""
    with Timer() as tm:
        sram = shipped("all-sram")
        area = shipped("all-gc-area")
    s, a = sram.ledger.dram.reads, area.ledger.dram.reads
    record_property("detail", f"DRAM reads {s} -> {a}; {tm.seconds:.1f} s")
    assert s > 0
    assert Fraction(s - a, s) > Fraction(9, 10)
    assert validate(preset("all-gc-area"))["LLC"].config.capacity_bytes == 16 << 20
    assert tm.seconds < 60


# -- 8 -------------------------------------------------------------------------

def test_criterion_08_nrp(record_property):
    """NRP: no stale read over 10^6 random accesses; untouched line dropped at exactly 31 x retention/32; dirty drops write back."""
    h = preset("nrp-l1l2")
    h.check_invariants = True  # freshness checked on every read of a volatile way
    trace = gen_random(1_000_000, 48 << 10, 24 << 20, 0.9, write_ratio=0.3, seed=8, gap=40,
                       ifetch_ratio=0.05)
    rep = simulate(h, trace)
    dropped = sum(rep.levels[n].nrp_invalidations for n in ("L1I", "L1D", "L2"))
    dirty = sum(rep.levels[n].nrp_dirty_invalidations for n in ("L1I", "L1D", "L2"))
    assert rep.records == 1_000_000
    assert dropped > 0 and dirty > 0
    for name, st in rep.levels.items():
        assert st.writebacks_out == st.dirty_evictions + st.nrp_dirty_invalidations, name
    assert rep.conservation_errors() == []

    # exact expiry time of a line written once at t = 0
    retention_ps = builtin_params(Level.L1, TechClass.GC).retention_ps()
    expiry_ps = 31 * (retention_ps // 32)
    assert expiry_ps == 1_085_000_000
    expiry_cycle = 3_689_000  # 1.085 ms at 3.4 GHz, exact
    before = Simulator(preset("nrp-l1l2"))
    assert before.ps(expiry_cycle) == expiry_ps and before.ps(expiry_cycle - 1) < expiry_ps
    before.issue(0, "W", 0, None, 0)
    before.issue(0, "R", 0, None, expiry_cycle - 1)
    assert before.l1d.stats.demand_hits == 1 and before.l1d.stats.nrp_invalidations == 0

    at = Simulator(preset("nrp-l1l2"))
    at.issue(0, "W", 0, None, 0)
    at.issue(0, "R", 0, None, expiry_cycle)
    one = at.finish(duration_ps=expiry_ps + 10**6)
    l1d = one.levels["L1D"]
    assert l1d.nrp_invalidations == 1 and l1d.nrp_dirty_invalidations == 1 and l1d.nrp_misses == 1
    assert l1d.writebacks_out == 1 and one.levels["L2"].writeback_lookups == 1
    assert one.writebacks >= 1
    assert one.writeback_bandwidth_bytes_per_s == Fraction(64 * one.writebacks * 10**12, one.total_time_ps)
    record_property("detail", f"{dropped} invalidations ({dirty} dirty) over 10^6 accesses; expiry {expiry_ps} ps")


# -- 9 -------------------------------------------------------------------------

def test_criterion_09_hybrid_policy(record_property):
    """Hybrid LLC set (2 GC + 4 STT ways) matches the list oracle on every sequence up to length 6."""
    with Timer() as tm:
        n = hybrid_exhaustive(6)
        rng = random.Random(9)
        for _ in range(300):
            seq = [(rng.choice("RW"), rng.randrange(10)) for _ in range(rng.randrange(1, 80))]
            run_against_oracle(seq, mru=rng.random() < 0.5)
    record_property("detail", f"{n} exhaustive sequences + 300 long random; {tm.seconds:.1f} s")
    assert n == sum(8**k for k in range(1, 7))


# -- 10 ------------------------------------------------------------------------

def test_criterion_10_lru_oracle(record_property):
    """2-way LRU set equals the stack algorithm on all sequences up to length 8 over 4 tags (< 10 s)."""
    with Timer() as tm:
        n = lru_exhaustive(8)
    record_property("detail", f"{n} sequences, {tm.seconds:.1f} s")
    assert n == sum(4**k for k in range(1, 9))
    assert tm.seconds < 10


# -- 11 ------------------------------------------------------------------------

LEDGER_RUNS = [
    ("all-sram", {}),
    ("all-gc-cap", {"L1D": {"asymmetric_writes": True, "overlap": True}}),
    ("all-gc-area", {"L1D": {"asymmetric_writes": True}, "L2": {"asymmetric_writes": True},
                     "LLC": {"asymmetric_writes": True, "bins": ((1, 0.5), (2, 0.3), (4, 0.2))}}),
    ("gc-gc-sttram", {"L1D": {"asymmetric_writes": True, "compare_victim_on_fill": True}}),
    ("gc-gc-edram", {"L2": {"asymmetric_writes": True}}),
    ("gc-gc-hybrid", {"L1D": {"asymmetric_writes": True}, "LLC": {"asymmetric_writes": True}}),
    ("nrp-l1l2", {"L1D": {"asymmetric_writes": True}, "L2": {"asymmetric_writes": True}}),
]


def _reprice_matches(hconf, trace, warmup):
    rep = simulate(hconf, trace, warmup, record_events=True)
    resolved = validate(hconf)
    levels, dram = reprice(rep.events, lambda lv, t: resolved[lv].params[TechClass(t)], dram_params())
    for name in ("L1I", "L1D", "L2", "LLC"):
        ledger_lv = rep.ledger.level(name)
        oracle_lv = levels.get(name, dict.fromkeys(FIELDS, 0))
        for f in FIELDS:
            assert getattr(ledger_lv, f) == oracle_lv[f], (name, f)
    assert (rep.ledger.dram.reads, rep.ledger.dram.writes, rep.ledger.dram.energy_aj) == (
        dram["reads"], dram["writes"], dram["energy_aj"])
    return len(rep.events)


def test_criterion_11_ledger_oracle(record_property):
    """Re-pricing each run's event log from scratch reproduces every energy field exactly."""
    events = 0
    for i, (label, overrides) in enumerate(LEDGER_RUNS):
        h = preset(label)
        for level, changes in overrides.items():
            h = h.replace_level(level, **changes)
        data = None if label == "nrp-l1l2" else "sparse"
        trace = gen_random(8000, 48 << 10, 16 << 20, 0.85, write_ratio=0.4, seed=100 + i, gap=20,
                           ifetch_ratio=0.05, data=data)
        events += _reprice_matches(h, trace, 500)
    # payload-less writes priced by the similarity model
    events += _reprice_matches(preset("all-gc-area").replace_level("L2", asymmetric_writes=True),
                               gen_random(5000, 32 << 10, 4 << 20, 0.8, write_ratio=0.5, seed=3), 0)
    # a shipped config end to end
    rc = load_run_config(resolve_config_path("gc-binned"))
    events += _reprice_matches(rc.hierarchy, trace_from_spec(rc.trace, rc.seed), rc.warmup_records)
    record_property("detail", f"{len(LEDGER_RUNS) + 2} runs, {events} events")


# -- 12 ------------------------------------------------------------------------

def test_criterion_12_determinism(record_property, tmp_path):
    """Two runs of each shipped config with the same seed give byte-identical reports."""
    names = shipped_configs()
    for name in names:
        first = report.render(shipped(name)).encode()
        assert main(["simulate", "--config", name, "--out", str(tmp_path), "--no-plots"]) == 0
        second = (tmp_path / f"{load_run_config(resolve_config_path(name)).label}.report").read_bytes()
        assert first == second, name
    record_property("detail", f"{len(names)} shipped configs")
