"""Trace-driven simulation of the cache hierarchy.

Each core owns private L1I, L1D and L2 caches and shares the LLC. Cores are
blocking and in order: a record issues ``gap`` cycles after the core's
previous record completed, and whichever core issues earliest goes next (ties
to the lower core id). A demand access probes L1, L2, LLC and DRAM in turn,
paying each missed level's lookup latency before descending.

Every level is write-back and write-allocate, with no inclusion between
levels. Dirty victims are written to the next level as write lookups. They
cost energy but add no latency.

Time is kept per core in cycles and converted to picoseconds (floored)
wherever refresh or retention is involved.
"""
import concurrent.futures
from collections import deque
from dataclasses import dataclass, field, fields
from decimal import Decimal
from fractions import Fraction

from .cache import Cache, NrpTracker, Op, Outcome
from .catalog import TechClass, load_catalog
from .config import LEVEL_NAMES, validate
from .energy import (
    EnergyLedger,
    PriceCard,
    WblShadow,
    charge_dram,
    charge_leakage,
    charge_read,
    charge_refresh,
    charge_write_asymmetric,
    charge_write_full,
    charge_write_model,
    edp_exact,
    write_model_aj,
)
from .errors import InvariantViolation, MissingPayload, TraceError
from .geometry import locate
from .refresh import RefreshSchedule, RetentionBins, apply_bins
from .trace import gen_loop, gen_random, gen_stream, read_trace, replicate
from .units import LINE_BYTES, parse_size

OVERLAPPED = "OVERLAPPED"
SERIALIZED = "SERIALIZED"


@dataclass
class LevelStats:
    demand_lookups: int = 0
    demand_hits: int = 0
    demand_misses: int = 0
    writeback_lookups: int = 0
    writeback_hits: int = 0
    writeback_misses: int = 0
    gc_way_hits: int = 0
    stt_way_hits: int = 0
    promotions: int = 0
    dirty_evictions: int = 0
    clean_evictions: int = 0
    writebacks_out: int = 0
    nrp_invalidations: int = 0
    nrp_dirty_invalidations: int = 0
    nrp_misses: int = 0
    refresh_checks: int = 0
    refresh_conflicts: int = 0
    refresh_delay_ps: int = 0
    refresh_events: int = 0
    refresh_busy_ps: int = 0
    refresh_capacity_ps: int = 0
    overlapped_writes: int = 0
    serialized_writes: int = 0
    port_wait_cycles: int = 0

    @property
    def lookups(self):
        return self.demand_lookups + self.writeback_lookups

    @property
    def hits(self):
        return self.demand_hits + self.writeback_hits

    @property
    def misses(self):
        return self.demand_misses + self.writeback_misses

    @property
    def refresh_busy_fraction(self):
        if not self.refresh_capacity_ps:
            return Fraction(0)
        return Fraction(self.refresh_busy_ps, self.refresh_capacity_ps)

    def merge(self, other):
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))


class WritePort:
    """Depth-1 posted-write queue per subarray of a decoupled-bitline array.

    A demand write is posted and waits for a read to the same subarray. If
    one arrives within ``window`` cycles the two proceed together and the
    write costs the array no time. Otherwise the write serializes and occupies
    the subarray for ``write_cycles`` from the moment it was posted.
    """

    def __init__(self, write_cycles, window=None):
        self.write_cycles = write_cycles
        self.window = write_cycles if window is None else window
        self.pending = {}
        self.busy_until = {}
        self.overlapped = 0
        self.serialized = 0

    def access(self, subarray, op, t):
        """Returns (verdict on the pending write or None, wait cycles)."""
        verdict = None
        posted = self.pending.pop(subarray, None)
        if posted is not None:
            if op is Op.READ and t - posted <= self.window:
                verdict = OVERLAPPED
                self.overlapped += 1
                self.busy_until[subarray] = posted
            else:
                verdict = SERIALIZED
                self.serialized += 1
        wait = max(0, self.busy_until.get(subarray, 0) - t)
        if op is Op.WRITE:
            start = t + wait
            self.pending[subarray] = start
            self.busy_until[subarray] = start + self.write_cycles
        return verdict, wait

    def flush(self):
        """Retire every still-pending write as serialized."""
        self.serialized += len(self.pending)
        self.pending.clear()

    def reset_counts(self):
        self.pending.clear()
        self.overlapped = self.serialized = 0


def overlap_writes(port, subarray, op, t):
    """Verdict for the pending write of ``subarray`` when ``op`` issues at ``t``."""
    return port.access(subarray, op, t)[0]


class _Level:
    """Run-time state of one level across all its cache instances."""

    def __init__(self, resolved, instances, clock_ghz):
        cfg = resolved.config
        self.name = cfg.name
        self.cfg = cfg
        self.hybrid = cfg.hybrid
        tech = TechClass.GC if cfg.hybrid else TechClass(cfg.tech)
        self.caches = [
            Cache(cfg.geometry, tech, gc_ways=cfg.gc_ways, promote_mru=cfg.hybrid_promote_mru)
            for _ in range(instances)
        ]
        self.plan = self.caches[0].plan
        self.sets = cfg.geometry.sets
        self.params = resolved.params
        self.cards = {t: PriceCard(p) for t, p in self.params.items()}
        self.read_cyc = {t: p.read_cycles(clock_ghz) for t, p in self.params.items()}
        self.write_cyc = {t: p.write_cycles(clock_ghz) for t, p in self.params.items()}
        # a miss costs the tag check of the (first) array probed
        self.tag_cyc = self.read_cyc[tech]
        self.volatile = tech if tech.refreshable else None
        self.retention_ps = self.params[tech].retention_ps() if self.volatile else None

        self.schedule = None
        if self.volatile and not cfg.nrp:
            p = self.params[tech]
            n_sub = cfg.gc_ways * self.plan.subarrays_per_way if cfg.hybrid else self.plan.total_subarrays
            self.schedule = RefreshSchedule(
                self.plan.rows_per_subarray,
                n_sub,
                p.retention_ps(),
                p.refresh_row_period_ps(),
                decoupled=tech.decoupled_bitlines,
                synchronized=cfg.synchronized_subarrays,
            )
            if cfg.bins:
                apply_bins(self.schedule, RetentionBins(tuple(cfg.bins)), cfg.bin_seed)

        self.nrp = None
        self.ghosts = None
        if cfg.nrp:
            bits = cfg.nrp_counter_bits
            self.nrp = NrpTracker(self.retention_ps // (1 << bits), saturate=(1 << bits) - 1)
            self.ghosts = [set() for _ in range(instances)]

        self.asym = cfg.asymmetric_writes
        self.similarity = cfg.default_similarity()
        self.model_aj = {t: write_model_aj(p, self.similarity) for t, p in self.params.items()}
        self.shadows = [WblShadow() for _ in range(instances)]
        self.ports = None
        if cfg.overlap:
            wcyc = self.write_cyc[TechClass.GC]
            self.ports = [WritePort(wcyc, cfg.overlap_window_cycles) for _ in range(instances)]
        self.stats = LevelStats()

    def bits_by_tech(self):
        total = self.cfg.capacity_bytes * 8 * len(self.caches)
        if not self.hybrid:
            return [(self.volatile or TechClass(self.cfg.tech), total)]
        gc_bits = total * self.cfg.gc_ways // self.cfg.associativity
        return [(TechClass.GC, gc_bits), (TechClass.STTRAM, total - gc_bits)]


@dataclass
class SimReport:
    label: str
    cores: int
    records: int
    levels: dict
    ledger: EnergyLedger
    total_latency_cycles: int
    start_ps: int
    end_ps: int
    clock_ghz: Decimal
    events: list | None = None
    meta: dict = field(default_factory=dict)

    @property
    def total_time_ps(self):
        return self.end_ps - self.start_ps

    @property
    def amat_cycles(self):
        if not self.records:
            return Fraction(0)
        return Fraction(self.total_latency_cycles, self.records)

    def misses_per_kilo_record(self, level):
        if not self.records:
            return Fraction(0)
        return Fraction(self.levels[level].demand_misses * 1000, self.records)

    def _ratio(self, num_attr, den_attr, names=LEVEL_NAMES):
        num = sum(getattr(self.levels[n], num_attr) for n in names)
        den = sum(getattr(self.levels[n], den_attr) for n in names)
        return Fraction(num, den) if den else Fraction(0)

    @property
    def refresh_conflict_fraction(self):
        return self._ratio("refresh_conflicts", "refresh_checks")

    @property
    def overlapped_write_fraction(self):
        num = sum(self.levels[n].overlapped_writes for n in LEVEL_NAMES)
        den = num + sum(self.levels[n].serialized_writes for n in LEVEL_NAMES)
        return Fraction(num, den) if den else Fraction(0)

    @property
    def nrp_miss_fraction(self):
        names = [n for n in LEVEL_NAMES if self.meta.get(f"{n}.nrp")]
        return self._ratio("nrp_misses", "demand_misses", names) if names else Fraction(0)

    @property
    def writebacks(self):
        return sum(self.levels[n].writebacks_out for n in LEVEL_NAMES)

    @property
    def writeback_bandwidth_bytes_per_s(self):
        if not self.total_time_ps:
            return Fraction(0)
        return Fraction(self.writebacks * LINE_BYTES * 10**12, self.total_time_ps)

    @property
    def edp(self):
        return edp_exact(self.ledger, self.total_time_ps)

    def conservation_errors(self):
        lv = self.levels
        errors = []
        l1_out = lv["L1I"].demand_misses + lv["L1D"].demand_misses
        l1_wb = lv["L1I"].writebacks_out + lv["L1D"].writebacks_out
        if lv["L2"].lookups != l1_out + l1_wb:
            errors.append(f"L2 lookups {lv['L2'].lookups} != L1 misses {l1_out} + L1 writebacks {l1_wb}")
        if lv["LLC"].lookups != lv["L2"].demand_misses + lv["L2"].writebacks_out:
            errors.append("LLC lookups != L2 misses + L2 writebacks")
        if self.ledger.dram.reads != lv["LLC"].demand_misses:
            errors.append(f"DRAM reads {self.ledger.dram.reads} != LLC misses {lv['LLC'].demand_misses}")
        llc_wb = lv["LLC"].dirty_evictions + lv["LLC"].nrp_dirty_invalidations
        if self.ledger.dram.writes != llc_wb:
            errors.append(f"DRAM writes {self.ledger.dram.writes} != LLC dirty evictions {llc_wb}")
        for name in LEVEL_NAMES:
            s = lv[name]
            if s.demand_hits + s.demand_misses != s.demand_lookups:
                errors.append(f"{name}: hits + misses != lookups")
        return errors


class Simulator:
    def __init__(self, hconf, cores=1, catalog=None, record_events=None):
        catalog = catalog or load_catalog()
        resolved = validate(hconf, catalog)
        self.hconf = hconf
        self.cores = cores
        self.clock_ghz = Decimal(hconf.clock_ghz)
        f = Fraction(self.clock_ghz)
        self._ps_num = 1000 * f.denominator
        self._ps_den = f.numerator
        self.levels = {
            name: _Level(resolved[name], 1 if name == "LLC" else cores, self.clock_ghz)
            for name in LEVEL_NAMES
        }
        self.l1i, self.l1d, self.l2, self.llc = (self.levels[n] for n in LEVEL_NAMES)
        self._next = {"L1I": self.l2, "L1D": self.l2, "L2": self.llc, "LLC": None}
        self.dram = catalog.dram
        self.dram_cycles = self.dram.latency_cycles(self.clock_ghz)
        self.check = hconf.check_invariants
        self.record_events = hconf.record_events if record_events is None else record_events
        self.ledger = EnergyLedger(log=[] if self.record_events else None)
        self.clock = [0] * cores
        self._wb_queue = deque()
        self._nrp_levels = [lv for lv in self.levels.values() if lv.nrp]
        self.records = 0
        self.total_latency = 0
        self.start_cycle = 0

    # -- time -------------------------------------------------------------

    def ps(self, cycles):
        return cycles * self._ps_num // self._ps_den

    def cycles_ceil(self, ps):
        return -((-ps * self._ps_den) // self._ps_num)

    # -- one lookup at one level --------------------------------------------

    def _lookup(self, lv, inst, op, addr, payload, t, demand):
        tag, s = divmod(addr // LINE_BYTES, lv.sets)
        cache = lv.caches[inst]
        cset = cache.get_set(s)
        now_ps = self.ps(t)
        st = lv.stats
        if self.check and op is Op.READ and lv.volatile:
            way = cset.where.get(tag)
            if way is not None and cset.way_tech(way) is lv.volatile:
                self._check_fresh(lv, s, way, cset.ways[way], now_ps)

        res = cset.access(op, tag, payload, now_ps)
        outcome = res.outcome
        if demand:
            st.demand_lookups += 1
        else:
            st.writeback_lookups += 1

        cost = 0
        if outcome is Outcome.MISS:
            cost = lv.tag_cyc
            if demand:
                st.demand_misses += 1
            else:
                st.writeback_misses += 1
            if lv.ghosts is not None:
                ghost = lv.ghosts[inst]
                if (s, tag) in ghost:
                    ghost.discard((s, tag))
                    if demand:
                        st.nrp_misses += 1
        else:
            if demand:
                st.demand_hits += 1
            else:
                st.writeback_hits += 1
            if outcome is Outcome.HIT_STT_WAY:
                st.stt_way_hits += 1
                st.promotions += 1
            elif outcome is Outcome.HIT_GC_WAY:
                st.gc_way_hits += 1
            tech = res.latency_tech
            cost = (lv.write_cyc if op is Op.WRITE else lv.read_cyc)[tech]
            if demand:
                cost = self._hit_delays(lv, inst, s, res, op, t, now_ps, cost)
            if lv.nrp is not None and op is Op.READ and lv.cfg.nrp_read_resets:
                # an access that restores the row restarts its retention window
                cset.ways[res.way].stamp_ps = now_ps
                lv.nrp.reset((inst, s), cset, res.way, now_ps)

        self._charge(lv, inst, s, cset, res, now_ps)

        victim = res.victim
        if victim is not None:
            if victim.dirty:
                st.dirty_evictions += 1
                st.writebacks_out += 1
                self._wb_queue.append((lv, inst, cache.address_of(victim.tag, s), victim.payload))
            else:
                st.clean_evictions += 1
        if self.check:
            _check_set(cset, lv.name)
        return outcome is not Outcome.MISS, cost

    def _hit_delays(self, lv, inst, s, res, op, t, now_ps, cost):
        hit_tech = res.latency_tech
        stall = 0
        if lv.schedule is not None and hit_tech is lv.volatile:
            sub = locate(s, res.way, lv.plan)[0]
            st = lv.stats
            st.refresh_checks += 1
            delay = lv.schedule.collides(sub, op, now_ps)
            if delay:
                st.refresh_conflicts += 1
                st.refresh_delay_ps += delay
                stall = self.cycles_ceil(delay)
        if lv.ports is not None:
            sub = locate(s, res.way, lv.plan)[0]
            _, wait = lv.ports[inst].access(sub, op, t + stall)
            lv.stats.port_wait_cycles += wait
            stall += wait
            if op is Op.WRITE:
                # posted: the core moves on after handing the write to the port
                cost = 1
        return cost + stall

    def _charge(self, lv, inst, s, cset, res, now_ps):
        ledger = self.ledger
        name = lv.name
        for way in res.reads:
            tech = cset.way_tech(way)
            charge_read(ledger, name, lv.cards[tech], tech.value)
        fill = res.outcome is Outcome.MISS
        for w in res.writes:
            tech = cset.way_tech(w.way)
            card = lv.cards[tech]
            if lv.asym and tech.decoupled_bitlines:
                if w.payload is not None:
                    sub = locate(s, w.way, lv.plan)[0]
                    ref = None
                    if fill and lv.cfg.compare_victim_on_fill:
                        ref = w.previous or 0
                    charge_write_asymmetric(
                        ledger, name, sub, w.payload, lv.shadows[inst], card, fill, ref, tech.value
                    )
                elif lv.cfg.write_model:
                    charge_write_model(
                        ledger, name, card, lv.similarity, fill, tech.value, aj=lv.model_aj[tech]
                    )
                else:
                    raise MissingPayload(f"{name}: asymmetric writes need payloads or write_model")
            else:
                charge_write_full(ledger, name, card, fill, tech.value)
            if lv.nrp is not None:
                lv.nrp.reset((inst, s), cset, w.way, now_ps)

    def _check_fresh(self, lv, s, way, line, now_ps):
        last = line.stamp_ps
        limit = lv.retention_ps
        if lv.schedule is not None:
            sub, row = locate(s, way, lv.plan)
            refreshed = lv.schedule.last_refresh_ps(sub, row, now_ps)
            if refreshed is not None:
                last = max(last, refreshed)
            limit = lv.schedule.row_retention_ps(row)
        if now_ps - last > limit:
            raise InvariantViolation(
                f"{lv.name}: read of set {s} way {way} at {now_ps} ps, "
                f"{now_ps - last} ps after its last write or refresh (limit {limit} ps)"
            )

    # -- writebacks and NRP -------------------------------------------------

    def _drain_writebacks(self, t):
        q = self._wb_queue
        while q:
            lv, inst, addr, payload = q.popleft()
            target = self._next[lv.name]
            if target is None:
                charge_dram(self.ledger, "W", self.dram)
            else:
                self._lookup(target, 0 if target is self.llc else inst, Op.WRITE, addr, payload, t, False)

    def _tick_nrp(self, t):
        if not self._nrp_levels:
            return
        now_ps = self.ps(t)
        for lv in self._nrp_levels:
            for _tick, (inst, s), victim in lv.nrp.advance(now_ps):
                st = lv.stats
                st.nrp_invalidations += 1
                lv.ghosts[inst].add((s, victim.tag))
                if victim.dirty:
                    st.nrp_dirty_invalidations += 1
                    st.writebacks_out += 1
                    addr = lv.caches[inst].address_of(victim.tag, s)
                    self._wb_queue.append((lv, inst, addr, victim.payload))
        self._drain_writebacks(t)

    # -- demand path ---------------------------------------------------------

    def access(self, core, op, addr, payload, t):
        """Serve one demand record issued at cycle ``t``; returns its latency."""
        first = self.l1i if op == "I" else self.l1d
        req = Op.WRITE if op == "W" else Op.READ
        lat = 0
        hit, cost = self._lookup(first, core, req, addr, payload, t, True)
        lat += cost
        if not hit:
            hit, cost = self._lookup(self.l2, core, Op.READ, addr, payload, t + lat, True)
            lat += cost
            if not hit:
                hit, cost = self._lookup(self.llc, 0, Op.READ, addr, payload, t + lat, True)
                lat += cost
                if not hit:
                    lat += self.dram_cycles
                    charge_dram(self.ledger, "R", self.dram)
        self._drain_writebacks(t + lat)
        return lat

    def issue(self, core, op, addr, payload, t):
        """Process NRP ticks up to cycle ``t``, then serve the record; returns its latency."""
        self._tick_nrp(t)
        return self.access(core, op, addr, payload, t)

    def _issue_order(self, records):
        cores = self.cores
        it = iter(records)
        if cores == 1:
            for rec in it:
                if rec.core != 0:
                    raise TraceError(f"record for core {rec.core} in a 1-core trace")
                yield rec
            return
        bufs = [deque() for _ in range(cores)]
        live = True
        while True:
            for c in range(cores):
                while live and not bufs[c]:
                    rec = next(it, None)
                    if rec is None:
                        live = False
                    elif not 0 <= rec.core < cores:
                        raise TraceError(f"record for core {rec.core} in a {cores}-core trace")
                    else:
                        bufs[rec.core].append(rec)
            best = None
            best_t = None
            for c in range(cores):
                if bufs[c]:
                    t = self.clock[c] + bufs[c][0].gap_cycles
                    if best is None or t < best_t:
                        best, best_t = c, t
            if best is None:
                return
            yield bufs[best].popleft()

    def _reset_measurement(self):
        for lv in self.levels.values():
            lv.stats = LevelStats()
            if lv.ports:
                for port in lv.ports:
                    port.reset_counts()
        self.ledger = EnergyLedger(log=[] if self.record_events else None)
        self.records = 0
        self.total_latency = 0
        self.start_cycle = max(self.clock)

    def run(self, trace, warmup_records=0, duration_ps=0, label="run"):
        if trace.header.cores != self.cores:
            raise TraceError(f"trace has {trace.header.cores} cores, simulator {self.cores}")
        seen = 0
        if warmup_records == 0:
            self._reset_measurement()
        for rec in self._issue_order(trace):
            c = rec.core
            t = self.clock[c] + rec.gap_cycles
            lat = self.issue(c, rec.op, rec.addr, rec.payload, t)
            self.clock[c] = t + lat
            self.records += 1
            self.total_latency += lat
            seen += 1
            if seen == warmup_records:
                self._reset_measurement()
        if seen < warmup_records:
            raise TraceError(f"trace has {seen} records, fewer than the {warmup_records} warmup records")
        return self.finish(duration_ps, label)

    def finish(self, duration_ps=0, label="run"):
        start_ps = self.ps(self.start_cycle)
        end_ps = max(self.ps(max(self.clock)), duration_ps, start_ps)
        if self._nrp_levels:
            end_cycle = self.cycles_ceil(end_ps)
            self._tick_nrp(end_cycle)
        window = end_ps - start_ps
        meta = {}
        for lv in self.levels.values():
            st = lv.stats
            meta[f"{lv.name}.nrp"] = bool(lv.nrp)
            if lv.ports:
                for port in lv.ports:
                    port.flush()
                    st.overlapped_writes += port.overlapped
                    st.serialized_writes += port.serialized
            sched = lv.schedule
            if sched is not None:
                n = len(lv.caches)
                st.refresh_events = n * (sched.events_before(end_ps) - sched.events_before(start_ps))
                st.refresh_busy_ps = n * (sched.busy_ps(end_ps) - sched.busy_ps(start_ps))
                st.refresh_capacity_ps = n * window * sched.n_subarrays
                charge_refresh(self.ledger, lv.name, st.refresh_events, lv.cards[lv.volatile],
                               lv.volatile.value)
            for tech, bits in lv.bits_by_tech():
                charge_leakage(self.ledger, lv.name, bits, window, lv.cards[tech], tech.value)
        report = SimReport(
            label=label,
            cores=self.cores,
            records=self.records,
            levels={lv.name: lv.stats for lv in self.levels.values()},
            ledger=self.ledger,
            total_latency_cycles=self.total_latency,
            start_ps=start_ps,
            end_ps=end_ps,
            clock_ghz=self.clock_ghz,
            events=self.ledger.log,
            meta=meta,
        )
        if self.check:
            errors = report.conservation_errors()
            if errors:
                raise InvariantViolation("; ".join(errors))
        return report


def _check_set(cset, name):
    n = len(cset.ways)
    order = cset.recency
    if sorted(order) != list(range(n)):
        raise InvariantViolation(f"{name}: recency stack {order} is not a permutation")
    for line in cset.ways:
        if not line.valid and (line.dirty or line.nrp_counter):
            raise InvariantViolation(f"{name}: invalid line carries dirty/NRP state")
    if len(cset.where) != sum(1 for line in cset.ways if line.valid):
        raise InvariantViolation(f"{name}: tag index out of sync with valid lines")


def simulate(hconf, trace, warmup_records=0, duration_ps=0, label="run", catalog=None,
             record_events=None):
    """Run ``trace`` through ``hconf``; returns a :class:`SimReport`."""
    sim = Simulator(hconf, trace.header.cores, catalog, record_events)
    return sim.run(trace, warmup_records, duration_ps, label)


# -- run configs and sweeps ---------------------------------------------------

def trace_from_spec(spec, seed=0):
    """Build the trace described by a run config's ``trace`` block."""
    if "path" in spec:
        return read_trace(spec["path"])
    kind = spec["generator"]
    common = {
        "write_ratio": float(spec.get("write_ratio", 0.0)),
        "seed": seed,
        "gap": int(spec.get("gap", 0)),
        "data": spec.get("data"),
    }
    if kind == "loop":
        trace = gen_loop(parse_size(spec["working_set"]), int(spec.get("stride", LINE_BYTES)),
                         int(spec.get("iterations", 1)), **common)
    elif kind == "stream":
        trace = gen_stream(int(spec["count"]), int(spec.get("stride", LINE_BYTES)), **common)
    else:
        trace = gen_random(int(spec["count"]), parse_size(spec["hot"]), parse_size(spec.get("cold", 0)),
                           float(spec.get("hot_fraction", 1.0)),
                           ifetch_ratio=float(spec.get("ifetch_ratio", 0.0)), **common)
    cores = int(spec.get("cores", 1))
    return replicate(trace, cores) if cores > 1 else trace


def simulate_run(run_config):
    trace = trace_from_spec(run_config.trace, run_config.seed)
    return simulate(run_config.hierarchy, trace, run_config.warmup_records,
                    run_config.duration_ps, run_config.label)


def _sweep_one(args):
    label, hconf, trace, warmup, duration = args
    return simulate(hconf, trace, warmup, duration, label)


def run_sweep(configs, trace, workers=1, warmup_records=0, duration_ps=0):
    """Simulate each (label, HierarchyConfig) pair on ``trace``.

    Runs are independent; with ``workers`` > 1 they fan out over processes.
    """
    jobs = [(label, hconf, trace, warmup_records, duration_ps) for label, hconf in configs]
    if workers <= 1 or len(jobs) <= 1:
        return [_sweep_one(job) for job in jobs]
    trace = trace.materialize()
    jobs = [(label, hconf, trace, w, d) for label, hconf, _, w, d in jobs]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_one, jobs))
