"""Set-associative cache state.

Plain sets use true LRU. Hybrid sets split their ways into a GC prefix and an
STT-RAM suffix: misses fill into the STT-RAM ways, an STT-RAM hit swaps the
line with the LRU line of the GC ways, and GC hits behave like ordinary LRU
hits within the GC ways.

Recency stacks list way indices MRU first. Invalid ways are always kept after
every valid way of their stack, so "LRU position" means the slot right after
the last valid line.
"""
import enum
from collections import defaultdict
from dataclasses import dataclass, field

from .catalog import TechClass
from .geometry import CacheGeometry, index_address, plan_subarrays


class Op(str, enum.Enum):
    READ = "R"
    WRITE = "W"


class Outcome(str, enum.Enum):
    HIT = "HIT"
    HIT_GC_WAY = "HIT_GC_WAY"
    HIT_STT_WAY = "HIT_STT_WAY"
    MISS = "MISS"

    @property
    def is_hit(self):
        return self is not Outcome.MISS


class CacheLine:
    __slots__ = ("tag", "valid", "dirty", "nrp_counter", "payload", "stamp_ps", "nrp_epoch")

    def __init__(self):
        self.tag = 0
        self.valid = False
        self.dirty = False
        self.nrp_counter = 0
        self.payload = None
        # time of the last write or fill; the shadow timestamp for freshness checks
        self.stamp_ps = 0
        self.nrp_epoch = 0

    def clear(self):
        self.valid = False
        self.dirty = False
        self.nrp_counter = 0
        self.payload = None

    def copy(self):
        other = CacheLine()
        for name in CacheLine.__slots__:
            setattr(other, name, getattr(self, name))
        return other

    def __repr__(self):
        if not self.valid:
            return "CacheLine(invalid)"
        return f"CacheLine(tag={self.tag}, dirty={self.dirty}, nrp={self.nrp_counter})"


@dataclass
class Victim:
    tag: int
    dirty: bool
    payload: int | None
    way: int


@dataclass
class ArrayWrite:
    way: int
    payload: int | None
    # contents of the row before this write (None if the row held no valid line)
    previous: int | None


@dataclass
class AccessResult:
    outcome: Outcome
    op: Op
    way: int
    latency_tech: TechClass
    victim: Victim | None = None
    promotions: list = field(default_factory=list)
    reads: list = field(default_factory=list)
    writes: list = field(default_factory=list)

    @property
    def hit(self):
        return self.outcome.is_hit


def _place(stack, way, ways, mru):
    """Re-insert ``way`` into ``stack`` at MRU or at the LRU-of-valid slot."""
    if way in stack:
        stack.remove(way)
    if mru:
        stack.insert(0, way)
        return
    n_valid = sum(1 for w in stack if ways[w].valid)
    stack.insert(n_valid, way)


def _demote_invalid(stack, way):
    stack.remove(way)
    stack.append(way)


class CacheSet:
    """One set. ``gc_ways`` > 0 with ``tech`` None makes it a GC/STT-RAM hybrid."""

    __slots__ = ("ways", "where", "stack", "gc_stack", "stt_stack", "gc_ways", "tech", "promote_mru")

    def __init__(self, associativity, tech=TechClass.SRAM, gc_ways=0, promote_mru=False):
        self.ways = [CacheLine() for _ in range(associativity)]
        self.where = {}
        self.gc_ways = gc_ways
        self.tech = tech
        self.promote_mru = promote_mru
        if gc_ways:
            if not 0 < gc_ways < associativity:
                raise ValueError("hybrid set needs at least one GC and one STT-RAM way")
            self.gc_stack = list(range(gc_ways))
            self.stt_stack = list(range(gc_ways, associativity))
            self.stack = None
        else:
            self.stack = list(range(associativity))
            self.gc_stack = self.stt_stack = None

    @property
    def hybrid(self):
        return bool(self.gc_ways)

    def way_tech(self, way):
        if not self.gc_ways:
            return self.tech
        return TechClass.GC if way < self.gc_ways else TechClass.STTRAM

    @property
    def recency(self):
        if self.gc_ways:
            return self.gc_stack + self.stt_stack
        return list(self.stack)

    def lookup(self, tag):
        return self.where.get(tag)

    def contents(self):
        return {line.tag: w for w, line in enumerate(self.ways) if line.valid}

    def clone(self):
        other = CacheSet.__new__(CacheSet)
        other.ways = [line.copy() for line in self.ways]
        other.where = dict(self.where)
        other.gc_ways = self.gc_ways
        other.tech = self.tech
        other.promote_mru = self.promote_mru
        other.stack = None if self.stack is None else list(self.stack)
        other.gc_stack = None if self.gc_stack is None else list(self.gc_stack)
        other.stt_stack = None if self.stt_stack is None else list(self.stt_stack)
        return other

    # -- plumbing shared by both policies -------------------------------

    def _write_line(self, way, op, tag, payload, now_ps):
        line = self.ways[way]
        previous = line.payload if line.valid else None
        line.tag = tag
        line.valid = True
        line.payload = payload
        line.nrp_counter = 0
        line.stamp_ps = now_ps
        if op is Op.WRITE:
            line.dirty = True
        self.where[tag] = way
        return ArrayWrite(way, payload, previous)

    def _evict(self, way, result):
        line = self.ways[way]
        if not line.valid:
            return
        result.victim = Victim(line.tag, line.dirty, line.payload, way)
        if line.dirty:
            result.reads.append(way)
        del self.where[line.tag]
        line.clear()

    def invalidate(self, way):
        """Drop the line in ``way``; returns it as a :class:`Victim` (or None)."""
        line = self.ways[way]
        if not line.valid:
            return None
        victim = Victim(line.tag, line.dirty, line.payload, way)
        del self.where[line.tag]
        line.clear()
        if self.gc_ways:
            _demote_invalid(self.gc_stack if way < self.gc_ways else self.stt_stack, way)
        else:
            _demote_invalid(self.stack, way)
        return victim

    # -- plain LRU --------------------------------------------------------

    def access_plain(self, op, tag, payload=None, now_ps=0):
        stack = self.stack
        way = self.where.get(tag)
        if way is not None:
            if stack[0] != way:
                stack.remove(way)
                stack.insert(0, way)
            result = AccessResult(Outcome.HIT, op, way, self.tech)
            if op is Op.WRITE:
                result.writes.append(self._write_line(way, op, tag, payload, now_ps))
            else:
                result.reads.append(way)
            return result
        way = stack[-1]
        result = AccessResult(Outcome.MISS, op, way, self.tech)
        self._evict(way, result)
        result.writes.append(self._write_line(way, op, tag, payload, now_ps))
        stack.pop()
        stack.insert(0, way)
        return result

    # -- hybrid GC / STT-RAM ---------------------------------------------

    def access_hybrid(self, op, tag, payload=None, now_ps=0):
        ways = self.ways
        way = self.where.get(tag)
        if way is not None and way < self.gc_ways:
            _place(self.gc_stack, way, ways, mru=True)
            result = AccessResult(Outcome.HIT_GC_WAY, op, way, TechClass.GC)
            if op is Op.WRITE:
                result.writes.append(self._write_line(way, op, tag, payload, now_ps))
            else:
                result.reads.append(way)
            return result

        if way is not None:
            return self._promote(way, op, tag, payload, now_ps)

        # miss everywhere: fill into the STT-RAM LRU slot
        target = self.stt_stack[-1]
        for w in self.stt_stack:
            if not ways[w].valid:
                target = w
                break
        result = AccessResult(Outcome.MISS, op, target, TechClass.STTRAM)
        self._evict(target, result)
        result.writes.append(self._write_line(target, op, tag, payload, now_ps))
        _place(self.stt_stack, target, ways, mru=False)
        return result

    def _promote(self, stt_way, op, tag, payload, now_ps):
        ways = self.ways
        moving = ways[stt_way]
        result = AccessResult(Outcome.HIT_STT_WAY, op, stt_way, TechClass.STTRAM)
        result.reads.append(stt_way)
        if op is Op.WRITE:
            moving_payload, moving_dirty = payload, True
        else:
            moving_payload, moving_dirty = moving.payload, moving.dirty

        gc_way = next((w for w in self.gc_stack if not ways[w].valid), None)
        if gc_way is None:
            n_valid = self.gc_ways
            gc_way = self.gc_stack[n_valid - 1]
        displaced = ways[gc_way]
        displaced_state = displaced.copy() if displaced.valid else None

        # line leaving the STT-RAM way
        del self.where[tag]
        moving.clear()

        # the promoted line is physically rewritten into the GC row, so it is fresh
        gc_write = self._write_line(gc_way, Op.READ, tag, moving_payload, now_ps)
        ways[gc_way].dirty = moving_dirty
        result.writes.append(gc_write)
        result.promotions.append((stt_way, gc_way))
        result.way = gc_way

        if displaced_state is not None:
            self.where[displaced_state.tag] = stt_way
            slot = ways[stt_way]
            slot.tag = displaced_state.tag
            slot.valid = True
            slot.dirty = displaced_state.dirty
            slot.payload = displaced_state.payload
            slot.stamp_ps = displaced_state.stamp_ps
            slot.nrp_epoch = displaced_state.nrp_epoch
            slot.nrp_counter = displaced_state.nrp_counter
            result.writes.append(ArrayWrite(stt_way, displaced_state.payload, moving_payload))
            result.promotions.append((gc_way, stt_way))
            _place(self.stt_stack, stt_way, ways, mru=False)
        else:
            _demote_invalid(self.stt_stack, stt_way)
        _place(self.gc_stack, gc_way, ways, mru=self.promote_mru)
        return result

    def access(self, op, tag, payload=None, now_ps=0):
        if self.gc_ways:
            return self.access_hybrid(op, tag, payload, now_ps)
        return self.access_plain(op, tag, payload, now_ps)

    # -- no-refresh policy counters ------------------------------------

    def nrp_tick(self, saturate=31):
        """Advance every valid line's counter; returns the lines invalidated."""
        expired = []
        for way, line in enumerate(self.ways):
            if not line.valid:
                continue
            line.nrp_counter = min(line.nrp_counter + 1, saturate)
            if line.nrp_counter >= saturate:
                expired.append(self.invalidate(way))
        return expired


def nrp_reset_on_write(line):
    line.nrp_counter = 0


def nrp_invalidate(cache_set, way):
    return cache_set.invalidate(way)


class NrpTracker:
    """Epoch-bucketed equivalent of calling :meth:`CacheSet.nrp_tick` on every set.

    A line's counter is the number of epoch boundaries crossed since its last
    reset, so instead of visiting every line per tick the tracker files each
    reset under its epoch and expires the bucket ``saturate`` ticks later.
    """

    def __init__(self, epoch_ps, saturate=31):
        if epoch_ps <= 0:
            raise ValueError("NRP epoch must be positive")
        self.epoch_ps = epoch_ps
        self.saturate = saturate
        self.epoch = 0
        self._buckets = defaultdict(list)

    def reset(self, set_index, cache_set, way, now_ps):
        e = now_ps // self.epoch_ps
        line = cache_set.ways[way]
        line.nrp_epoch = e
        line.nrp_counter = 0
        self._buckets[e].append((set_index, cache_set, way))

    def counter(self, line):
        return min(self.epoch - line.nrp_epoch, self.saturate) if line.valid else 0

    def advance(self, now_ps):
        """Process ticks up to ``now_ps``; yields (tick_ps, set_index, Victim)."""
        target = now_ps // self.epoch_ps
        out = []
        while self.epoch < target:
            self.epoch += 1
            due = self.epoch - self.saturate
            entries = self._buckets.pop(due, None)
            if not entries:
                continue
            tick_ps = self.epoch * self.epoch_ps
            # way order within a set, as nrp_tick does it
            entries.sort(key=lambda e: (e[0], e[2]))
            for set_index, cache_set, way in entries:
                line = cache_set.ways[way]
                if line.valid and line.nrp_epoch == due:
                    out.append((tick_ps, set_index, cache_set.invalidate(way)))
        return out

    def pending(self):
        return sum(len(v) for v in self._buckets.values())


class Cache:
    """One cache instance: geometry, subarray plan and lazily built sets."""

    def __init__(self, geom, tech=TechClass.SRAM, gc_ways=0, promote_mru=False):
        if not isinstance(geom, CacheGeometry):
            raise TypeError("geom must be a CacheGeometry")
        self.geom = geom
        self.plan = plan_subarrays(geom)
        self.tech = None if gc_ways else TechClass(tech)
        self.gc_ways = gc_ways
        self.promote_mru = promote_mru
        self.sets = {}

    def get_set(self, set_index):
        s = self.sets.get(set_index)
        if s is None:
            s = CacheSet(self.geom.associativity, self.tech, self.gc_ways, self.promote_mru)
            self.sets[set_index] = s
        return s

    def way_tech(self, way):
        if not self.gc_ways:
            return self.tech
        return TechClass.GC if way < self.gc_ways else TechClass.STTRAM

    def split(self, addr):
        return index_address(addr, self.geom)

    def address_of(self, tag, set_index):
        return (tag * self.geom.sets + set_index) * self.geom.line_bytes

    def access(self, op, addr, payload=None, now_ps=0):
        tag, set_index = index_address(addr, self.geom)
        return set_index, self.get_set(set_index).access(op, tag, payload, now_ps)

    def probe(self, addr):
        tag, set_index = index_address(addr, self.geom)
        s = self.sets.get(set_index)
        return None if s is None else s.lookup(tag)

    def valid_lines(self):
        for set_index, s in self.sets.items():
            for way, line in enumerate(s.ways):
                if line.valid:
                    yield set_index, way, line
