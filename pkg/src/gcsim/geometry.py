"""Cache geometry and the (set, way) -> (subarray, row) mapping.

Each way is laid out over one or more 256-row subarrays of 512-bit rows, so a
64 B line is always exactly one row. Caches whose ways hold fewer than 256
lines get a single, shorter subarray per way.
"""
from dataclasses import dataclass

from .errors import InvalidGeometry, OutOfRange
from .units import LINE_BITS, LINE_BYTES

MAX_ROWS = 256


@dataclass(frozen=True)
class CacheGeometry:
    capacity_bytes: int
    associativity: int
    line_bytes: int = LINE_BYTES

    def __post_init__(self):
        if self.capacity_bytes <= 0 or self.associativity <= 0:
            raise InvalidGeometry("capacity and associativity must be positive")
        if self.line_bytes != LINE_BYTES:
            raise InvalidGeometry(f"line size must be {LINE_BYTES} B")
        if self.capacity_bytes % (self.line_bytes * self.associativity):
            raise InvalidGeometry(
                f"{self.capacity_bytes} B is not divisible into {self.associativity} ways of "
                f"{self.line_bytes} B lines"
            )
        sets = self.sets
        if sets & (sets - 1):
            raise InvalidGeometry(f"set count {sets} is not a power of two")

    @property
    def sets(self):
        return self.capacity_bytes // (self.line_bytes * self.associativity)

    @property
    def lines(self):
        return self.sets * self.associativity


@dataclass(frozen=True)
class SubarrayPlan:
    sets: int
    associativity: int
    rows_per_subarray: int
    subarrays_per_way: int
    row_bits: int = LINE_BITS

    @property
    def total_subarrays(self):
        return self.associativity * self.subarrays_per_way

    def populated_rows(self, local_index):
        """Rows actually holding sets in subarray ``local_index`` of a way."""
        start = local_index * self.rows_per_subarray
        return max(0, min(self.rows_per_subarray, self.sets - start))


def plan_subarrays(geom):
    sets = geom.sets
    if sets & (sets - 1):
        raise InvalidGeometry(f"set count {sets} is not a power of two")
    if sets >= MAX_ROWS:
        rows = MAX_ROWS
        per_way = -(-sets // MAX_ROWS)
    else:
        rows = sets
        per_way = 1
    return SubarrayPlan(sets, geom.associativity, rows, per_way)


def locate(set_index, way, plan):
    if not (0 <= set_index < plan.sets and 0 <= way < plan.associativity):
        raise OutOfRange(f"(set {set_index}, way {way}) outside {plan.sets}x{plan.associativity}")
    rows = plan.rows_per_subarray
    return way * plan.subarrays_per_way + set_index // rows, set_index % rows


def index_address(addr, geom):
    """Split a byte address into (tag, set)."""
    line = addr // geom.line_bytes
    return line // geom.sets, line % geom.sets


def stagger_period(plan, retention_ns):
    """Interval between successive row refreshes within one subarray (ns)."""
    return retention_ns / plan.rows_per_subarray
