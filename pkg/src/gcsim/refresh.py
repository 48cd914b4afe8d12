"""Staggered concurrent refresh.

Every subarray refreshes one row per stagger period (retention / rows) and
walks its rows round-robin, so each row is refreshed once per retention
window. Slot ``k`` of subarray ``s`` starts at ``anchor[s] + k * period`` and
refreshes row ``k mod rows``.

For technologies with decoupled bitlines a slot is two halves: the row is
read during the first half (writes may proceed) and written back during the
second (reads may proceed). Other technologies block the subarray for the
whole slot.

All queries are closed-form in the slot index, so large caches never need an
event per refresh; :meth:`RefreshSchedule.advance` materializes events when a
caller wants them.
"""
import random
from dataclasses import dataclass

from .cache import Op


@dataclass(frozen=True)
class RefreshEvent:
    subarray: int
    row: int
    start_ps: int


@dataclass(frozen=True)
class RetentionBins:
    """Rows grouped by retention; ``bins`` holds (retention_multiplier, fraction)."""

    bins: tuple

    def __post_init__(self):
        if not self.bins:
            raise ValueError("at least one retention bin is required")
        total = 0
        for mult, frac in self.bins:
            if int(mult) != mult or mult < 1:
                raise ValueError("retention multipliers must be integers >= 1")
            if frac < 0:
                raise ValueError("bin fractions must be non-negative")
            total += frac
        if abs(total - 1) > 1e-9:
            raise ValueError(f"bin fractions sum to {total}, not 1")

    def assign(self, rows, seed=0):
        """Per-row multiplier list; the row order is a seeded shuffle."""
        counts = [int(frac * rows) for _, frac in self.bins]
        # hand leftover rows to the worst (smallest multiplier) bins first
        order = sorted(range(len(self.bins)), key=lambda i: self.bins[i][0])
        i = 0
        while sum(counts) < rows:
            counts[order[i % len(order)]] += 1
            i += 1
        mults = []
        for (mult, _), n in zip(self.bins, counts):
            mults.extend([int(mult)] * n)
        random.Random(seed).shuffle(mults)
        return mults


class RefreshSchedule:
    """Refresh timing for every subarray of one cache array.

    ``populated`` gives the number of occupied rows per subarray; unoccupied
    rows keep their slot in the rotation but are skipped.
    """

    def __init__(
        self,
        rows,
        n_subarrays,
        retention_ps,
        row_period_ps,
        decoupled=True,
        synchronized=True,
        populated=None,
    ):
        self.rows = rows
        self.n_subarrays = n_subarrays
        self.retention_ps = retention_ps
        self.period_ps = retention_ps // rows
        if self.period_ps <= 0:
            raise ValueError("retention too short for the row count")
        self.decoupled = decoupled
        self.slot_ps = 2 * row_period_ps if decoupled else row_period_ps
        self.half_ps = row_period_ps if decoupled else None
        self.synchronized = synchronized
        if synchronized:
            self.anchors = None
        else:
            self.anchors = [s * self.period_ps // n_subarrays for s in range(n_subarrays)]
        self.populated = populated
        self.row_mult = None
        self.conflicts = 0
        self.checks = 0
        # per-subarray round-robin state for advance()
        self.next_row = [0] * n_subarrays
        self.next_slot = [0] * n_subarrays
        self.now_ps = 0

    def anchor(self, subarray):
        return 0 if self.anchors is None else self.anchors[subarray]

    def _rows_in(self, subarray):
        if self.populated is None:
            return self.rows
        return self.populated[subarray]

    def _row_mult(self, row):
        return 1 if self.row_mult is None else self.row_mult[row]

    def _slot_active(self, subarray, k):
        row = k % self.rows
        if row >= self._rows_in(subarray):
            return False
        m = self._row_mult(row)
        return m == 1 or (k // self.rows) % m == 0

    def row_retention_ps(self, row):
        return self.retention_ps * self._row_mult(row)

    # -- event stream -----------------------------------------------------

    def advance(self, now_ps):
        """Emit every refresh slot starting before ``now_ps`` not yet emitted."""
        if now_ps < self.now_ps:
            raise ValueError("refresh time cannot move backwards")
        self.now_ps = now_ps
        events = []
        for s in range(self.n_subarrays):
            a = self.anchor(s)
            k = self.next_slot[s]
            while a + k * self.period_ps < now_ps:
                if self._slot_active(s, k):
                    events.append(RefreshEvent(s, k % self.rows, a + k * self.period_ps))
                k += 1
            self.next_slot[s] = k
            self.next_row[s] = k % self.rows
        events.sort(key=lambda e: (e.start_ps, e.subarray))
        return events

    # -- closed forms -----------------------------------------------------

    def _slots_before(self, subarray, t_ps):
        a = self.anchor(subarray)
        if t_ps <= a:
            return 0
        return -(-(t_ps - a) // self.period_ps)

    def _events_in_subarray(self, subarray, t_ps):
        k_total = self._slots_before(subarray, t_ps)
        n_rows = self._rows_in(subarray)
        full, extra = divmod(k_total, self.rows)
        if self.row_mult is None:
            return full * n_rows + min(extra, n_rows)
        count = 0
        for row in range(n_rows):
            rounds = full + (1 if row < extra else 0)
            m = self.row_mult[row]
            count += -(-rounds // m)
        return count

    def _sum_subarrays(self, fn, t_ps):
        if self.anchors is None and self.populated is None:
            return self.n_subarrays * fn(0, t_ps)
        if self.anchors is None:
            # synchronized: subarrays differ only by their populated row count
            memo = {}
            total = 0
            for s in range(self.n_subarrays):
                key = self.populated[s]
                if key not in memo:
                    memo[key] = fn(s, t_ps)
                total += memo[key]
            return total
        return sum(fn(s, t_ps) for s in range(self.n_subarrays))

    def events_before(self, t_ps):
        """Number of refresh slots (over all subarrays) starting before ``t_ps``."""
        return self._sum_subarrays(self._events_in_subarray, t_ps)

    def _busy_in_subarray(self, subarray, t_ps):
        busy = self._events_in_subarray(subarray, t_ps) * self.slot_ps
        # trim the slot still running at t_ps
        k_last = self._slots_before(subarray, t_ps) - 1
        if k_last >= 0 and self._slot_active(subarray, k_last):
            start = self.anchor(subarray) + k_last * self.period_ps
            busy -= max(0, start + self.slot_ps - t_ps)
        return busy

    def busy_ps(self, t_ps):
        """Total subarray-time spent in refresh slots within [0, t_ps)."""
        return self._sum_subarrays(self._busy_in_subarray, t_ps)

    def busy_fraction(self, t_ps):
        if t_ps <= 0:
            return 0.0
        return self.busy_ps(t_ps) / (t_ps * self.n_subarrays)

    def last_refresh_ps(self, subarray, row, t_ps):
        """Start of the latest refresh of ``row`` at or before ``t_ps`` (None if none)."""
        a = self.anchor(subarray)
        if t_ps < a:
            return None
        k = (t_ps - a) // self.period_ps
        k -= (k - row) % self.rows
        m = self._row_mult(row)
        if m != 1:
            r = k // self.rows
            k -= (r % m) * self.rows
        if k < 0:
            return None
        return a + k * self.period_ps

    def collides(self, subarray, op, t_ps):
        """Delay (ps) imposed by a refresh slot on an access at ``t_ps``, or None."""
        self.checks += 1
        a = self.anchor(subarray)
        if t_ps < a:
            return None
        k, offset = divmod(t_ps - a, self.period_ps)
        if offset >= self.slot_ps or not self._slot_active(subarray, k):
            return None
        if self.decoupled:
            first_half = offset < self.half_ps
            if (op is Op.WRITE and first_half) or (op is Op.READ and not first_half):
                return None
            delay = (self.half_ps - offset) if first_half else (self.slot_ps - offset)
        else:
            delay = self.slot_ps - offset
        self.conflicts += 1
        return delay


def apply_bins(schedule, bins, seed=0):
    """Give each row of ``schedule`` the refresh interval of its retention bin."""
    mults = bins.assign(schedule.rows, seed)
    schedule.row_mult = None if all(m == 1 for m in mults) else mults
    return schedule


def refresh_energy_aj(events, params, row_bits=512):
    """Energy of ``events`` row refreshes (an int count or an iterable of events)."""
    n = events if isinstance(events, int) else sum(1 for _ in events)
    return n * row_bits * params.refresh_aj_per_bit()
