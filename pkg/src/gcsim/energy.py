"""Energy accounting in integer attojoules.

Every array access moves a whole 512-bit row, so per-access energy is the
per-bit figure times 512. Writes on decoupled-bitline arrays can be priced
asymmetrically: bits whose value matches what the write bitline last drove
cost the same-bit energy, the rest the full write energy.
"""
from dataclasses import dataclass, field, fields
from decimal import Decimal
from fractions import Fraction

from .catalog import dram_params
from .errors import MissingPayload
from .units import LINE_BITS

_LINE_MASK = (1 << LINE_BITS) - 1


@dataclass
class LevelEnergy:
    reads: int = 0
    writes: int = 0
    fills: int = 0
    dynamic_read_aj: int = 0
    dynamic_write_aj: int = 0
    refresh_aj: int = 0
    leakage_aj: int = 0
    refresh_events: int = 0
    dissimilar_bits: int = 0
    total_write_bits: int = 0

    @property
    def dynamic_aj(self):
        return self.dynamic_read_aj + self.dynamic_write_aj

    @property
    def total_aj(self):
        return self.dynamic_aj + self.refresh_aj + self.leakage_aj

    def merge(self, other):
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))


@dataclass
class DramEnergy:
    reads: int = 0
    writes: int = 0
    energy_aj: int = 0


@dataclass
class EnergyLedger:
    levels: dict = field(default_factory=dict)
    dram: DramEnergy = field(default_factory=DramEnergy)
    # optional event log: tuples consumed by an independent re-pricer
    log: list | None = None

    def level(self, name):
        entry = self.levels.get(name)
        if entry is None:
            entry = self.levels[name] = LevelEnergy()
        return entry

    @property
    def cache_aj(self):
        return sum(lv.total_aj for lv in self.levels.values())

    @property
    def total_aj(self):
        return self.cache_aj + self.dram.energy_aj

    def merge(self, other):
        for name, lv in other.levels.items():
            self.level(name).merge(lv)
        self.dram.reads += other.dram.reads
        self.dram.writes += other.dram.writes
        self.dram.energy_aj += other.dram.energy_aj

    def _note(self, *event):
        if self.log is not None:
            self.log.append(event)


class WblShadow:
    """Last value driven onto each subarray's write bitlines (zero at reset)."""

    __slots__ = ("_last",)

    def __init__(self):
        self._last = {}

    def last(self, subarray):
        return self._last.get(subarray, 0)

    def update(self, subarray, line):
        self._last[subarray] = line


class PriceCard:
    """Per-bit prices of one TechParams converted to aJ once, for hot loops.

    Exposes the same pricing methods as TechParams, so it can stand in for it
    in every ``charge_*`` function.
    """

    __slots__ = ("tech", "_read", "_write", "_same", "_refresh", "leakage_pw_per_bit")

    def __init__(self, params):
        self.tech = params.tech
        self._read = params.read_aj_per_bit()
        self._write = params.write_aj_per_bit()
        self._same = params.same_bit_aj_per_bit()
        self._refresh = params.refresh_aj_per_bit() if params.has_refresh else None
        self.leakage_pw_per_bit = params.leakage_pw_per_bit

    def read_aj_per_bit(self):
        return self._read

    def write_aj_per_bit(self):
        return self._write

    def same_bit_aj_per_bit(self):
        return self._same

    def refresh_aj_per_bit(self):
        if self._refresh is None:
            raise ValueError(f"{self.tech.value} has no refresh energy")
        return self._refresh


def charge_read(ledger, level, params, tech=None):
    aj = LINE_BITS * params.read_aj_per_bit()
    lv = ledger.level(level)
    lv.reads += 1
    lv.dynamic_read_aj += aj
    ledger._note("R", level, tech or params.tech.value)
    return aj


def _count_write(ledger, level, fill):
    lv = ledger.level(level)
    lv.writes += 1
    if fill:
        lv.fills += 1
    lv.total_write_bits += LINE_BITS
    return lv


def charge_write_full(ledger, level, params, fill=False, tech=None):
    aj = LINE_BITS * params.write_aj_per_bit()
    lv = _count_write(ledger, level, fill)
    lv.dissimilar_bits += LINE_BITS
    lv.dynamic_write_aj += aj
    ledger._note("W", level, tech or params.tech.value, "full", LINE_BITS, fill)
    return aj


def charge_write_asymmetric(
    ledger, level, subarray, new_line, shadow, params, fill=False, compare_to=None, tech=None
):
    """Price a write by its dissimilar bits against the subarray's WBL state.

    ``compare_to`` replaces the shadow as the reference value (used when fills
    are compared with the victim line instead).
    """
    if new_line is None:
        raise MissingPayload(f"{level}: asymmetric write without payload data")
    new_line &= _LINE_MASK
    reference = shadow.last(subarray) if compare_to is None else compare_to
    d = (new_line ^ reference).bit_count()
    aj = d * params.write_aj_per_bit() + (LINE_BITS - d) * params.same_bit_aj_per_bit()
    shadow.update(subarray, new_line)
    lv = _count_write(ledger, level, fill)
    lv.dissimilar_bits += d
    lv.dynamic_write_aj += aj
    ledger._note("W", level, tech or params.tech.value, "asym", d, fill)
    return aj


def write_model_aj(params, similarity):
    s = Fraction(Decimal(similarity))
    if not 0 <= s <= 1:
        raise ValueError("similarity must lie in [0, 1]")
    exact = LINE_BITS * (s * params.same_bit_aj_per_bit() + (1 - s) * params.write_aj_per_bit())
    return round(exact)


def charge_write_model(ledger, level, params, similarity, fill=False, tech=None, aj=None):
    """Price a write assuming a fixed fraction of its bits match the WBL state.

    ``aj`` may carry a precomputed :func:`write_model_aj` result.
    """
    if aj is None:
        aj = write_model_aj(params, similarity)
    lv = _count_write(ledger, level, fill)
    lv.dynamic_write_aj += aj
    ledger._note("W", level, tech or params.tech.value, "model", str(similarity), fill)
    return aj


def leakage_aj(bits, duration_ps, params):
    # pW * ps = 1e-24 J = 1e-6 aJ
    exact = Fraction(Decimal(params.leakage_pw_per_bit)) * bits * duration_ps / 10**6
    return exact.numerator // exact.denominator


def charge_leakage(ledger, level, bits, duration_ps, params, tech=None):
    aj = leakage_aj(bits, duration_ps, params)
    ledger.level(level).leakage_aj += aj
    ledger._note("LEAK", level, tech or params.tech.value, bits, duration_ps)
    return aj


def charge_refresh(ledger, level, events, params, tech=None):
    aj = events * LINE_BITS * params.refresh_aj_per_bit()
    lv = ledger.level(level)
    lv.refresh_events += events
    lv.refresh_aj += aj
    ledger._note("REF", level, tech or params.tech.value, events)
    return aj


def charge_dram(ledger, op, dram=None):
    dram = dram or dram_params()
    if op == "R":
        aj = dram.read_aj()
        ledger.dram.reads += 1
    elif op == "W":
        aj = dram.write_aj()
        ledger.dram.writes += 1
    else:
        raise ValueError(f"unknown DRAM op {op!r}")
    ledger.dram.energy_aj += aj
    ledger._note("DRAM", op)
    return aj


def edp_exact(ledger, total_time_ps):
    """Energy-delay product in J*s as an exact fraction."""
    return Fraction(ledger.total_aj * total_time_ps, 10**30)


def edp(ledger, total_time_ps):
    return float(edp_exact(ledger, total_time_ps))
