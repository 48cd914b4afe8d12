"""Technology parameter tables and the node scaling rule.

Every other module reads latency/energy/refresh constants through
:func:`builtin_params` (or a :class:`Catalog` instance) so that an override
file can swap any entry without touching code.
"""
import configparser
import enum
import os
from dataclasses import dataclass, fields, replace
from decimal import Decimal
from functools import lru_cache
from importlib import resources

from .errors import UnsupportedPair
from .units import ns_to_cycles, ns_to_ps, pj_to_aj

OVERRIDE_ENV = "GCSIM_CATALOG"
REFERENCE_CLOCK_GHZ = Decimal("3.4")
NODES = (28, 22, 14, 10, 7)


class TechClass(str, enum.Enum):
    SRAM = "SRAM"
    GC = "GC"
    EDRAM = "EDRAM"
    STTRAM = "STTRAM"

    @property
    def decoupled_bitlines(self):
        return self is TechClass.GC

    @property
    def refreshable(self):
        return self in (TechClass.GC, TechClass.EDRAM)


class Level(str, enum.Enum):
    L1 = "L1"
    L2 = "L2"
    LLC = "LLC"


_DECIMAL_FIELDS = (
    "read_latency_ns",
    "write_latency_ns",
    "read_energy_pj_per_bit",
    "write_energy_pj_per_bit",
    "same_bit_write_energy_pj_per_bit",
    "leakage_pw_per_bit",
)
_REFRESH_FIELDS = ("retention_time_ns", "refresh_row_period_ns", "refresh_energy_pj_per_bit")


@dataclass(frozen=True)
class TechParams:
    tech: TechClass
    read_latency_ns: Decimal
    write_latency_ns: Decimal
    read_latency_cycles: int
    write_latency_cycles: int
    read_energy_pj_per_bit: Decimal
    write_energy_pj_per_bit: Decimal
    same_bit_write_energy_pj_per_bit: Decimal
    leakage_pw_per_bit: Decimal
    retention_time_ns: Decimal | None = None
    refresh_row_period_ns: Decimal | None = None
    refresh_energy_pj_per_bit: Decimal | None = None

    def __post_init__(self):
        if self.same_bit_write_energy_pj_per_bit > self.write_energy_pj_per_bit:
            raise ValueError("same-bit write energy exceeds write energy")
        present = [getattr(self, f) is not None for f in _REFRESH_FIELDS]
        if any(present) and not all(present):
            raise ValueError("refresh fields must be given together")
        if self.tech is TechClass.SRAM and (
            self.same_bit_write_energy_pj_per_bit != self.write_energy_pj_per_bit
        ):
            raise ValueError("SRAM same-bit write energy must equal write energy")
        for name in _DECIMAL_FIELDS:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def has_refresh(self):
        return self.retention_time_ns is not None

    # fixed-point views
    def read_aj_per_bit(self):
        return pj_to_aj(self.read_energy_pj_per_bit)

    def write_aj_per_bit(self):
        return pj_to_aj(self.write_energy_pj_per_bit)

    def same_bit_aj_per_bit(self):
        return pj_to_aj(self.same_bit_write_energy_pj_per_bit)

    def refresh_aj_per_bit(self):
        return pj_to_aj(self.refresh_energy_pj_per_bit)

    def retention_ps(self):
        return ns_to_ps(self.retention_time_ns)

    def refresh_row_period_ps(self):
        return ns_to_ps(self.refresh_row_period_ns)

    def read_cycles(self, clock_ghz=REFERENCE_CLOCK_GHZ):
        return max(1, ns_to_cycles(self.read_latency_ns, clock_ghz))

    def write_cycles(self, clock_ghz=REFERENCE_CLOCK_GHZ):
        return max(1, ns_to_cycles(self.write_latency_ns, clock_ghz))


@dataclass(frozen=True)
class DramParams:
    access_latency_ns: Decimal
    read_energy_nj_per_line: Decimal
    write_energy_nj_per_line: Decimal

    def read_aj(self):
        return pj_to_aj(self.read_energy_nj_per_line * 1000)

    def write_aj(self):
        return pj_to_aj(self.write_energy_nj_per_line * 1000)

    def latency_cycles(self, clock_ghz=REFERENCE_CLOCK_GHZ):
        return ns_to_cycles(self.access_latency_ns, clock_ghz)


def _section_key(level, tech, hybrid):
    level = Level(level)
    prefix = "LLC-HYBRID" if hybrid else level.value
    if hybrid and level is not Level.LLC:
        raise UnsupportedPair(level.value, TechClass(tech).value, "hybrid split only at LLC")
    return f"{prefix}.{TechClass(tech).value}"


def _params_from_section(name, section):
    tech = TechClass(name.split(".", 1)[1])
    kwargs = {"tech": tech}
    for f in fields(TechParams):
        if f.name == "tech":
            continue
        raw = section.get(f.name)
        if raw is None:
            if f.name in _REFRESH_FIELDS:
                kwargs[f.name] = None
                continue
            raise ValueError(f"[{name}] missing key {f.name}")
        kwargs[f.name] = int(raw) if f.name.endswith("_cycles") else Decimal(raw)
    unknown = set(section) - {f.name for f in fields(TechParams)}
    if unknown:
        raise ValueError(f"[{name}] unknown keys {sorted(unknown)}")
    return TechParams(**kwargs)


class Catalog:
    """Immutable mapping of (level, tech[, hybrid]) to :class:`TechParams`."""

    def __init__(self, entries, dram):
        self._entries = dict(entries)
        self.dram = dram

    @classmethod
    def from_text(cls, *texts):
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        for text in texts:
            parser.read_string(text)
        entries = {}
        dram = None
        for name in parser.sections():
            section = dict(parser[name])
            if name == "DRAM":
                dram = DramParams(**{k: Decimal(v) for k, v in section.items()})
            else:
                entries[name] = _params_from_section(name, section)
        if dram is None:
            raise ValueError("catalog has no [DRAM] section")
        return cls(entries, dram)

    def params(self, level, tech, hybrid=False):
        key = _section_key(level, tech, hybrid)
        try:
            return self._entries[key]
        except KeyError:
            raise UnsupportedPair(Level(level).value, TechClass(tech).value) from None

    def keys(self):
        return sorted(self._entries)


def builtin_text():
    return resources.files("gcsim").joinpath("data/catalog.ini").read_text()


@lru_cache(maxsize=None)
def _load(override_path):
    texts = [builtin_text()]
    if override_path:
        with open(override_path) as fh:
            texts.append(fh.read())
    return Catalog.from_text(*texts)


def load_catalog(override_path=None):
    """Built-in catalog, with ``override_path`` (or $GCSIM_CATALOG) layered on top."""
    return _load(override_path or os.environ.get(OVERRIDE_ENV) or None)


def builtin_params(level, tech, hybrid=False):
    return load_catalog().params(level, tech, hybrid)


def dram_params():
    return load_catalog().dram


def _node_index(node_nm):
    try:
        return NODES.index(int(node_nm))
    except ValueError:
        raise ValueError(f"unknown technology node {node_nm} nm; expected one of {NODES}") from None


def scale(params, from_nm, to_nm):
    """Move ``params`` between technology nodes.

    Each step down halves every per-bit energy, the leakage and the retention
    time; each step up doubles them. Latencies are left alone.
    """
    steps = _node_index(to_nm) - _node_index(from_nm)
    if steps == 0:
        return params
    factor = Decimal(2) ** -steps
    changes = {
        name: getattr(params, name) * factor
        for name in (
            "read_energy_pj_per_bit",
            "write_energy_pj_per_bit",
            "same_bit_write_energy_pj_per_bit",
            "leakage_pw_per_bit",
            "retention_time_ns",
            "refresh_energy_pj_per_bit",
        )
        if getattr(params, name) is not None
    }
    return replace(params, **changes)
