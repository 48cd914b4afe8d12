"""Hierarchy and run configuration.

Run configs are YAML documents. Every key is checked against the schema
below; unknown keys are rejected with the dotted path of the offender.
"""
import dataclasses
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

import yaml

from .catalog import NODES, Level, TechClass, load_catalog, scale
from .errors import ConfigError, InvalidGeometry, UnsupportedPair
from .geometry import CacheGeometry
from .units import parse_size

LEVEL_NAMES = ("L1I", "L1D", "L2", "LLC")
CATALOG_LEVEL = {"L1I": Level.L1, "L1D": Level.L1, "L2": Level.L2, "LLC": Level.LLC}
HYBRID = "HYBRID"
DEFAULT_SIMILARITY = {"L1D": Decimal("0.94")}
FALLBACK_SIMILARITY = Decimal("0.76")


@dataclass
class LevelConfig:
    name: str
    capacity_bytes: int
    associativity: int
    tech: str = "SRAM"
    gc_ways: int = 0
    node_nm: int = 28
    nrp: bool = False
    nrp_counter_bits: int = 5
    nrp_read_resets: bool = False
    asymmetric_writes: bool = False
    similarity: Decimal | None = None
    # price payload-less writes with the similarity model instead of failing
    write_model: bool = True
    compare_victim_on_fill: bool = False
    overlap: bool = False
    overlap_window_cycles: int | None = None
    bins: tuple | None = None
    bin_seed: int = 0
    synchronized_subarrays: bool = True
    hybrid_promote_mru: bool = False
    retention_multiplier: int = 1

    @property
    def hybrid(self):
        return self.tech == HYBRID

    def default_similarity(self):
        if self.similarity is not None:
            return self.similarity
        return DEFAULT_SIMILARITY.get(self.name, FALLBACK_SIMILARITY)

    @property
    def geometry(self):
        return CacheGeometry(self.capacity_bytes, self.associativity)


@dataclass
class HierarchyConfig:
    levels: dict
    clock_ghz: Decimal = Decimal("3.4")
    check_invariants: bool = False
    record_events: bool = False

    def __getitem__(self, name):
        return self.levels[name]

    def replace_level(self, name, **changes):
        levels = dict(self.levels)
        levels[name] = dataclasses.replace(levels[name], **changes)
        return dataclasses.replace(self, levels=levels)


@dataclass
class ResolvedLevel:
    """A level config with its technology parameters looked up and scaled."""

    config: LevelConfig
    params: dict  # TechClass -> TechParams

    @property
    def name(self):
        return self.config.name


def resolve_level(lc, catalog=None):
    catalog = catalog or load_catalog()
    where = f"levels.{lc.name}"
    try:
        geom = lc.geometry
    except InvalidGeometry as exc:
        raise ConfigError(f"{where}.capacity", str(exc)) from None
    level = CATALOG_LEVEL[lc.name]
    if lc.node_nm not in NODES:
        raise ConfigError(f"{where}.node", f"{lc.node_nm} nm not in {NODES}")
    if lc.hybrid:
        if level is not Level.LLC:
            raise ConfigError(f"{where}.tech", "a GC/STT-RAM hybrid is only allowed at the LLC")
        if not 0 < lc.gc_ways < geom.associativity:
            raise ConfigError(f"{where}.gc_ways", "must leave at least one GC and one STT-RAM way")
        techs = [(TechClass.GC, True), (TechClass.STTRAM, True)]
    else:
        if lc.gc_ways:
            raise ConfigError(f"{where}.gc_ways", "only valid for tech HYBRID")
        try:
            techs = [(TechClass(lc.tech), False)]
        except ValueError:
            raise ConfigError(f"{where}.tech", f"unknown technology {lc.tech!r}") from None
    params = {}
    for tech, hybrid in techs:
        try:
            p = catalog.params(level, tech, hybrid)
        except UnsupportedPair as exc:
            raise ConfigError(f"{where}.tech", str(exc)) from None
        p = scale(p, 28, lc.node_nm)
        if lc.retention_multiplier != 1 and p.has_refresh:
            p = dataclasses.replace(p, retention_time_ns=p.retention_time_ns * lc.retention_multiplier)
        params[tech] = p
    refreshable = any(t.refreshable for t in params)
    if lc.nrp:
        if lc.hybrid or not refreshable:
            raise ConfigError(f"{where}.nrp", "the no-refresh policy needs a refreshable (GC/eDRAM) level")
        if not 1 <= lc.nrp_counter_bits <= 16:
            raise ConfigError(f"{where}.nrp_counter_bits", "must be in 1..16")
    if lc.bins is not None and not refreshable:
        raise ConfigError(f"{where}.bins", "retention bins need a refreshable technology")
    if lc.overlap and lc.tech != TechClass.GC.value:
        raise ConfigError(f"{where}.overlap", "write/read overlap needs decoupled bitlines (tech GC)")
    if lc.overlap_window_cycles is not None and lc.overlap_window_cycles < 0:
        raise ConfigError(f"{where}.overlap_window_cycles", "must be >= 0")
    if lc.retention_multiplier < 1:
        raise ConfigError(f"{where}.retention_multiplier", "must be >= 1")
    if lc.similarity is not None and not 0 <= lc.similarity <= 1:
        raise ConfigError(f"{where}.similarity", "must lie in [0, 1]")
    return ResolvedLevel(lc, params)


def validate(hconf, catalog=None):
    missing = [n for n in LEVEL_NAMES if n not in hconf.levels]
    if missing:
        raise ConfigError("hierarchy", f"missing levels {missing}")
    if hconf.clock_ghz <= 0:
        raise ConfigError("clock_ghz", "must be positive")
    return {name: resolve_level(hconf.levels[name], catalog) for name in LEVEL_NAMES}


# -- presets ------------------------------------------------------------------

def _lv(name, cap, ways, tech, **kw):
    return LevelConfig(name, parse_size(cap), ways, tech, **kw)


def preset(label):
    """Named hierarchies used by the shipped configs."""
    sram = {
        "L1I": _lv("L1I", "32KB", 8, "SRAM"),
        "L1D": _lv("L1D", "32KB", 8, "SRAM"),
        "L2": _lv("L2", "256KB", 8, "SRAM"),
        "LLC": _lv("LLC", "8MB", 16, "SRAM"),
    }
    gc_cap = {n: dataclasses.replace(lc, tech="GC") for n, lc in sram.items()}
    gc_area = {
        n: dataclasses.replace(lc, tech="GC", capacity_bytes=lc.capacity_bytes * 2,
                               associativity=lc.associativity * 2)
        for n, lc in sram.items()
    }
    hybrid_llc = _lv("LLC", "24MB", 48, HYBRID, gc_ways=16)
    table = {
        "all-sram": sram,
        "all-gc-cap": gc_cap,
        "all-gc-area": gc_area,
        "gc-gc-sttram": {**gc_area, "LLC": _lv("LLC", "32MB", 16, "STTRAM")},
        "gc-gc-edram": {**gc_area, "LLC": _lv("LLC", "32MB", 16, "EDRAM", retention_multiplier=20)},
        "gc-gc-hybrid": {**gc_area, "LLC": hybrid_llc},
        "nrp-l1l2": {
            **{n: dataclasses.replace(gc_area[n], nrp=True) for n in ("L1I", "L1D", "L2")},
            "LLC": hybrid_llc,
        },
    }
    try:
        return HierarchyConfig(levels=dict(table[label]))
    except KeyError:
        raise ConfigError("preset", f"unknown preset {label!r}; known: {sorted(table)}") from None


# -- YAML run configs -----------------------------------------------------------

_LEVEL_KEYS = {
    "capacity": ("capacity_bytes", parse_size),
    "associativity": ("associativity", int),
    "tech": ("tech", lambda v: str(v).upper()),
    "gc_ways": ("gc_ways", int),
    "node": ("node_nm", int),
    "nrp": ("nrp", bool),
    "nrp_counter_bits": ("nrp_counter_bits", int),
    "nrp_read_resets": ("nrp_read_resets", bool),
    "asymmetric_writes": ("asymmetric_writes", bool),
    "similarity": ("similarity", lambda v: None if v is None else Decimal(str(v))),
    "write_model": ("write_model", bool),
    "compare_victim_on_fill": ("compare_victim_on_fill", bool),
    "overlap": ("overlap", bool),
    "overlap_window_cycles": ("overlap_window_cycles", int),
    "bins": ("bins", None),
    "bin_seed": ("bin_seed", int),
    "synchronized_subarrays": ("synchronized_subarrays", bool),
    "hybrid_promote_mru": ("hybrid_promote_mru", bool),
    "retention_multiplier": ("retention_multiplier", int),
}

_TRACE_KEYS = {
    "path", "generator", "working_set", "stride", "iterations", "write_ratio", "count",
    "hot", "cold", "hot_fraction", "gap", "cores", "data", "ifetch_ratio",
}
_TOP_KEYS = {
    "label", "seed", "preset", "clock_ghz", "hierarchy", "trace", "warmup_records",
    "duration_us", "output", "check_invariants", "record_events",
}


@dataclass
class RunConfig:
    label: str
    hierarchy: HierarchyConfig
    trace: dict
    seed: int = 0
    warmup_records: int = 0
    duration_ps: int = 0
    output_dir: str | None = None
    source: str | None = None
    extra: dict = field(default_factory=dict)


def _check_keys(mapping, allowed, where):
    if not isinstance(mapping, dict):
        raise ConfigError(where, "expected a mapping")
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"{where}.{key}" if where else str(key), "unknown key")


def _parse_bins(raw, where):
    if raw is None:
        return None
    if not isinstance(raw, list) or not raw:
        raise ConfigError(where, "expected a non-empty list of {retention_multiplier, fraction}")
    out = []
    for i, item in enumerate(raw):
        _check_keys(item, {"retention_multiplier", "fraction"}, f"{where}[{i}]")
        try:
            out.append((int(item["retention_multiplier"]), float(item["fraction"])))
        except KeyError as exc:
            raise ConfigError(f"{where}[{i}]", f"missing {exc.args[0]}") from None
    if abs(sum(f for _, f in out) - 1) > 1e-9:
        raise ConfigError(where, "fractions must sum to 1")
    return tuple(out)


def _parse_level(name, raw, base):
    where = f"hierarchy.{name}"
    _check_keys(raw, _LEVEL_KEYS, where)
    if base is None:
        for key in ("capacity", "associativity"):
            if key not in raw:
                raise ConfigError(f"{where}.{key}", "required")
        base = LevelConfig(name, 0, 1)
    changes = {}
    for key, value in raw.items():
        attr, conv = _LEVEL_KEYS[key]
        try:
            changes[attr] = _parse_bins(value, f"{where}.bins") if key == "bins" else conv(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.{key}", str(exc)) from None
    return dataclasses.replace(base, **changes)


def parse_run_config(text, source=None):
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<document>", f"not valid YAML: {exc}") from None
    _check_keys(doc, _TOP_KEYS, "")
    if "trace" not in doc:
        raise ConfigError("trace", "required")
    base = preset(doc["preset"]) if "preset" in doc else None
    raw_levels = doc.get("hierarchy", {}) or {}
    _check_keys(raw_levels, set(LEVEL_NAMES), "hierarchy")
    levels = {}
    for name in LEVEL_NAMES:
        prior = base.levels[name] if base else None
        if name in raw_levels:
            levels[name] = _parse_level(name, raw_levels[name], prior)
        elif prior is not None:
            levels[name] = prior
        else:
            raise ConfigError(f"hierarchy.{name}", "required (or give a preset)")
    hconf = HierarchyConfig(
        levels=levels,
        clock_ghz=Decimal(str(doc.get("clock_ghz", "3.4"))),
        check_invariants=bool(doc.get("check_invariants", False)),
        record_events=bool(doc.get("record_events", False)),
    )
    try:
        validate(hconf)
    except ConfigError as exc:
        # report the path as written in the YAML document
        if exc.field.startswith("levels."):
            raise ConfigError("hierarchy." + exc.field[len("levels."):], str(exc).split(": ", 1)[1]) from None
        raise
    trace = doc["trace"]
    _check_keys(trace, _TRACE_KEYS, "trace")
    if ("path" in trace) == ("generator" in trace):
        raise ConfigError("trace", "give exactly one of path or generator")
    if "generator" in trace and trace["generator"] not in ("loop", "random", "stream"):
        raise ConfigError("trace.generator", f"unknown generator {trace['generator']!r}")
    trace = dict(trace)
    if "path" in trace and source is not None:
        trace["path"] = str((Path(source).parent / trace["path"]).resolve())
    output = doc.get("output") or {}
    _check_keys(output, {"dir"}, "output")
    duration_us = Decimal(str(doc.get("duration_us", 0)))
    return RunConfig(
        label=str(doc.get("label") or doc.get("preset") or "run"),
        hierarchy=hconf,
        trace=trace,
        seed=int(doc.get("seed", 0)),
        warmup_records=int(doc.get("warmup_records", 0)),
        duration_ps=int(duration_us * 10**6),
        output_dir=output.get("dir"),
        source=source,
    )


def load_run_config(path):
    with open(path) as fh:
        return parse_run_config(fh.read(), source=str(path))
