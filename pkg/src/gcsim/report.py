"""Report files.

A report is line-oriented ``key = value`` text with a fixed field order, so
that two reports diff cleanly. Energies are written twice: as exact integer
attojoules (``*_aj``) and as decimal picojoules (``*_pj``). Ratios are exact
fractions rendered with a fixed number of digits.
"""
import csv
import io
from dataclasses import fields
from fractions import Fraction

from .config import LEVEL_NAMES
from .energy import LevelEnergy
from .engine import LevelStats
from .errors import ReportError
from .units import aj_to_pj

REPORT_VERSION = 1
MAGIC = "# gcsim report"
DIGITS = 9

ENERGY_FIELDS = [f.name for f in fields(LevelEnergy)]
STAT_FIELDS = [f.name for f in fields(LevelStats)]


def fmt_fraction(x, digits=DIGITS):
    """Fixed-point rendering of an exact fraction (round half even)."""
    x = Fraction(x)
    scaled = round(x * 10**digits)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def _pj(aj):
    return format(aj_to_pj(aj).normalize(), "f") if aj else "0"


def report_items(report):
    """Ordered (key, value-string) pairs for a SimReport."""
    led = report.ledger
    items = [
        ("report_version", str(REPORT_VERSION)),
        ("label", report.label),
        ("cores", str(report.cores)),
        ("records", str(report.records)),
        ("clock_ghz", str(report.clock_ghz)),
        ("start_ps", str(report.start_ps)),
        ("end_ps", str(report.end_ps)),
        ("total_time_ps", str(report.total_time_ps)),
        ("total_latency_cycles", str(report.total_latency_cycles)),
        ("amat_cycles", fmt_fraction(report.amat_cycles)),
        ("refresh_conflict_fraction", fmt_fraction(report.refresh_conflict_fraction)),
        ("overlapped_write_fraction", fmt_fraction(report.overlapped_write_fraction)),
        ("nrp_miss_fraction", fmt_fraction(report.nrp_miss_fraction)),
        ("writebacks", str(report.writebacks)),
        ("writeback_bandwidth_bytes_per_s", fmt_fraction(report.writeback_bandwidth_bytes_per_s, 3)),
        ("edp_js", f"{float(report.edp):.9e}"),
        ("energy.total_aj", str(led.total_aj)),
        ("energy.total_pj", _pj(led.total_aj)),
        ("energy.cache_aj", str(led.cache_aj)),
        ("energy.cache_dynamic_aj", str(sum(lv.dynamic_aj for lv in led.levels.values()))),
        ("energy.dram_aj", str(led.dram.energy_aj)),
        ("dram.reads", str(led.dram.reads)),
        ("dram.writes", str(led.dram.writes)),
    ]
    for name in LEVEL_NAMES:
        st = report.levels[name]
        for f in STAT_FIELDS:
            items.append((f"{name}.{f}", str(getattr(st, f))))
        items.append((f"{name}.lookups", str(st.lookups)))
        items.append((f"{name}.hits", str(st.hits)))
        items.append((f"{name}.misses", str(st.misses)))
        items.append((f"{name}.misses_per_kilo_record", fmt_fraction(report.misses_per_kilo_record(name))))
        items.append((f"{name}.refresh_busy_fraction", fmt_fraction(st.refresh_busy_fraction)))
        lv = led.level(name)
        for f in ENERGY_FIELDS:
            items.append((f"{name}.energy.{f}", str(getattr(lv, f))))
        items.append((f"{name}.energy.dynamic_aj", str(lv.dynamic_aj)))
        items.append((f"{name}.energy.total_aj", str(lv.total_aj)))
        items.append((f"{name}.energy.total_pj", _pj(lv.total_aj)))
    return items


def render(report):
    lines = [MAGIC]
    lines.extend(f"{k} = {v}" for k, v in report_items(report))
    return "\n".join(lines) + "\n"


def parse(text):
    """Report text -> ordered dict of strings; checks the schema version."""
    out = {}
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise ReportError("not a gcsim report (missing header line)")
    for no, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(" = ")
        if not sep:
            raise ReportError(f"line {no}: expected 'key = value'")
        out[key] = value
    version = out.get("report_version")
    if version is None:
        raise ReportError("report has no report_version")
    if int(version) != REPORT_VERSION:
        raise ReportError(f"report version {version}; this tool reads version {REPORT_VERSION}")
    return out


def load(path):
    with open(path) as fh:
        return parse(fh.read())


# keys normalized by ``compare`` (value of A divided by value of B)
COMPARE_KEYS = (
    ["energy.total_aj", "energy.cache_aj", "energy.cache_dynamic_aj", "energy.dram_aj",
     "dram.reads", "dram.writes", "amat_cycles", "total_time_ps", "edp_js"]
    + [f"{n}.energy.{f}" for n in LEVEL_NAMES
       for f in ("dynamic_aj", "refresh_aj", "leakage_aj", "total_aj")]
    + [f"{n}.demand_misses" for n in LEVEL_NAMES]
)


def compare(a, b):
    """Rows (key, a, b, a/b) for two parsed reports of the same version."""
    if a.get("report_version") != b.get("report_version"):
        raise ReportError(
            f"report versions differ ({a.get('report_version')} vs {b.get('report_version')})"
        )
    rows = []
    for key in COMPARE_KEYS:
        if key not in a or key not in b:
            continue
        va, vb = Fraction(a[key]), Fraction(b[key])
        ratio = va / vb if vb else None
        rows.append((key, a[key], b[key], ratio))
    return rows


def format_compare(rows, label_a="A", label_b="B"):
    width = max(len(r[0]) for r in rows) if rows else 10
    out = [f"{'metric':<{width}}  {label_a:>20}  {label_b:>20}  {'ratio':>12}"]
    for key, va, vb, ratio in rows:
        r = "n/a" if ratio is None else fmt_fraction(ratio, 6)
        out.append(f"{key:<{width}}  {va:>20}  {vb:>20}  {r:>12}")
    return "\n".join(out) + "\n"


def compare_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric", "a", "b", "ratio"])
    for key, va, vb, ratio in rows:
        w.writerow([key, va, vb, "" if ratio is None else fmt_fraction(ratio, 6)])
    return buf.getvalue()


# -- plot-ready series ------------------------------------------------------------

def energy_csv(parsed):
    """Per-level energy breakdown in pJ: one row per level plus DRAM."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["level", "dynamic_read_pj", "dynamic_write_pj", "refresh_pj", "leakage_pj"])
    for name in LEVEL_NAMES:
        w.writerow([name] + [
            _pj(int(parsed[f"{name}.energy.{f}"]))
            for f in ("dynamic_read_aj", "dynamic_write_aj", "refresh_aj", "leakage_aj")
        ])
    w.writerow(["DRAM", _pj(int(parsed["energy.dram_aj"])), "0", "0", "0"])
    return buf.getvalue()


def levels_csv(parsed):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = ["demand_lookups", "demand_hits", "demand_misses", "writeback_lookups",
            "writebacks_out", "refresh_events", "refresh_conflicts", "nrp_invalidations"]
    w.writerow(["level"] + cols)
    for name in LEVEL_NAMES:
        w.writerow([name] + [parsed[f"{name}.{c}"] for c in cols])
    return buf.getvalue()


def summary_table(parsed):
    """Human-readable summary of a parsed report."""
    head = f"{'level':<5} {'lookups':>10} {'hits':>10} {'misses':>10} {'wb out':>8} {'energy pJ':>18}"
    out = [f"run {parsed['label']}: {parsed['records']} records, "
           f"{parsed['total_time_ps']} ps, AMAT {parsed['amat_cycles']} cycles", head]
    for name in LEVEL_NAMES:
        out.append(
            f"{name:<5} {parsed[f'{name}.lookups']:>10} {parsed[f'{name}.hits']:>10} "
            f"{parsed[f'{name}.misses']:>10} {parsed[f'{name}.writebacks_out']:>8} "
            f"{parsed[f'{name}.energy.total_pj']:>18}"
        )
    out.append(f"DRAM  reads {parsed['dram.reads']}, writes {parsed['dram.writes']}, "
               f"{_pj(int(parsed['energy.dram_aj']))} pJ")
    out.append(f"total {parsed['energy.total_pj']} pJ, EDP {parsed['edp_js']} J*s")
    return "\n".join(out) + "\n"
