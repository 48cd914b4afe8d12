"""Fixed-point conversions.

Energies are carried as integer attojoules and times as integer
picoseconds so that ledgers add exactly.
"""
from decimal import Decimal
from fractions import Fraction

AJ_PER_PJ = 10**6
PS_PER_NS = 1000
LINE_BITS = 512
LINE_BYTES = 64


def _exact_int(value, scale, what):
    scaled = Decimal(value) * scale
    if scaled != scaled.to_integral_value():
        raise ValueError(f"{what} {value} is not representable exactly")
    return int(scaled)


def pj_to_aj(pj):
    return _exact_int(pj, AJ_PER_PJ, "energy")


def ns_to_ps(ns):
    return _exact_int(ns, PS_PER_NS, "time")


def aj_to_pj(aj):
    """Exact decimal picojoules for an attojoule count."""
    return Decimal(aj).scaleb(-6)


def ns_to_cycles(ns, clock_ghz):
    """Ceil of ``ns * clock_ghz`` computed without float rounding."""
    v = Fraction(Decimal(ns)) * Fraction(Decimal(clock_ghz))
    return -((-v.numerator) // v.denominator)


def cycles_to_ps(cycles, clock_ghz):
    """Floor of the picosecond instant at which ``cycles`` cycles elapse."""
    f = Fraction(Decimal(clock_ghz))
    v = Fraction(cycles * 1000) / f
    return v.numerator // v.denominator


def ps_to_cycles_ceil(ps, clock_ghz):
    v = Fraction(ps) * Fraction(Decimal(clock_ghz)) / 1000
    return -((-v.numerator) // v.denominator)


def parse_size(text):
    """'32KB' / '8MB' / 4096 -> bytes."""
    if isinstance(text, int):
        return text
    s = str(text).strip().upper().replace(" ", "")
    for suffix, mult in (("KB", 1 << 10), ("MB", 1 << 20), ("GB", 1 << 30), ("B", 1)):
        if s.endswith(suffix):
            return int(s[: -len(suffix)]) * mult
    return int(s)
