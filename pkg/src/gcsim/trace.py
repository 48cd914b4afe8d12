"""Memory-reference traces: text and binary formats, generators, interleaving.

Text format::

    HYTRACE v1 cores=<n> data=<0|1>
    # comment lines and blank lines are ignored
    <core> <gap_cycles> <R|W|I> <hex address> [<128 hex digits payload>]

``gap_cycles`` is the delay after the previous record of the same core
completes. The payload column is present on every record when ``data=1``
and forbidden otherwise.

The binary twin starts with ``b"HYTB"``, a little-endian u16 version, u16
core count and u8 data flag, then one record per entry: a u16 body length
followed by ``<I core><I gap><B op><Q addr>`` and, for data traces, 64
payload bytes.
"""
import heapq
import io
import itertools
import random
import struct
from dataclasses import dataclass

from .errors import BadHeader, MalformedLine, TraceError
from .units import LINE_BYTES

VERSION = 1
_OPS = {"R": "R", "W": "W", "I": "I"}
_OP_CODES = {"R": 0, "W": 1, "I": 2}
_OP_NAMES = {v: k for k, v in _OP_CODES.items()}
_BIN_MAGIC = b"HYTB"
_BIN_HEAD = struct.Struct("<4sHHB")
_BIN_REC = struct.Struct("<IIBQ")
_BIN_LEN = struct.Struct("<H")
PAYLOAD_HEX = LINE_BYTES * 2


@dataclass(frozen=True)
class TraceHeader:
    cores: int = 1
    data_bearing: bool = False
    version: int = VERSION
    description: str = ""

    def __post_init__(self):
        if self.cores < 1:
            raise BadHeader("cores must be >= 1")


@dataclass(frozen=True)
class TraceRecord:
    core: int
    gap_cycles: int
    op: str
    addr: int
    payload: int | None = None


class Trace:
    """A header plus a re-iterable source of records."""

    def __init__(self, header, records):
        self.header = header
        self._records = records

    def __iter__(self):
        src = self._records
        return iter(src() if callable(src) else src)

    def materialize(self):
        return Trace(self.header, list(self))


# -- text format ----------------------------------------------------------

def format_header(header):
    line = f"HYTRACE v{header.version} cores={header.cores} data={int(header.data_bearing)}"
    if header.description:
        line += "\n# " + header.description
    return line


def format_record(rec, data_bearing):
    s = f"{rec.core} {rec.gap_cycles} {rec.op} {rec.addr:#x}"
    if data_bearing:
        s += " " + format(rec.payload or 0, f"0{PAYLOAD_HEX}x")
    return s


def _parse_header(line):
    parts = line.split()
    if len(parts) != 4 or parts[0] != "HYTRACE" or parts[1] != f"v{VERSION}":
        raise BadHeader(f"expected 'HYTRACE v{VERSION} cores=<n> data=<0|1>', got {line!r}")
    fields = {}
    for item in parts[2:]:
        key, sep, value = item.partition("=")
        if not sep or key not in ("cores", "data"):
            raise BadHeader(f"bad header field {item!r}")
        fields[key] = value
    try:
        cores = int(fields["cores"])
        data = fields["data"]
    except (KeyError, ValueError):
        raise BadHeader(f"bad header {line!r}") from None
    if data not in ("0", "1"):
        raise BadHeader("data must be 0 or 1")
    return TraceHeader(cores=cores, data_bearing=data == "1")


def _parse_record(line, line_no, header):
    parts = line.split()
    want = 5 if header.data_bearing else 4
    if len(parts) != want:
        raise MalformedLine(line_no, f"expected {want} fields, got {len(parts)}")
    core_s, gap_s, op, addr_s = parts[:4]
    try:
        core = int(core_s)
        gap = int(gap_s)
        addr = int(addr_s, 0)
    except ValueError as exc:
        raise MalformedLine(line_no, str(exc)) from None
    if core < 0 or core >= header.cores:
        raise MalformedLine(line_no, f"core {core} outside 0..{header.cores - 1}")
    if gap < 0 or addr < 0 or addr >= 1 << 64:
        raise MalformedLine(line_no, "negative gap or address out of 64-bit range")
    if op not in _OPS:
        raise MalformedLine(line_no, f"unknown op {op!r}")
    payload = None
    if header.data_bearing:
        text = parts[4]
        if len(text) != PAYLOAD_HEX:
            raise MalformedLine(line_no, f"payload must be {PAYLOAD_HEX} hex digits")
        try:
            payload = int(text, 16)
        except ValueError:
            raise MalformedLine(line_no, "payload is not hexadecimal") from None
    return TraceRecord(core, gap, op, addr, payload)


def parse(stream):
    """Parse a text trace from an iterable of lines; records stream lazily."""
    lines = iter(stream)
    line_no = 0
    header = None
    for raw in lines:
        line_no += 1
        line = raw.strip()
        if not line:
            continue
        header = _parse_header(line)
        break
    if header is None:
        raise BadHeader("empty trace")
    first = next(lines, None)
    if first is not None and first.startswith("# "):
        header = TraceHeader(header.cores, header.data_bearing, description=first[2:].rstrip("\n"))
        line_no += 1
    elif first is not None:
        lines = itertools.chain([first], lines)

    def records():
        n = line_no
        for raw in lines:
            n += 1
            line = raw.split("#", 1)[0].strip()
            if line:
                yield _parse_record(line, n, header)

    return header, records()


def parse_text(text):
    header, recs = parse(io.StringIO(text))
    return Trace(header, list(recs))


def serialize(trace, out):
    out.write(format_header(trace.header) + "\n")
    db = trace.header.data_bearing
    for rec in trace:
        if db and rec.payload is None:
            raise TraceError("data-bearing trace record without payload")
        out.write(format_record(rec, db) + "\n")


def dumps(trace):
    buf = io.StringIO()
    serialize(trace, buf)
    return buf.getvalue()


# -- binary twin --------------------------------------------------------------

def serialize_binary(trace, out):
    h = trace.header
    out.write(_BIN_HEAD.pack(_BIN_MAGIC, h.version, h.cores, int(h.data_bearing)))
    for rec in trace:
        body = _BIN_REC.pack(rec.core, rec.gap_cycles, _OP_CODES[rec.op], rec.addr)
        if h.data_bearing:
            body += (rec.payload or 0).to_bytes(LINE_BYTES, "big")
        out.write(_BIN_LEN.pack(len(body)) + body)


def parse_binary(stream):
    head = stream.read(_BIN_HEAD.size)
    if len(head) != _BIN_HEAD.size:
        raise BadHeader("truncated binary header")
    magic, version, cores, data = _BIN_HEAD.unpack(head)
    if magic != _BIN_MAGIC or version != VERSION or data not in (0, 1):
        raise BadHeader("not a v1 binary trace")
    header = TraceHeader(cores=cores, data_bearing=bool(data))
    want = _BIN_REC.size + (LINE_BYTES if header.data_bearing else 0)

    def records():
        n = 0
        while True:
            prefix = stream.read(_BIN_LEN.size)
            if not prefix:
                return
            n += 1
            (length,) = _BIN_LEN.unpack(prefix)
            body = stream.read(length)
            if length != want or len(body) != length:
                raise MalformedLine(n, f"record length {length}, expected {want}")
            core, gap, code, addr = _BIN_REC.unpack_from(body)
            if code not in _OP_NAMES or core >= cores:
                raise MalformedLine(n, "bad op code or core id")
            payload = None
            if header.data_bearing:
                payload = int.from_bytes(body[_BIN_REC.size :], "big")
            yield TraceRecord(core, gap, _OP_NAMES[code], addr, payload)

    return header, records()


def read_trace(path):
    """Load a trace file (text or binary, sniffed by magic) as a :class:`Trace`."""
    with open(path, "rb") as fh:
        binary = fh.read(4) == _BIN_MAGIC

    def records():
        if binary:
            with open(path, "rb") as fh:
                yield from parse_binary(fh)[1]
        else:
            with open(path) as fh:
                yield from parse(fh)[1]

    if binary:
        with open(path, "rb") as fh:
            header, _ = parse_binary(fh)
    else:
        with open(path) as fh:
            header, _ = parse(fh)
    return Trace(header, records)


def write_trace(trace, path, binary=False):
    if binary:
        with open(path, "wb") as fh:
            serialize_binary(trace, fh)
    else:
        with open(path, "w") as fh:
            serialize(trace, fh)


# -- generators ----------------------------------------------------------

def _payload_source(data, rng):
    """Payload factory for generated traces: None, or a callable(addr, op)."""
    if data in (None, "none"):
        return None
    if data == "random":
        return lambda addr, op: rng.getrandbits(LINE_BYTES * 8)
    if data == "zero":
        return lambda addr, op: 0
    if data == "sparse":
        # each store changes one 8-byte word of the line's previous contents
        lines = {}

        def sparse(addr, op):
            key = addr // LINE_BYTES
            value = lines.get(key, 0)
            if op == "W":
                word = rng.randrange(LINE_BYTES // 8)
                value ^= rng.getrandbits(64) << (64 * word)
                lines[key] = value
            return value

        return sparse
    raise ValueError(f"unknown payload kind {data!r}")


def _op(rng, write_ratio):
    return "W" if write_ratio > 0 and rng.random() < write_ratio else "R"


def gen_loop(working_set_bytes, stride=LINE_BYTES, iterations=1, write_ratio=0.0, seed=0,
             gap=0, base=0, data=None, core=0):
    """Cyclic sweep over a working set, ``iterations`` times."""
    if stride < LINE_BYTES:
        raise ValueError(f"stride must be >= {LINE_BYTES}")
    n = working_set_bytes // stride

    def records():
        rng = random.Random(seed)
        payload = _payload_source(data, rng)
        for _ in range(iterations):
            for i in range(n):
                addr = base + i * stride
                op = _op(rng, write_ratio)
                yield TraceRecord(core, gap, op, addr, payload(addr, op) if payload else None)

    return Trace(TraceHeader(cores=1, data_bearing=data not in (None, "none"),
                             description=f"loop {working_set_bytes} B x{iterations}"), records)


def gen_stream(count, stride=LINE_BYTES, write_ratio=0.0, seed=0, gap=0, base=0, data=None, core=0):
    """Sequential addresses that never repeat."""

    def records():
        rng = random.Random(seed)
        payload = _payload_source(data, rng)
        for i in range(count):
            addr = base + i * stride
            op = _op(rng, write_ratio)
            yield TraceRecord(core, gap, op, addr, payload(addr, op) if payload else None)

    return Trace(TraceHeader(cores=1, data_bearing=data not in (None, "none"),
                             description=f"stream {count}"), records)


def gen_random(count, hot_bytes, cold_bytes=0, hot_fraction=1.0, write_ratio=0.0, seed=0,
               gap=0, base=0, data=None, core=0, ifetch_ratio=0.0):
    """Probabilistic locality: a hot region hit with ``hot_fraction``, else a cold one.

    The cold region sits directly after the hot one.
    """
    hot_lines = max(1, hot_bytes // LINE_BYTES)
    cold_lines = cold_bytes // LINE_BYTES
    if cold_lines == 0 and hot_fraction < 1:
        raise ValueError("cold_bytes must be positive when hot_fraction < 1")

    def records():
        rng = random.Random(seed)
        payload = _payload_source(data, rng)
        for _ in range(count):
            if cold_lines and rng.random() >= hot_fraction:
                line = hot_lines + rng.randrange(cold_lines)
            else:
                line = rng.randrange(hot_lines)
            addr = base + line * LINE_BYTES
            if ifetch_ratio and rng.random() < ifetch_ratio:
                op = "I"
            else:
                op = _op(rng, write_ratio)
            yield TraceRecord(core, gap, op, addr, payload(addr, op) if payload else None)

    return Trace(TraceHeader(cores=1, data_bearing=data not in (None, "none"),
                             description=f"random {count} hot={hot_bytes} cold={cold_bytes}"), records)


def replicate(trace, cores, private_stride=1 << 40):
    """Per-core copies of a single-core trace, each in its own address range."""
    per_core = []
    for c in range(cores):
        per_core.append(
            Trace(trace.header, lambda c=c: (
                TraceRecord(c, r.gap_cycles, r.op, r.addr + c * private_stride, r.payload)
                for r in trace
            ))
        )
    return interleave(per_core)


def interleave(traces):
    """Merge per-core traces by issue time.

    Without a latency model a record's issue time is estimated as the running
    sum of its core's gaps plus one cycle per earlier record; ties go to the
    lower core id. Relative order within each core is preserved.
    """
    if not traces:
        raise ValueError("nothing to interleave")
    data = traces[0].header.data_bearing
    if any(t.header.data_bearing != data for t in traces):
        raise TraceError("cannot interleave data-bearing with plain traces")
    cores = len(traces)

    def records():
        def keyed(c, t):
            clock = 0
            for seq, r in enumerate(t):
                clock += r.gap_cycles
                yield (clock, c, seq), TraceRecord(c, r.gap_cycles, r.op, r.addr, r.payload)
                clock += 1

        for _, rec in heapq.merge(*(keyed(c, t) for c, t in enumerate(traces)), key=lambda kr: kr[0]):
            yield rec

    return Trace(TraceHeader(cores=cores, data_bearing=data, description=f"{cores}-core mix"), records)
