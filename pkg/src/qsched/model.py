"""Domain types, exact weights, the instance file format and schedule checking.

Steps are 1-based integers. Within a step the order is: arrivals (in
instance order), at most one delivery, then expiry.
"""
from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

Weight = Fraction

__all__ = [
    "Weight", "Packet", "QueuedPacket", "Instance", "Schedule", "LogEntry",
    "TransmissionLog", "NULL_PACKET", "NullPacket", "Violation",
    "InstanceError", "ScheduleError",
    "as_weight", "format_weight", "parse_instance", "dump_instance",
    "total_weight", "verify_schedule", "dump_log", "parse_log",
    "parse_schedule",
]


class InstanceError(ValueError):
    """Malformed or invalid instance text."""

    def __init__(self, message: str, packet_id: int | None = None, line: int | None = None):
        where = []
        if packet_id is not None:
            where.append(f"packet {packet_id}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.packet_id = packet_id
        self.line = line


class ScheduleError(ValueError):
    pass


def as_weight(value) -> Fraction:
    """Exact, non-negative weight from an int, Fraction, Decimal or decimal/ratio string.

    Floats are rejected: they are the thing exact weights exist to avoid.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"weights must be exact, got {value!r}")
    if isinstance(value, str):
        value = value.strip()
    try:
        w = Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact weight: {value!r}") from exc
    if w < 0:
        raise ValueError(f"negative weight: {value!r}")
    return w


def _is_decimal(q: Fraction) -> bool:
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def format_weight(q: Fraction) -> str:
    """Exact decimal string when one exists, else ``num/den``."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    if not _is_decimal(q):
        return f"{q.numerator}/{q.denominator}"
    digits = 0
    while (q * 10 ** digits).denominator != 1:
        digits += 1
    scaled = abs(q.numerator * 10 ** digits // q.denominator)
    body = str(scaled).rjust(digits + 1, "0")
    sign = "-" if q < 0 else ""
    return f"{sign}{body[:-digits]}.{body[-digits:]}"


@dataclass(frozen=True, order=True)
class Packet:
    id: int
    release: int
    deadline: int
    weight: Fraction

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"packet id must be non-negative: {self.id}")
        if self.release < 1:
            raise ValueError(f"packet {self.id}: release must be >= 1")
        if self.release > self.deadline:
            raise ValueError(f"packet {self.id}: release {self.release} > deadline {self.deadline}")
        if not isinstance(self.weight, Fraction):
            object.__setattr__(self, "weight", as_weight(self.weight))
        elif self.weight < 0:
            raise ValueError(f"packet {self.id}: negative weight")


@dataclass(frozen=True)
class QueuedPacket:
    """A buffered packet with its virtual deadline (never above the real one)."""

    packet: Packet
    virtual_deadline: int

    @property
    def id(self) -> int:
        return self.packet.id

    @property
    def weight(self) -> Fraction:
        return self.packet.weight

    @classmethod
    def fresh(cls, packet: Packet) -> "QueuedPacket":
        return cls(packet, packet.deadline)

    def with_deadline(self, t: int) -> "QueuedPacket":
        return QueuedPacket(self.packet, t)


class NullPacket:
    """Marker for "nothing sent": zero weight, never buffered."""

    id = None
    weight = Fraction(0)

    def __repr__(self):
        return "NULL_PACKET"

    def __bool__(self):
        return False


NULL_PACKET = NullPacket()

# (step, packet id) pairs, kept as a sequence so duplicates stay visible to the checker.
Schedule = Sequence[tuple[int, int]]


class LogEntry(NamedTuple):
    step: int
    packet_id: int
    weight: Fraction


TransmissionLog = Sequence[LogEntry]


@dataclass(frozen=True)
class Instance:
    capacity: int
    packets: tuple[Packet, ...]
    reference_schedule: tuple[tuple[int, int], ...] | None = None
    reference_opt_weight: Fraction | None = None
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        object.__setattr__(self, "packets", tuple(self.packets))
        seen = set()
        for p in self.packets:
            if p.id in seen:
                raise ValueError(f"duplicate packet id {p.id}")
            seen.add(p.id)
        if self.reference_schedule is not None:
            object.__setattr__(self, "reference_schedule",
                               tuple((int(s), int(i)) for s, i in self.reference_schedule))

    def by_id(self) -> dict[int, Packet]:
        return {p.id: p for p in self.packets}

    @property
    def horizon(self) -> int:
        return max((p.deadline for p in self.packets), default=0)

    def subset(self, ids: Iterable[int]) -> "Instance":
        keep = set(ids)
        return Instance(self.capacity, tuple(p for p in self.packets if p.id in keep),
                        meta=dict(self.meta))


def total_weight(log: Iterable[LogEntry]) -> Fraction:
    return sum((e.weight for e in log), Fraction(0))


# --- instance file ----------------------------------------------------------

_ID_RE = re.compile(r'"id"\s*:\s*(-?\d+)')


def _packet_lines(text: str) -> list[int]:
    return [text.count("\n", 0, m.start()) + 1 for m in _ID_RE.finditer(text)]


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed instance: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise InstanceError("instance must be a JSON object", line=1)
    lines = _packet_lines(text)

    cap = doc.get("capacity")
    if not isinstance(cap, int) or isinstance(cap, bool):
        raise InstanceError("capacity must be an integer")
    if cap < 1:
        raise InstanceError(f"capacity must be >= 1, got {cap}")
    raw = doc.get("packets")
    if not isinstance(raw, list):
        raise InstanceError("packets must be an array")

    packets, seen = [], set()
    for k, obj in enumerate(raw):
        line = lines[k] if k < len(lines) else None
        if not isinstance(obj, dict):
            raise InstanceError(f"packet #{k} is not an object", line=line)
        pid = obj.get("id")
        for key in ("id", "release", "deadline"):
            v = obj.get(key)
            if not isinstance(v, int) or isinstance(v, bool):
                raise InstanceError(f"field {key!r} must be an integer", pid, line)
        if pid < 0:
            raise InstanceError("id must be non-negative", pid, line)
        if pid in seen:
            raise InstanceError("duplicate id", pid, line)
        seen.add(pid)
        if obj["release"] < 1:
            raise InstanceError("release must be >= 1", pid, line)
        if obj["release"] > obj["deadline"]:
            raise InstanceError(
                f"release {obj['release']} > deadline {obj['deadline']}", pid, line)
        if "weight" not in obj:
            raise InstanceError("missing weight", pid, line)
        w = obj["weight"]
        if isinstance(w, bool):
            raise InstanceError("weight must be a decimal string", pid, line)
        try:
            w = as_weight(str(w) if isinstance(w, (int, Decimal)) else w)
        except (TypeError, ValueError) as exc:
            raise InstanceError(str(exc), pid, line) from exc
        packets.append(Packet(pid, obj["release"], obj["deadline"], w))

    ref = None
    if doc.get("reference_schedule") is not None:
        try:
            ref = tuple((int(e["step"]), int(e["packet"])) for e in doc["reference_schedule"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceError(f"bad reference_schedule entry: {exc}") from exc
    ref_w = None
    if doc.get("reference_opt_weight") is not None:
        try:
            ref_w = as_weight(str(doc["reference_opt_weight"]))
        except (TypeError, ValueError) as exc:
            raise InstanceError(f"bad reference_opt_weight: {exc}") from exc
    meta = {str(k): str(v) for k, v in (doc.get("meta") or {}).items()}
    inst = Instance(cap, tuple(packets), ref, ref_w, meta)
    if ref is not None:
        try:
            bad = verify_schedule(inst, ref)
        except ScheduleError as exc:
            raise InstanceError(f"reference_schedule: {exc}") from exc
        if bad:
            raise InstanceError(f"reference_schedule is infeasible: {bad[0]}")
    return inst


def dump_instance(inst: Instance) -> str:
    doc: dict = {
        "capacity": inst.capacity,
        "packets": [
            {"id": p.id, "release": p.release, "deadline": p.deadline,
             "weight": format_weight(p.weight)}
            for p in inst.packets
        ],
    }
    if inst.reference_schedule is not None:
        doc["reference_schedule"] = [{"step": s, "packet": i} for s, i in inst.reference_schedule]
    if inst.reference_opt_weight is not None:
        doc["reference_opt_weight"] = format_weight(inst.reference_opt_weight)
    if inst.meta:
        doc["meta"] = dict(inst.meta)
    # one packet per line keeps error line numbers meaningful
    lines = ["{", f'  "capacity": {doc["capacity"]},', '  "packets": [']
    rows = [json.dumps(p) for p in doc["packets"]]
    lines += [f"    {r}," for r in rows[:-1]] + ([f"    {rows[-1]}"] if rows else [])
    rest = {k: v for k, v in doc.items() if k not in ("capacity", "packets")}
    lines.append("  ]" + ("," if rest else ""))
    items = list(rest.items())
    for k, (key, val) in enumerate(items):
        comma = "," if k < len(items) - 1 else ""
        lines.append(f"  {json.dumps(key)}: {json.dumps(val)}{comma}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- transmission logs and schedule files ----------------------------------

def dump_log(log: Iterable[LogEntry]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "packet_id", "weight"])
    for e in log:
        w.writerow([e.step, e.packet_id, format_weight(e.weight)])
    return buf.getvalue()


def parse_log(text: str) -> list[LogEntry]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["step", "packet_id", "weight"]:
        raise ScheduleError("log must start with header step,packet_id,weight")
    out = []
    for n, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            out.append(LogEntry(int(row[0]), int(row[1]), as_weight(row[2])))
        except (IndexError, ValueError, TypeError) as exc:
            raise ScheduleError(f"line {n}: {exc}") from exc
    return out


def parse_schedule(text: str) -> list[tuple[int, int]]:
    """Read a schedule from a log file, a JSON array of {step, packet}, or an instance's reference."""
    if text.lstrip().startswith("step"):
        return [(e.step, e.packet_id) for e in parse_log(text)]
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScheduleError(f"unreadable schedule: {exc.msg} (line {exc.lineno})") from exc
    if isinstance(doc, dict):
        doc = doc.get("reference_schedule", doc.get("schedule"))
    if not isinstance(doc, list):
        raise ScheduleError("schedule must be an array of {step, packet}")
    try:
        return [(int(e["step"]), int(e.get("packet", e.get("packet_id")))) for e in doc]
    except (KeyError, TypeError, ValueError) as exc:
        raise ScheduleError(f"bad schedule entry: {exc}") from exc


# --- feasibility of a concrete schedule ------------------------------------

class Violation(NamedTuple):
    step: int
    packet_id: int
    rule: str
    detail: str

    def __str__(self):
        return f"{self.rule} step {self.step} packet {self.packet_id}: {self.detail}"


def verify_schedule(instance: Instance, schedule: Iterable[tuple[int, int]]) -> list[Violation]:
    """List every violation of the model's rules; an empty list means the schedule is valid.

    A scheduled packet occupies the buffer from its release through its send
    step inclusive; unscheduled packets occupy nothing.
    """
    pk = instance.by_id()
    entries = [(int(s), int(i)) for s, i in schedule]
    for _, pid in entries:
        if pid not in pk:
            raise ScheduleError(f"unknown packet id {pid}")
    out: list[Violation] = []

    by_step: dict[int, int] = {}
    sent: dict[int, int] = {}
    for s, pid in entries:
        if s in by_step:
            out.append(Violation(s, pid, "injectivity", f"step already sends packet {by_step[s]}"))
        else:
            by_step[s] = pid
        if pid in sent:
            out.append(Violation(s, pid, "injectivity", f"packet already sent at step {sent[pid]}"))
        else:
            sent[pid] = s

    events: dict[int, int] = {}
    for s, pid in entries:
        p = pk[pid]
        if s < p.release:
            out.append(Violation(s, pid, "release", f"sent before release {p.release}"))
        if s > p.deadline:
            out.append(Violation(s, pid, "deadline", f"sent after deadline {p.deadline}"))
    for pid, s in sent.items():
        p = pk[pid]
        if s >= p.release:
            events[p.release] = events.get(p.release, 0) + 1
            events[s + 1] = events.get(s + 1, 0) - 1

    level, over = 0, False
    for t in sorted(events):
        level += events[t]
        if level > instance.capacity and not over:
            present = [pid for pid, s in sent.items() if pk[pid].release <= t <= s]
            out.append(Violation(t, min(present), "capacity",
                                 f"{level} packets buffered, capacity {instance.capacity}"))
        over = level > instance.capacity
    out.sort(key=lambda v: (v.step, v.packet_id, v.rule))
    return out
