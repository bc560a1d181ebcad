"""Trace recording and post-hoc requirement monitors.

A run produces a line-delimited trace: one JSON object per record, one
record per active channel per frame, first line a header describing the
run. Monitors are evaluated over the loaded trace afterwards and come in
four kinds:

- instantaneous: a per-frame violation predicate
- bounded_response: every rising edge of a trigger predicate must be
  answered by a response predicate within a frame deadline (vacuously
  green when the trigger never fires; dashboards must say so)
- absence: an event that must never occur
- completeness: every expected channel has exactly one record per frame

Predicates are small data-driven comparisons, not a temporal-logic
language; anything fancier belongs in code that derives a per-frame field
first. Verdicts are pure functions of the trace.

A spec marked "scoped" only applies to runs that armed it: the run's
scenario lists the monitor ids it exercises in the trace header under
"armed_monitors", and a scoped spec passes vacuously on any trace that did
not arm it. Hazard and completeness monitors are never scoped; they hold
on every run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import ConfigError, FrameStamp

ACK = "ack"
RECORDING_FAULT = "recording_fault"

MONITOR_KINDS = ("instantaneous", "bounded_response", "absence", "completeness")
SEVERITIES = ("hazard", "requirement")

# predicate comparison operators; "check" field in params
_CHECKS = ("lt", "le", "gt", "ge", "eq", "ne", "contains", "not_contains",
           "channel_absent", "channel_present")


@dataclass(frozen=True)
class TraceRecord:
    frame: FrameStamp
    channel: str
    payload: dict
    component_statuses: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Trace:
    header: dict
    records: tuple[TraceRecord, ...]


@dataclass(frozen=True)
class MonitorSpec:
    id: str
    kind: str
    severity: str
    params: dict


@dataclass(frozen=True)
class MonitorVerdict:
    id: str
    severity: str
    violations: tuple[tuple[int, str], ...]

    @property
    def passed(self) -> bool:
        return len(self.violations) == 0


def canonical_json(obj) -> str:
    """The one serialization used for anything whose bytes must be stable
    across runs."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Recorder
# ---------------------------------------------------------------------------

class Recorder:
    """Single-writer trace log. Frames must arrive monotone non-decreasing;
    anything else is a scheduler bug, not a recoverable condition.

    A fault window (set by the scheduler when a recorder fault is injected)
    makes record() report RECORDING_FAULT and drop the record, which is
    exactly the evidence the completeness monitor later finds.
    """

    def __init__(self, header: dict):
        self.header = dict(header)
        self.records: list[TraceRecord] = []
        self.fault_active = False
        self._last_frame: Optional[int] = None

    def record(self, rec: TraceRecord) -> str:
        last = self._last_frame
        if last is not None and rec.frame.frame_index < last:
            raise ValueError(
                f"out-of-order record: frame {rec.frame.frame_index} after {last}")
        self._last_frame = rec.frame.frame_index
        if self.fault_active:
            return RECORDING_FAULT
        self.records.append(rec)
        return ACK

    def lines(self) -> list[str]:
        out = [canonical_json(self.header)]
        for r in self.records:
            out.append(canonical_json({
                "frame": r.frame.frame_index,
                "t": r.frame.sim_time,
                "channel": r.channel,
                "payload": r.payload,
                "status": r.component_statuses,
            }))
        return out

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(self.lines()) + "\n")

    def trace(self) -> Trace:
        return Trace(dict(self.header), tuple(self.records))


def load_trace(lines: Iterable[str]) -> Trace:
    it = iter(lines)
    try:
        header = json.loads(next(it))
    except StopIteration:
        raise ValueError("empty trace file") from None
    dt = header.get("dt", 0.0)
    records = []
    for line in it:
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        records.append(TraceRecord(
            frame=FrameStamp(obj["frame"], obj["t"] if "t" in obj
                             else obj["frame"] * dt),
            channel=obj["channel"],
            payload=obj["payload"],
            component_statuses=obj.get("status", {}),
        ))
    return Trace(header, tuple(records))


def load_trace_file(path) -> Trace:
    with open(path, "r", encoding="utf-8") as fh:
        return load_trace(fh)


# ---------------------------------------------------------------------------
# Monitor catalog loading
# ---------------------------------------------------------------------------

def _validate_predicate(spec_id: str, p: dict, role: str) -> None:
    if not isinstance(p, dict):
        raise ConfigError(f"{spec_id}: {role} predicate must be an object")
    check = p.get("check")
    if check not in _CHECKS:
        raise ConfigError(f"{spec_id}: unknown check {check!r} in {role}")
    if "channel" not in p:
        raise ConfigError(f"{spec_id}: {role} predicate needs a channel")
    if check not in ("channel_absent", "channel_present") and "field" not in p:
        raise ConfigError(f"{spec_id}: {role} check {check!r} needs a field")


def load_monitor_specs(entries: list[dict]) -> list[MonitorSpec]:
    """Build validated specs from parsed catalog entries. All structural
    errors surface here, never during evaluation."""
    specs = []
    seen = set()
    for e in entries:
        sid = e.get("id")
        if not sid or not isinstance(sid, str):
            raise ConfigError(f"monitor entry without id: {e!r}")
        if sid in seen:
            raise ConfigError(f"duplicate monitor id {sid!r}")
        seen.add(sid)
        kind = e.get("kind")
        if kind not in MONITOR_KINDS:
            raise ConfigError(f"{sid}: unknown monitor kind {kind!r}")
        severity = e.get("severity")
        if severity not in SEVERITIES:
            raise ConfigError(f"{sid}: unknown severity {severity!r}")
        params = e.get("params", {})
        scoped = params.get("scoped", False)
        if not isinstance(scoped, bool):
            raise ConfigError(f"{sid}: scoped must be a boolean")
        if scoped and severity == "hazard":
            raise ConfigError(f"{sid}: hazard monitors hold on every run, not scoped")
        if kind in ("instantaneous", "absence"):
            _validate_predicate(sid, params.get("when", {}), "when")
        elif kind == "bounded_response":
            _validate_predicate(sid, params.get("trigger", {}), "trigger")
            _validate_predicate(sid, params.get("response", {}), "response")
            deadline = params.get("deadline_frames")
            if not isinstance(deadline, int) or deadline < 0:
                raise ConfigError(f"{sid}: deadline_frames must be an integer >= 0")
        else:  # completeness
            channels = params.get("channels")
            if not channels or not isinstance(channels, list):
                raise ConfigError(f"{sid}: completeness needs a channel list")
        specs.append(MonitorSpec(sid, kind, severity, params))
    return specs


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _eval_predicate(view: dict, p: dict) -> bool:
    """view: channel -> payload for one frame."""
    check = p["check"]
    channel = p["channel"]
    if check == "channel_absent":
        return channel not in view
    if check == "channel_present":
        return channel in view
    payload = view.get(channel)
    if payload is None:
        return False
    if p["field"] not in payload:
        return False
    actual = payload[p["field"]]
    expected = p.get("value")
    if check == "lt":
        return actual < expected
    if check == "le":
        return actual <= expected
    if check == "gt":
        return actual > expected
    if check == "ge":
        return actual >= expected
    if check == "eq":
        return actual == expected
    if check == "ne":
        return actual != expected
    if check == "contains":
        return expected in actual
    if check == "not_contains":
        return expected not in actual
    raise AssertionError(f"unreachable check {check!r}")


def _frame_views(trace: Trace) -> list[tuple[int, dict]]:
    """Ordered (frame, channel->payload) pairs; duplicates keep the last
    payload for predicate evaluation (completeness flags them separately)."""
    views: dict[int, dict] = {}
    for r in trace.records:
        views.setdefault(r.frame.frame_index, {})[r.channel] = r.payload
    return sorted(views.items())


def _eval_instantaneous(views, p, label: str):
    out = []
    for frame, view in views:
        if _eval_predicate(view, p["when"]):
            out.append((frame, label))
    return out


def _eval_bounded_response(views, p):
    trigger, response = p["trigger"], p["response"]
    deadline = p["deadline_frames"]
    flags = [(frame, _eval_predicate(view, trigger)) for frame, view in views]
    by_frame = dict(views)
    out = []
    prev = False
    for frame, fired in flags:
        edge = fired and not prev
        prev = fired
        if not edge:
            continue
        answered = False
        for g in range(frame, frame + deadline + 1):
            view = by_frame.get(g)
            if view is not None and _eval_predicate(view, response):
                answered = True
                break
        if not answered:
            out.append((frame, f"no response within {deadline} frames"))
    return out


def _eval_completeness(trace: Trace, views, p):
    channels = p["channels"]
    duration = p.get("duration_frames", trace.header.get("duration_frames"))
    counts: dict[tuple[int, str], int] = {}
    for r in trace.records:
        if r.channel in channels:
            key = (r.frame.frame_index, r.channel)
            counts[key] = counts.get(key, 0) + 1
    out = []
    if duration is None:
        frames = [f for f, _ in views]
    else:
        frames = list(range(int(duration)))
    for frame in frames:
        for ch in channels:
            n = counts.get((frame, ch), 0)
            if n == 0:
                out.append((frame, f"missing record on {ch}"))
            elif n > 1:
                out.append((frame, f"{n} records on {ch}"))
    return out


def evaluate(trace: Trace, specs: list[MonitorSpec]) -> list[MonitorVerdict]:
    """Pure post-hoc evaluation; an empty trace passes everything except a
    completeness monitor with a declared duration."""
    views = _frame_views(trace)
    armed = set(trace.header.get("armed_monitors") or ())
    verdicts = []
    for spec in specs:
        p = spec.params
        if p.get("scoped") and spec.id not in armed:
            verdicts.append(MonitorVerdict(spec.id, spec.severity, ()))
            continue
        if spec.kind == "instantaneous":
            violations = _eval_instantaneous(views, p, p.get("detail", "violated"))
        elif spec.kind == "absence":
            violations = _eval_instantaneous(views, p, p.get("detail", "forbidden event"))
        elif spec.kind == "bounded_response":
            violations = _eval_bounded_response(views, p)
        elif spec.kind == "completeness":
            violations = _eval_completeness(trace, views, p)
        else:
            raise AssertionError(f"spec {spec.id} with unvalidated kind {spec.kind}")
        verdicts.append(MonitorVerdict(spec.id, spec.severity, tuple(violations)))
    return verdicts
