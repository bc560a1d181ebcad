"""Lead-to-wingman datalink: position reports, voice messages, the binary
wire format, receiver-side validation, and the lossy channel model.

Wire format: one length-prefixed little-endian record, fields in the exact
order they appear on PositionReport. Missing numeric fields travel as NaN;
a missing timestamp travels as frame -1. Decoding an encoded report
reproduces it bit for bit (NaN payloads included), which the tests check
on the re-encoded bytes since NaN compares unequal to itself.

Validation separates two verdicts deliberately: "invalid" covers defects
the sender declared or structural gaps (missing fields, missing stamp,
inconsistent invalid flag), "unreasonable" covers receiver-side physics
checks against history (kinematic jump, speed, acceleration, stamp
monotonicity, staleness). Consumers treat both as untrusted.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field, replace
from random import Random
from typing import Optional, Sequence

from .core import MISSING_STAMP, AircraftState, FrameStamp, Vec3

VOICE_KINDS = ("coordination", "safety_concern")

#: Numeric lead-state fields a report must carry, in wire order.
STATE_FIELDS = (
    "position", "velocity", "acceleration", "normal_acceleration",
    "orientation", "orientation_rates", "true_airspeed", "calibrated_airspeed",
    "wind_velocity", "fuel_remaining", "power_lever_angle", "angle_of_attack",
)

_VEC_FIELDS = {"position", "velocity", "acceleration", "wind_velocity"}
_TRIPLE_FIELDS = {"orientation", "orientation_rates"}


@dataclass(frozen=True)
class PositionReport:
    """One lead-state sample plus test coordination data.

    All lead_state fields carry the same sample stamp; report_timestamp is
    when the report was assembled (equal to the sample stamp unless the
    sender's clock is skewed). invalid/invalid_details is the sender-side
    self-check verdict; consistency between them is checked by the
    receiver, not the constructor, because faults must be expressible.
    """

    lead_state: AircraftState
    test_point_id: str
    commanded_rejoin_point: Optional[Vec3]
    invalid: bool
    invalid_details: tuple[tuple[str, str], ...]
    report_timestamp: FrameStamp

    def flag_consistent(self) -> bool:
        return self.invalid == bool(self.invalid_details)


@dataclass(frozen=True)
class VoiceMessage:
    kind: str
    payload: str
    stamp: FrameStamp
    relevance_window: tuple[float, float]

    def __post_init__(self):
        if self.kind not in VOICE_KINDS:
            raise ValueError(f"unknown voice kind: {self.kind}")
        if not self.relevance_window[0] <= self.relevance_window[1]:
            raise ValueError("relevance window start must not exceed end")


@dataclass(frozen=True)
class Reason:
    field: str
    rule_id: str
    detail: str


@dataclass(frozen=True)
class ValidationResult:
    verdict: str  # valid | invalid | unreasonable
    reasons: tuple[Reason, ...] = ()

    def __post_init__(self):
        if self.verdict == "valid" and self.reasons:
            raise ValueError("valid result cannot carry reasons")

    @property
    def trusted(self) -> bool:
        return self.verdict == "valid"


@dataclass(frozen=True)
class ReasonablenessBounds:
    """Receiver-side physics thresholds. Scenario config, not ground truth."""

    v_max: float = 350.0
    a_max: float = 90.0
    stale_frames: int = 25
    slack: float = 5.0
    dt: float = 0.02
    roll_max: float = 1.6
    pitch_max: float = 1.2
    rate_max: float = 6.0
    fuel_max: float = 2500.0
    n_max: float = 12.0
    pla_max: float = 1.1
    wind_max: float = 60.0


@dataclass(frozen=True)
class ChannelConfig:
    """Lossy link model. corruption, when set, is
    {"probability": p, "fields": {name: offset | "drop"}} applied per
    delivery; "drop" blanks the field to its missing representation."""

    dropout_probability: float = 0.0
    max_delay_frames: int = 0
    corruption: Optional[dict] = None

    def __post_init__(self):
        if not 0.0 <= self.dropout_probability <= 1.0:
            raise ValueError("dropout probability outside [0, 1]")
        if self.max_delay_frames < 0:
            raise ValueError("max delay must be >= 0")
        if self.corruption is not None:
            p = self.corruption.get("probability", 1.0)
            if not 0.0 <= p <= 1.0:
                raise ValueError("corruption probability outside [0, 1]")


@dataclass(frozen=True)
class DeliveryOutcome:
    delivered: bool
    report: Optional[PositionReport] = None
    delay_frames: int = 0
    corrupted: bool = False

    @staticmethod
    def drop() -> "DeliveryOutcome":
        return DeliveryOutcome(delivered=False)


# ---------------------------------------------------------------------------
# Wire format
# ---------------------------------------------------------------------------

_D = struct.Struct("<d")
_Q = struct.Struct("<q")
_U32 = struct.Struct("<I")
_U16 = struct.Struct("<H")


class _Writer:
    def __init__(self):
        self.parts: list[bytes] = []

    def f64(self, x: float):
        self.parts.append(_D.pack(x))

    def i64(self, x: int):
        self.parts.append(_Q.pack(x))

    def u8(self, x: int):
        self.parts.append(bytes([x]))

    def text(self, s: str):
        raw = s.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError("string too long for wire format")
        self.parts.append(_U16.pack(len(raw)))
        self.parts.append(raw)

    def vec(self, v: Vec3):
        self.f64(v.north)
        self.f64(v.east)
        self.f64(v.down)

    def stamp(self, s: FrameStamp):
        self.i64(s.frame_index)
        self.f64(s.sim_time)

    def finish(self) -> bytes:
        body = b"".join(self.parts)
        return _U32.pack(len(body)) + body


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.off = 0

    def _take(self, n: int) -> bytes:
        if self.off + n > len(self.data):
            raise ValueError("truncated report")
        chunk = self.data[self.off:self.off + n]
        self.off += n
        return chunk

    def f64(self) -> float:
        return _D.unpack(self._take(8))[0]

    def i64(self) -> int:
        return _Q.unpack(self._take(8))[0]

    def u8(self) -> int:
        return self._take(1)[0]

    def u16(self) -> int:
        return _U16.unpack(self._take(2))[0]

    def text(self) -> str:
        return self._take(self.u16()).decode("utf-8")

    def vec(self) -> Vec3:
        return Vec3(self.f64(), self.f64(), self.f64())

    def stamp(self) -> FrameStamp:
        return FrameStamp(self.i64(), self.f64())


def encode_report(r: PositionReport) -> bytes:
    w = _Writer()
    s = r.lead_state
    w.vec(s.position)
    w.vec(s.velocity)
    w.vec(s.acceleration)
    w.f64(s.normal_acceleration)
    for x in s.orientation:
        w.f64(x)
    for x in s.orientation_rates:
        w.f64(x)
    w.f64(s.true_airspeed)
    w.f64(s.calibrated_airspeed)
    w.vec(s.wind_velocity)
    w.f64(s.fuel_remaining)
    w.f64(s.power_lever_angle)
    w.f64(s.angle_of_attack)
    w.stamp(s.timestamp)
    w.text(r.test_point_id)
    if r.commanded_rejoin_point is None:
        w.u8(0)
    else:
        w.u8(1)
        w.vec(r.commanded_rejoin_point)
    w.u8(1 if r.invalid else 0)
    if len(r.invalid_details) > 0xFFFF:
        raise ValueError("too many invalid details")
    w.parts.append(_U16.pack(len(r.invalid_details)))
    for fname, why in r.invalid_details:
        w.text(fname)
        w.text(why)
    w.stamp(r.report_timestamp)
    return w.finish()


def decode_report(data: bytes) -> PositionReport:
    if len(data) < 4:
        raise ValueError("truncated report")
    (length,) = _U32.unpack(data[:4])
    if length != len(data) - 4:
        raise ValueError("length prefix mismatch")
    rd = _Reader(data[4:])
    state = AircraftState(
        position=rd.vec(), velocity=rd.vec(), acceleration=rd.vec(),
        normal_acceleration=rd.f64(),
        orientation=(rd.f64(), rd.f64(), rd.f64()),
        orientation_rates=(rd.f64(), rd.f64(), rd.f64()),
        true_airspeed=rd.f64(), calibrated_airspeed=rd.f64(),
        wind_velocity=rd.vec(), fuel_remaining=rd.f64(),
        power_lever_angle=rd.f64(), angle_of_attack=rd.f64(),
        timestamp=rd.stamp(),
    )
    test_point_id = rd.text()
    rejoin = rd.vec() if rd.u8() else None
    invalid = bool(rd.u8())
    details = tuple((rd.text(), rd.text()) for _ in range(rd.u16()))
    report_stamp = rd.stamp()
    if rd.off != len(rd.data):
        raise ValueError("trailing bytes after report")
    return PositionReport(state, test_point_id, rejoin, invalid, details, report_stamp)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _field_values(state: AircraftState, name: str) -> tuple[float, ...]:
    v = getattr(state, name)
    if name in _VEC_FIELDS:
        return v.as_tuple()
    if name in _TRIPLE_FIELDS:
        return tuple(v)
    return (v,)


def validate_report(r: PositionReport, history: Sequence[PositionReport],
                    bounds: ReasonablenessBounds,
                    now: Optional[FrameStamp] = None) -> ValidationResult:
    """Receiver-side check. history holds previously accepted reports in
    stamp order; now is the receiver's current frame (staleness is skipped
    when omitted)."""
    reasons: list[Reason] = []

    for name in STATE_FIELDS:
        if any(not math.isfinite(x) for x in _field_values(r.lead_state, name)):
            reasons.append(Reason(name, "missing-field", "non-finite or absent value"))
    if not r.test_point_id:
        reasons.append(Reason("test_point_id", "missing-field", "empty test point id"))
    if r.lead_state.timestamp.is_missing() or r.report_timestamp.is_missing():
        reasons.append(Reason("report_timestamp", "missing-timestamp",
                              "report carries no usable timestamp"))
    if r.invalid:
        if r.invalid_details:
            for fname, why in r.invalid_details:
                reasons.append(Reason(fname, "sender-declared", why))
        else:
            reasons.append(Reason("invalid", "flag-inconsistent",
                                  "invalid flag set without details"))
    elif r.invalid_details:
        reasons.append(Reason("invalid", "flag-inconsistent",
                              "details present but invalid flag clear"))
    if reasons:
        return ValidationResult("invalid", tuple(reasons))

    stamp = r.lead_state.timestamp
    prev = history[-1] if history else None
    if prev is not None:
        d_frames = stamp.frame_index - prev.lead_state.timestamp.frame_index
        if d_frames <= 0:
            reasons.append(Reason("report_timestamp", "non-monotone",
                                  f"stamp did not advance ({d_frames:+d} frames)"))
        else:
            dt = d_frames * bounds.dt
            jump = (r.lead_state.position - prev.lead_state.position).norm()
            limit = bounds.v_max * dt + bounds.slack
            if jump > limit:
                reasons.append(Reason("position", "kinematic-bound",
                                      f"moved {jump:.1f} m in {dt:.3f} s (limit {limit:.1f})"))
    speed = r.lead_state.velocity.norm()
    if speed > bounds.v_max:
        reasons.append(Reason("velocity", "speed-bound",
                              f"speed {speed:.1f} exceeds {bounds.v_max:.1f}"))
    if r.lead_state.true_airspeed > bounds.v_max:
        reasons.append(Reason("true_airspeed", "speed-bound",
                              f"TAS {r.lead_state.true_airspeed:.1f} exceeds {bounds.v_max:.1f}"))
    accel = r.lead_state.acceleration.norm()
    if accel > bounds.a_max:
        reasons.append(Reason("acceleration", "accel-bound",
                              f"acceleration {accel:.1f} exceeds {bounds.a_max:.1f}"))
    roll, pitch = r.lead_state.orientation[0], r.lead_state.orientation[1]
    if abs(roll) > bounds.roll_max or abs(pitch) > bounds.pitch_max:
        reasons.append(Reason("orientation", "attitude-bound",
                              f"attitude ({roll:.2f}, {pitch:.2f}) outside flyable range"))
    if any(abs(w) > bounds.rate_max for w in r.lead_state.orientation_rates):
        reasons.append(Reason("orientation_rates", "rate-bound",
                              f"body rate beyond {bounds.rate_max:.1f} rad/s"))
    if not 0.0 <= r.lead_state.fuel_remaining <= bounds.fuel_max:
        reasons.append(Reason("fuel_remaining", "fuel-bound",
                              f"fuel {r.lead_state.fuel_remaining:.0f} outside "
                              f"[0, {bounds.fuel_max:.0f}]"))
    if not 0.0 <= r.lead_state.calibrated_airspeed <= bounds.v_max:
        reasons.append(Reason("calibrated_airspeed", "speed-bound",
                              f"CAS {r.lead_state.calibrated_airspeed:.1f} outside "
                              f"[0, {bounds.v_max:.1f}]"))
    if abs(r.lead_state.normal_acceleration) > bounds.n_max:
        reasons.append(Reason("normal_acceleration", "load-bound",
                              f"load factor {r.lead_state.normal_acceleration:.1f} "
                              f"beyond {bounds.n_max:.1f} g"))
    if not 0.0 <= r.lead_state.power_lever_angle <= bounds.pla_max:
        reasons.append(Reason("power_lever_angle", "range-bound",
                              f"power lever {r.lead_state.power_lever_angle:.2f} "
                              f"outside [0, {bounds.pla_max:.2f}]"))
    wind = r.lead_state.wind_velocity.norm()
    if wind > bounds.wind_max:
        reasons.append(Reason("wind_velocity", "wind-bound",
                              f"wind {wind:.1f} exceeds {bounds.wind_max:.1f}"))
    if now is not None and now.frame_index - stamp.frame_index > bounds.stale_frames:
        reasons.append(Reason("report_timestamp", "stale",
                              f"sample {now.frame_index - stamp.frame_index} frames old"))
    if reasons:
        return ValidationResult("unreasonable", tuple(reasons))
    return ValidationResult("valid")


# ---------------------------------------------------------------------------
# Channel model
# ---------------------------------------------------------------------------

def blank_field(r: PositionReport, name: str) -> PositionReport:
    """Returns a copy with one field in its missing representation."""
    if name == "test_point_id":
        return replace(r, test_point_id="")
    if name == "commanded_rejoin_point":
        return replace(r, commanded_rejoin_point=None)
    if name == "report_timestamp":
        return replace(r, report_timestamp=MISSING_STAMP,
                       lead_state=replace(r.lead_state, timestamp=MISSING_STAMP))
    if name == "invalid":
        return replace(r, invalid=False)
    if name == "invalid_details":
        return replace(r, invalid_details=())
    nan = float("nan")
    if name in _VEC_FIELDS:
        return replace(r, lead_state=replace(r.lead_state, **{name: Vec3(nan, nan, nan)}))
    if name in _TRIPLE_FIELDS:
        return replace(r, lead_state=replace(r.lead_state, **{name: (nan, nan, nan)}))
    if name in STATE_FIELDS:
        return replace(r, lead_state=replace(r.lead_state, **{name: nan}))
    raise ValueError(f"unknown report field: {name}")


def perturb_field(r: PositionReport, name: str, offset, dt: float = 0.02) -> PositionReport:
    """Returns a copy with an additive perturbation ("drop" blanks instead).

    Vector and triple fields accept a scalar (broadcast) or a 3-sequence;
    test_point_id takes a replacement string; report_timestamp takes a
    frame offset applied to both the report stamp and the sample stamp.
    """
    if isinstance(offset, str) and offset == "drop":
        return blank_field(r, name)
    if name == "test_point_id":
        return replace(r, test_point_id=str(offset))
    if name == "invalid":
        return replace(r, invalid=bool(offset))
    if name == "report_timestamp":
        moved = FrameStamp.at(r.report_timestamp.frame_index + int(offset), dt)
        return replace(r, report_timestamp=moved,
                       lead_state=replace(r.lead_state, timestamp=moved))
    if name == "commanded_rejoin_point":
        if r.commanded_rejoin_point is None:
            raise ValueError("no rejoin point to perturb")
        off = _as_triple(offset)
        return replace(r, commanded_rejoin_point=Vec3(
            r.commanded_rejoin_point.north + off[0],
            r.commanded_rejoin_point.east + off[1],
            r.commanded_rejoin_point.down + off[2]))
    if name in _VEC_FIELDS:
        v: Vec3 = getattr(r.lead_state, name)
        off = _as_triple(offset)
        moved = Vec3(v.north + off[0], v.east + off[1], v.down + off[2])
        return replace(r, lead_state=replace(r.lead_state, **{name: moved}))
    if name in _TRIPLE_FIELDS:
        t = getattr(r.lead_state, name)
        off = _as_triple(offset)
        return replace(r, lead_state=replace(
            r.lead_state, **{name: tuple(a + b for a, b in zip(t, off))}))
    if name in STATE_FIELDS:
        return replace(r, lead_state=replace(
            r.lead_state, **{name: getattr(r.lead_state, name) + float(offset)}))
    raise ValueError(f"unknown report field: {name}")


def _as_triple(offset) -> tuple[float, float, float]:
    if isinstance(offset, (int, float)):
        return (float(offset),) * 3
    if len(offset) != 3:
        raise ValueError("vector perturbation needs 3 components")
    return tuple(float(x) for x in offset)


def transmit(r: PositionReport, ch: ChannelConfig, rng: Random) -> DeliveryOutcome:
    """One channel crossing. Draw order is fixed (drop, delay, corruption)
    so outcomes depend only on the stream position."""
    if rng.random() < ch.dropout_probability:
        return DeliveryOutcome.drop()
    delay = rng.randint(0, ch.max_delay_frames) if ch.max_delay_frames > 0 else 0
    out = r
    corrupted = False
    if ch.corruption is not None:
        p = ch.corruption.get("probability", 1.0)
        if rng.random() < p:
            for fname, offset in ch.corruption.get("fields", {}).items():
                out = perturb_field(out, fname, offset)
            corrupted = True
    return DeliveryOutcome(True, out, delay, corrupted)
