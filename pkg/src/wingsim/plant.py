"""Airframe and environment dynamics.

3-DOF point-mass model advanced by an exact closed-form update per frame:
heading integrates turn rate, the horizontal speed state integrates
longitudinal acceleration (clamped to physical limits), vertical speed is
the commanded climb rate, and position integrates the resulting velocity
plus wind. With linearly varying speed and constant turn rate within a
frame the horizontal displacement has an elementary antiderivative, so the
update is exact, not a numerical approximation; composing two half steps
reproduces one full step to rounding error.

The physical clamps here are wider than the command envelope the
controllers saturate to: an out-of-envelope command that slips past the
safety layers produces a real envelope exceedance instead of being
silently absorbed by the airframe model.

Also houses the jetwash wake cone, per-field sensor noise and bias for the
sensed-state signal, and piecewise lead-trajectory scripts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from random import Random
from typing import Optional, Sequence

from .core import (
    AircraftState,
    ControlCommand,
    FrameStamp,
    JetwashConstraint,
    Vec3,
    clamp,
    wrap_angle,
)

G = 9.80665

#: The wake-cone soft constraint doubles as the plant's jetwash geometry.
JetwashRegion = JetwashConstraint

#: Fixed perturbation order for sense(); keeps draws stable when configs
#: list fields in different orders.
SENSED_FIELDS = (
    "position", "velocity", "acceleration", "normal_acceleration",
    "orientation", "orientation_rates", "true_airspeed", "calibrated_airspeed",
    "wind_velocity", "fuel_remaining", "power_lever_angle", "angle_of_attack",
)

_VECTOR_FIELDS = {"position", "velocity", "acceleration", "wind_velocity"}
_TRIPLE_FIELDS = {"orientation", "orientation_rates"}


@dataclass(frozen=True)
class PlantConfig:
    """Physical limits and sensor error model.

    max_* are airframe limits, deliberately wider than the command envelope
    used by the controllers. noise_std / bias map sensed field names to a
    std dev / additive offset (scalar, broadcast over vector components, or
    a 3-sequence for vector fields).
    """

    dt: float = 0.02
    max_turn_rate: float = 0.6
    max_climb_rate: float = 30.0
    max_accel: float = 15.0
    v_floor: float = 25.0
    v_ceiling: float = 250.0
    idle_burn: float = 0.02
    pla_burn: float = 0.25
    noise_std: dict = field(default_factory=dict)
    bias: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if min(self.max_turn_rate, self.max_climb_rate, self.max_accel) <= 0:
            raise ValueError("physical limits must be positive")
        unknown = (set(self.noise_std) | set(self.bias)) - set(SENSED_FIELDS)
        if unknown:
            raise ValueError(f"unknown sensed fields: {sorted(unknown)}")


def arc_displacement(v0: float, v1: float, a: float, psi0: float,
                      omega: float, dt: float) -> tuple[float, float]:
    """Exact integral of (v0 + a t)(cos, sin)(psi0 + omega t) over [0, dt]."""
    if abs(omega) < 1e-9:
        s = 0.5 * (v0 + v1) * dt
        return s * math.cos(psi0), s * math.sin(psi0)
    psi1 = psi0 + omega * dt
    dn = ((v1 * math.sin(psi1) - v0 * math.sin(psi0)) / omega
          + a * (math.cos(psi1) - math.cos(psi0)) / omega ** 2)
    de = ((-v1 * math.cos(psi1) + v0 * math.cos(psi0)) / omega
          + a * (math.sin(psi1) - math.sin(psi0)) / omega ** 2)
    return dn, de


def plant_step(state: AircraftState, cmd: ControlCommand, wind: Vec3,
               cfg: PlantConfig) -> AircraftState:
    """Advances one frame. The command is clamped to physical limits only;
    envelope saturation is the emitting component's job."""
    dt = cfg.dt
    omega = clamp(cmd.turn_rate, -cfg.max_turn_rate, cfg.max_turn_rate)
    climb = clamp(cmd.climb_rate, -cfg.max_climb_rate, cfg.max_climb_rate)
    accel = clamp(cmd.longitudinal_accel, -cfg.max_accel, cfg.max_accel)

    psi0 = state.orientation[2]
    v0 = (state.velocity - state.wind_velocity).horizontal_norm()
    v1 = clamp(v0 + accel * dt, cfg.v_floor, cfg.v_ceiling)
    a_eff = (v1 - v0) / dt
    psi1 = wrap_angle(psi0 + omega * dt)

    dn, de = arc_displacement(v0, v1, a_eff, psi0, omega, dt)
    pos = Vec3(state.position.north + dn + wind.north * dt,
               state.position.east + de + wind.east * dt,
               state.position.down - climb * dt + wind.down * dt)

    vel = Vec3(v1 * math.cos(psi1) + wind.north,
               v1 * math.sin(psi1) + wind.east,
               -climb + wind.down)
    acc = (vel - state.velocity).scale(1.0 / dt)

    roll = math.atan(v1 * omega / G)
    pitch = math.atan2(climb, max(v1, 1.0))
    roll0, pitch0, _ = state.orientation
    rates = ((roll - roll0) / dt, (pitch - pitch0) / dt, omega)

    n_load = 1.0 / max(math.cos(roll), 1e-6)
    tas = math.hypot(v1, climb)
    alt = -pos.down
    cas = tas * math.exp(-max(alt, 0.0) / 18600.0)
    alpha = 0.02 + 300.0 * n_load / max(v1 * v1, 1.0)
    pla = clamp(0.5 + accel * 0.05 + (v1 - 80.0) * 0.002, 0.0, 1.0)
    fuel = max(state.fuel_remaining - (cfg.idle_burn + cfg.pla_burn * pla) * dt, 0.0)

    return AircraftState(
        position=pos, velocity=vel, acceleration=acc,
        normal_acceleration=n_load,
        orientation=(roll, pitch, psi1), orientation_rates=rates,
        true_airspeed=tas, calibrated_airspeed=cas,
        wind_velocity=wind, fuel_remaining=fuel,
        power_lever_angle=pla, angle_of_attack=alpha,
        timestamp=FrameStamp(state.timestamp.frame_index + 1,
                             (state.timestamp.frame_index + 1) * dt),
    )


def _spread(value, width: int) -> tuple[float, ...]:
    if isinstance(value, (int, float)):
        return (float(value),) * width
    if len(value) != width:
        raise ValueError(f"expected {width} components, got {len(value)}")
    return tuple(float(x) for x in value)


def sense(state: AircraftState, cfg: PlantConfig, rng: Random) -> AircraftState:
    """Sensed copy of the state with per-field additive noise and bias.

    A field with zero noise and zero bias is passed through untouched, so
    the nominal config returns a copy bit-equal to the truth. Draw order
    follows SENSED_FIELDS regardless of config dict order.
    """
    out = {}
    for name in SENSED_FIELDS:
        std = float(cfg.noise_std.get(name, 0.0))
        bias = cfg.bias.get(name, 0.0)
        value = getattr(state, name)
        width = 3 if name in _VECTOR_FIELDS or name in _TRIPLE_FIELDS else 1
        offsets = _spread(bias, width)
        if std > 0.0:
            offsets = tuple(b + rng.gauss(0.0, std) for b in offsets)
        elif all(b == 0.0 for b in offsets):
            continue
        if name in _VECTOR_FIELDS:
            out[name] = Vec3(value.north + offsets[0], value.east + offsets[1],
                             value.down + offsets[2])
        elif name in _TRIPLE_FIELDS:
            moved = tuple(v + o for v, o in zip(value, offsets))
            if name == "orientation":
                moved = (wrap_angle(moved[0]), moved[1], moved[2])
            out[name] = moved
        else:
            moved = value + offsets[0]
            if name in ("true_airspeed", "calibrated_airspeed", "fuel_remaining"):
                moved = max(moved, 0.0)
            elif name == "power_lever_angle":
                moved = clamp(moved, 0.0, 1.0)
            out[name] = moved
    return replace(state, **out) if out else state


def in_jetwash(wing_pos: Vec3, lead: AircraftState, j: JetwashRegion) -> bool:
    """True iff the wingman sits in the cone trailing the lead's air-relative
    velocity. The cone apex (the lead itself) is excluded."""
    axis = lead.velocity - lead.wind_velocity
    speed = axis.norm()
    if speed < 1e-9:
        return False
    d = wing_pos - lead.position
    astern = -d.dot(axis) / speed
    if astern <= 0.0 or astern > j.cone_length:
        return False
    dist = d.norm()
    cos_off = clamp(astern / dist, -1.0, 1.0)
    return math.acos(cos_off) <= j.cone_half_angle


# ---------------------------------------------------------------------------
# Lead trajectory scripting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScriptSegment:
    frames: int
    turn: float = 0.0
    climb: float = 0.0
    accel: float = 0.0


@dataclass(frozen=True)
class TrajectoryScript:
    """Piecewise-constant command schedule. After the last segment the final
    command holds; cycle=True repeats the schedule instead (racetracks)."""

    segments: tuple[ScriptSegment, ...]
    cycle: bool = False

    def __post_init__(self):
        if not self.segments:
            raise ValueError("script needs at least one segment")
        if any(s.frames <= 0 for s in self.segments):
            raise ValueError("segment lengths must be positive")

    def total_frames(self) -> int:
        return sum(s.frames for s in self.segments)

    def command_at(self, frame: int, dt: float) -> ControlCommand:
        idx = frame % self.total_frames() if self.cycle else frame
        seg = self.segments[-1]
        for s in self.segments:
            if idx < s.frames:
                seg = s
                break
            idx -= s.frames
        return ControlCommand(seg.turn, seg.climb, seg.accel, FrameStamp.at(frame, dt))

    @staticmethod
    def from_config(cfg: dict) -> "TrajectoryScript":
        segs = tuple(
            ScriptSegment(int(s["frames"]), float(s.get("turn", 0.0)),
                          float(s.get("climb", 0.0)), float(s.get("accel", 0.0)))
            for s in cfg.get("segments", [{"frames": 1}])
        )
        return TrajectoryScript(segs, cycle=bool(cfg.get("cycle", False)))


def straight_script() -> TrajectoryScript:
    return TrajectoryScript((ScriptSegment(frames=1),))
