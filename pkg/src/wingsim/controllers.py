"""Primary controller slot: the pluggable autonomy that computes the
wingman's command each frame.

The stand-in is a deterministic proportional rejoin controller. Two other
behaviors exist purely to exercise the safety layers: "scripted" replays a
command schedule, and "pursuit" steers straight at the lead with no
capture standoff. A config flag can disable output saturation so the
filter downstream sees genuinely out-of-envelope commands.

Fault semantics: once faulted the controller emits the default maintain
command every frame, plus a fault alert for the pilot, until a scripted
scenario reset; there is no silent recovery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .core import (
    AircraftState,
    CommandEnvelope,
    ControlCommand,
    Vec3,
    bearing_to,
    clamp,
    maintain_command,
    wrap_angle,
)
from .datalink import PositionReport
from .plant import TrajectoryScript

#: Alert identifiers on the controller-to-pilot channel.
ALERT_FAULT = "primary-fault"
ALERT_NO_ESTIMATE = "no-lead-estimate"


@dataclass(frozen=True)
class RejoinGoal:
    """Station to hold, expressed in the lead's body frame (x forward,
    y right, z down)."""

    rejoin_point: Vec3
    capture_radius: float = 30.0

    def __post_init__(self):
        if not self.capture_radius > 0:
            raise ValueError("capture radius must be positive")


@dataclass(frozen=True)
class PrimaryConfig:
    kind: str = "rejoin"  # rejoin | pursuit | scripted
    script: Optional[TrajectoryScript] = None
    kp_turn: float = 1.2
    kp_climb: float = 0.8
    kp_close: float = 0.08
    kp_accel: float = 0.4
    closure_cap: float = 25.0
    envelope: CommandEnvelope = field(default_factory=CommandEnvelope)
    saturate: bool = True

    def __post_init__(self):
        if self.kind not in ("rejoin", "pursuit", "scripted"):
            raise ValueError(f"unknown controller kind: {self.kind}")
        if self.kind == "scripted" and self.script is None:
            raise ValueError("scripted controller needs a script")


@dataclass(frozen=True)
class PrimaryControllerStatus:
    mode: str = "nominal"  # nominal | faulted
    last_output: Optional[ControlCommand] = None
    last_estimate: Optional[PositionReport] = None

    @property
    def faulted(self) -> bool:
        return self.mode == "faulted"

    def fail(self) -> "PrimaryControllerStatus":
        return replace(self, mode="faulted")


def body_to_ned(offset: Vec3, yaw: float) -> Vec3:
    """Rotates a lead-body offset into the NED frame (yaw only; the 3-DOF
    model has no meaningful body roll for station geometry)."""
    c, s = math.cos(yaw), math.sin(yaw)
    return Vec3(c * offset.north - s * offset.east,
                s * offset.north + c * offset.east,
                offset.down)


def station_point(lead: AircraftState, goal: RejoinGoal) -> Vec3:
    return lead.position + body_to_ned(goal.rejoin_point, lead.orientation[2])


def primary_step(
    own: AircraftState,
    lead_estimate: Optional[PositionReport],
    goal: RejoinGoal,
    status: PrimaryControllerStatus,
    cfg: PrimaryConfig,
) -> tuple[ControlCommand, PrimaryControllerStatus, list[str]]:
    """One control frame. Returns (command, new status, pilot alerts).

    The command is stamped with the sensed state's stamp (the shared frame
    clock). A missing lead estimate falls back to the last one seen; with
    no estimate ever received the output is maintain plus an alert.
    """
    stamp = own.timestamp
    alerts: list[str] = []

    if status.faulted:
        cmd = maintain_command(stamp)
        return cmd, replace(status, last_output=cmd), [ALERT_FAULT]

    if cfg.kind == "scripted":
        # the schedule's own stamp is discarded in favor of the frame clock
        cmd = cfg.script.command_at(stamp.frame_index, 0.02).with_stamp(stamp)
        if cfg.saturate:
            cmd = cfg.envelope.saturate(cmd)
        return cmd, replace(status, last_output=cmd), alerts

    estimate = lead_estimate if lead_estimate is not None else status.last_estimate
    if estimate is None:
        cmd = maintain_command(stamp)
        return cmd, replace(status, last_output=cmd), [ALERT_NO_ESTIMATE]

    lead = estimate.lead_state
    if cfg.kind == "pursuit":
        target = lead.position
        standoff = 0.0
    else:
        point = estimate.commanded_rejoin_point
        local_goal = goal if point is None else replace(goal, rejoin_point=point)
        target = station_point(lead, local_goal)
        standoff = local_goal.capture_radius

    own_speed = (own.velocity - own.wind_velocity).horizontal_norm()
    lead_speed = (lead.velocity - lead.wind_velocity).horizontal_norm()
    flat_range = math.hypot(target.north - own.position.north,
                            target.east - own.position.east)

    if flat_range > max(standoff, 1.0):
        heading_err = wrap_angle(bearing_to(own.position, target) - own.orientation[2])
    else:
        # on station: align with the lead instead of chasing a point underfoot
        heading_err = wrap_angle(lead.orientation[2] - own.orientation[2])

    closure_bias = clamp(cfg.kp_close * (flat_range - standoff),
                         -cfg.closure_cap, cfg.closure_cap)
    desired_speed = lead_speed + (closure_bias if flat_range > standoff else 0.0)

    cmd = ControlCommand(
        turn_rate=cfg.kp_turn * heading_err,
        climb_rate=cfg.kp_climb * ((-target.down) - own.altitude()),
        longitudinal_accel=cfg.kp_accel * (desired_speed - own_speed),
        stamp=stamp,
    )
    if cfg.saturate:
        cmd = cfg.envelope.saturate(cmd)
    new_status = replace(status, last_output=cmd, last_estimate=estimate)
    return cmd, new_status, alerts
