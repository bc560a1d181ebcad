"""Deterministic safety-pilot model.

The pilot watches the lead visually (ground truth, not the sensed feed),
keeps loose formation when flying, and decides when to take the jet back.
Three things qualify as takeover triggers: line of sight lost for longer
than the briefed limit, any safety alert arriving on the pilot's displays,
and the lead closing inside the visual breakout distance. A trigger starts
a reaction countdown; distraction pauses it; incapacitation removes the
pilot from the loop entirely.

Scripted test-card actions model the planned parts of a flight-test card:
deliberate takeover, an envelope-protection switch request, rejoin-point
changes, and assurance-filter toggles. The pilot executes the first two;
the scheduler executes the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .core import (
    AircraftState,
    CommandEnvelope,
    ControlCommand,
    FrameStamp,
    Vec3,
    bearing_to,
    clamp,
    maintain_command,
    wrap_angle,
)

# card action kinds the pilot model executes itself
CARD_TAKEOVER = "takeover"
CARD_EPM_REQUEST = "epm_request"
# card action kinds executed by the scheduler, carried here so the whole
# test card lives in one ordered list
CARD_REJOIN_POINT = "rejoin_point"
CARD_RTA_TOGGLE = "rta_toggle"
CARD_REENGAGE_AUTONOMY = "reengage_autonomy"

_CARD_KINDS = (CARD_TAKEOVER, CARD_EPM_REQUEST, CARD_REJOIN_POINT,
               CARD_RTA_TOGGLE, CARD_REENGAGE_AUTONOMY)

_ENVELOPE = CommandEnvelope()


@dataclass(frozen=True)
class CardAction:
    """One scripted test-card entry, keyed by frame index."""

    frame: int
    kind: str
    value: object = None

    def __post_init__(self) -> None:
        assert self.frame >= 0, "card actions are scheduled from frame 0"
        assert self.kind in _CARD_KINDS, f"unknown card action {self.kind!r}"


@dataclass(frozen=True)
class PilotModel:
    reaction_delay_frames: int = 25
    los_cone_half_angle: float = 1.0
    los_max_loss_frames: int = 150
    incapacitated: bool = False
    distracted_until: Optional[FrameStamp] = None
    test_card: tuple[CardAction, ...] = ()
    briefed: bool = True
    # an unbriefed pilot grabs the jet at this frame even with green boards
    spurious_takeover_frame: Optional[int] = None
    visual_breakout_distance: float = 250.0

    # running state
    los_loss_frames: int = 0
    pending_takeover: Optional[int] = None
    taken_over: bool = False
    breakout: bool = False
    last_command: Optional[ControlCommand] = None

    def __post_init__(self) -> None:
        assert self.reaction_delay_frames >= 0, "reaction delay must be >= 0"
        assert self.los_max_loss_frames >= 0, "LOS loss limit must be >= 0"
        assert 0.0 < self.los_cone_half_angle < math.pi, \
            "LOS cone half-angle must be inside (0, pi)"


def health_gate_pass(m: PilotModel) -> bool:
    """Pre-flight gate: an impaired pilot keeps the autonomy segment on
    the ground."""
    return not m.incapacitated


def line_of_sight(own: AircraftState, lead_truth: AircraftState,
                  cone_half_angle: float) -> bool:
    """Lead inside the cone about the wingman's nose. Pure geometry, no
    occlusion."""
    d = lead_truth.position - own.position
    dist = d.norm()
    if dist == 0.0:
        return True
    roll, pitch, yaw = own.orientation
    nose = Vec3(math.cos(yaw) * math.cos(pitch),
                math.sin(yaw) * math.cos(pitch),
                -math.sin(pitch))
    cos_angle = clamp(nose.dot(d) / dist, -1.0, 1.0)
    return math.acos(cos_angle) <= cone_half_angle


def _station_command(own: AircraftState, lead_truth: AircraftState,
                     stamp: FrameStamp) -> ControlCommand:
    """Loose manual formation: point at the lead, match altitude and speed."""
    to_lead = lead_truth.position - own.position
    heading_err = wrap_angle(bearing_to(own.position, lead_truth.position) - own.heading())
    if to_lead.horizontal_norm() < 120.0:
        heading_err = wrap_angle(lead_truth.heading() - own.heading())
    lead_speed = lead_truth.velocity.horizontal_norm()
    own_speed = own.velocity.horizontal_norm()
    cmd = ControlCommand(
        turn_rate=0.8 * heading_err,
        climb_rate=0.5 * (lead_truth.altitude() - own.altitude()),
        longitudinal_accel=0.3 * (lead_speed - own_speed),
        stamp=stamp,
    )
    return _ENVELOPE.saturate(cmd)


def _breakout_command(own: AircraftState, lead_truth: AircraftState,
                      stamp: FrameStamp) -> ControlCommand:
    """Hard turn away from the lead with a descending offset."""
    away = wrap_angle(bearing_to(lead_truth.position, own.position))
    heading_err = wrap_angle(away - own.heading())
    turn = _ENVELOPE.max_turn_rate if heading_err >= 0.0 else -_ENVELOPE.max_turn_rate
    if abs(heading_err) < 0.1:
        turn = 0.0
    cmd = ControlCommand(turn_rate=turn, climb_rate=-5.0,
                         longitudinal_accel=0.0, stamp=stamp)
    return _ENVELOPE.saturate(cmd)


def _card_hits(m: PilotModel, frame: int, kind: str) -> list[CardAction]:
    return [a for a in m.test_card if a.frame == frame and a.kind == kind]


def pilot_step(
    own: AircraftState,
    lead_truth: AircraftState,
    alerts: tuple[str, ...],
    m: PilotModel,
) -> tuple[ControlCommand, bool, bool, PilotModel]:
    """One pilot frame. Returns (stick command, takeover flag, envelope
    switch request, next model state).

    The takeover flag latches once raised. The model is total: every input
    combination produces a command.
    """
    frame = own.timestamp.frame_index

    if m.incapacitated:
        frozen = m.last_command if m.last_command is not None \
            else maintain_command(own.timestamp)
        frozen = frozen.with_stamp(own.timestamp)
        return frozen, False, False, replace(m, last_command=frozen)

    in_sight = line_of_sight(own, lead_truth, m.los_cone_half_angle)
    los_frames = 0 if in_sight else m.los_loss_frames + 1

    visual_range = (lead_truth.position - own.position).norm()
    breakout = m.breakout or visual_range < m.visual_breakout_distance

    triggered = (
        los_frames > m.los_max_loss_frames
        or len(alerts) > 0
        or visual_range < m.visual_breakout_distance
    )

    distracted = (m.distracted_until is not None
                  and frame < m.distracted_until.frame_index)

    pending = m.pending_takeover
    if pending is None and triggered:
        pending = m.reaction_delay_frames

    taken_over = m.taken_over
    if not taken_over and pending is not None and not distracted:
        if pending == 0:
            taken_over = True
        else:
            pending -= 1

    # scripted, planned actions fire exactly on their frame, no delay
    if _card_hits(m, frame, CARD_TAKEOVER):
        taken_over = True
    epm_request = bool(_card_hits(m, frame, CARD_EPM_REQUEST))

    if not m.briefed and m.spurious_takeover_frame is not None \
            and frame >= m.spurious_takeover_frame:
        taken_over = True

    if breakout and taken_over:
        cmd = _breakout_command(own, lead_truth, own.timestamp)
    else:
        cmd = _station_command(own, lead_truth, own.timestamp)

    nxt = replace(m, los_loss_frames=los_frames, pending_takeover=pending,
                  taken_over=taken_over, breakout=breakout, last_command=cmd)
    return cmd, taken_over, epm_request, nxt
