"""Shared factories for tests: nominal states, fences, constraint sets."""

from __future__ import annotations

import math

from wingsim.core import (
    AircraftState,
    ControlCommand,
    EnvelopeLimits,
    FrameStamp,
    GeofenceConstraint,
    JetwashConstraint,
    LosConstraint,
    SafetyConstraintSet,
    SeparationConstraint,
    Vec3,
)

DT = 0.02


def make_state(
    north=0.0, east=0.0, altitude=1500.0,
    speed=80.0, heading=0.0, climb=0.0,
    frame=0, dt=DT, **overrides,
) -> AircraftState:
    """Straight-and-level state, heading north unless told otherwise."""
    vel = Vec3(speed * math.cos(heading), speed * math.sin(heading), -climb)
    base = dict(
        position=Vec3(north, east, -altitude),
        velocity=vel,
        acceleration=Vec3.zero(),
        normal_acceleration=1.0,
        orientation=(0.0, 0.0, heading),
        orientation_rates=(0.0, 0.0, 0.0),
        true_airspeed=speed,
        calibrated_airspeed=speed * 0.92,
        wind_velocity=Vec3.zero(),
        fuel_remaining=900.0,
        power_lever_angle=0.55,
        angle_of_attack=0.04,
        timestamp=FrameStamp.at(frame, dt),
    )
    base.update(overrides)
    return AircraftState(**base)


def square_fence(half=5000.0, floor=300.0, ceiling=3000.0) -> GeofenceConstraint:
    return GeofenceConstraint(
        polygon=((half, -half), (half, half), (-half, half), (-half, -half)),
        altitude_floor=floor,
        altitude_ceiling=ceiling,
    )


def make_constraints(d_min=152.4, fence=None, envelope=None) -> SafetyConstraintSet:
    return SafetyConstraintSet(
        separation=SeparationConstraint(d_min=d_min),
        geofence=fence or square_fence(),
        epm_envelope=envelope or EnvelopeLimits(),
        line_of_sight=LosConstraint(),
        jetwash_avoidance=JetwashConstraint(),
    )


def make_command(turn=0.0, climb=0.0, accel=0.0, frame=0, dt=DT) -> ControlCommand:
    return ControlCommand(turn, climb, accel, FrameStamp.at(frame, dt))
