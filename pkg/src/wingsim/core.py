"""Shared domain types, units, and the hard/soft safety-constraint model.

Conventions used across the package:

- Coordinate frame: local flat-earth NED (north, east, down) in meters.
  Altitude above the reference plane is ``-down``.
- Angles in radians, speeds in m/s, accelerations in m/s^2, fuel in kg.
- Boundary semantics are closed: a separation distance exactly equal to
  d_min and a point exactly on the geofence boundary both count as SAFE.
  Monitors and the RTA share these types so the tie-break is uniform.
- All types are immutable value objects; operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional


class ConfigError(ValueError):
    """Bad scenario, catalog, or matrix configuration, detected at load
    time. Maps to its own process exit code so suites can distinguish a
    misconfigured run from a failed one."""


@dataclass(frozen=True)
class Vec3:
    """NED vector in meters (or m/s, m/s^2 depending on use)."""

    north: float
    east: float
    down: float

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.north + other.north, self.east + other.east, self.down + other.down)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.north - other.north, self.east - other.east, self.down - other.down)

    def scale(self, k: float) -> "Vec3":
        return Vec3(self.north * k, self.east * k, self.down * k)

    def dot(self, other: "Vec3") -> float:
        return self.north * other.north + self.east * other.east + self.down * other.down

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def horizontal_norm(self) -> float:
        return math.hypot(self.north, self.east)

    def is_finite(self) -> bool:
        return math.isfinite(self.north) and math.isfinite(self.east) and math.isfinite(self.down)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.north, self.east, self.down)

    @staticmethod
    def zero() -> "Vec3":
        return Vec3(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class FrameStamp:
    """Discrete simulation clock value.

    sim_time is derived (frame_index * dt) and carried for readability;
    frame_index is authoritative in all comparisons.
    """

    frame_index: int
    sim_time: float

    @staticmethod
    def at(frame_index: int, dt: float) -> "FrameStamp":
        return FrameStamp(frame_index, frame_index * dt)

    def is_missing(self) -> bool:
        return self.frame_index < 0


#: Sentinel used on the wire and in corrupted payloads where a report
#: arrives without a usable timestamp.
MISSING_STAMP = FrameStamp(-1, float("nan"))


@dataclass(frozen=True)
class AircraftState:
    """Full kinematic state of one aircraft at one frame.

    This is the truth record behind the airframe state output and the
    lead position report; every field is sampled at ``timestamp``.
    """

    position: Vec3
    velocity: Vec3
    acceleration: Vec3
    normal_acceleration: float  # g units
    orientation: tuple[float, float, float]  # roll, pitch, yaw (rad)
    orientation_rates: tuple[float, float, float]  # p, q, r (rad/s)
    true_airspeed: float
    calibrated_airspeed: float
    wind_velocity: Vec3
    fuel_remaining: float
    power_lever_angle: float  # fraction in [0, 1]
    angle_of_attack: float
    timestamp: FrameStamp

    def altitude(self) -> float:
        return -self.position.down

    def heading(self) -> float:
        return self.orientation[2]

    def check_invariants(self) -> list[str]:
        """Returns a list of violated type invariants (empty when clean)."""
        problems = []
        numeric = [
            self.normal_acceleration, self.true_airspeed, self.calibrated_airspeed,
            self.fuel_remaining, self.power_lever_angle, self.angle_of_attack,
            *self.orientation, *self.orientation_rates,
        ]
        vectors = [self.position, self.velocity, self.acceleration, self.wind_velocity]
        if not all(math.isfinite(x) for x in numeric) or not all(v.is_finite() for v in vectors):
            problems.append("non-finite field")
            return problems
        if self.true_airspeed < 0 or self.calibrated_airspeed < 0:
            problems.append("negative airspeed")
        if self.fuel_remaining < 0:
            problems.append("negative fuel")
        if abs(self.orientation[0]) > math.pi:
            problems.append("roll outside [-pi, pi]")
        if not 0.0 <= self.power_lever_angle <= 1.0:
            problems.append("power lever angle outside [0, 1]")
        return problems


@dataclass(frozen=True)
class ControlCommand:
    """Kinematic command: turn rate (rad/s), climb rate (m/s, positive up),
    longitudinal acceleration (m/s^2)."""

    turn_rate: float
    climb_rate: float
    longitudinal_accel: float
    stamp: FrameStamp

    def is_finite(self) -> bool:
        return (math.isfinite(self.turn_rate) and math.isfinite(self.climb_rate)
                and math.isfinite(self.longitudinal_accel))

    def with_stamp(self, stamp: FrameStamp) -> "ControlCommand":
        return replace(self, stamp=stamp)


def maintain_command(stamp: FrameStamp) -> ControlCommand:
    """The maintain maneuver: hold current heading, speed, and altitude."""
    return ControlCommand(0.0, 0.0, 0.0, stamp)


@dataclass(frozen=True)
class CommandEnvelope:
    """Saturation bounds applied by well-behaved command emitters. Tighter
    than the airframe's physical limits and chosen so a saturated command
    cannot by itself drive the aircraft outside the protection envelope."""

    max_turn_rate: float = 0.35
    max_climb_rate: float = 15.0
    max_accel: float = 8.0

    def __post_init__(self):
        if min(self.max_turn_rate, self.max_climb_rate, self.max_accel) <= 0:
            raise ValueError("envelope bounds must be positive")

    def saturate(self, cmd: "ControlCommand") -> "ControlCommand":
        turn = clamp(cmd.turn_rate, -self.max_turn_rate, self.max_turn_rate)
        climb = clamp(cmd.climb_rate, -self.max_climb_rate, self.max_climb_rate)
        accel = clamp(cmd.longitudinal_accel, -self.max_accel, self.max_accel)
        if (turn, climb, accel) == (cmd.turn_rate, cmd.climb_rate, cmd.longitudinal_accel):
            return cmd
        return ControlCommand(turn, climb, accel, cmd.stamp)

    def contains(self, cmd: "ControlCommand") -> bool:
        return (abs(cmd.turn_rate) <= self.max_turn_rate
                and abs(cmd.climb_rate) <= self.max_climb_rate
                and abs(cmd.longitudinal_accel) <= self.max_accel)


# ---------------------------------------------------------------------------
# Safety constraints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparationConstraint:
    """Hard minimum distance between the two aircraft. Default 152.4 m
    (500 ft); a scenario-config input, not a physical ground truth."""

    d_min: float = 152.4

    def __post_init__(self):
        if not (self.d_min > 0):
            raise ValueError("d_min must be positive")


@dataclass(frozen=True)
class GeofenceConstraint:
    """Convex polygon prism: ordered (north, east) vertices plus an altitude
    band. floor/ceiling are altitudes (positive up), not NED down values."""

    polygon: tuple[tuple[float, float], ...]
    altitude_floor: float
    altitude_ceiling: float

    def __post_init__(self):
        if len(self.polygon) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if not self.altitude_floor < self.altitude_ceiling:
            raise ValueError("altitude floor must be below ceiling")
        n = len(self.polygon)
        orient = 0.0
        for i in range(n):
            ax, ay = self.polygon[i]
            bx, by = self.polygon[(i + 1) % n]
            cx, cy = self.polygon[(i + 2) % n]
            cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            if cross == 0.0:
                raise ValueError("three consecutive vertices are collinear")
            if orient == 0.0:
                orient = cross
            elif cross * orient < 0:
                raise ValueError("polygon is not convex")
        object.__setattr__(self, "_orientation", 1.0 if orient > 0 else -1.0)

    @property
    def orientation(self) -> float:
        """+1 for counterclockwise vertex order in the (north, east) plane."""
        return self._orientation  # type: ignore[attr-defined]

    def centroid(self) -> tuple[float, float]:
        n = len(self.polygon)
        return (sum(p[0] for p in self.polygon) / n, sum(p[1] for p in self.polygon) / n)

    def altitude_midpoint(self) -> float:
        return 0.5 * (self.altitude_floor + self.altitude_ceiling)

    def edge_margin(self, north: float, east: float) -> float:
        """Signed distance to the nearest lateral face (positive = inside)."""
        worst = math.inf
        n = len(self.polygon)
        for i in range(n):
            ax, ay = self.polygon[i]
            bx, by = self.polygon[(i + 1) % n]
            ex, ey = bx - ax, by - ay
            elen = math.hypot(ex, ey)
            cross = (ex * (east - ay) - ey * (north - ax)) * self.orientation
            worst = min(worst, cross / elen)
        return worst


@dataclass(frozen=True)
class EnvelopeLimits:
    """Flight-envelope limits checked by the envelope protection monitor."""

    max_roll: float = 1.45
    max_pitch: float = 0.6
    alpha_min: float = -0.10
    alpha_max: float = 0.45
    v_min: float = 35.0
    v_max: float = 200.0
    n_min: float = -1.5
    n_max: float = 9.0
    altitude_floor: float = 300.0
    altitude_ceiling: float = 6000.0

    def __post_init__(self):
        pairs = [
            (self.alpha_min, self.alpha_max), (self.v_min, self.v_max),
            (self.n_min, self.n_max), (self.altitude_floor, self.altitude_ceiling),
        ]
        if any(lo >= hi for lo, hi in pairs):
            raise ValueError("each envelope min must be below its max")

    def violations(self, s: AircraftState) -> list[str]:
        """Names of violated limits, in a fixed order (empty = in envelope)."""
        out = []
        roll, pitch, _ = s.orientation
        if abs(roll) > self.max_roll:
            out.append("roll")
        if abs(pitch) > self.max_pitch:
            out.append("pitch")
        if not self.alpha_min <= s.angle_of_attack <= self.alpha_max:
            out.append("alpha")
        if not self.v_min <= s.true_airspeed <= self.v_max:
            out.append("speed")
        if not self.n_min <= s.normal_acceleration <= self.n_max:
            out.append("load_factor")
        if not self.altitude_floor <= s.altitude() <= self.altitude_ceiling:
            out.append("altitude")
        return out


@dataclass(frozen=True)
class LosConstraint:
    """Soft constraint: the pilot keeps the lead inside a cone about the
    wingman's nose."""

    cone_half_angle: float = 1.0
    max_loss_frames: int = 150


@dataclass(frozen=True)
class JetwashConstraint:
    """Soft constraint: avoid the turbulent wake cone behind the lead."""

    cone_length: float = 400.0
    cone_half_angle: float = 0.10
    min_dwell_frames: int = 50


@dataclass(frozen=True)
class SafetyConstraintSet:
    """Hard constraints are enforced (RTA) and monitored as hazards; soft
    constraints are monitored and handled by the pilot model only."""

    separation: SeparationConstraint
    geofence: GeofenceConstraint
    epm_envelope: EnvelopeLimits
    line_of_sight: LosConstraint = field(default_factory=LosConstraint)
    jetwash_avoidance: JetwashConstraint = field(default_factory=JetwashConstraint)

    def hard(self) -> tuple:
        return (self.separation, self.geofence, self.epm_envelope)

    def soft(self) -> tuple:
        return (self.line_of_sight, self.jetwash_avoidance)


# ---------------------------------------------------------------------------
# Geometry operations
# ---------------------------------------------------------------------------

def distance(a: Vec3, b: Vec3) -> float:
    """Euclidean distance in meters."""
    return math.sqrt((a.north - b.north) ** 2 + (a.east - b.east) ** 2 + (a.down - b.down) ** 2)


@dataclass(frozen=True)
class SeparationVerdict:
    safe: bool
    dist: float


def check_separation(lead: Vec3, wing: Vec3, c: SeparationConstraint) -> SeparationVerdict:
    """Violation iff distance < d_min; the boundary itself is safe."""
    d = distance(lead, wing)
    return SeparationVerdict(safe=d >= c.d_min, dist=d)


@dataclass(frozen=True)
class GeofenceVerdict:
    inside: bool
    violated_face: Optional[str]  # "face0".."faceN", "floor", "ceiling"


def check_geofence(pos: Vec3, g: GeofenceConstraint) -> GeofenceVerdict:
    """Closed containment test. Reports the first violated lateral half-plane
    in vertex order, then floor, then ceiling."""
    n = len(g.polygon)
    for i in range(n):
        ax, ay = g.polygon[i]
        bx, by = g.polygon[(i + 1) % n]
        cross = ((bx - ax) * (pos.east - ay) - (by - ay) * (pos.north - ax)) * g.orientation
        if cross < 0:
            return GeofenceVerdict(False, f"face{i}")
    alt = -pos.down
    if alt < g.altitude_floor:
        return GeofenceVerdict(False, "floor")
    if alt > g.altitude_ceiling:
        return GeofenceVerdict(False, "ceiling")
    return GeofenceVerdict(True, None)


def wrap_angle(a: float) -> float:
    """Wraps to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a > math.pi:
        a -= 2.0 * math.pi
    elif a <= -math.pi:
        a += 2.0 * math.pi
    return a


def bearing_to(from_pos: Vec3, to_pos: Vec3) -> float:
    """Horizontal bearing (rad, NED yaw convention: 0 = north, +pi/2 = east)."""
    return math.atan2(to_pos.east - from_pos.east, to_pos.north - from_pos.north)


def clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x
