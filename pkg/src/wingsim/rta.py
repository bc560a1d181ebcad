"""Run-time assurance filter for the wingman's command stream.

Simplex-style discrete switching: every frame the candidate command (the
primary's output, or the remembered last one, or maintain) is rolled out
through the same point-mass model the plant uses, over a configured
horizon with the lead extrapolated at constant velocity. A clean rollout
passes the candidate through untouched, bit for bit. A predicted hard
constraint violation switches to a closed-loop backup maneuver (max-rate
turn toward the fence interior and/or away from the lead, altitude toward
the band midpoint, envelope-saturated), itself re-verified by rollout. If
no verified backup exists the step reports failure and raises a pilot
alert so control authority can leave the autonomy path.

Candidate verification uses inflated margins (lateral fence inset,
separation radius growing quadratically with prediction time plus
estimate age); backup verification uses the raw constraints with only the
base uncertainty, since the margins exist precisely to give the backup
room to act. Wake turbulence is deliberately not checked here: the filter
has no knowledge of it, by design, and the pilot model covers it.

Redundancy is compute-twice-and-compare inside the step: both replicas
are pure functions of the inputs, so any divergence (only producible by
the dedicated compute-fault injection) marks the step failed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .core import (
    AircraftState,
    CommandEnvelope,
    ControlCommand,
    SafetyConstraintSet,
    clamp,
    maintain_command,
    wrap_angle,
)
from .datalink import PositionReport
from .plant import G, PlantConfig, arc_displacement

ALERT_NO_SAFE_COMMAND = "rta-no-safe-command"
ALERT_REDUNDANCY_MISMATCH = "rta-redundancy-mismatch"
ALERT_FAILED = "rta-failed"
ALERT_REENABLE_GUARD = "rta-reenable-guard"


@dataclass(frozen=True)
class RtaConfig:
    horizon: float = 6.0
    prediction_dt: float = 0.1
    backup_policy: str = "combined"  # geofence_recovery | separation_recovery | combined
    enabled: bool = True
    frame_budget_fraction: float = 0.5
    dt: float = 0.02
    uncertainty_base: float = 20.0
    uncertainty_growth: float = 5.0  # m/s^2 of quadratic separation inflation
    fence_margin: float = 20.0
    alt_margin: float = 15.0
    guard_margin: float = 50.0
    dual_redundancy: bool = True
    v_backup: float = 80.0
    envelope: CommandEnvelope = field(default_factory=CommandEnvelope)
    plant: PlantConfig = field(default_factory=PlantConfig)

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if not 0 < self.prediction_dt <= self.dt * 5:
            raise ValueError("prediction_dt must be in (0, 5*dt]")
        if not 0 < self.frame_budget_fraction <= 1:
            raise ValueError("frame budget fraction must be in (0, 1]")
        if self.backup_policy not in ("geofence_recovery", "separation_recovery", "combined"):
            raise ValueError(f"unknown backup policy: {self.backup_policy}")


@dataclass(frozen=True)
class RtaReason:
    kind: str  # geofence | separation | epm
    time_to_event: Optional[float] = None
    limit: Optional[str] = None


@dataclass(frozen=True)
class RtaDecision:
    output: ControlCommand
    intervened: bool
    reason: Optional[RtaReason]
    status: str  # ok | failed
    candidate: ControlCommand
    candidate_source: str  # primary | memory | maintain
    checked: bool
    overrun: bool = False
    compute_ms: float = 0.0
    alerts: tuple[str, ...] = ()


@dataclass(frozen=True)
class RtaMemory:
    """Cross-frame filter state, threaded through rta_step."""

    last_primary: Optional[ControlCommand] = None
    active: bool = True
    pending_guard: bool = False
    fault_mode: Optional[str] = None  # None | "compute" | "dead"

    @staticmethod
    def initial(cfg: RtaConfig) -> "RtaMemory":
        return RtaMemory(active=cfg.enabled)


# ---------------------------------------------------------------------------
# Prediction model
# ---------------------------------------------------------------------------
# Own-ship rollout state: (north, east, altitude, heading, speed, climb),
# speed/climb air-relative, altitude positive up.

OwnTuple = tuple[float, float, float, float, float, float]
Policy = Callable[[OwnTuple], tuple[float, float, float]]


def own_tuple(own: AircraftState) -> OwnTuple:
    air = own.velocity - own.wind_velocity
    return (own.position.north, own.position.east, own.altitude(),
            own.orientation[2], air.horizontal_norm(), -air.down)


def lead_motion(report: Optional[PositionReport]) -> Optional[tuple[float, ...]]:
    if report is None:
        return None
    s = report.lead_state
    return (s.position.north, s.position.east, -s.position.down,
            s.velocity.north, s.velocity.east, -s.velocity.down)


def _lead_at(lead: tuple[float, ...], tau: float) -> tuple[float, float, float]:
    return (lead[0] + lead[3] * tau, lead[1] + lead[4] * tau, lead[2] + lead[5] * tau)


def _advance(s: OwnTuple, cmd: tuple[float, float, float], pdt: float,
             plant: PlantConfig) -> OwnTuple:
    n, e, alt, psi, v, _ = s
    omega = clamp(cmd[0], -plant.max_turn_rate, plant.max_turn_rate)
    climb = clamp(cmd[1], -plant.max_climb_rate, plant.max_climb_rate)
    accel = clamp(cmd[2], -plant.max_accel, plant.max_accel)
    v1 = clamp(v + accel * pdt, plant.v_floor, plant.v_ceiling)
    dn, de = arc_displacement(v, v1, (v1 - v) / pdt, psi, omega, pdt)
    return (n + dn, e + de, alt + climb * pdt, wrap_angle(psi + omega * pdt), v1, climb)


def _check_state(s: OwnTuple, omega: float, lead: Optional[tuple[float, ...]],
                 constraints: SafetyConstraintSet, cfg: RtaConfig,
                 tau: float, t: float, margined: bool) -> Optional[RtaReason]:
    """Violation test for one predicted state. tau is time since the lead
    sample (age + t); t is prediction time, reported on the reason."""
    n, e, alt, _, v, climb = s

    if lead is not None:
        ln, le, lalt = _lead_at(lead, tau)
        d = math.sqrt((n - ln) ** 2 + (e - le) ** 2 + (alt - lalt) ** 2)
        growth = cfg.uncertainty_growth if margined else 0.5 * cfg.uncertainty_growth
        r = cfg.uncertainty_base + 0.5 * growth * tau * tau
        if d < constraints.separation.d_min + r:
            return RtaReason("separation", time_to_event=t)

    g = constraints.geofence
    lat_margin = cfg.fence_margin if margined else 0.0
    alt_margin = cfg.alt_margin if margined else 0.0
    if g.edge_margin(n, e) < lat_margin:
        return RtaReason("geofence", time_to_event=t)
    if not g.altitude_floor + alt_margin <= alt <= g.altitude_ceiling - alt_margin:
        return RtaReason("geofence", time_to_event=t)

    epm = constraints.epm_envelope
    roll = math.atan(v * omega / G)
    if abs(roll) > epm.max_roll:
        return RtaReason("epm", time_to_event=t, limit="roll")
    if abs(math.atan2(climb, max(v, 1.0))) > epm.max_pitch:
        return RtaReason("epm", time_to_event=t, limit="pitch")
    if not epm.v_min <= v <= epm.v_max:
        return RtaReason("epm", time_to_event=t, limit="speed")
    if not epm.altitude_floor <= alt <= epm.altitude_ceiling:
        return RtaReason("epm", time_to_event=t, limit="altitude")
    n_load = 1.0 / max(math.cos(roll), 1e-6)
    if not epm.n_min <= n_load <= epm.n_max:
        return RtaReason("epm", time_to_event=t, limit="load_factor")
    alpha = 0.02 + 300.0 * n_load / max(v * v, 1.0)
    if not epm.alpha_min <= alpha <= epm.alpha_max:
        return RtaReason("epm", time_to_event=t, limit="alpha")
    return None


def _rollout(policy: Policy, start: OwnTuple, lead: Optional[tuple[float, ...]],
             constraints: SafetyConstraintSet, cfg: RtaConfig, age_s: float,
             margined: bool) -> Optional[RtaReason]:
    steps = max(1, math.ceil(cfg.horizon / cfg.prediction_dt))
    s = start
    for k in range(1, steps + 1):
        cmd = policy(s)
        s = _advance(s, cmd, cfg.prediction_dt, cfg.plant)
        t = k * cfg.prediction_dt
        reason = _check_state(s, cmd[0], lead, constraints, cfg, age_s + t, t, margined)
        if reason is not None:
            return reason
    return None


def verify_candidate(cmd: ControlCommand, own: AircraftState,
                     lead: Optional[PositionReport], constraints: SafetyConstraintSet,
                     cfg: RtaConfig, age_frames: int) -> Optional[RtaReason]:
    """Margined rollout of one constant command; the pure function behind
    pass-through decisions, reusable for post-hoc audits of a trace."""
    fixed = (cmd.turn_rate, cmd.climb_rate, cmd.longitudinal_accel)
    return _rollout(lambda s: fixed, own_tuple(own), lead_motion(lead),
                    constraints, cfg, age_frames * cfg.dt, margined=True)


# ---------------------------------------------------------------------------
# Backup policies
# ---------------------------------------------------------------------------

def _steer(cfg: RtaConfig, heading_of: Callable[[OwnTuple], float],
           alt_target: float, v_ref: float) -> Policy:
    env = cfg.envelope

    def policy(s: OwnTuple) -> tuple[float, float, float]:
        err = wrap_angle(heading_of(s) - s[3])
        return (clamp(3.0 * err, -env.max_turn_rate, env.max_turn_rate),
                clamp(0.8 * (alt_target - s[2]), -env.max_climb_rate, env.max_climb_rate),
                clamp(0.5 * (v_ref - s[4]), -env.max_accel, env.max_accel))

    return policy


def _backup_policies(reason: RtaReason, own0: OwnTuple,
                     lead: Optional[tuple[float, ...]],
                     constraints: SafetyConstraintSet,
                     cfg: RtaConfig) -> list[Policy]:
    g = constraints.geofence
    cn, ce = g.centroid()
    band_mid = clamp(0.5 * (g.altitude_floor + g.altitude_ceiling),
                     constraints.epm_envelope.altitude_floor + 50.0,
                     constraints.epm_envelope.altitude_ceiling - 50.0)
    v_ref = clamp(cfg.v_backup, constraints.epm_envelope.v_min + 5.0,
                  constraints.epm_envelope.v_max - 5.0)

    toward_centroid = _steer(cfg, lambda s: math.atan2(ce - s[1], cn - s[0]),
                             band_mid, v_ref)

    def away_heading(s: OwnTuple) -> float:
        if lead is None:
            return math.atan2(ce - s[1], cn - s[0])
        ln, le, _ = _lead_at(lead, 0.0)
        return math.atan2(s[1] - le, s[0] - ln)

    if lead is not None:
        lalt = lead[2]
        step = 120.0
        want = own0[2] - step if own0[2] <= lalt else own0[2] + step
        alt_away = clamp(want, g.altitude_floor + cfg.alt_margin + 10.0,
                         g.altitude_ceiling - cfg.alt_margin - 10.0)
    else:
        alt_away = band_mid
    away_from_lead = _steer(cfg, away_heading, alt_away, v_ref)

    def hold_heading(s: OwnTuple) -> float:
        return s[3]

    level_out = _steer(cfg, hold_heading, band_mid, v_ref)

    if cfg.backup_policy == "geofence_recovery":
        return [toward_centroid, level_out]
    if cfg.backup_policy == "separation_recovery":
        return [away_from_lead, level_out]
    if reason.kind == "separation":
        return [away_from_lead, toward_centroid, level_out]
    if reason.kind == "epm":
        return [level_out, toward_centroid]
    return [toward_centroid, away_from_lead, level_out]


# ---------------------------------------------------------------------------
# Step
# ---------------------------------------------------------------------------

def _guard_blocks(own: AircraftState, lead: Optional[PositionReport],
                  constraints: SafetyConstraintSet, cfg: RtaConfig) -> bool:
    """Proximity check before re-engaging a previously disabled filter."""
    if cfg.guard_margin <= 0:
        return False
    g = constraints.geofence
    if g.edge_margin(own.position.north, own.position.east) < cfg.guard_margin:
        return True
    alt = own.altitude()
    if not (g.altitude_floor + 0.5 * cfg.guard_margin <= alt
            <= g.altitude_ceiling - 0.5 * cfg.guard_margin):
        return True
    if lead is not None:
        d = (own.position - lead.lead_state.position).norm()
        if d < constraints.separation.d_min + cfg.guard_margin:
            return True
    return bool(constraints.epm_envelope.violations(own))


@dataclass(frozen=True)
class _Core:
    turn: float
    climb: float
    accel: float
    intervened: bool
    reason: Optional[RtaReason]
    failed: bool


def _decide(candidate: ControlCommand, own0: OwnTuple,
            lead: Optional[tuple[float, ...]], constraints: SafetyConstraintSet,
            cfg: RtaConfig, age_s: float) -> _Core:
    fixed = (candidate.turn_rate, candidate.climb_rate, candidate.longitudinal_accel)
    reason = _rollout(lambda s: fixed, own0, lead, constraints, cfg, age_s, margined=True)
    if reason is None:
        return _Core(*fixed, intervened=False, reason=None, failed=False)

    policies = _backup_policies(reason, own0, lead, constraints, cfg)
    for policy in policies:
        if _rollout(policy, own0, lead, constraints, cfg, age_s, margined=False) is None:
            turn, climb, accel = policy(own0)
            return _Core(turn, climb, accel, intervened=True, reason=reason, failed=False)
    turn, climb, accel = policies[0](own0)
    return _Core(turn, climb, accel, intervened=True, reason=reason, failed=True)


def rta_step(primary_cmd: Optional[ControlCommand], own: AircraftState,
             lead: Optional[PositionReport], constraints: SafetyConstraintSet,
             cfg: RtaConfig, memory: RtaMemory,
             age_frames: int = 0) -> tuple[RtaDecision, RtaMemory]:
    """One filter frame.

    lead is the last report that passed validation; age_frames is how many
    frames old its sample is (the separation margin inflates with it).
    Returns the decision and the threaded memory.
    """
    t_start = time.perf_counter()
    stamp = own.timestamp
    if primary_cmd is not None:
        memory = replace(memory, last_primary=primary_cmd)

    if memory.fault_mode == "dead":
        cmd = maintain_command(stamp)
        return _finish(RtaDecision(
            output=cmd, intervened=True, reason=None, status="failed",
            candidate=cmd, candidate_source="maintain", checked=False,
            alerts=(ALERT_FAILED,)), memory, cfg, t_start)

    if primary_cmd is not None:
        candidate, source = primary_cmd, "primary"
    elif memory.last_primary is not None:
        candidate = memory.last_primary.with_stamp(stamp)
        source = "memory"
    else:
        candidate, source = maintain_command(stamp), "maintain"

    if not cfg.enabled:
        memory = replace(memory, active=False, pending_guard=False)
        return _finish(RtaDecision(
            output=candidate, intervened=False, reason=None, status="ok",
            candidate=candidate, candidate_source=source, checked=False),
            memory, cfg, t_start)

    alerts: list[str] = []
    if not memory.active:
        if _guard_blocks(own, lead, constraints, cfg):
            memory = replace(memory, pending_guard=True)
            return _finish(RtaDecision(
                output=candidate, intervened=False, reason=None, status="ok",
                candidate=candidate, candidate_source=source, checked=False,
                alerts=(ALERT_REENABLE_GUARD,)), memory, cfg, t_start)
        memory = replace(memory, active=True, pending_guard=False)

    own0 = own_tuple(own)
    lead_t = lead_motion(lead)
    age_s = age_frames * cfg.dt

    core = _decide(candidate, own0, lead_t, constraints, cfg, age_s)
    if cfg.dual_redundancy:
        twin = _decide(candidate, own0, lead_t, constraints, cfg, age_s)
        if memory.fault_mode == "compute":
            twin = replace(twin, turn=twin.turn + 1e-6)
        if (twin.turn, twin.climb, twin.accel, twin.intervened) != (
                core.turn, core.climb, core.accel, core.intervened):
            alerts.append(ALERT_REDUNDANCY_MISMATCH)
            core = replace(core, failed=True)

    if core.failed and ALERT_REDUNDANCY_MISMATCH not in alerts:
        alerts.append(ALERT_NO_SAFE_COMMAND)
    if not core.intervened:
        output = candidate
    else:
        output = ControlCommand(core.turn, core.climb, core.accel, stamp)

    decision = RtaDecision(
        output=output, intervened=core.intervened, reason=core.reason,
        status="failed" if core.failed else "ok",
        candidate=candidate, candidate_source=source, checked=True,
        alerts=tuple(alerts))
    return _finish(decision, memory, cfg, t_start)


def _finish(decision: RtaDecision, memory: RtaMemory, cfg: RtaConfig,
            t_start: float) -> tuple[RtaDecision, RtaMemory]:
    elapsed_ms = (time.perf_counter() - t_start) * 1000.0
    budget_ms = cfg.frame_budget_fraction * cfg.dt * 1000.0
    decision = replace(decision, compute_ms=elapsed_ms,
                       overrun=elapsed_ms > budget_ms)
    return decision, memory
