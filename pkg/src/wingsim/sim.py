"""Deterministic two-ship flight-test scheduler.

One run executes a Scenario frame by frame in a fixed pipeline order:

  lead plant step -> lead report build/encode -> channel transmit ->
  wingman sense -> receiver validation -> primary controller ->
  assurance filter -> envelope monitor -> pilot model -> selector ->
  wingman plant step -> record every channel

All randomness flows through named substreams of the scenario seed, all
component stamps come from the scheduler's frame clock, and wall-clock
measurements never enter the trace, so the same scenario and seed produce
a byte-identical trace file every time.

Fault injection and mitigation toggling both live here. Faults perturb
the data flowing between components; mitigations are the defensive
mechanisms the requirement rows call for, each keyed to its requirement
id through a named hook so a paired run can switch exactly one off.
Clock-skew style faults are modeled at the stamping boundary: the
component's recorded stamp drifts (which is what the sync monitors check)
while the data keeps flowing on the frame grid, so an off-run stays
dynamically comparable to its on-run.

The truth channel carries derived ground truth per frame, including the
composite hazard flags the always-on hazard monitors read. Truth at frame
f pairs the lead state after its step with the wingman state entering the
frame; both carry stamp f.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional

from .controllers import (
    PrimaryConfig,
    PrimaryControllerStatus,
    RejoinGoal,
    primary_step,
    station_point,
)
from .core import (
    AircraftState,
    ConfigError,
    ControlCommand,
    EnvelopeLimits,
    FrameStamp,
    GeofenceConstraint,
    SafetyConstraintSet,
    SeparationConstraint,
    Vec3,
    bearing_to,
    distance,
    maintain_command,
    wrap_angle,
)
from .datalink import (
    ChannelConfig,
    PositionReport,
    ReasonablenessBounds,
    blank_field,
    decode_report,
    encode_report,
    perturb_field,
    transmit,
    validate_report,
)
from .epm import SWITCH_TO_PILOT, EpmState, epm_step, no_switch
from .monitors import Recorder, Trace, TraceRecord, evaluate, load_monitor_specs
from .pilot import CARD_EPM_REQUEST, CARD_REENGAGE_AUTONOMY, CARD_REJOIN_POINT, \
    CARD_RTA_TOGGLE, CARD_TAKEOVER, PilotModel, health_gate_pass, line_of_sight, \
    pilot_step
from .plant import SENSED_FIELDS, PlantConfig, TrajectoryScript, in_jetwash, \
    plant_step, sense, straight_script
from .requirements import (
    CH_L15, CH_SCRIPT, CH_TRUTH, CH_VOICE, CH_W1, CH_W2, CH_W3, CH_W4, CH_W5,
    CH_W6, CH_W7, CH_W8, CH_W9, CH_W13, CH_W14, CHANNELS, MITIGATION_IDS,
    BY_ID, monitor_catalog, require_known_mitigations,
)
from .rng import StreamBank
from .rta import RtaConfig, RtaDecision, RtaMemory, rta_step, verify_candidate
from .selector import SelectorState, fault_selector, reengage_autonomy, select

# ---------------------------------------------------------------------------
# Faults
# ---------------------------------------------------------------------------

FAULT_KINDS = (
    "signal_dropout",       # target: link channel; no value
    "field_corruption",     # target: channel; value {"field": ..., "offset": ...}
    "stale_timestamp",      # target: L15; value lag_frames > 0
    "clock_skew",           # target: component; value offset_frames != 0
    "component_fault",      # target: component; window
    "pilot_incapacitation", # no target
    "pilot_distraction",    # no target; window
    "sensor_bias",          # target: sensed field; value offset
    "frame_overrun",        # target: rta; value excess_ms > 0
    "recorder_fault",       # target: "" for the whole recorder or one channel
    "rta_toggle",           # value True (enable) / False (disable)
)

_DROPPABLE_LINKS = (CH_L15, CH_W1, CH_W2, CH_W3, CH_W4, CH_W5, CH_W8)
_FAULTABLE_COMPONENTS = ("primary", "rta", "rta_output", "selector",
                         "selector_output", "epm")
_SKEWABLE = ("primary", "rta", "selector", "sensor", "lead")

#: requirement rows owning the shared-clock mitigation, per component
CLOCK_OWNERS = {
    "primary": "RL2.W1.5",
    "rta": "RL2.W2.11",
    "selector": "RL2.W3.7",
    "sensor": "RL2.W4.3",
    "lead": "RL1.5.7",
}

#: requirement rows owning the buffered-retry recording mitigation
RECORD_RETRY_OWNERS = {
    CH_W1: "RL2.W1.4",
    CH_W2: "RL2.W2.16",
    CH_W3: "RL2.W3.9",
}

#: mitigation hooks and the requirement row each belongs to by default;
#: a scenario may rebind a hook to the row it exercises
HOOK_OWNERS = {
    "primary_fault_default": "RL2.W1.2",
    "primary_fault_alert": "RL2.W1.3",
    "rta_enabled": "RL2.W2.1",
    "report_alert": "RL2.W2.2",
    "rta_memory": "RL2.W2.3",
    "rta_absent_candidate": "RL2.W2.4",
    "rta_dual_compute": "RL2.W2.6",
    "rta_output_check": "RL2.W2.7",
    "jetwash_watch": "RL2.W2.9",
    "backup_envelope": "RL2.W2.10",
    "overrun_flagging": "RL2.W2.12",
    "selector_absence_alert": "RL2.W2.13",
    "no_safe_alert": "RL2.W2.14",
    "reenable_guard": "RL2.W2.15",
    "selector_fault_default": "RL2.W3.1",
    "selector_output_check": "RL2.W3.2",
    "switch_watch": "RL2.W3.5",
    "selector_absent_default": "RL2.W3.6",
    "actuation_redundancy": "RL2.W3.8",
    "pilot_visual": "RL2.W4.1",
    "sensor_hold_last": "RL2.W4.2",
    "health_gate": "RL2.W5.1",
    "los_watch": "RL2.W5.2",
    "pilot_path_redundancy": "RL2.W5.3",
    "distraction_abort": "RL2.W5.4",
    "briefing": "RL2.W5.5",
    "epm_debounce": "RL2.W6.1",
    "epm_fault_failsafe": "RL2.W6.2",
    "epm_fault_display": "RL2.W6.4",
    "status_crosscheck": "RL2.W8.1",
    "status_redundancy": "RL2.W8.2",
    "report_handling": "RL1.5.1",
    "report_gate": "RL1.5.1",
    "atomic_sampling": "RL1.5.3",
    "delay_tolerance": "RL1.5.4",
    "rejoin_screen": "RL1.5.5",
    "test_point_check": "RL1.5.9",
    "voice_protocol": "RL1.5.36",
    "voice_coordination": "RL1.5.37",
    "voice_safety": "RL1.5.38",
}

#: truth thresholds for derived hazard components
H2_ENVELOPE_MARGIN = 1.15
STARVED_ALERT_FRAMES = 25
STARVED_HAZARD_FRAMES = 50
JUSTIFICATION_WINDOW_FRAMES = 50
POSITION_UNKNOWN_FRAMES = 25
SAFETY_EVENT_MARGIN_M = 100.0
DELAY_TOLERANCE_FRAMES = 5
JETWASH_ALERT_FRAMES = 5
VOICE_MAX_FRAMES = 50

_ALERT_CHANNELS = (CH_W7, CH_W13, CH_W14)

#: cautions recorded for the pilot's panel but below the takeover-reflex bar
_ADVISORY_ALERTS = ("jetwash-watch", "rejoin-rejected")

PRIMARY_MODES = ("rejoin", "adversarial")


@dataclass(frozen=True)
class FaultSpec:
    """One scheduled fault. frame_end is exclusive; None means a single
    frame for point faults and end-of-run for persistent kinds."""

    kind: str
    target: str = ""
    frame_start: int = 0
    frame_end: Optional[int] = None
    value: object = None

    def window(self, duration: int) -> tuple[int, int]:
        if self.frame_end is not None:
            return self.frame_start, self.frame_end
        if self.kind in ("component_fault", "pilot_incapacitation"):
            return self.frame_start, duration
        return self.frame_start, self.frame_start + 1

    def active(self, frame: int, duration: int) -> bool:
        lo, hi = self.window(duration)
        return lo <= frame < hi

    def marker(self) -> str:
        return f"{self.kind}:{self.target}" if self.target else self.kind


def _validate_fault(f: FaultSpec, duration: int) -> None:
    if f.kind not in FAULT_KINDS:
        raise ConfigError(f"unknown fault kind {f.kind!r}")
    if not 0 <= f.frame_start < duration:
        raise ConfigError(f"{f.kind}: frame_start {f.frame_start} outside run")
    if f.frame_end is not None and f.frame_end <= f.frame_start:
        raise ConfigError(f"{f.kind}: empty fault window")
    if f.kind == "signal_dropout" and f.target not in _DROPPABLE_LINKS:
        raise ConfigError(f"signal_dropout target {f.target!r} is not a link")
    if f.kind == "field_corruption":
        if f.target not in (CH_L15, CH_W8):
            raise ConfigError(f"field_corruption target {f.target!r} unsupported")
        if not isinstance(f.value, dict) or "field" not in f.value:
            raise ConfigError("field_corruption needs {'field': ..., 'offset': ...}")
    if f.kind == "stale_timestamp":
        if not isinstance(f.value, int) or f.value <= 0:
            raise ConfigError("stale_timestamp needs a positive integer lag")
    if f.kind == "clock_skew":
        if f.target not in _SKEWABLE:
            raise ConfigError(f"clock_skew target {f.target!r} has no clock")
        if not isinstance(f.value, int) or f.value == 0:
            raise ConfigError("clock_skew needs a nonzero integer offset")
    if f.kind == "component_fault" and f.target not in _FAULTABLE_COMPONENTS:
        raise ConfigError(f"component_fault target {f.target!r} unknown")
    if f.kind == "sensor_bias" and f.target not in SENSED_FIELDS:
        raise ConfigError(f"sensor_bias target {f.target!r} is not sensed")
    if f.kind == "frame_overrun":
        if f.target != "rta":
            raise ConfigError("frame_overrun is only modeled for the filter")
        if not isinstance(f.value, (int, float)) or f.value <= 0:
            raise ConfigError("frame_overrun needs a positive excess")
    if f.kind == "recorder_fault" and f.target and f.target not in CHANNELS:
        raise ConfigError(f"recorder_fault target {f.target!r} is not a channel")
    if f.kind == "rta_toggle" and not isinstance(f.value, bool):
        raise ConfigError("rta_toggle needs a boolean value")


@dataclass(frozen=True)
class VoiceEvent:
    """One briefed coordination window. off_mode says how the call goes
    wrong when the governing protocol mitigation is toggled off."""

    kind: str  # coordination | safety
    window_start: int
    window_end: int
    necessary: bool = True
    hook: str = "voice_coordination"
    off_mode: str = "silent"  # silent | send | long | short | early | late

    def __post_init__(self):
        assert self.kind in ("coordination", "safety"), f"bad kind {self.kind}"
        assert self.window_start <= self.window_end, "window reversed"
        assert self.off_mode in ("silent", "send", "long", "short",
                                 "early", "late"), f"bad mode {self.off_mode}"


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------

def level_state(north: float = 0.0, east: float = 0.0, altitude: float = 1500.0,
                speed: float = 80.0, heading: float = 0.0,
                dt: float = 0.02) -> AircraftState:
    """Wings-level steady state helper used by scenario builders."""
    vel = Vec3(speed * math.cos(heading), speed * math.sin(heading), 0.0)
    return AircraftState(
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
        timestamp=FrameStamp.at(0, dt),
    )


def square_fence(half: float = 8000.0, floor: float = 300.0,
                 ceiling: float = 3000.0) -> GeofenceConstraint:
    poly = ((half, -half), (half, half), (-half, half), (-half, -half))
    return GeofenceConstraint(polygon=poly, altitude_floor=floor,
                              altitude_ceiling=ceiling)


def default_constraints(fence: Optional[GeofenceConstraint] = None,
                        d_min: float = 152.4) -> SafetyConstraintSet:
    return SafetyConstraintSet(
        separation=SeparationConstraint(d_min=d_min),
        geofence=fence if fence is not None else square_fence(),
        epm_envelope=EnvelopeLimits(),
    )


@dataclass(frozen=True)
class Scenario:
    id: str
    seed: int
    duration_frames: int
    dt: float = 0.02
    lead_initial: AircraftState = field(
        default_factory=lambda: level_state(north=500.0))
    wingman_initial: AircraftState = field(default_factory=level_state)
    constraints: SafetyConstraintSet = field(default_factory=default_constraints)
    lead_script: TrajectoryScript = field(default_factory=straight_script)
    goal: RejoinGoal = field(
        default_factory=lambda: RejoinGoal(Vec3(-250.0, 120.0, 0.0)))
    primary_cfg: PrimaryConfig = field(default_factory=PrimaryConfig)
    rta_cfg: RtaConfig = field(default_factory=RtaConfig)
    plant_cfg: PlantConfig = field(default_factory=PlantConfig)
    bounds: ReasonablenessBounds = field(default_factory=ReasonablenessBounds)
    pilot: PilotModel = field(default_factory=PilotModel)
    link: ChannelConfig = field(default_factory=ChannelConfig)
    wind: Vec3 = field(default_factory=Vec3.zero)
    epm_roll_noise_std: float = 0.0
    epm_speed_noise_std: float = 0.0
    primary_mode: str = "rejoin"
    commanded_rejoin: Optional[Vec3] = None
    lead_test_point: Optional[str] = None
    faults: tuple = ()
    enabled_mitigations: frozenset = frozenset(MITIGATION_IDS)
    armed_monitors: tuple = ()
    hooks: dict = field(default_factory=dict)
    expected_outcomes: tuple = ()
    voice_events: tuple = ()
    briefed_points: tuple = ("TP-07",)
    rejoin_required: bool = False
    distraction_limit_frames: int = 100
    notes: str = ""

    def validate(self, catalog_ids: Optional[set] = None) -> None:
        """Everything that can be rejected before frame 0 is rejected here."""
        if not self.id:
            raise ConfigError("scenario needs an id")
        if not isinstance(self.duration_frames, int) or self.duration_frames <= 0:
            raise ConfigError("duration_frames must be a positive integer")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if abs(self.dt - self.plant_cfg.dt) > 1e-12 or abs(
                self.dt - self.rta_cfg.dt) > 1e-12:
            raise ConfigError("scenario, plant, and filter dt disagree")
        for s in (self.lead_initial, self.wingman_initial):
            problems = s.check_invariants()
            if problems:
                raise ConfigError(f"bad initial state: {problems}")
        if self.primary_mode not in PRIMARY_MODES:
            raise ConfigError(f"unknown primary mode {self.primary_mode!r}")
        if self.epm_roll_noise_std < 0 or self.epm_speed_noise_std < 0:
            raise ConfigError("noise deviations must be non-negative")
        for f in self.faults:
            _validate_fault(f, self.duration_frames)
        require_known_mitigations(sorted(self.enabled_mitigations))
        if catalog_ids is None:
            catalog_ids = {e["id"] for e in monitor_catalog()}
        for mid in tuple(self.armed_monitors) + tuple(self.expected_outcomes):
            if mid not in catalog_ids:
                raise ConfigError(f"unknown monitor id {mid!r}")
        for hook, owner in self.hooks.items():
            if hook not in HOOK_OWNERS:
                raise ConfigError(f"unknown mitigation hook {hook!r}")
            if owner not in BY_ID:
                raise ConfigError(f"hook {hook} bound to unknown row {owner!r}")
        for ev in self.voice_events:
            if not isinstance(ev, VoiceEvent):
                raise ConfigError("voice_events must hold VoiceEvent entries")
            if ev.hook not in HOOK_OWNERS:
                raise ConfigError(f"voice event bound to unknown hook {ev.hook!r}")
            if ev.window_start >= self.duration_frames:
                raise ConfigError("voice window opens after the run ends")


@dataclass(frozen=True)
class RunResult:
    scenario_id: str
    trace: Trace
    verdicts: tuple
    summary: dict
    recorder: Recorder

    def verdict_by_id(self) -> dict:
        return {v.id: v for v in self.verdicts}

    def hazard_violations(self) -> dict:
        return {v.id: len(v.violations) for v in self.verdicts
                if v.severity == "hazard" and v.violations}


@dataclass(frozen=True)
class PairedResult:
    row_id: str
    target: str
    enforced_by_construction: bool = False
    off: Optional[RunResult] = None
    on: Optional[RunResult] = None

    @property
    def mitigated(self) -> bool:
        """Off-run shows the target violation, on-run is clean of both the
        target and every hazard monitor."""
        if self.enforced_by_construction:
            return True
        off_v = self.off.verdict_by_id()[self.target]
        on_v = self.on.verdict_by_id()[self.target]
        return (not off_v.passed and on_v.passed
                and not self.on.hazard_violations())


# ---------------------------------------------------------------------------
# Scheduler
# ---------------------------------------------------------------------------

def _margin_limits(e: EnvelopeLimits, k: float) -> EnvelopeLimits:
    """Limits widened outward by factor k; crossing these is a hazard, not
    just an envelope exceedance."""
    return EnvelopeLimits(
        max_roll=min(e.max_roll * k, math.pi / 2 - 1e-6),
        max_pitch=e.max_pitch * k,
        alpha_min=e.alpha_min * k,
        alpha_max=e.alpha_max * k,
        v_min=e.v_min / k,
        v_max=e.v_max * k,
        n_min=e.n_min * k,
        n_max=e.n_max * k,
        altitude_floor=e.altitude_floor / k,
        altitude_ceiling=e.altitude_ceiling * k,
    )


class _Run:
    """Mutable state for one run; run() drives it and returns the result."""

    def __init__(self, s: Scenario):
        s.validate()
        self.s = s
        self.bank = StreamBank(s.seed)
        self.lead = s.lead_initial
        self.wing = s.wingman_initial
        self.primary_status = PrimaryControllerStatus()
        self.rta_memory = RtaMemory.initial(s.rta_cfg)
        self.rta_cfg = s.rta_cfg if self._on("rta_enabled") else replace(
            s.rta_cfg, enabled=False)
        if not self._on("reenable_guard"):
            self.rta_cfg = replace(self.rta_cfg, guard_margin=0.0)
        self.epm_state = EpmState()
        self.selector_state = SelectorState()
        self.pilot = s.pilot
        if not self._on("briefing"):
            self.pilot = replace(self.pilot, briefed=False)
        if not self._on("los_watch"):
            self.pilot = replace(self.pilot, los_max_loss_frames=10 ** 9)
        if not self._on("pilot_visual"):
            self.pilot = replace(self.pilot, visual_breakout_distance=0.0)
        self.goal = s.goal
        self.recorder = Recorder({
            "scenario": s.id,
            "seed": s.seed,
            "dt": s.dt,
            "duration_frames": s.duration_frames,
            "channels": list(CHANNELS),
            "armed_monitors": sorted(s.armed_monitors),
            "enabled_mitigations": sorted(s.enabled_mitigations),
        })

        # receiver-side report state
        self.inbox: dict[int, list[PositionReport]] = {}
        self.history: list[PositionReport] = []
        self.control_report: Optional[PositionReport] = None
        self.control_verdict: str = "valid"
        self.control_sample_frame: Optional[int] = None
        self.last_delivery_age = 0
        self.held_sensed: Optional[AircraftState] = None
        self.held_decision: Optional[RtaDecision] = None
        self.last_applied: Optional[ControlCommand] = None
        self.last_w14_alerts: tuple = ()
        self.shown_engaged = True
        self._pending_epm_request = False
        self._adv_phase = "random"
        self._adv_until = 0

        # truth bookkeeping
        self.jetwash_dwell = 0
        self.starved_frames = 0
        self.los_frames = 0
        self.distracted_frames = 0
        self.last_justified = -(10 ** 9)
        self.prev_source = "autonomy"
        self.prev_contingency = "normal"
        self.contingency = "normal"
        self.test_active = True
        self.gate_declined = False
        self.aborted = False

        # voice scheduling: frame -> list of (event, flags)
        self.voice_sends: dict[int, list] = {}
        self.safety_event_prev = False

        # diagnostics
        self.interventions = 0
        self.measured_overruns = 0
        self.audit: list = []
        self.panic: Optional[str] = None

    # -- helpers ---------------------------------------------------------

    def _on(self, hook: str) -> bool:
        owner = self.s.hooks.get(hook, HOOK_OWNERS[hook])
        return owner in self.s.enabled_mitigations

    def _clock_on(self, component: str) -> bool:
        return CLOCK_OWNERS[component] in self.s.enabled_mitigations

    def _retry_on(self, channel: str) -> bool:
        owner = RECORD_RETRY_OWNERS.get(channel)
        return owner is not None and owner in self.s.enabled_mitigations

    def _faults(self, kind: str, frame: int, target: Optional[str] = None):
        for f in self.s.faults:
            if f.kind != kind:
                continue
            if target is not None and f.target != target:
                continue
            if f.active(frame, self.s.duration_frames):
                yield f

    def _fault_active(self, kind: str, frame: int,
                      target: Optional[str] = None) -> bool:
        return next(self._faults(kind, frame, target), None) is not None

    def _stamp_frame(self, component: str, frame: int) -> int:
        """The frame index this component stamps its output with; drifts
        only under an active clock skew with the sync mitigation off."""
        if self._clock_on(component):
            return frame
        for f in self._faults("clock_skew", frame, component):
            return frame + int(f.value)
        return frame

    def _record(self, frame: int, channel: str, payload: dict,
                fs: FrameStamp) -> None:
        rec = TraceRecord(fs, channel, payload)
        faults = list(self._faults("recorder_fault", frame))
        drop = False
        if any(f.target == channel for f in faults) \
                and not self._retry_on(channel):
            drop = True
        if any(f.target == "" for f in faults) and channel not in _ALERT_CHANNELS:
            # the annunciator path stays up during a recorder outage so
            # alert channels still land; everything else is lost
            drop = True
        if drop:
            self.recorder.fault_active = True
            self.recorder.record(rec)
            self.recorder.fault_active = False
        else:
            self.recorder.record(rec)

    # -- voice -----------------------------------------------------------

    def _plan_voice(self) -> None:
        for ev in self.s.voice_events:
            enabled = self._on(ev.hook)
            if enabled:
                if not ev.necessary:
                    continue
                frame = ev.window_start + 3
                flags = {"duration": 5, "content_ok": True}
            else:
                mode = ev.off_mode
                if mode == "silent":
                    continue
                frame = ev.window_start + 3
                flags = {"duration": 5, "content_ok": True}
                if mode == "long":
                    flags["duration"] = VOICE_MAX_FRAMES + 30
                elif mode == "short":
                    flags["content_ok"] = False
                elif mode == "early":
                    frame = max(ev.window_start - 40, 0)
                elif mode == "late":
                    frame = ev.window_end + 40
            if frame < self.s.duration_frames:
                self.voice_sends.setdefault(frame, []).append((ev, flags))

    def _voice_payload(self, frame: int, safety_rising: bool) -> dict:
        payload = {"sent": False, "sent_kind": "none", "necessary": False,
                   "unnecessary_sent": False, "too_long": False,
                   "too_short": False, "too_early": False, "too_late": False,
                   "duration_frames": 0}
        if safety_rising and self._on("voice_safety"):
            # the lead voices a developing safety concern a beat later
            target = frame + 8
            if target < self.s.duration_frames:
                ev = VoiceEvent("safety", frame, frame + VOICE_MAX_FRAMES,
                                hook="voice_safety")
                self.voice_sends.setdefault(target, []).append(
                    (ev, {"duration": 5, "content_ok": True}))
        for ev, flags in self.voice_sends.get(frame, ()):
            payload["sent"] = True
            payload["sent_kind"] = ev.kind
            payload["necessary"] = ev.necessary
            payload["unnecessary_sent"] = not ev.necessary
            payload["duration_frames"] = flags["duration"]
            payload["too_long"] = flags["duration"] > VOICE_MAX_FRAMES
            payload["too_short"] = not flags["content_ok"]
            payload["too_early"] = frame < ev.window_start
            payload["too_late"] = frame > ev.window_end
        return payload

    # -- adversarial candidate stream --------------------------------------

    def _adversary_command(self, fs: FrameStamp,
                           sensed: AircraftState) -> ControlCommand:
        """Worst-case stand-in for the primary: saturated pursuit of the
        lead, runs at the fence, dives, and white noise, in random phases.
        Everything it emits still goes through the assurance filter."""
        s = self.s
        adv = self.bank.get("adversary")
        env = s.primary_cfg.envelope
        if fs.frame_index >= self._adv_until:
            self._adv_phase = adv.choice(("ram", "fence", "dive", "random"))
            self._adv_until = fs.frame_index + adv.randint(15, 40)
        phase = self._adv_phase
        turn = adv.uniform(-env.max_turn_rate, env.max_turn_rate)
        climb = adv.uniform(-env.max_climb_rate, env.max_climb_rate)
        accel = adv.uniform(-env.max_accel, env.max_accel)
        target: Optional[Vec3] = None
        if phase == "ram" and self.control_report is not None:
            target = self.control_report.lead_state.position
            accel = env.max_accel
        elif phase == "fence":
            g = s.constraints.geofence
            target = Vec3(max(p[0] for p in g.polygon) + 2000.0,
                          max(p[1] for p in g.polygon) + 2000.0,
                          sensed.position.down)
            accel = env.max_accel
        elif phase == "dive":
            climb = -env.max_climb_rate
        if target is not None:
            err = wrap_angle(bearing_to(sensed.position, target)
                             - sensed.heading())
            turn = max(-env.max_turn_rate,
                       min(env.max_turn_rate, 3.0 * err))
            climb = max(-env.max_climb_rate,
                        min(env.max_climb_rate,
                            (sensed.position.down - target.down) * 0.5))
        return env.saturate(ControlCommand(turn, climb, accel, fs))

    # -- lead side -------------------------------------------------------

    def _lead_report(self, frame: int, fs: FrameStamp,
                     lead_states: list) -> tuple[PositionReport, dict]:
        """Assemble, fault, and encode this frame's report; returns the
        wire-faithful decoded report plus ground-truth assembly facts."""
        sample = self.lead
        skew_frames = 0
        if not self._on("atomic_sampling"):
            for f in self._faults("field_corruption", frame, CH_L15):
                if f.value.get("stale_element"):
                    lag = int(f.value.get("lag", 5))
                    old = lead_states[max(len(lead_states) - 1 - lag, 0)]
                    name = f.value["field"]
                    sample = replace(sample, **{name: getattr(old, name)})
                    skew_frames = lag
        s = self.s
        report = PositionReport(
            lead_state=sample,
            test_point_id=(s.lead_test_point if s.lead_test_point is not None
                           else s.briefed_points[0]),
            commanded_rejoin_point=(s.commanded_rejoin
                                    if s.commanded_rejoin is not None
                                    else self.goal.rejoin_point),
            invalid=False,
            invalid_details=(),
            report_timestamp=fs,
        )
        lag = 0
        for f in self._faults("stale_timestamp", frame, CH_L15):
            lag = int(f.value)
        skewed_clock = self._stamp_frame("lead", frame) != frame
        stamp_skewed = (lag > 0 or skewed_clock) and not self._clock_on("lead")
        truth = {"element_skew_frames": skew_frames, "stamp_skewed": stamp_skewed}
        # self-declared defect staging: a scenario can make the lead flag
        # its own report so the receiver's flag handling is exercised
        for f in self._faults("field_corruption", frame, CH_L15):
            if f.value.get("self_declare"):
                report = replace(report, invalid=True, invalid_details=(
                    ("position", "lead self-check failed"),))
        report = decode_report(encode_report(report))
        return report, truth

    def _transmit(self, frame: int, report: PositionReport) -> None:
        if self._fault_active("signal_dropout", frame, CH_L15):
            return
        for f in self._faults("field_corruption", frame, CH_L15):
            v = f.value
            if v.get("stale_element") or v.get("self_declare"):
                continue
            offset = v.get("offset", "drop")
            if isinstance(offset, str) and offset == "drop":
                report = blank_field(report, v["field"])
            else:
                report = perturb_field(report, v["field"], offset, dt=self.s.dt)
        outcome = transmit(report, self.s.link, self.bank.get("channel"))
        if not outcome.delivered:
            return
        arrival = frame + outcome.delay_frames
        if arrival < self.s.duration_frames:
            self.inbox.setdefault(arrival, []).append(outcome.report)

    # -- per-frame pipeline ----------------------------------------------

    def _frame(self, frame: int, lead_states: list) -> None:
        s = self.s
        fs = FrameStamp.at(frame, s.dt)
        active_faults = sorted({f.marker() for f in s.faults
                                if f.active(frame, s.duration_frames)})
        events: list[str] = []
        w13_alerts: list[str] = []
        w7_alerts: list[str] = []

        # 1. lead flies, then reports
        lead_cmd = s.lead_script.command_at(frame, s.dt)
        self.lead = replace(plant_step(self.lead, lead_cmd, s.wind, s.plant_cfg),
                            timestamp=fs)
        lead_states.append(self.lead)
        report, report_truth = self._lead_report(frame, fs, lead_states)
        self._transmit(frame, report)

        # 2. receive and validate whatever arrived this frame
        arrived = self.inbox.pop(frame, [])
        delivered = arrived[-1] if arrived else None
        verdict_str = ""
        reasons: list[str] = []
        if delivered is not None:
            result = validate_report(delivered, self.history, s.bounds, now=fs)
            verdict_str = result.verdict
            reasons = [f"{r.field}:{r.rule_id}" for r in result.reasons]
            if result.verdict == "valid":
                self.history.append(delivered)
            self.last_delivery_age = (
                frame - delivered.lead_state.timestamp.frame_index)
            if result.verdict == "valid" or not self._on("report_gate"):
                self.control_report = delivered
                self.control_verdict = result.verdict
                self.control_sample_frame = \
                    delivered.lead_state.timestamp.frame_index
            if result.verdict != "valid" and self._on("report_alert"):
                w7_alerts.append("rta-untrusted-input")

        age_frames = (frame - self.control_sample_frame
                      if self.control_sample_frame is not None else 10 ** 6)
        age_frames = max(0, min(age_frames, 10 ** 6))
        if self._on("delay_tolerance"):
            fresh = (self.control_report is not None
                     and age_frames <= s.bounds.stale_frames)
        else:
            # strict-freshness receiver: any aging at all is treated as a
            # lost link and handed to the contingency logic
            fresh = delivered is not None and age_frames == 0
        position_unknown = (self.control_report is None
                            or age_frames > POSITION_UNKNOWN_FRAMES)
        rejoin_missing = (s.rejoin_required and (
            self.control_report is None
            or self.control_report.commanded_rejoin_point is None))
        timestamp_missing = any(r.endswith(":missing-timestamp")
                                for r in reasons)
        test_point_known = (self.control_report is not None
                            and self.control_report.test_point_id
                            in s.briefed_points)

        # 3. report fault handling (alert + contingency)
        report_bad = (verdict_str not in ("", "valid") or position_unknown
                      or rejoin_missing or not fresh)
        handled = False
        if report_bad and self._on("report_handling") and self.test_active:
            self.contingency = "maintain"
            w13_alerts.append("lead-report-fault")
            handled = True
        elif self.contingency == "maintain" and not report_bad:
            self.contingency = "normal"
        tp_mismatch_unhandled = False
        tp_missing_unhandled = False
        if self.control_report is not None and not test_point_known:
            missing = not self.control_report.test_point_id
            if self._on("test_point_check"):
                self.contingency = "maintain"
                w13_alerts.append("test-point-query")
                handled = True
            else:
                tp_missing_unhandled = missing
                tp_mismatch_unhandled = not missing
        small_delay_overreaction = (
            self.contingency != "normal"
            and verdict_str in ("", "valid")
            and self.control_report is not None
            and self.last_delivery_age <= DELAY_TOLERANCE_FRAMES
            and not position_unknown and not rejoin_missing
            and not self._on("delay_tolerance"))

        # 4. sense ownship
        sensed_fresh: Optional[AircraftState] = None
        if not self._fault_active("signal_dropout", frame, CH_W4):
            cfg = s.plant_cfg
            bias = dict(cfg.bias)
            for f in self._faults("sensor_bias", frame):
                bias[f.target] = f.value
            if bias != dict(cfg.bias):
                cfg = replace(cfg, bias=bias)
            sensed_fresh = sense(replace(self.wing, timestamp=fs), cfg,
                                 self.bank.get("sensor"))
        if sensed_fresh is not None:
            self.held_sensed = sensed_fresh
            sensed = sensed_fresh
        elif self._on("sensor_hold_last") and self.held_sensed is not None:
            sensed = replace(self.held_sensed, timestamp=fs)
        else:
            sensed = None

        # rejoin screening: refuse a commanded station that parks the
        # wingman into the lead or out of the fence
        rejoin_unsafe = False
        control_estimate = self.control_report
        if control_estimate is not None \
                and control_estimate.commanded_rejoin_point is not None:
            target = station_point(
                control_estimate.lead_state,
                replace(self.goal,
                        rejoin_point=control_estimate.commanded_rejoin_point))
            bad = (distance(target, control_estimate.lead_state.position)
                   < s.constraints.separation.d_min
                   or s.constraints.geofence.edge_margin(
                       target.north, target.east) < s.rta_cfg.fence_margin
                   or not (s.constraints.geofence.altitude_floor
                           <= -target.down
                           <= s.constraints.geofence.altitude_ceiling))
            if bad:
                if self._on("rejoin_screen"):
                    control_estimate = replace(control_estimate,
                                               commanded_rejoin_point=None)
                    if "rejoin-rejected" not in w13_alerts:
                        w13_alerts.append("rejoin-rejected")
                else:
                    rejoin_unsafe = True

        # 5. primary controller
        primary_cmd: Optional[ControlCommand] = None
        primary_faulted = self._fault_active("component_fault", frame, "primary")
        fault_default_missing = False
        if self.test_active and sensed is not None:
            status = self.primary_status
            if primary_faulted and not status.faulted:
                status = status.fail()
            cmd, status, p_alerts = primary_step(
                sensed, control_estimate if delivered is not None else None,
                self.goal, status, s.primary_cfg)
            self.primary_status = status
            if primary_faulted and not self._on("primary_fault_default"):
                primary_cmd = None
                fault_default_missing = True
            else:
                primary_cmd = cmd
            if self._on("primary_fault_alert"):
                w13_alerts.extend(p_alerts)
            if self.contingency != "normal" and primary_cmd is not None:
                # contingency response: hold what we have instead of
                # maneuvering on suspect data
                primary_cmd = maintain_command(fs)
            if s.primary_mode == "adversarial" and primary_cmd is not None:
                primary_cmd = self._adversary_command(fs, sensed)

        # 6. assurance filter
        decision: Optional[RtaDecision] = None
        rta_candidate = primary_cmd
        if self._fault_active("signal_dropout", frame, CH_W1):
            rta_candidate = None
        for f in self._faults("rta_toggle", frame):
            enabled = bool(f.value)
            if enabled and not self.rta_cfg.enabled:
                events.append("rta-enable-request")
            self.rta_cfg = replace(self.rta_cfg, enabled=enabled)
        memory_wiped = False
        if not self._on("rta_memory") and self.rta_memory.last_primary is not None:
            self.rta_memory = replace(self.rta_memory, last_primary=None)
            memory_wiped = True
        had_memory = self.rta_memory.last_primary is not None or memory_wiped
        compute_fault = self._fault_active("component_fault", frame, "rta")
        fault_mode = "compute" if (compute_fault
                                   and self._on("rta_dual_compute")) else None
        if self.rta_memory.fault_mode != fault_mode:
            self.rta_memory = replace(self.rta_memory, fault_mode=fault_mode)
        skip_filter = (sensed is None or not self.test_active
                       or (rta_candidate is None and not had_memory
                           and not self._on("rta_absent_candidate")))
        redundancy_caught = False
        if not skip_filter:
            cfg = self.rta_cfg
            if not self._on("rta_dual_compute"):
                cfg = replace(cfg, dual_redundancy=False)
            decision, self.rta_memory = rta_step(
                rta_candidate, sensed, control_estimate, s.constraints, cfg,
                self.rta_memory, age_frames=age_frames)
            if decision.overrun:
                self.measured_overruns += 1
            if decision.checked:
                self.audit.append((frame, decision.candidate, sensed,
                                   control_estimate, age_frames,
                                   decision.intervened))
            if compute_fault and not self._on("rta_dual_compute"):
                # the undetected copy divergence flies out the door
                decision = replace(decision, output=replace(
                    decision.output,
                    turn_rate=decision.output.turn_rate + 0.3))
            if decision.intervened and not self._on("backup_envelope"):
                decision = replace(decision, output=replace(
                    decision.output,
                    turn_rate=decision.output.turn_rate * 3.0,
                    climb_rate=decision.output.climb_rate * 3.0))
            if self._fault_active("component_fault", frame, "rta_output"):
                if self._on("rta_output_check"):
                    redundancy_caught = True
                    decision = replace(
                        decision, status="failed",
                        output=maintain_command(fs),
                        alerts=decision.alerts + ("rta-redundancy-mismatch",))
                else:
                    decision = replace(decision, output=replace(
                        decision.output,
                        turn_rate=decision.output.turn_rate + 0.5))
            if decision.intervened:
                self.interventions += 1
            for a in decision.alerts:
                if a == "rta-no-safe-command" and not self._on("no_safe_alert"):
                    continue
                w7_alerts.append(a)
            if self.rta_memory.pending_guard:
                events.append("rta-enable-request")

        injected_overrun = (self._fault_active("frame_overrun", frame, "rta")
                            and self._on("overrun_flagging"))

        # 7. envelope monitor, on its own sensing path
        epm_input = replace(self.wing, timestamp=fs)
        if s.epm_roll_noise_std > 0.0:
            noise = self.bank.get("epm-sensor")
            epm_input = replace(
                epm_input,
                orientation=(epm_input.orientation[0]
                             + noise.gauss(0.0, s.epm_roll_noise_std),
                             epm_input.orientation[1],
                             epm_input.orientation[2]))
        if s.epm_speed_noise_std > 0.0:
            noise = self.bank.get("epm-sensor")
            epm_input = replace(
                epm_input,
                true_airspeed=max(
                    epm_input.true_airspeed
                    + noise.gauss(0.0, s.epm_speed_noise_std),
                    0.0))
        epm_faulted = self._fault_active("component_fault", frame, "epm")
        if epm_faulted and self._on("epm_fault_failsafe") \
                and not self.epm_state.faulted:
            self.epm_state = replace(self.epm_state, faulted=True)
        switch, epm_report, self.epm_state = epm_step(
            epm_input, s.constraints.epm_envelope, self._pending_epm_request,
            self.epm_state,
            hysteresis_frames=3 if self._on("epm_debounce") else 1)
        self._pending_epm_request = False
        truth_violations = s.constraints.epm_envelope.violations(self.wing)
        spurious_switch = (switch.kind == SWITCH_TO_PILOT
                           and (switch.reason or "").startswith("envelope")
                           and not truth_violations)

        # 8. status display path
        shown = epm_report.engaged
        if epm_faulted and not self._on("epm_fault_display"):
            shown = self.shown_engaged  # display keeps the stale picture
        corrected = False
        w8_provided = True
        if self._fault_active("signal_dropout", frame, CH_W8):
            if not self._on("status_redundancy"):
                w8_provided = False
                shown = self.shown_engaged
        if self._fault_active("field_corruption", frame, CH_W8):
            if self._on("status_crosscheck"):
                corrected = True  # cross-check against the actual state wins
            else:
                shown = not shown
        self.shown_engaged = shown

        # 9. pilot
        if self.jetwash_dwell >= JETWASH_ALERT_FRAMES \
                and self._on("jetwash_watch"):
            w13_alerts.append("jetwash-watch")
            if not self.pilot.breakout:
                # briefed response to a persistent wake encounter: hand-fly
                # out of the washed station instead of holding in it
                self.pilot = replace(self.pilot, taken_over=True,
                                     breakout=True)
        inbox = (tuple(a for a in w13_alerts if a not in _ADVISORY_ALERTS)
                 + tuple(w7_alerts) + self.last_w14_alerts)
        if self._fault_active("pilot_incapacitation", frame) \
                and not self.pilot.incapacitated:
            self.pilot = replace(self.pilot, incapacitated=True)
        for f in self._faults("pilot_distraction", frame):
            _, hi = f.window(s.duration_frames)
            if self.pilot.distracted_until is None or \
                    self.pilot.distracted_until.frame_index < hi:
                self.pilot = replace(self.pilot,
                                     distracted_until=FrameStamp.at(hi, s.dt))
        pilot_cmd, takeover, epm_request, self.pilot = pilot_step(
            replace(self.wing, timestamp=fs), self.lead, inbox, self.pilot)
        self._pending_epm_request = epm_request
        distracted = (self.pilot.distracted_until is not None
                      and frame < self.pilot.distracted_until.frame_index)
        self.distracted_frames = self.distracted_frames + 1 if distracted else 0
        distracted_over = self.distracted_frames > s.distraction_limit_frames
        if distracted_over and self._on("distraction_abort") \
                and self.test_active and not self.aborted:
            self.contingency = "abort"
            self.aborted = True
            self.test_active = False
            w13_alerts.append("distraction-abort")

        # scripted card actions executed by the scheduler
        for card in self.pilot.test_card:
            if card.frame != frame:
                continue
            if card.kind == CARD_RTA_TOGGLE:
                enabled = bool(card.value)
                if enabled and not self.rta_cfg.enabled:
                    events.append("rta-enable-request")
                self.rta_cfg = replace(self.rta_cfg, enabled=enabled)
                events.append(f"card:rta-{'on' if enabled else 'off'}")
            elif card.kind == CARD_REJOIN_POINT:
                self.goal = replace(self.goal, rejoin_point=Vec3(*card.value))
                events.append("card:rejoin-point")
            elif card.kind == CARD_REENGAGE_AUTONOMY:
                self.selector_state = reengage_autonomy(self.selector_state)
                events.append("card:reengage-autonomy")
            elif card.kind in (CARD_TAKEOVER, CARD_EPM_REQUEST):
                events.append(f"card:{card.kind}")

        # 10. selector
        rta_for_selector = decision
        if decision is not None and self._fault_active(
                "signal_dropout", frame, CH_W2):
            rta_for_selector = None
        autonomy_present = rta_for_selector is not None
        if rta_for_selector is None and not self._on("selector_absent_default") \
                and self.held_decision is not None:
            rta_for_selector = self.held_decision  # stale command flies on
        if decision is not None:
            self.held_decision = decision
        selector_faulted = self._fault_active("component_fault", frame,
                                              "selector")
        if selector_faulted and self._on("selector_fault_default") \
                and not self.selector_state.faulted:
            self.selector_state = fault_selector(self.selector_state)
        pilot_for_selector = pilot_cmd
        if self._fault_active("signal_dropout", frame, CH_W5) \
                and not self._on("pilot_path_redundancy"):
            pilot_for_selector = None
        epm_for_selector = switch
        takeover_for_selector = takeover
        if not self._on("switch_watch"):
            epm_for_selector = no_switch()
            takeover_for_selector = False
        if self.test_active:
            applied, sel_alerts, self.selector_state = select(
                rta_for_selector, pilot_for_selector, epm_for_selector,
                takeover_for_selector, self.selector_state, fs)
        else:
            applied = pilot_for_selector if pilot_for_selector is not None \
                else maintain_command(fs)
            sel_alerts = ()
            if self.selector_state.source != "pilot":
                self.selector_state = replace(
                    self.selector_state, source="pilot",
                    switch_reason="test-not-active")
        sel_redundancy_caught = False
        if self._fault_active("component_fault", frame, "selector_output"):
            if self._on("selector_output_check"):
                sel_redundancy_caught = True
            else:
                applied = replace(applied, turn_rate=applied.turn_rate + 0.5)
        w14_alerts = tuple(
            a for a in sel_alerts
            if a != "selector-no-autonomy-signal"
            or self._on("selector_absence_alert"))
        self.last_w14_alerts = w14_alerts

        # 11. actuation
        delivered_to_airframe = True
        if self._fault_active("signal_dropout", frame, CH_W3) \
                and not self._on("actuation_redundancy"):
            delivered_to_airframe = False
        if delivered_to_airframe:
            self.last_applied = applied
            self.starved_frames = 0
        else:
            self.starved_frames += 1
        flown = self.last_applied if self.last_applied is not None \
            else maintain_command(fs)

        # 12. derived truth on the states entering this frame
        wing_now = self.wing
        sep = distance(wing_now.position, self.lead.position)
        d_min = s.constraints.separation.d_min
        fence = s.constraints.geofence
        lat_margin = fence.edge_margin(wing_now.position.north,
                                       wing_now.position.east)
        alt = wing_now.altitude()
        fence_ok = (lat_margin >= 0.0
                    and fence.altitude_floor <= alt <= fence.altitude_ceiling)
        margin_violations = _margin_limits(
            s.constraints.epm_envelope, H2_ENVELOPE_MARGIN).violations(wing_now)
        load_violation = not (s.constraints.epm_envelope.n_min
                              <= wing_now.normal_acceleration
                              <= s.constraints.epm_envelope.n_max)
        in_wash = in_jetwash(wing_now.position, self.lead,
                             s.constraints.jetwash_avoidance)
        self.jetwash_dwell = self.jetwash_dwell + 1 if in_wash else 0
        los_ok = line_of_sight(replace(wing_now, timestamp=fs), self.lead,
                               s.constraints.line_of_sight.cone_half_angle)
        self.los_frames = 0 if los_ok else self.los_frames + 1
        los_exceeded = (self.los_frames
                        > s.constraints.line_of_sight.max_loss_frames)
        starved = self.starved_frames > STARVED_ALERT_FRAMES
        h2 = (bool(margin_violations)
              or self.jetwash_dwell
              >= s.constraints.jetwash_avoidance.min_dwell_frames
              or self.starved_frames > STARVED_HAZARD_FRAMES)
        h4 = sep < d_min or bool(margin_violations) or load_violation
        safety_event = (sep - d_min) < SAFETY_EVENT_MARGIN_M
        safety_rising = safety_event and not self.safety_event_prev
        self.safety_event_prev = safety_event

        # a control-authority reversion is fine exactly when something
        # observable warranted it recently
        justified_now = bool(
            w13_alerts or w7_alerts or w14_alerts or inbox
            or active_faults
            or (decision is not None and decision.status == "failed")
            or (decision is None and self.test_active)
            or verdict_str not in ("", "valid")
            or position_unknown or rejoin_missing
            or truth_violations or margin_violations
            or safety_event
            or lat_margin < 150.0
            or not los_ok or in_wash or distracted
            or self.gate_declined
            or any(c.frame == frame for c in self.pilot.test_card)
            or self.pilot.breakout)
        if justified_now:
            self.last_justified = frame
        reverted = (self.prev_source == "autonomy"
                    and self.selector_state.source == "pilot")
        abort_edge = (self.contingency == "abort"
                      and self.prev_contingency != "abort")
        h6 = ((reverted or abort_edge)
              and frame - self.last_justified > JUSTIFICATION_WINDOW_FRAMES)
        self.prev_source = self.selector_state.source
        self.prev_contingency = self.contingency

        # 13. record everything, then fly the frame out
        self._record(frame, CH_TRUTH, {
            "separation_m": sep,
            "sep_margin_m": sep - d_min,
            "fence_ok": fence_ok,
            "fence_margin_m": lat_margin,
            "wing_alt_m": alt,
            "wing_north": wing_now.position.north,
            "wing_east": wing_now.position.east,
            "lead_north": self.lead.position.north,
            "lead_east": self.lead.position.east,
            "envelope_violation": bool(truth_violations),
            "envelope_margin_violation": bool(margin_violations),
            "load_violation": load_violation,
            "in_jetwash": in_wash,
            "jetwash_dwell": self.jetwash_dwell,
            "command_starved": starved,
            "starved_frames": self.starved_frames,
            "los_lost_frames": self.los_frames,
            "los_lost_exceeded": los_exceeded,
            "distracted": distracted,
            "distracted_over_limit": distracted_over,
            "safety_event": safety_event,
            "pilot_impaired": self.pilot.incapacitated,
            "h2": h2,
            "h4": h4,
            "h6": h6,
        }, fs)
        self._record(frame, CH_L15, {
            "delivered": delivered is not None,
            "verdict": verdict_str,
            "invalid": verdict_str == "invalid",
            "unreasonable": verdict_str == "unreasonable",
            "reasons": reasons,
            "timestamp_missing": timestamp_missing,
            "age_frames": age_frames,
            "position_unknown": position_unknown,
            "rejoin_present": (self.control_report is not None
                               and self.control_report.commanded_rejoin_point
                               is not None),
            "rejoin_missing": rejoin_missing,
            "test_point_id": (self.control_report.test_point_id
                              if self.control_report is not None else ""),
            "element_skew_frames": report_truth["element_skew_frames"],
            "stamp_skewed": report_truth["stamp_skewed"],
            "sample_frame": (delivered.lead_state.timestamp.frame_index
                             if delivered is not None else -1),
        }, fs)
        p_stamp = self._stamp_frame("primary", frame)
        has_primary = primary_cmd is not None
        self._record(frame, CH_W1, {
            "provided": has_primary,
            "faulted": primary_faulted,
            "fault_default_missing": fault_default_missing,
            "turn_rate": primary_cmd.turn_rate if has_primary else 0.0,
            "climb_rate": primary_cmd.climb_rate if has_primary else 0.0,
            "accel": primary_cmd.longitudinal_accel if has_primary else 0.0,
            "stamp_frame": p_stamp if has_primary else -1,
            "skewed": has_primary and p_stamp != frame,
            "rejoin_unsafe": rejoin_unsafe,
        }, fs)
        r_stamp = self._stamp_frame("rta", frame)
        has_decision = decision is not None
        out = decision.output if has_decision else None
        if not has_decision:
            absent_handling = "none"
        elif rta_candidate is not None:
            absent_handling = "primary"
        else:
            absent_handling = decision.candidate_source
        self._record(frame, CH_W2, {
            "provided": has_decision,
            "status": decision.status if has_decision else "",
            "intervened": decision.intervened if has_decision else False,
            "reason_kind": (decision.reason.kind
                            if has_decision and decision.reason is not None
                            else ""),
            "candidate_source": (decision.candidate_source
                                 if has_decision else ""),
            "absent_handling": absent_handling,
            "had_memory": had_memory,
            "memory_ignored": (has_decision and rta_candidate is None
                               and memory_wiped
                               and decision.candidate_source == "maintain"),
            "checked": decision.checked if has_decision else False,
            "overrun": injected_overrun,
            "turn_rate": out.turn_rate if out is not None else 0.0,
            "climb_rate": out.climb_rate if out is not None else 0.0,
            "accel": out.longitudinal_accel if out is not None else 0.0,
            "output_in_envelope": (out is None or not decision.intervened
                                   or s.rta_cfg.envelope.contains(out)),
            "redundancy_caught": redundancy_caught,
            "used_untrusted_input": (has_decision
                                     and self.control_report is not None
                                     and self.control_verdict != "valid"),
            "stamp_frame": r_stamp if has_decision else -1,
            "skewed": has_decision and r_stamp != frame,
            "enabled": self.rta_cfg.enabled,
        }, fs)
        sel_stamp = self._stamp_frame("selector", frame)
        self._record(frame, CH_W3, {
            "source": self.selector_state.source,
            "switch_reason": self.selector_state.switch_reason or "",
            "autonomy_present": autonomy_present,
            "turn_rate": applied.turn_rate,
            "climb_rate": applied.climb_rate,
            "accel": applied.longitudinal_accel,
            "redundancy_caught": sel_redundancy_caught,
            "delivered": delivered_to_airframe,
            "stamp_frame": sel_stamp,
            "skewed": sel_stamp != frame,
        }, fs)
        sen_stamp = self._stamp_frame("sensor", frame)
        has_sensed = sensed is not None
        self._record(frame, CH_W4, {
            "provided": sensed_fresh is not None,
            "held": sensed_fresh is None and has_sensed,
            "north": sensed.position.north if has_sensed else 0.0,
            "east": sensed.position.east if has_sensed else 0.0,
            "alt": sensed.altitude() if has_sensed else 0.0,
            "stamp_frame": sen_stamp if has_sensed else -1,
            "skewed": has_sensed and sen_stamp != frame,
        }, fs)
        self._record(frame, CH_W5, {
            "takeover": takeover,
            "epm_request": epm_request,
            "turn_rate": pilot_cmd.turn_rate,
            "climb_rate": pilot_cmd.climb_rate,
            "accel": pilot_cmd.longitudinal_accel,
            "breakout": self.pilot.breakout,
            "delivered": pilot_for_selector is not None,
        }, fs)
        self._record(frame, CH_W6, {
            "kind": switch.kind,
            "reason": switch.reason or "",
            "engaged": self.epm_state.engaged,
            "spurious_switch": spurious_switch,
        }, fs)
        self._record(frame, CH_W7, {"alerts": list(w7_alerts)}, fs)
        self._record(frame, CH_W8, {
            "provided": w8_provided,
            "shown_engaged": shown,
            "actual_engaged": self.epm_state.engaged,
            "mismatch": w8_provided and shown != self.epm_state.engaged,
            "corrected": corrected,
            "reason": epm_report.reason or "",
        }, fs)
        self._record(frame, CH_W9, {"requested": epm_request}, fs)
        if self._fault_active("recorder_fault", frame):
            w13_alerts.append("recording-fault")
        self._record(frame, CH_W13, {"alerts": list(w13_alerts)}, fs)
        self._record(frame, CH_W14, {"alerts": list(w14_alerts)}, fs)
        self._record(frame, CH_VOICE,
                     self._voice_payload(frame, safety_rising), fs)
        self._record(frame, CH_SCRIPT, {
            "test_active": self.test_active,
            "contingency": self.contingency,
            "active_faults": active_faults,
            "events": events,
            "coordination_due": any(
                ev.window_start <= frame <= ev.window_end and ev.necessary
                and ev.kind == "coordination" for ev in s.voice_events),
            "report_fault_handled": handled,
            "small_delay_overreaction": small_delay_overreaction,
            "test_point_mismatch_unhandled": tp_mismatch_unhandled,
            "test_point_missing_unhandled": tp_missing_unhandled,
            "impaired_test_active": (self.test_active
                                     and self.pilot.incapacitated),
            "pilot_impaired": self.pilot.incapacitated,
            "distracted": distracted,
            "gate_declined": self.gate_declined,
        }, fs)

        self.wing = plant_step(self.wing, flown, s.wind, s.plant_cfg)

    def execute(self) -> RunResult:
        s = self.s
        t0 = time.perf_counter()
        self._plan_voice()
        # pre-flight health gate: an impaired pilot scrubs the autonomy
        # segment before it starts
        gate_model = self.pilot
        if self._fault_active("pilot_incapacitation", 0):
            gate_model = replace(gate_model, incapacitated=True)
        if not health_gate_pass(gate_model) and self._on("health_gate"):
            self.gate_declined = True
            self.test_active = False
            self.contingency = "abort"
            self.aborted = True
            self.last_justified = 0
        lead_states: list[AircraftState] = []
        for frame in range(s.duration_frames):
            try:
                self._frame(frame, lead_states)
            except Exception as exc:  # noqa: BLE001 - a panic ends the run
                self.panic = f"{type(exc).__name__}: {exc}"
                fs = FrameStamp.at(frame, s.dt)
                self.recorder.fault_active = False
                self.recorder.record(TraceRecord(fs, CH_SCRIPT, {
                    "test_active": False,
                    "contingency": "abort",
                    "active_faults": [f"panic:{type(exc).__name__}"],
                    "events": ["panic"],
                }))
                break
        trace = self.recorder.trace()
        specs = load_monitor_specs(monitor_catalog())
        verdicts = tuple(evaluate(trace, specs))
        summary = {
            "scenario": s.id,
            "frames_run": s.duration_frames if self.panic is None else None,
            "panic": self.panic,
            "interventions": self.interventions,
            "measured_overruns": self.measured_overruns,
            "wall_ms": (time.perf_counter() - t0) * 1000.0,
            "hazard_violations": {
                v.id: len(v.violations) for v in verdicts
                if v.severity == "hazard" and v.violations},
            "requirement_violations": {
                v.id: len(v.violations) for v in verdicts
                if v.severity == "requirement" and v.violations},
        }
        return RunResult(s.id, trace, verdicts, summary, self.recorder)


def run(s: Scenario) -> RunResult:
    """Execute one scenario deterministically and evaluate every monitor."""
    return _Run(s).execute()


def rta_replay_audit(s: Scenario) -> tuple[int, int, int]:
    """Re-checks every filter decision offline: the recorded intervention
    flag must equal what an independent margined rollout of the same
    candidate predicts. Returns (frames_audited, agreements, interventions).
    """
    runner = _Run(s)
    runner.execute()
    agree = 0
    intervened = 0
    for frame, candidate, own, lead, age, did in runner.audit:
        predicted = verify_candidate(candidate, own, lead, s.constraints,
                                     runner.rta_cfg, age_frames=age) is not None
        if predicted == did:
            agree += 1
        if did:
            intervened += 1
    return len(runner.audit), agree, intervened


def run_paired(s: Scenario, mitigation_id: str) -> PairedResult:
    """Off/on pair for one requirement row: the off run disables exactly
    that row's mitigation, the on run enables the full set."""
    if mitigation_id not in BY_ID:
        raise ConfigError(f"unknown requirement id {mitigation_id!r}")
    row = BY_ID[mitigation_id]
    if not row.toggleable:
        return PairedResult(row_id=row.id, target=row.target or "",
                            enforced_by_construction=True)
    off = run(replace(s, enabled_mitigations=frozenset(MITIGATION_IDS)
                      - {mitigation_id}))
    on = run(replace(s, enabled_mitigations=frozenset(MITIGATION_IDS)))
    return PairedResult(row_id=row.id, target=row.target, off=off, on=on)
