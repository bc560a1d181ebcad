"""Injection catalog: one scenario per monitored control-action row.

Each entry stages the unsafe condition its row describes and arms that
row's target monitor, so ``run_paired`` can fly it twice: once with the
row's mitigation removed (the target monitor must flag at least one
violation) and once with the full mitigation set (every hazard monitor
must stay clean). The catalog also carries the nominal profile and the
randomized stress generator used for filter soundness sweeps.

Geometry conventions used throughout: the lead flies north from (500, 0)
at 80 m/s and 1500 m altitude unless a builder says otherwise. Scenarios
that end with the safety pilot hand-flying keep the wingman offset east
so the manual pursuit line never sits inside the lead's wake cone.
"""

from __future__ import annotations

import math
import random
from typing import Callable

from .controllers import RejoinGoal
from .core import (
    ConfigError,
    EnvelopeLimits,
    JetwashConstraint,
    SafetyConstraintSet,
    SeparationConstraint,
    Vec3,
)
from .datalink import ChannelConfig
from .pilot import CARD_RTA_TOGGLE, CardAction, PilotModel
from .plant import ScriptSegment, TrajectoryScript
from .requirements import (
    BY_ID,
    CH_L15,
    CH_W1,
    CH_W2,
    CH_W3,
    CH_W4,
    CH_W5,
    CH_W8,
    REPORT_FIELD_ROWS,
    ROWS,
)
from .rta import RtaConfig
from .sim import (
    FaultSpec,
    Scenario,
    VoiceEvent,
    default_constraints,
    level_state,
    square_fence,
)

#: arena used by the randomized sweeps; roomy enough that only a hostile
#: command stream, not the initial placement, can reach a boundary
FUZZ_FENCE_HALF_M = 10000.0
FUZZ_KEEP_IN_M = 2500.0


def _row_scenario(rid: str, seed: int, **over) -> Scenario:
    """Scenario skeleton for one catalog row: armed target, note, id."""
    row = BY_ID[rid]
    over.setdefault("duration_frames", 200)
    over.setdefault("armed_monitors", (row.target,))
    over.setdefault("expected_outcomes", (row.target,))
    over.setdefault("notes", row.note)
    return Scenario(id=row.scenario, seed=seed, **over)


def _east_offset_start(east: float = 200.0) -> dict:
    """Wingman displaced abeam so a manual pursuit of the lead stays out
    of the wake cone and visual breakout keeps the pass wide."""
    return {"wingman_initial": level_state(east=east)}


# ---------------------------------------------------------------------------
# primary command path (W1)
# ---------------------------------------------------------------------------

def _primary_fault_default(rid: str) -> Scenario:
    return _row_scenario(
        rid, seed=101, duration_frames=160,
        faults=(FaultSpec("component_fault", "primary", 60),))


def _record_gap(rid: str, channel: str, seed: int) -> Scenario:
    return _row_scenario(
        rid, seed=seed, duration_frames=160,
        faults=(FaultSpec("recorder_fault", channel, 80, 120),))


def _clock_skew(rid: str, component: str, seed: int) -> Scenario:
    return _row_scenario(
        rid, seed=seed, duration_frames=140,
        faults=(FaultSpec("clock_skew", component, 40, 90, value=7),))


# ---------------------------------------------------------------------------
# assurance filter path (W2)
# ---------------------------------------------------------------------------

def _fence_run() -> Scenario:
    """Primary deliberately commanded to a station outside the east fence;
    only the filter stands between the wingman and the boundary."""
    return _row_scenario(
        "RL2.W2.1", seed=109, duration_frames=700,
        lead_initial=level_state(north=500.0, east=7600.0),
        wingman_initial=level_state(east=7600.0),
        goal=RejoinGoal(Vec3(0.0, 3000.0, 0.0)))


def _garbled_velocity_alert() -> Scenario:
    return _row_scenario(
        "RL2.W2.2", seed=110, duration_frames=160,
        faults=(FaultSpec("field_corruption", CH_L15, 100, 101,
                          value={"field": "velocity",
                                 "offset": (320.0, 0.0, 0.0)}),))


def _candidate_gap_memory() -> Scenario:
    return _row_scenario(
        "RL2.W2.3", seed=111, duration_frames=160,
        faults=(FaultSpec("signal_dropout", CH_W1, 60, 75),))


def _candidate_absent_whole_run() -> Scenario:
    return _row_scenario(
        "RL2.W2.4", seed=112, duration_frames=120,
        faults=(FaultSpec("signal_dropout", CH_W1, 0, 120),))


def _filter_compute_fault() -> Scenario:
    return _row_scenario(
        "RL2.W2.6", seed=113, duration_frames=300,
        faults=(FaultSpec("component_fault", "rta", 100, 300),),
        **_east_offset_start())


def _filter_output_fault() -> Scenario:
    return _row_scenario(
        "RL2.W2.7", seed=114, duration_frames=300,
        faults=(FaultSpec("component_fault", "rta_output", 100, 300),),
        **_east_offset_start())


def _wake_parked_station() -> Scenario:
    """Station commanded dead astern inside the wake cone. The watch must
    break the wingman out before the dwell becomes a hazard; the dwell
    threshold is raised so the mitigated exit fits inside it."""
    base = default_constraints()
    constraints = SafetyConstraintSet(
        separation=base.separation,
        geofence=base.geofence,
        epm_envelope=base.epm_envelope,
        line_of_sight=base.line_of_sight,
        jetwash_avoidance=JetwashConstraint(
            cone_length=400.0, cone_half_angle=0.10, min_dwell_frames=200),
    )
    return _row_scenario(
        "RL2.W2.9", seed=115, duration_frames=400,
        wingman_initial=level_state(north=200.0),
        goal=RejoinGoal(Vec3(-300.0, 0.0, 0.0)),
        constraints=constraints)


def _intervention_envelope() -> Scenario:
    """Close-in rejoin that forces sustained interventions, so the backup
    commands themselves are what the envelope check is judged on."""
    return _row_scenario(
        "RL2.W2.10", seed=116, duration_frames=400,
        wingman_initial=level_state(north=280.0, east=120.0),
        goal=RejoinGoal(Vec3(0.0, 0.0, 0.0)))


def _filter_overrun() -> Scenario:
    return _row_scenario(
        "RL2.W2.12", seed=117, duration_frames=160,
        faults=(FaultSpec("frame_overrun", "rta", 100, 130, value=5.0),))


def _filter_feed_dropout() -> Scenario:
    return _row_scenario(
        "RL2.W2.13", seed=118, duration_frames=200,
        faults=(FaultSpec("signal_dropout", CH_W2, 40, 80),),
        **_east_offset_start())


def _no_safe_command_starvation() -> Scenario:
    """Report link dies early while the lead parallels close abeam; the
    stale-age uncertainty eventually swallows every verified escape and
    the filter must say so out loud."""
    return _row_scenario(
        "RL2.W2.14", seed=119, duration_frames=560,
        lead_initial=level_state(north=500.0, east=200.0),
        wingman_initial=level_state(),
        faults=(FaultSpec("signal_dropout", CH_L15, 10, 560),))


def _reenable_inside_guard() -> Scenario:
    """Scripted off/on toggle while holding station just inside the
    re-enable guard band."""
    pilot = PilotModel(
        reaction_delay_frames=10 ** 6,
        visual_breakout_distance=0.0,
        test_card=(CardAction(20, CARD_RTA_TOGGLE, False),
                   CardAction(60, CARD_RTA_TOGGLE, True)))
    return _row_scenario(
        "RL2.W2.15", seed=120, duration_frames=160,
        wingman_initial=level_state(north=360.0, east=140.0),
        goal=RejoinGoal(Vec3(-140.0, 140.0, 0.0)),
        pilot=pilot)


# ---------------------------------------------------------------------------
# command selector path (W3)
# ---------------------------------------------------------------------------

def _selector_fault(rid: str, target: str, seed: int) -> Scenario:
    return _row_scenario(
        rid, seed=seed, duration_frames=300,
        faults=(FaultSpec("component_fault", target, 100, 300),),
        **_east_offset_start())


def _true_envelope_drift() -> Scenario:
    """Altimeter bias walks the true altitude below a raised envelope
    floor while every sensed value stays green; only the independently
    sensing envelope monitor can notice and demand the reversion."""
    constraints = default_constraints()
    constraints = SafetyConstraintSet(
        separation=constraints.separation,
        geofence=constraints.geofence,
        epm_envelope=EnvelopeLimits(altitude_floor=1450.0),
        line_of_sight=constraints.line_of_sight,
        jetwash_avoidance=constraints.jetwash_avoidance,
    )
    return _row_scenario(
        "RL2.W3.5", seed=123, duration_frames=400,
        constraints=constraints,
        faults=(FaultSpec("sensor_bias", "position", 0, 400,
                          value=(0.0, 0.0, -60.0)),),
        **_east_offset_start())


def _decision_feed_gap() -> Scenario:
    return _row_scenario(
        "RL2.W3.6", seed=124, duration_frames=200,
        faults=(FaultSpec("signal_dropout", CH_W2, 60, 120),),
        **_east_offset_start())


def _actuation_gap() -> Scenario:
    return _row_scenario(
        "RL2.W3.8", seed=126, duration_frames=160,
        faults=(FaultSpec("signal_dropout", CH_W3, 40, 90),))


# ---------------------------------------------------------------------------
# ownship sensing path (W4)
# ---------------------------------------------------------------------------

def _blind_overshoot() -> Scenario:
    """Position bias makes the whole automated stack believe the wingman
    is 300 m short of where it really is, so the commanded rejoin drives
    the true aircraft through the lead's position. Out-the-window range
    is the only honest measurement left."""
    return _row_scenario(
        "RL2.W4.1", seed=127, duration_frames=500,
        goal=RejoinGoal(Vec3(0.0, 80.0, 0.0)),
        faults=(FaultSpec("sensor_bias", "position", 0, 500,
                          value=(-300.0, 0.0, 0.0)),))


def _sensor_blip() -> Scenario:
    return _row_scenario(
        "RL2.W4.2", seed=128, duration_frames=200,
        faults=(FaultSpec("signal_dropout", CH_W4, 100, 103),),
        **_east_offset_start())


# ---------------------------------------------------------------------------
# safety pilot path (W5)
# ---------------------------------------------------------------------------

def _impaired_gate() -> Scenario:
    return _row_scenario(
        "RL2.W5.1", seed=129, duration_frames=160,
        faults=(FaultSpec("pilot_incapacitation", "pilot", 0),))


def _los_loss_takeover() -> Scenario:
    """Station ahead of a slow lead: the lead sits dead astern for the
    whole run, outside the pilot's vision cone, and only the briefed
    loss-of-sight limit brings the takeover."""
    return _row_scenario(
        "RL2.W5.2", seed=130, duration_frames=260,
        lead_initial=level_state(north=-600.0, east=300.0, speed=60.0),
        wingman_initial=level_state(),
        goal=RejoinGoal(Vec3(800.0, 0.0, 0.0)))


def _both_paths_dark() -> Scenario:
    return _row_scenario(
        "RL2.W5.3", seed=131, duration_frames=240,
        faults=(FaultSpec("signal_dropout", CH_W2, 80, 120),
                FaultSpec("signal_dropout", CH_W5, 80, 120)),
        **_east_offset_start())


def _distraction_over_limit() -> Scenario:
    return _row_scenario(
        "RL2.W5.4", seed=132, duration_frames=320,
        faults=(FaultSpec("pilot_distraction", "pilot", 50, 260),),
        **_east_offset_start())


def _unbriefed_grab() -> Scenario:
    """Wide, quiet cruise with nothing to react to; an unbriefed seat
    grabs the jet mid-run and the reversion has no recorded justification."""
    return _row_scenario(
        "RL2.W5.5", seed=133, duration_frames=300,
        wingman_initial=level_state(east=400.0),
        lead_initial=level_state(north=500.0, east=400.0),
        goal=RejoinGoal(Vec3(-300.0, 200.0, 0.0)),
        pilot=PilotModel(spurious_takeover_frame=150))


# ---------------------------------------------------------------------------
# envelope protection path (W6)
# ---------------------------------------------------------------------------

def _noisy_attitude() -> Scenario:
    return _row_scenario(
        "RL2.W6.1", seed=134, duration_frames=600,
        epm_roll_noise_std=0.55,
        **_east_offset_start())


def _epm_fault_failsafe() -> Scenario:
    return _row_scenario(
        "RL2.W6.2", seed=135, duration_frames=300,
        faults=(FaultSpec("component_fault", "epm", 100, 300),),
        **_east_offset_start())


def _noisy_airspeed() -> Scenario:
    return _row_scenario(
        "RL2.W6.3", seed=136, duration_frames=600,
        epm_speed_noise_std=20.0,
        hooks={"epm_debounce": "RL2.W6.3"},
        **_east_offset_start())


def _epm_fault_display() -> Scenario:
    return _row_scenario(
        "RL2.W6.4", seed=137, duration_frames=300,
        faults=(FaultSpec("component_fault", "epm", 100, 300),),
        **_east_offset_start())


# ---------------------------------------------------------------------------
# status display path (W8)
# ---------------------------------------------------------------------------

def _display_flip() -> Scenario:
    return _row_scenario(
        "RL2.W8.1", seed=138, duration_frames=180,
        faults=(FaultSpec("field_corruption", CH_W8, 100, 140,
                          value={"field": "shown"}),))


def _display_gap() -> Scenario:
    return _row_scenario(
        "RL2.W8.2", seed=139, duration_frames=180,
        faults=(FaultSpec("signal_dropout", CH_W8, 100, 140),))


# ---------------------------------------------------------------------------
# lead report discipline (L1.5)
# ---------------------------------------------------------------------------

def _self_declared_defect() -> Scenario:
    return _row_scenario(
        "RL1.5.1", seed=140, duration_frames=180,
        faults=(FaultSpec("field_corruption", CH_L15, 100, 106,
                          value={"self_declare": True, "field": "invalid"}),))


def _report_blackout() -> Scenario:
    return _row_scenario(
        "RL1.5.2", seed=141, duration_frames=200,
        hooks={"report_handling": "RL1.5.2"},
        faults=(FaultSpec("signal_dropout", CH_L15, 60, 120),))


def _mixed_frame_report() -> Scenario:
    return _row_scenario(
        "RL1.5.3", seed=142, duration_frames=180,
        faults=(FaultSpec("field_corruption", CH_L15, 100, 110,
                          value={"stale_element": True, "lag": 5,
                                 "field": "position"}),))


def _jittery_link() -> Scenario:
    return _row_scenario(
        "RL1.5.4", seed=143, duration_frames=200,
        link=ChannelConfig(max_delay_frames=4))


def _hazardous_rejoin_point() -> Scenario:
    return _row_scenario(
        "RL1.5.5", seed=144, duration_frames=240,
        commanded_rejoin=Vec3(30.0, 0.0, 0.0))


def _rejoin_point_missing() -> Scenario:
    return _row_scenario(
        "RL1.5.6", seed=145, duration_frames=200,
        rejoin_required=True,
        hooks={"report_handling": "RL1.5.6"},
        faults=(FaultSpec("field_corruption", CH_L15, 100, 130,
                          value={"field": "commanded_rejoin_point",
                                 "offset": "drop"}),))


def _lead_clock_skew() -> Scenario:
    return _row_scenario(
        "RL1.5.7", seed=146, duration_frames=200,
        faults=(FaultSpec("clock_skew", "lead", 100, 150, value=7),))


def _timestamp_missing() -> Scenario:
    return _row_scenario(
        "RL1.5.8", seed=147, duration_frames=200,
        hooks={"report_handling": "RL1.5.8"},
        faults=(FaultSpec("field_corruption", CH_L15, 100, 130,
                          value={"field": "report_timestamp",
                                 "offset": "drop"}),))


def _unbriefed_test_point() -> Scenario:
    return _row_scenario(
        "RL1.5.9", seed=148, duration_frames=160,
        lead_test_point="TP-99")


def _missing_test_point() -> Scenario:
    return _row_scenario(
        "RL1.5.10", seed=149, duration_frames=160,
        lead_test_point="",
        hooks={"test_point_check": "RL1.5.10"})


def _field_screen(rid: str, seed: int) -> Scenario:
    """Report-field damage per the row table: the gate must keep the
    filter off the damaged report and the handler must fall back."""
    fname, op, value = REPORT_FIELD_ROWS[rid]
    fault_value: dict = {"field": fname}
    if op == "corrupt":
        fault_value["offset"] = value
    else:
        fault_value["offset"] = "drop"
    faults = [FaultSpec("field_corruption", CH_L15, 100, 115,
                        value=fault_value)]
    if rid == "RL1.5.33":
        # a blanked defect flag only means something on a report that
        # actually declared a defect, so stage the declaration too
        faults.insert(0, FaultSpec("field_corruption", CH_L15, 100, 115,
                                   value={"self_declare": True,
                                          "field": "invalid"}))
    return _row_scenario(
        rid, seed=seed, duration_frames=200,
        hooks={"report_gate": rid, "report_handling": rid},
        faults=tuple(faults))


def _needless_call() -> Scenario:
    return _row_scenario(
        "RL1.5.36", seed=175, duration_frames=160,
        voice_events=(VoiceEvent("coordination", 60, 110, necessary=False,
                                 hook="voice_protocol", off_mode="send"),))


def _missed_coordination_call() -> Scenario:
    return _row_scenario(
        "RL1.5.37", seed=176, duration_frames=160,
        voice_events=(VoiceEvent("coordination", 60, 100,
                                 off_mode="silent"),))


def _safety_call_on_closure() -> Scenario:
    """Formation held just inside the safety-call margin for the whole
    run; the deconfliction call must go out, mitigated or not."""
    return _row_scenario(
        "RL1.5.38", seed=177, duration_frames=160,
        wingman_initial=level_state(north=300.0, east=130.0),
        goal=RejoinGoal(Vec3(-200.0, 130.0, 0.0)),
        pilot=PilotModel(visual_breakout_distance=200.0))


def _voice_discipline(rid: str, off_mode: str, seed: int) -> Scenario:
    return _row_scenario(
        rid, seed=seed, duration_frames=160,
        hooks={"voice_coordination": rid},
        voice_events=(VoiceEvent("coordination", 60, 100,
                                 off_mode=off_mode),))


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

def _build_catalog() -> dict[str, Callable[[], Scenario]]:
    builders: dict[str, Callable[[], Scenario]] = {
        "RL2.W1.2": lambda: _primary_fault_default("RL2.W1.2"),
        "RL2.W1.3": lambda: _primary_fault_default("RL2.W1.3"),
        "RL2.W1.4": lambda: _record_gap("RL2.W1.4", CH_W1, 103),
        "RL2.W1.5": lambda: _clock_skew("RL2.W1.5", "primary", 104),
        "RL2.W2.1": _fence_run,
        "RL2.W2.2": _garbled_velocity_alert,
        "RL2.W2.3": _candidate_gap_memory,
        "RL2.W2.4": _candidate_absent_whole_run,
        "RL2.W2.6": _filter_compute_fault,
        "RL2.W2.7": _filter_output_fault,
        "RL2.W2.9": _wake_parked_station,
        "RL2.W2.10": _intervention_envelope,
        "RL2.W2.11": lambda: _clock_skew("RL2.W2.11", "rta", 105),
        "RL2.W2.12": _filter_overrun,
        "RL2.W2.13": _filter_feed_dropout,
        "RL2.W2.14": _no_safe_command_starvation,
        "RL2.W2.15": _reenable_inside_guard,
        "RL2.W2.16": lambda: _record_gap("RL2.W2.16", CH_W2, 106),
        "RL2.W3.1": lambda: _selector_fault("RL2.W3.1", "selector", 121),
        "RL2.W3.2": lambda: _selector_fault("RL2.W3.2", "selector_output",
                                            122),
        "RL2.W3.5": _true_envelope_drift,
        "RL2.W3.6": _decision_feed_gap,
        "RL2.W3.7": lambda: _clock_skew("RL2.W3.7", "selector", 107),
        "RL2.W3.8": _actuation_gap,
        "RL2.W3.9": lambda: _record_gap("RL2.W3.9", CH_W3, 108),
        "RL2.W4.1": _blind_overshoot,
        "RL2.W4.2": _sensor_blip,
        "RL2.W4.3": lambda: _clock_skew("RL2.W4.3", "sensor", 125),
        "RL2.W5.1": _impaired_gate,
        "RL2.W5.2": _los_loss_takeover,
        "RL2.W5.3": _both_paths_dark,
        "RL2.W5.4": _distraction_over_limit,
        "RL2.W5.5": _unbriefed_grab,
        "RL2.W6.1": _noisy_attitude,
        "RL2.W6.2": _epm_fault_failsafe,
        "RL2.W6.3": _noisy_airspeed,
        "RL2.W6.4": _epm_fault_display,
        "RL2.W8.1": _display_flip,
        "RL2.W8.2": _display_gap,
        "RL1.5.1": _self_declared_defect,
        "RL1.5.2": _report_blackout,
        "RL1.5.3": _mixed_frame_report,
        "RL1.5.4": _jittery_link,
        "RL1.5.5": _hazardous_rejoin_point,
        "RL1.5.6": _rejoin_point_missing,
        "RL1.5.7": _lead_clock_skew,
        "RL1.5.8": _timestamp_missing,
        "RL1.5.9": _unbriefed_test_point,
        "RL1.5.10": _missing_test_point,
        "RL1.5.36": _needless_call,
        "RL1.5.37": _missed_coordination_call,
        "RL1.5.38": _safety_call_on_closure,
        "RL1.5.39": lambda: _voice_discipline("RL1.5.39", "long", 178),
        "RL1.5.40": lambda: _voice_discipline("RL1.5.40", "short", 179),
        "RL1.5.41": lambda: _voice_discipline("RL1.5.41", "early", 180),
        "RL1.5.42": lambda: _voice_discipline("RL1.5.42", "late", 181),
    }
    for i, rid in enumerate(sorted(REPORT_FIELD_ROWS)):
        builders[rid] = (lambda r=rid, s=150 + i: _field_screen(r, s))
    return builders


_ROW_BUILDERS = _build_catalog()

#: scenario id -> builder, covering every monitored row plus the nominal
SCENARIOS: dict[str, Callable[[], Scenario]] = {
    BY_ID[rid].scenario: fn for rid, fn in _ROW_BUILDERS.items()
}


def nominal_scenario(seed: int = 7, duration_frames: int = 300) -> Scenario:
    """Quiet two-ship cruise with no injections; used for pass-through,
    determinism, and replay-audit checks."""
    return Scenario(id="nominal", seed=seed, duration_frames=duration_frames,
                    notes="clean formation cruise, no injected conditions")


SCENARIOS["nominal"] = nominal_scenario


def build(scenario_id: str) -> Scenario:
    try:
        fn = SCENARIOS[scenario_id]
    except KeyError:
        raise ConfigError(f"unknown scenario id {scenario_id!r}") from None
    return fn()


def scenario_for_row(rid: str) -> Scenario:
    """The injection scenario paired with one monitored requirement row."""
    try:
        fn = _ROW_BUILDERS[rid]
    except KeyError:
        raise ConfigError(f"no scenario for requirement {rid!r}") from None
    return fn()


def paired_rows() -> list[str]:
    """Monitored rows in suite order (every one has a catalog scenario)."""
    return [r.id for r in ROWS if r.klass == "monitored"]


# ---------------------------------------------------------------------------
# randomized stress generator
# ---------------------------------------------------------------------------

def _fuzz_envelope() -> EnvelopeLimits:
    """Permissive protection limits for the stress arena. Keeping the
    envelope wide keeps the scripted monitor-and-switch machinery out of
    the way so the sweep isolates the separation and boundary logic."""
    return EnvelopeLimits(
        max_roll=1.5, max_pitch=1.5, alpha_min=-2.0, alpha_max=2.0,
        v_min=10.0, v_max=400.0, n_min=-4.0, n_max=12.0,
        altitude_floor=10.0, altitude_ceiling=10000.0)


def fuzz_scenario(index: int) -> Scenario:
    """Randomized stress case: hostile command stream against the filter.

    The initial placement is always comfortably inside the arena and
    clear of the lead, so any boundary or separation loss can only come
    from the command stream the filter failed to stop. The safety pilot
    is modeled as inert so nothing rescues a bad filter decision.
    """
    rng = random.Random(f"stress-{index}")
    fence = square_fence(half=FUZZ_FENCE_HALF_M, floor=300.0, ceiling=6000.0)
    keep = FUZZ_FENCE_HALF_M - FUZZ_KEEP_IN_M

    lead_speed = rng.uniform(40.0, 90.0)
    lead_heading = rng.uniform(-math.pi, math.pi)
    lead_alt = rng.uniform(1000.0, 2500.0)
    lead_north = rng.uniform(-2000.0, 2000.0)
    lead_east = rng.uniform(-2000.0, 2000.0)

    bearing = rng.uniform(-math.pi, math.pi)
    gap = rng.uniform(600.0, 1500.0)
    wing_north = lead_north + gap * math.cos(bearing)
    wing_east = lead_east + gap * math.sin(bearing)
    assert max(abs(wing_north), abs(wing_east)) < keep, \
        "stress placement escaped the keep-in margin"
    wing = level_state(
        north=wing_north, east=wing_east,
        altitude=lead_alt + rng.uniform(-200.0, 200.0),
        speed=rng.uniform(50.0, 90.0),
        heading=rng.uniform(-math.pi, math.pi))

    lead_script = TrajectoryScript(
        (ScriptSegment(frames=600, turn=rng.uniform(-0.05, 0.05)),))
    constraints = default_constraints(fence=fence)
    constraints = SafetyConstraintSet(
        separation=SeparationConstraint(d_min=152.4),
        geofence=fence,
        epm_envelope=_fuzz_envelope(),
        line_of_sight=constraints.line_of_sight,
        jetwash_avoidance=constraints.jetwash_avoidance,
    )
    inert_pilot = PilotModel(reaction_delay_frames=10 ** 6,
                             los_max_loss_frames=10 ** 6,
                             visual_breakout_distance=0.0)
    return Scenario(
        id=f"stress-{index:04d}",
        seed=20000 + index,
        duration_frames=rng.randint(150, 250),
        lead_initial=level_state(north=lead_north, east=lead_east,
                                 altitude=lead_alt, speed=lead_speed,
                                 heading=lead_heading),
        wingman_initial=wing,
        constraints=constraints,
        lead_script=lead_script,
        primary_mode="adversarial",
        rta_cfg=RtaConfig(dual_redundancy=False),
        pilot=inert_pilot,
        notes="randomized adversarial command stream inside the arena")
