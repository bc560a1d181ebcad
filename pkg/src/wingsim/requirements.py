"""Requirement registry for the wingman control structure.

Every safety requirement row from the hazard analysis tables is listed
here with a classification:

- monitored: the row maps to a runtime monitor over the recorded trace
  and has a paired fault-injection scenario (mitigation off vs on)
- design-time: the row is enforced by construction (a shared type, a
  load-time validation, a briefed procedure) and cannot be toggled at
  run time; paired runs report it as enforced-by-construction
- out-of-scope: the row constrains an activity outside the simulated
  mission timeline (e.g. controller training) and is tracked for
  coverage accounting only

Monitored rows own at most one catalog monitor entry, scoped so it only
evaluates on runs that armed it. Rows whose off-run evidence IS a hazard
(fence bust, near miss) target the corresponding always-on hazard
monitor instead of owning a scoped one.

The channel names below are the authoritative trace vocabulary; the
scheduler writes one record per channel per frame and the monitor
catalog reads them back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import ConfigError

# trace channels, one record each per frame
CH_TRUTH = "truth"      # ground truth summary and hazard flags
CH_L15 = "L15"          # lead position report as received plus validation
CH_W1 = "W1"            # primary controller command
CH_W2 = "W2"            # assurance filter decision
CH_W3 = "W3"            # command selector output
CH_W4 = "W4"            # sensed ownship state
CH_W5 = "W5"            # pilot command and takeover flags
CH_W6 = "W6"            # envelope monitor switch command
CH_W7 = "W7"            # assurance filter alert channel
CH_W8 = "W8"            # envelope monitor status as shown to the pilot
CH_W9 = "W9"            # pilot request for an envelope switch
CH_W13 = "W13"          # wingman system alerts routed to the pilot
CH_W14 = "W14"          # selector alerts routed to the pilot
CH_VOICE = "voice"      # inter-aircraft voice coordination
CH_SCRIPT = "script"    # test-card phase, contingency state, injected faults

CHANNELS = (CH_TRUTH, CH_L15, CH_W1, CH_W2, CH_W3, CH_W4, CH_W5, CH_W6,
            CH_W7, CH_W8, CH_W9, CH_W13, CH_W14, CH_VOICE, CH_SCRIPT)

CLASSES = ("monitored", "design-time", "out-of-scope")

HAZARD_IDS = ("H1", "H2", "H3", "H4", "H5", "H6")


@dataclass(frozen=True)
class RequirementRow:
    """One requirement row: identity, class, and its runtime realization."""

    id: str
    table: str
    klass: str
    note: str
    target: Optional[str] = None       # monitor id the paired scenario asserts
    monitors: tuple = ()               # catalog entries owned by this row
    scenario: Optional[str] = None     # paired scenario id
    toggleable: bool = False

    def __post_init__(self):
        assert self.klass in CLASSES, f"unknown class {self.klass!r}"
        if self.klass == "monitored":
            assert self.target and self.scenario, \
                f"{self.id}: monitored rows need a target and a scenario"
            assert self.toggleable, f"{self.id}: monitored rows are toggleable"
        else:
            assert not self.toggleable, \
                f"{self.id}: only monitored rows can toggle"


# ---------------------------------------------------------------------------
# Catalog entry helpers (shapes consumed by monitors.load_monitor_specs)
# ---------------------------------------------------------------------------

def _pred(channel, field, check, value):
    return {"channel": channel, "field": field, "check": check, "value": value}


def _inst(mid, channel, field, check, value, detail):
    return {"id": mid, "kind": "instantaneous", "severity": "requirement",
            "params": {"scoped": True, "detail": detail,
                       "when": _pred(channel, field, check, value)}}


def _never(mid, channel, field, check, value, detail):
    return {"id": mid, "kind": "absence", "severity": "requirement",
            "params": {"scoped": True, "detail": detail,
                       "when": _pred(channel, field, check, value)}}


def _resp(mid, trigger, response, deadline):
    return {"id": mid, "kind": "bounded_response", "severity": "requirement",
            "params": {"scoped": True, "trigger": trigger,
                       "response": response, "deadline_frames": deadline}}


def _complete(mid, channels):
    return {"id": mid, "kind": "completeness", "severity": "requirement",
            "params": {"scoped": True, "channels": list(channels)}}


def hazard_monitor_entries() -> list[dict]:
    """Always-on hazard monitors, evaluated on every run."""
    return [
        {"id": "H1", "kind": "instantaneous", "severity": "hazard",
         "params": {"detail": "separation below minimum",
                    "when": _pred(CH_TRUTH, "sep_margin_m", "lt", 0.0)}},
        {"id": "H2", "kind": "instantaneous", "severity": "hazard",
         "params": {"detail": "control degraded beyond recoverable bounds",
                    "when": _pred(CH_TRUTH, "h2", "eq", True)}},
        {"id": "H3", "kind": "instantaneous", "severity": "hazard",
         "params": {"detail": "outside the containment volume",
                    "when": _pred(CH_TRUTH, "fence_ok", "eq", False)}},
        {"id": "H4", "kind": "instantaneous", "severity": "hazard",
         "params": {"detail": "harm threshold crossed",
                    "when": _pred(CH_TRUTH, "h4", "eq", True)}},
        {"id": "H5", "kind": "completeness", "severity": "hazard",
         "params": {"channels": list(CHANNELS)}},
        {"id": "H6", "kind": "instantaneous", "severity": "hazard",
         "params": {"detail": "planned test abandoned without justification",
                    "when": _pred(CH_TRUTH, "h6", "eq", True)}},
    ]


# ---------------------------------------------------------------------------
# Row definitions
# ---------------------------------------------------------------------------

def _mon(rid, table, note, monitor=None, target=None, scenario=None):
    """Monitored row; target defaults to the row's own monitor id."""
    sid = scenario or ("uca-" + rid.lower())
    return RequirementRow(
        id=rid, table=table, klass="monitored", note=note,
        target=target or rid,
        monitors=(monitor,) if monitor is not None else (),
        scenario=sid, toggleable=True)


def _design(rid, table, note):
    return RequirementRow(id=rid, table=table, klass="design-time", note=note)


def _rows_w1():
    return [
        RequirementRow(
            id="RL2.W1.1", table="W1", klass="out-of-scope",
            note="training-time objective for the learned controller; it "
                 "constrains how the controller is produced, not a runtime "
                 "behavior of the fielded system"),
        _mon("RL2.W1.2", "W1",
             "a faulted primary controller must still emit a usable default "
             "command instead of going silent",
             _inst("RL2.W1.2", CH_W1, "fault_default_missing", "eq", True,
                   "primary faulted with no default output")),
        _mon("RL2.W1.3", "W1",
             "primary controller faults must be announced to the pilot on "
             "the wingman alert channel",
             _resp("RL2.W1.3",
                   _pred(CH_W1, "faulted", "eq", True),
                   _pred(CH_W13, "alerts", "contains", "primary-fault"), 1)),
        _mon("RL2.W1.4", "W1",
             "primary controller inputs and outputs must reach the recorder "
             "every frame; a failed write is retried from a buffer",
             _complete("RL2.W1.4", [CH_W1])),
        _mon("RL2.W1.5", "W1",
             "the primary controller must run off the shared frame clock so "
             "its commands carry the current frame stamp",
             _inst("RL2.W1.5", CH_W1, "skewed", "eq", True,
                   "primary command stamped off-clock")),
    ]


def _rows_w2():
    return [
        _mon("RL2.W2.1", "W2",
             "the assurance filter must keep the aircraft inside the "
             "containment volume and clear of the lead whenever it is "
             "engaged, across the whole operating envelope",
             target="H3", scenario="uca-rl2.w2.1"),
        _mon("RL2.W2.2", "W2",
             "assurance filter inputs are screened for physical plausibility "
             "and a failed screen raises an alert",
             _resp("RL2.W2.2",
                   _pred(CH_L15, "unreasonable", "eq", True),
                   _pred(CH_W7, "alerts", "contains", "rta-untrusted-input"), 1)),
        _mon("RL2.W2.3", "W2",
             "when the primary command drops out briefly the filter reuses "
             "the last received command instead of improvising",
             _inst("RL2.W2.3", CH_W2, "memory_ignored", "eq", True,
                   "held command available but not used")),
        _mon("RL2.W2.4", "W2",
             "with no primary command ever received the filter evaluates a "
             "hold-current-maneuver candidate rather than emitting nothing",
             _inst("RL2.W2.4", CH_W2, "absent_handling", "eq", "none",
                   "no candidate substituted for an absent command")),
        _design("RL2.W2.5", "W2",
                "operator-entered limits and units are validated when the "
                "run configuration loads; a bad value refuses to run "
                "rather than flying with it"),
        _mon("RL2.W2.6", "W2",
             "the filter computes its decision twice and must declare "
             "itself failed when the copies disagree",
             _resp("RL2.W2.6",
                   _pred(CH_SCRIPT, "active_faults", "contains",
                         "component_fault:rta"),
                   _pred(CH_W2, "status", "eq", "failed"), 0)),
        _mon("RL2.W2.7", "W2",
             "the filter output path is checked redundantly so a corrupted "
             "outgoing command is caught before the selector consumes it",
             _resp("RL2.W2.7",
                   _pred(CH_SCRIPT, "active_faults", "contains",
                         "component_fault:rta_output"),
                   _pred(CH_W2, "redundancy_caught", "eq", True), 0)),
        _design("RL2.W2.8", "W2",
                "filter and selector exchange the same command dataclass in "
                "the same units; there is no translation layer to get wrong"),
        _mon("RL2.W2.9", "W2",
             "wake turbulence sits outside the filter's constraint set, so "
             "the pilot watches the trajectory relative to the lead's wake "
             "and breaks out when it dwells there",
             target="H2", scenario="uca-rl2.w2.9"),
        _mon("RL2.W2.10", "W2",
             "backup maneuvers steer only within the approved operating "
             "envelope; an intervention never commands an excursion",
             _inst("RL2.W2.10", CH_W2, "output_in_envelope", "eq", False,
                   "intervention command outside the approved envelope")),
        _mon("RL2.W2.11", "W2",
             "the assurance filter runs off the shared frame clock",
             _inst("RL2.W2.11", CH_W2, "skewed", "eq", True,
                   "filter decision stamped off-clock")),
        _mon("RL2.W2.12", "W2",
             "the filter must finish inside its slice of the frame and flag "
             "any overrun it detects",
             _resp("RL2.W2.12",
                   _pred(CH_SCRIPT, "active_faults", "contains",
                         "frame_overrun:rta"),
                   _pred(CH_W2, "overrun", "eq", True), 0)),
        _mon("RL2.W2.13", "W2",
             "the selector tells the pilot when the filter signal stops "
             "arriving",
             _resp("RL2.W2.13",
                   _pred(CH_W3, "autonomy_present", "eq", False),
                   _pred(CH_W14, "alerts", "contains",
                         "selector-no-autonomy-signal"), 1)),
        _mon("RL2.W2.14", "W2",
             "when no safe backup exists the filter says so instead of "
             "failing silently",
             _resp("RL2.W2.14",
                   _pred(CH_W2, "status", "eq", "failed"),
                   _pred(CH_W7, "alerts", "contains", "rta-no-safe-command"), 1)),
        _mon("RL2.W2.15", "W2",
             "re-enabling the filter near a constraint boundary is guarded: "
             "the pilot is warned and the engage deferred until clear",
             _resp("RL2.W2.15",
                   _pred(CH_SCRIPT, "events", "contains", "rta-enable-request"),
                   _pred(CH_W7, "alerts", "contains", "rta-reenable-guard"), 1)),
        _mon("RL2.W2.16", "W2",
             "filter inputs and outputs must reach the recorder every "
             "frame; a failed write is retried from a buffer",
             _complete("RL2.W2.16", [CH_W2])),
    ]


def _rows_w3():
    return [
        _mon("RL2.W3.1", "W3",
             "a faulted selector falls back to the pilot path immediately",
             _resp("RL2.W3.1",
                   _pred(CH_SCRIPT, "active_faults", "contains",
                         "component_fault:selector"),
                   _pred(CH_W3, "source", "eq", "pilot"), 0)),
        _mon("RL2.W3.2", "W3",
             "the selector output path is checked redundantly so a "
             "corrupted outgoing command is caught before the airframe",
             _resp("RL2.W3.2",
                   _pred(CH_SCRIPT, "active_faults", "contains",
                         "component_fault:selector_output"),
                   _pred(CH_W3, "redundancy_caught", "eq", True), 0)),
        _design("RL2.W3.3", "W3",
                "selector and airframe share the command dataclass and "
                "units by construction"),
        _design("RL2.W3.4", "W3",
                "pilot inputs pass through the same envelope saturation as "
                "autonomy commands; the briefed procedure plus the shared "
                "limiter stand in for pilot technique"),
        _mon("RL2.W3.5", "W3",
             "envelope monitor and pilot independently watch for an unsafe "
             "autonomy command stream and either can force the switch",
             _resp("RL2.W3.5",
                   _pred(CH_TRUTH, "envelope_violation", "eq", True),
                   _pred(CH_W3, "source", "eq", "pilot"), 50)),
        _mon("RL2.W3.6", "W3",
             "when the filter signal is absent the selector defaults to the "
             "pilot rather than flying a stale command",
             _resp("RL2.W3.6",
                   _pred(CH_W3, "autonomy_present", "eq", False),
                   _pred(CH_W3, "source", "eq", "pilot"), 1)),
        _mon("RL2.W3.7", "W3",
             "the selector runs off the shared frame clock",
             _inst("RL2.W3.7", CH_W3, "skewed", "eq", True,
                   "selector output stamped off-clock")),
        _mon("RL2.W3.8", "W3",
             "the selector-to-airframe link is redundant so a single path "
             "dropout does not starve the airframe of commands",
             _inst("RL2.W3.8", CH_TRUTH, "command_starved", "eq", True,
                   "airframe received no fresh command for too long")),
        _mon("RL2.W3.9", "W3",
             "selector inputs and outputs must reach the recorder every "
             "frame; a failed write is retried from a buffer",
             _complete("RL2.W3.9", [CH_W3])),
    ]


def _rows_w4():
    return [
        _mon("RL2.W4.1", "W4",
             "the pilot's eyes back up the sensed-state path: visual "
             "closure on the lead forces a breakout even when the sensors "
             "say otherwise",
             target="H1", scenario="uca-rl2.w4.1"),
        _mon("RL2.W4.2", "W4",
             "controller and filter ride through sensor noise and short "
             "dropouts on the sensed state without dropping out of the "
             "test",
             _never("RL2.W4.2", CH_W3, "source", "eq", "pilot",
                    "sensor blip knocked the test onto the pilot path")),
        _mon("RL2.W4.3", "W4",
             "the state sensor runs off the shared frame clock",
             _inst("RL2.W4.3", CH_W4, "skewed", "eq", True,
                   "sensed state stamped off-clock")),
    ]


def _rows_w5():
    return [
        _mon("RL2.W5.1", "W5",
             "an impaired pilot fails the pre-test health gate and the "
             "autonomy segment never starts",
             _never("RL2.W5.1", CH_SCRIPT, "impaired_test_active", "eq", True,
                    "test segment ran with an impaired safety pilot")),
        _mon("RL2.W5.2", "W5",
             "the pilot keeps the wingman in sight and takes over when "
             "line of sight stays broken past the briefed limit",
             _resp("RL2.W5.2",
                   _pred(CH_TRUTH, "los_lost_exceeded", "eq", True),
                   _pred(CH_W5, "takeover", "eq", True), 40)),
        _mon("RL2.W5.3", "W5",
             "the pilot command path into the selector is redundant; losing "
             "one path must not leave the selector commandless",
             _never("RL2.W5.3", CH_W14, "alerts", "contains",
                    "selector-no-command-sources",
                    "pilot path dropout starved the selector")),
        _mon("RL2.W5.4", "W5",
             "a distraction that outlasts the briefed limit terminates the "
             "test point",
             _resp("RL2.W5.4",
                   _pred(CH_TRUTH, "distracted_over_limit", "eq", True),
                   _pred(CH_SCRIPT, "contingency", "eq", "abort"), 10)),
        _mon("RL2.W5.5", "W5",
             "safety limits and intervention criteria are briefed so the "
             "pilot does not grab the aircraft mid-test without cause",
             target="H6", scenario="uca-rl2.w5.5"),
    ]


def _rows_w6():
    return [
        _mon("RL2.W6.1", "W6",
             "the envelope monitor debounces sensor noise near a limit so "
             "it does not end the test on a one-frame blip",
             _never("RL2.W6.1", CH_W6, "spurious_switch", "eq", True,
                    "switch fired while the true state was inside limits")),
        _mon("RL2.W6.2", "W6",
             "an envelope monitor fault forces the switch to the pilot "
             "rather than flying on unmonitored",
             _resp("RL2.W6.2",
                   _pred(CH_SCRIPT, "active_faults", "contains",
                         "component_fault:epm"),
                   _pred(CH_W6, "kind", "eq", "to_pilot"), 0)),
        _mon("RL2.W6.3", "W6",
             "debounce requirement restated for the airspeed limit path; "
             "exercised with an airspeed noise profile",
             _never("RL2.W6.3", CH_W6, "spurious_switch", "eq", True,
                    "switch fired while the true state was inside limits")),
        _mon("RL2.W6.4", "W6",
             "an envelope monitor fault must show up on the status display "
             "the pilot sees",
             _resp("RL2.W6.4",
                   _pred(CH_SCRIPT, "active_faults", "contains",
                         "component_fault:epm"),
                   _pred(CH_W8, "shown_engaged", "eq", False), 1)),
    ]


def _rows_w8():
    return [
        _mon("RL2.W8.1", "W8",
             "the status shown to the pilot must match the envelope "
             "monitor's actual state; a cross-check corrects corruption",
             _inst("RL2.W8.1", CH_W8, "mismatch", "eq", True,
                   "displayed status disagrees with actual status")),
        _mon("RL2.W8.2", "W8",
             "the status display must keep updating; a dropped status "
             "frame is re-delivered on the redundant path",
             _inst("RL2.W8.2", CH_W8, "provided", "eq", False,
                   "no status delivered to the pilot this frame")),
    ]


# Lead report elements exercised by the corruption / omission row pairs;
# row id -> (report field, "corrupt" or "blank", perturbation). Corruption
# values are sized to trip the receiver plausibility rules; blanks travel
# as the field's missing representation. The two orientation pairs split
# the axes: 13/14 take the bank angle, 30/31 the pitch angle.
REPORT_FIELD_ROWS = {
    "RL1.5.11": ("position", "corrupt", (800.0, 0.0, 0.0)),
    "RL1.5.12": ("position", "blank", None),
    "RL1.5.13": ("orientation", "corrupt", (2.5, 0.0, 0.0)),
    "RL1.5.14": ("orientation", "blank", None),
    "RL1.5.15": ("orientation_rates", "corrupt", (8.0, 0.0, 0.0)),
    "RL1.5.16": ("true_airspeed", "corrupt", 300.0),
    "RL1.5.17": ("true_airspeed", "blank", None),
    "RL1.5.18": ("velocity", "corrupt", (320.0, 0.0, 0.0)),
    "RL1.5.19": ("velocity", "blank", None),
    "RL1.5.20": ("acceleration", "corrupt", (120.0, 0.0, 0.0)),
    "RL1.5.21": ("acceleration", "blank", None),
    "RL1.5.22": ("fuel_remaining", "corrupt", -2000.0),
    "RL1.5.23": ("fuel_remaining", "blank", None),
    "RL1.5.24": ("calibrated_airspeed", "corrupt", 400.0),
    "RL1.5.25": ("calibrated_airspeed", "blank", None),
    "RL1.5.26": ("normal_acceleration", "corrupt", 15.0),
    "RL1.5.27": ("normal_acceleration", "blank", None),
    "RL1.5.28": ("power_lever_angle", "corrupt", 2.0),
    "RL1.5.29": ("power_lever_angle", "blank", None),
    "RL1.5.30": ("orientation", "corrupt", (0.0, 2.0, 0.0)),
    "RL1.5.31": ("orientation", "blank", None),
    "RL1.5.32": ("invalid", "corrupt", True),
    "RL1.5.33": ("invalid", "blank", None),
    "RL1.5.34": ("wind_velocity", "corrupt", (80.0, 0.0, 0.0)),
    "RL1.5.35": ("wind_velocity", "blank", None),
}

_FIELD_ROW_NOTES = {
    "corrupt": "a corrupted {field} in the lead report must be caught by "
               "the receiver screen and never consumed by the filter",
    "blank": "a lead report missing {field} is structurally invalid and "
             "must never be consumed by the filter",
}


def _field_row(rid):
    field, mode, _ = REPORT_FIELD_ROWS[rid]
    note = _FIELD_ROW_NOTES[mode].format(field=field)
    return _mon(rid, "L1.5", note,
                _inst(rid, CH_W2, "used_untrusted_input", "eq", True,
                      "filter consumed a report that failed its screen"))


def _rows_l15():
    rows = [
        _mon("RL1.5.1", "L1.5",
             "an invalid lead report is flagged with the failing fields, "
             "announced, and answered with the briefed contingency",
             _resp("RL1.5.1",
                   _pred(CH_L15, "invalid", "eq", True),
                   _pred(CH_SCRIPT, "report_fault_handled", "eq", True), 5)),
        _mon("RL1.5.2", "L1.5",
             "when the lead position has been unknown for too long the "
             "crew is alerted and the contingency engages",
             _resp("RL1.5.2",
                   _pred(CH_L15, "position_unknown", "eq", True),
                   _pred(CH_SCRIPT, "report_fault_handled", "eq", True), 5)),
        _mon("RL1.5.3", "L1.5",
             "all elements of one report are sampled on the same frame",
             _inst("RL1.5.3", CH_L15, "element_skew_frames", "gt", 0,
                   "report mixes elements from different frames")),
        _mon("RL1.5.4", "L1.5",
             "a report arriving a couple of frames late is tolerated, not "
             "treated as a lost link",
             _never("RL1.5.4", CH_SCRIPT, "small_delay_overreaction", "eq",
                    True, "contingency fired on an in-tolerance delay")),
        _mon("RL1.5.5", "L1.5",
             "a commanded rejoin point is screened against separation and "
             "containment before the wingman flies toward it",
             _never("RL1.5.5", CH_W1, "rejoin_unsafe", "eq", True,
                    "controller steering toward an unscreened rejoin point")),
        _mon("RL1.5.6", "L1.5",
             "an unknown rejoin point during a coordinated segment is "
             "announced and answered with the briefed contingency",
             _resp("RL1.5.6",
                   _pred(CH_L15, "rejoin_missing", "eq", True),
                   _pred(CH_SCRIPT, "report_fault_handled", "eq", True), 5)),
        _mon("RL1.5.7", "L1.5",
             "both aircraft fly the same clock; report stamps must land on "
             "the receiver's current frame",
             _inst("RL1.5.7", CH_L15, "stamp_skewed", "eq", True,
                   "report timestamp off the shared clock")),
        _mon("RL1.5.8", "L1.5",
             "a report without a timestamp is rejected and handled, never "
             "trusted as fresh",
             _resp("RL1.5.8",
                   _pred(CH_L15, "timestamp_missing", "eq", True),
                   _pred(CH_SCRIPT, "report_fault_handled", "eq", True), 5)),
        _mon("RL1.5.9", "L1.5",
             "a test point id that does not match the briefed card is "
             "queried, not flown",
             _never("RL1.5.9", CH_SCRIPT, "test_point_mismatch_unhandled",
                    "eq", True, "flew an unbriefed test point id")),
        _mon("RL1.5.10", "L1.5",
             "a missing test point id is queried, not flown",
             _never("RL1.5.10", CH_SCRIPT, "test_point_missing_unhandled",
                    "eq", True, "flew with no test point id")),
    ]
    rows.extend(_field_row(rid) for rid in sorted(
        REPORT_FIELD_ROWS, key=lambda r: int(r.rsplit(".", 1)[1])))
    rows.extend([
        _mon("RL1.5.36", "L1.5",
             "voice calls outside the briefed windows clutter the channel "
             "and are not made",
             _never("RL1.5.36", CH_VOICE, "unnecessary_sent", "eq", True,
                    "voice call made with nothing to coordinate")),
        _mon("RL1.5.37", "L1.5",
             "a due coordination call is actually made",
             _resp("RL1.5.37",
                   _pred(CH_SCRIPT, "coordination_due", "eq", True),
                   _pred(CH_VOICE, "sent_kind", "eq", "coordination"), 25)),
        _mon("RL1.5.38", "L1.5",
             "a developing safety concern is voiced promptly",
             _resp("RL1.5.38",
                   _pred(CH_TRUTH, "safety_event", "eq", True),
                   _pred(CH_VOICE, "sent_kind", "eq", "safety"), 25)),
        _mon("RL1.5.39", "L1.5",
             "calls stay short enough not to block the channel",
             _never("RL1.5.39", CH_VOICE, "too_long", "eq", True,
                    "voice call blocked the channel past the briefed length")),
        _mon("RL1.5.40", "L1.5",
             "calls carry the briefed minimum content",
             _never("RL1.5.40", CH_VOICE, "too_short", "eq", True,
                    "voice call missing required content")),
        _mon("RL1.5.41", "L1.5",
             "calls are not made before their briefed window opens",
             _never("RL1.5.41", CH_VOICE, "too_early", "eq", True,
                    "voice call ahead of its window")),
        _mon("RL1.5.42", "L1.5",
             "calls are not made after their briefed window has closed",
             _never("RL1.5.42", CH_VOICE, "too_late", "eq", True,
                    "voice call after its window")),
    ])
    return rows


ROWS: tuple[RequirementRow, ...] = tuple(
    _rows_w1() + _rows_w2() + _rows_w3() + _rows_w4() + _rows_w5()
    + _rows_w6() + _rows_w8() + _rows_l15())

BY_ID: dict[str, RequirementRow] = {r.id: r for r in ROWS}
assert len(BY_ID) == len(ROWS), "duplicate requirement id"

MITIGATION_IDS: tuple[str, ...] = tuple(r.id for r in ROWS if r.toggleable)


def monitored_rows() -> list[RequirementRow]:
    return [r for r in ROWS if r.klass == "monitored"]


def monitor_catalog() -> list[dict]:
    """Hazard monitors plus every row-owned monitor, as catalog entries."""
    entries = hazard_monitor_entries()
    entries.extend(m for r in ROWS for m in r.monitors)
    return entries


def traceability() -> list[dict]:
    """One line per requirement row for the coverage matrix."""
    return [{
        "id": r.id,
        "table": r.table,
        "class": r.klass,
        "target_monitor": r.target or "",
        "scenario": r.scenario or "",
        "note": r.note,
    } for r in ROWS]


def require_known_mitigations(ids) -> None:
    """Reject a mitigation set naming rows that do not exist or cannot
    toggle; bad ids fail loudly at configuration time."""
    known = set(MITIGATION_IDS)
    for rid in ids:
        if rid not in BY_ID:
            raise ConfigError(f"unknown requirement id {rid!r}")
        if rid not in known:
            raise ConfigError(
                f"{rid} is {BY_ID[rid].klass}, not a toggleable mitigation")
