"""Primary controller behavior.

Covers:
- turn direction against an independent bearing oracle (target 1000 m left)
- zero-error fixed point on station
- fault latching and the default output
- missing-estimate fallbacks (last known, then maintain plus alert)
- saturation on and off
- rejoin-point override from the report
- closed-loop convergence to the rejoin station
"""

from __future__ import annotations

import math

import pytest

from wingsim.controllers import (
    ALERT_FAULT,
    ALERT_NO_ESTIMATE,
    PrimaryConfig,
    PrimaryControllerStatus,
    RejoinGoal,
    body_to_ned,
    primary_step,
    station_point,
)
from wingsim.core import Vec3, maintain_command
from wingsim.plant import PlantConfig, ScriptSegment, TrajectoryScript, plant_step

from support import make_state
from test_datalink import make_report

GOAL = RejoinGoal(rejoin_point=Vec3(-300.0, 150.0, 0.0))
CFG = PrimaryConfig()


def bearing_oracle(own_pos: Vec3, target: Vec3) -> float:
    """atan2 recomputation in plain tuples."""
    return math.atan2(target.east - own_pos.east, target.north - own_pos.north)


class TestGeometry:
    def test_body_to_ned_axes(self):
        # lead heading east: body-forward maps to +east, body-right to -north
        out = body_to_ned(Vec3(10.0, 0.0, 0.0), math.pi / 2)
        assert out.east == pytest.approx(10.0) and out.north == pytest.approx(0.0)
        out = body_to_ned(Vec3(0.0, 10.0, 0.0), math.pi / 2)
        assert out.north == pytest.approx(-10.0) and out.east == pytest.approx(0.0)

    def test_station_point_trails_lead(self):
        lead = make_state(north=1000.0, east=0.0, heading=0.0)
        p = station_point(lead, GOAL)
        assert p.north == pytest.approx(700.0)
        assert p.east == pytest.approx(150.0)


class TestPrimaryStep:
    def test_turn_sign_toward_target_left(self):
        """Target 1000 m to the left of the nose must give a turn whose sign
        matches the independent bearing computation."""
        own = make_state(north=0.0, east=0.0, heading=0.0)  # nose north
        lead = make_state(north=300.0, east=-1000.0, heading=0.0, frame=10)
        report = make_report(frame=10, north=lead.position.north, east=lead.position.east)
        cmd, _, _ = primary_step(own, report, RejoinGoal(Vec3(0.0, 0.0, 0.0), 30.0),
                                 PrimaryControllerStatus(), CFG)
        want_err = bearing_oracle(own.position, lead.position)  # negative: left turn
        assert want_err < 0
        assert cmd.turn_rate < 0, "must turn left toward a target on the left"
        assert abs(cmd.turn_rate) <= CFG.envelope.max_turn_rate

    def test_turn_sign_toward_target_right(self):
        own = make_state(heading=0.0)
        report = make_report(frame=10, north=300.0, east=1000.0)
        cmd, _, _ = primary_step(own, report, RejoinGoal(Vec3(0.0, 0.0, 0.0), 30.0),
                                 PrimaryControllerStatus(), CFG)
        assert cmd.turn_rate > 0

    def test_zero_error_fixed_point(self):
        lead = make_report(frame=10, north=300.0, east=-150.0, rejoin=False)
        # station for GOAL relative to that lead, co-speed, co-heading, co-altitude
        own = make_state(north=0.0, east=0.0, heading=0.0)
        cmd, _, _ = primary_step(own, lead, GOAL, PrimaryControllerStatus(), CFG)
        assert abs(cmd.turn_rate) < 1e-9
        assert abs(cmd.climb_rate) < 1e-9
        assert abs(cmd.longitudinal_accel) < 1e-9

    def test_faulted_emits_default_and_alert(self):
        status = PrimaryControllerStatus().fail()
        own = make_state()
        for _ in range(3):
            cmd, status, alerts = primary_step(own, make_report(), GOAL, status, CFG)
            assert (cmd.turn_rate, cmd.climb_rate, cmd.longitudinal_accel) == (0.0, 0.0, 0.0)
            assert alerts == [ALERT_FAULT]
            assert status.faulted, "fault must latch"

    def test_missing_estimate_uses_last_known(self):
        own = make_state()
        report = make_report(frame=5, north=800.0)
        cmd_with, status, _ = primary_step(own, report, GOAL, PrimaryControllerStatus(), CFG)
        cmd_without, status, alerts = primary_step(own, None, GOAL, status, CFG)
        assert alerts == []
        assert cmd_without.turn_rate == cmd_with.turn_rate

    def test_no_estimate_ever_maintains_and_alerts(self):
        cmd, _, alerts = primary_step(make_state(), None, GOAL,
                                      PrimaryControllerStatus(), CFG)
        assert (cmd.turn_rate, cmd.climb_rate, cmd.longitudinal_accel) == (0.0, 0.0, 0.0)
        assert alerts == [ALERT_NO_ESTIMATE]

    def test_output_saturated_under_extreme_geometry(self):
        own = make_state(altitude=500.0, speed=40.0)
        report = make_report(frame=10, north=-5000.0, east=5000.0, altitude=2900.0,
                             speed=200.0)
        cmd, _, _ = primary_step(own, report, GOAL, PrimaryControllerStatus(), CFG)
        assert CFG.envelope.contains(cmd)
        assert cmd.is_finite()

    def test_saturation_can_be_disabled(self):
        cfg = PrimaryConfig(saturate=False)
        own = make_state(altitude=500.0)
        report = make_report(frame=10, north=0.0, east=8000.0, altitude=2900.0)
        cmd, _, _ = primary_step(own, report, GOAL, PrimaryControllerStatus(), cfg)
        assert abs(cmd.climb_rate) > cfg.envelope.max_climb_rate

    def test_report_rejoin_point_overrides_goal(self):
        own = make_state(heading=0.0)
        # configured goal is astern-left; the report commands astern-right
        report = make_report(frame=10, north=500.0, east=0.0)
        assert report.commanded_rejoin_point == Vec3(-250.0, 80.0, 0.0)
        cmd, _, _ = primary_step(own, report, GOAL, PrimaryControllerStatus(), CFG)
        want = bearing_oracle(own.position, Vec3(250.0, 80.0, -1500.0))
        assert (cmd.turn_rate > 0) == (want > 0)

    def test_scripted_kind_replays_schedule(self):
        script = TrajectoryScript((ScriptSegment(5, turn=0.2), ScriptSegment(5, turn=-0.2)))
        cfg = PrimaryConfig(kind="scripted", script=script)
        own = make_state(frame=7)
        cmd, _, _ = primary_step(own, None, GOAL, PrimaryControllerStatus(), cfg)
        assert cmd.turn_rate == -0.2
        assert cmd.stamp == own.timestamp

    def test_pursuit_kind_steers_at_lead(self):
        cfg = PrimaryConfig(kind="pursuit")
        own = make_state(heading=0.0)
        report = make_report(frame=10, north=0.0, east=400.0)
        cmd, _, _ = primary_step(own, report, GOAL, PrimaryControllerStatus(), cfg)
        assert cmd.turn_rate > 0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            PrimaryConfig(kind="learned")
        with pytest.raises(ValueError):
            PrimaryConfig(kind="scripted")
        with pytest.raises(ValueError):
            RejoinGoal(Vec3(0, 0, 0), capture_radius=0.0)


class TestClosedLoop:
    def test_converges_to_station_behind_straight_lead(self):
        plant_cfg = PlantConfig()
        goal = RejoinGoal(rejoin_point=Vec3(-200.0, 100.0, 0.0), capture_radius=30.0)
        lead = make_state(north=600.0, east=-200.0, altitude=1600.0, speed=70.0)
        own = make_state(north=0.0, east=300.0, altitude=1400.0, speed=70.0)
        status = PrimaryControllerStatus()
        for frame in range(1, 3000):
            report = make_report(frame=frame, north=lead.position.north,
                                 east=lead.position.east,
                                 altitude=lead.altitude(), speed=70.0, rejoin=False)
            cmd, status, _ = primary_step(own, report, goal, status, CFG)
            own = plant_step(own, cmd, Vec3.zero(), plant_cfg)
            lead = plant_step(lead, maintain_command(cmd.stamp), Vec3.zero(), plant_cfg)
        target = station_point(lead, goal)
        miss = math.hypot(target.north - own.position.north,
                          target.east - own.position.east)
        assert miss < goal.capture_radius * 2, f"missed station by {miss:.0f} m"
        assert abs(own.altitude() - lead.altitude()) < 20.0
