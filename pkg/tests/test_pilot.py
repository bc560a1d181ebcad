"""Safety-pilot model tests.

Takeover latency is checked frame by frame: a qualifying trigger at frame f
must produce takeover at exactly f + reaction_delay_frames when the pilot is
neither distracted nor incapacitated.
"""

from __future__ import annotations

import math
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wingsim.core import FrameStamp
from wingsim.pilot import (
    CARD_EPM_REQUEST,
    CARD_TAKEOVER,
    CardAction,
    PilotModel,
    health_gate_pass,
    line_of_sight,
    pilot_step,
)

from support import DT, make_state


def ahead_lead(own_frame=0, dist=400.0):
    """Lead dead ahead of a north-facing wingman."""
    return make_state(north=dist, east=0.0, frame=own_frame)


def behind_lead(own_frame=0, dist=400.0):
    return make_state(north=-dist, east=0.0, frame=own_frame)


def run_frames(n, lead_fn, alerts_fn, m, start=0):
    """Drive the model n frames; returns (first takeover frame or None, m)."""
    first = None
    for frame in range(start, start + n):
        own = make_state(frame=frame)
        _, takeover, _, m = pilot_step(own, lead_fn(frame), alerts_fn(frame), m)
        if takeover and first is None:
            first = frame
    return first, m


class TestLineOfSight:
    def test_dead_ahead_visible(self):
        own = make_state()
        assert line_of_sight(own, ahead_lead(), 1.0)

    def test_behind_not_visible(self):
        own = make_state()
        assert not line_of_sight(own, behind_lead(), 1.0)

    def test_cone_edge(self):
        own = make_state()
        inside = make_state(north=100.0 * math.cos(0.9), east=100.0 * math.sin(0.9))
        outside = make_state(north=100.0 * math.cos(1.1), east=100.0 * math.sin(1.1))
        assert line_of_sight(own, inside, 1.0)
        assert not line_of_sight(own, outside, 1.0)

    def test_coincident_counts_as_visible(self):
        own = make_state()
        assert line_of_sight(own, make_state(), 1.0)

    def test_cone_half_angle_validated(self):
        with pytest.raises(AssertionError):
            PilotModel(los_cone_half_angle=0.0)
        with pytest.raises(AssertionError):
            PilotModel(los_cone_half_angle=math.pi)


class TestNominal:
    def test_no_takeover_station_keeping(self):
        m = PilotModel()
        first, m = run_frames(200, lambda f: ahead_lead(f), lambda f: (), m)
        assert first is None
        assert not m.taken_over

    def test_station_command_closes_altitude_gap(self):
        own = make_state(altitude=1400.0)
        lead = make_state(north=400.0, altitude=1500.0)
        cmd, takeover, _, _ = pilot_step(own, lead, (), PilotModel())
        assert not takeover
        assert cmd.climb_rate > 0.0

    def test_briefed_pilot_never_preempts_green_boards(self):
        m = PilotModel(briefed=True, reaction_delay_frames=0)
        first, _ = run_frames(300, lambda f: ahead_lead(f), lambda f: (), m)
        assert first is None

    def test_unbriefed_pilot_grabs_jet_while_green(self):
        m = PilotModel(briefed=False, spurious_takeover_frame=40)
        first, _ = run_frames(100, lambda f: ahead_lead(f), lambda f: (), m)
        assert first == 40


class TestLosLoss:
    def test_takeover_after_loss_limit_plus_delay(self):
        limit, delay = 10, 5
        m = PilotModel(los_max_loss_frames=limit, reaction_delay_frames=delay)
        # lead behind from frame 0: counter exceeds the limit at frame `limit`
        first, _ = run_frames(60, lambda f: behind_lead(f), lambda f: (), m)
        assert first == limit + delay

    def test_short_loss_recovers(self):
        limit = 10
        m = PilotModel(los_max_loss_frames=limit, reaction_delay_frames=0)

        def lead(frame):
            return behind_lead(frame) if frame < limit else ahead_lead(frame)

        first, m = run_frames(80, lead, lambda f: (), m)
        assert first is None
        assert m.los_loss_frames == 0


class TestAlerts:
    def test_alert_triggers_takeover_after_exact_delay(self):
        delay = 7
        m = PilotModel(reaction_delay_frames=delay)

        def alerts(frame):
            return ("rta-no-safe-command",) if frame == 3 else ()

        first, _ = run_frames(40, lambda f: ahead_lead(f), alerts, m)
        assert first == 3 + delay

    def test_zero_delay_takeover_same_frame(self):
        m = PilotModel(reaction_delay_frames=0)
        _, takeover, _, _ = pilot_step(make_state(), ahead_lead(), ("alert",), m)
        assert takeover

    @given(st.integers(min_value=0, max_value=30),
           st.integers(min_value=0, max_value=20))
    def test_latency_is_exact(self, delay, trigger_frame):
        m = PilotModel(reaction_delay_frames=delay)

        def alerts(frame):
            return ("x",) if frame == trigger_frame else ()

        first, _ = run_frames(trigger_frame + delay + 5,
                              lambda f: ahead_lead(f), alerts, m)
        assert first == trigger_frame + delay


class TestImpairment:
    def test_incapacitated_never_takes_over(self):
        m = PilotModel(incapacitated=True, reaction_delay_frames=0)
        for frame in range(50):
            own = make_state(frame=frame)
            cmd, takeover, epm_req, m = pilot_step(
                own, behind_lead(frame), ("rta-no-safe-command",), m)
            assert not takeover and not epm_req

    def test_incapacitated_command_frozen(self):
        m = PilotModel()
        own = make_state(altitude=1400.0)
        lead = make_state(north=400.0, altitude=1500.0)
        cmd0, _, _, m = pilot_step(own, lead, (), m)
        m_inc = replace(m, incapacitated=True)
        own1 = make_state(altitude=1400.0, frame=1)
        cmd1, _, _, _ = pilot_step(own1, lead, (), m_inc)
        assert (cmd1.turn_rate, cmd1.climb_rate, cmd1.longitudinal_accel) == \
            (cmd0.turn_rate, cmd0.climb_rate, cmd0.longitudinal_accel)
        assert cmd1.stamp == own1.timestamp

    def test_health_gate(self):
        assert health_gate_pass(PilotModel())
        assert not health_gate_pass(PilotModel(incapacitated=True))

    def test_distraction_pauses_countdown(self):
        delay = 4
        until = FrameStamp.at(20, DT)
        m = PilotModel(reaction_delay_frames=delay, distracted_until=until)

        def alerts(frame):
            return ("x",) if frame == 5 else ()

        first, _ = run_frames(60, lambda f: ahead_lead(f), alerts, m)
        # trigger at 5, countdown frozen until frame 20, then the full delay
        assert first == 20 + delay


class TestVisualBreakout:
    def test_close_lead_triggers_takeover_and_breakout(self):
        m = PilotModel(reaction_delay_frames=2, visual_breakout_distance=250.0)
        first, m = run_frames(30, lambda f: ahead_lead(f, dist=180.0),
                              lambda f: (), m)
        assert first == 2
        assert m.breakout

    def test_breakout_command_turns_away(self):
        m = PilotModel(reaction_delay_frames=0, visual_breakout_distance=250.0)
        own = make_state()
        lead = make_state(north=100.0, east=60.0)  # close, ahead-right
        cmd, takeover, _, _ = pilot_step(own, lead, (), m)
        assert takeover
        assert cmd.turn_rate < 0.0, "should turn left, away from the lead"


class TestTestCard:
    def test_scripted_takeover_fires_on_frame_without_delay(self):
        card = (CardAction(frame=12, kind=CARD_TAKEOVER),)
        m = PilotModel(reaction_delay_frames=25, test_card=card)
        first, _ = run_frames(30, lambda f: ahead_lead(f), lambda f: (), m)
        assert first == 12

    def test_scripted_epm_request_single_frame(self):
        card = (CardAction(frame=8, kind=CARD_EPM_REQUEST),)
        m = PilotModel(test_card=card)
        requests = []
        for frame in range(15):
            own = make_state(frame=frame)
            _, _, epm_req, m = pilot_step(own, ahead_lead(frame), (), m)
            requests.append(epm_req)
        assert requests == [frame == 8 for frame in range(15)]

    def test_card_validation(self):
        with pytest.raises(AssertionError):
            CardAction(frame=-1, kind=CARD_TAKEOVER)
        with pytest.raises(AssertionError):
            CardAction(frame=0, kind="dance")
