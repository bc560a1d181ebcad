"""Envelope protection monitor tests.

The hysteresis behaviour is checked against a replay oracle that just counts
consecutive exceedance frames in the input sequence.
"""

from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wingsim.core import EnvelopeLimits
from wingsim.epm import (
    SWITCH_NONE,
    SWITCH_TO_PILOT,
    EpmState,
    epm_step,
)

from support import make_state

LIMITS = EnvelopeLimits()


def mid_envelope(frame=0):
    return make_state(frame=frame)


def rolled(frame=0, roll=None):
    r = LIMITS.max_roll + 0.1 if roll is None else roll
    return make_state(frame=frame, orientation=(r, 0.0, 0.0))


def switch_frames_oracle(violating: list[bool], hysteresis: int) -> set[int]:
    """Frames on which a limit-driven switch fires: consecutive run length
    reaches the hysteresis threshold."""
    out = set()
    run = 0
    for i, bad in enumerate(violating):
        run = run + 1 if bad else 0
        if run >= hysteresis:
            out.add(i)
    return out


class TestNominal:
    def test_mid_envelope_no_switch(self):
        switch, report, s = epm_step(mid_envelope(), LIMITS, False, EpmState())
        assert switch.kind == SWITCH_NONE
        assert report.engaged and report.reason == "nominal"
        assert report.violations == ()
        assert s.engaged and not s.faulted and s.hysteresis_counter == 0

    def test_no_spurious_switch_over_long_run(self):
        s = EpmState()
        for frame in range(500):
            switch, report, s = epm_step(mid_envelope(frame), LIMITS, False, s)
            assert switch.kind == SWITCH_NONE, f"spurious switch at frame {frame}"
            assert report.engaged

    def test_status_reported_every_frame_with_stamp(self):
        s = EpmState()
        for frame in range(5):
            state = mid_envelope(frame)
            _, report, s = epm_step(state, LIMITS, False, s)
            assert report.stamp == state.timestamp


class TestHysteresis:
    def test_sustained_roll_switches_after_hysteresis(self):
        s = EpmState()
        kinds = []
        for frame in range(6):
            switch, report, s = epm_step(rolled(frame), LIMITS, False, s, hysteresis_frames=3)
            kinds.append(switch.kind)
        assert kinds == [SWITCH_NONE, SWITCH_NONE, SWITCH_TO_PILOT,
                         SWITCH_TO_PILOT, SWITCH_TO_PILOT, SWITCH_TO_PILOT]
        assert switch.reason == "envelope:roll"

    def test_single_frame_blip_ignored(self):
        s = EpmState()
        seq = [rolled(0), mid_envelope(1), rolled(2), mid_envelope(3)]
        for state in seq:
            switch, report, s = epm_step(state, LIMITS, False, s, hysteresis_frames=3)
            assert switch.kind == SWITCH_NONE
            assert report.engaged

    def test_pending_reason_while_counting(self):
        _, report, s = epm_step(rolled(0), LIMITS, False, EpmState(), hysteresis_frames=3)
        assert report.engaged and report.reason == "pending:roll"
        assert report.violations[0] == "roll"

    def test_hysteresis_one_switches_immediately(self):
        switch, _, _ = epm_step(rolled(), LIMITS, False, EpmState(), hysteresis_frames=1)
        assert switch.kind == SWITCH_TO_PILOT

    def test_hysteresis_must_be_positive(self):
        with pytest.raises(AssertionError):
            epm_step(mid_envelope(), LIMITS, False, EpmState(), hysteresis_frames=0)

    @given(st.lists(st.booleans(), min_size=1, max_size=60),
           st.integers(min_value=1, max_value=5))
    def test_switch_frames_match_replay_oracle(self, pattern, hysteresis):
        s = EpmState()
        fired = set()
        for i, bad in enumerate(pattern):
            state = rolled(i) if bad else mid_envelope(i)
            switch, _, s = epm_step(state, LIMITS, False, s, hysteresis_frames=hysteresis)
            if switch.kind == SWITCH_TO_PILOT:
                fired.add(i)
        assert fired == switch_frames_oracle(pattern, hysteresis)


class TestUnconditionalPaths:
    def test_pilot_request_switches_same_frame(self):
        switch, report, s = epm_step(mid_envelope(), LIMITS, True, EpmState())
        assert switch.kind == SWITCH_TO_PILOT and switch.reason == "pilot-request"
        assert not report.engaged and not s.engaged

    def test_faulted_state_fails_safe(self):
        switch, report, s = epm_step(mid_envelope(), LIMITS, False,
                                     EpmState(faulted=True))
        assert switch.kind == SWITCH_TO_PILOT and switch.reason == "fault"
        assert not report.engaged and s.faulted

    def test_non_finite_state_treated_as_fault(self):
        bad = make_state(orientation=(math.nan, 0.0, 0.0))
        switch, report, s = epm_step(bad, LIMITS, False, EpmState())
        assert switch.kind == SWITCH_TO_PILOT
        assert switch.reason == "non-finite-state"
        assert s.faulted, "fault must latch in the state"

    def test_fault_latches_across_frames(self):
        bad = make_state(true_airspeed=math.inf)
        _, _, s = epm_step(bad, LIMITS, False, EpmState())
        switch, _, s = epm_step(mid_envelope(1), LIMITS, False, s)
        assert switch.kind == SWITCH_TO_PILOT, "recovered sample must not clear the fault"


class TestTruthfulness:
    @given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=40))
    def test_report_matches_internal_engagement(self, pattern):
        """The W8 report must equal the monitor's own engaged flag every
        frame, whatever mix of violations and requests occurs."""
        s = EpmState()
        for i, (bad, request) in enumerate(pattern):
            state = rolled(i) if bad else mid_envelope(i)
            _, report, s = epm_step(state, LIMITS, False if s.faulted else request, s)
            assert report.engaged == s.engaged
