"""Envelope protection monitor.

Watches the airframe state against configured envelope limits and tells the
control selector when the autonomy path must be abandoned. The monitor is
deliberately simple: a per-frame limit check with a consecutive-frame
hysteresis so single-sample noise does not dump a test card, plus two
unconditional switch paths (pilot request, internal fault).

The status report emitted each frame always reflects the monitor's true
engagement state; anything that shows the pilot a different picture is a
transport-level corruption injected elsewhere and caught by the recording
monitors.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .core import AircraftState, EnvelopeLimits, FrameStamp

DEFAULT_HYSTERESIS_FRAMES = 3

SWITCH_NONE = "none"
SWITCH_TO_PILOT = "to_pilot"


@dataclass(frozen=True)
class SwitchCommand:
    """Instruction to the control selector."""

    kind: str  # SWITCH_NONE or SWITCH_TO_PILOT
    reason: Optional[str] = None

    def __post_init__(self) -> None:
        assert self.kind in (SWITCH_NONE, SWITCH_TO_PILOT), f"bad switch kind {self.kind!r}"


def no_switch() -> SwitchCommand:
    return SwitchCommand(SWITCH_NONE)


@dataclass(frozen=True)
class EpmStatusReport:
    """Per-frame status shown to the safety pilot."""

    engaged: bool
    reason: str
    violations: tuple[str, ...]
    stamp: FrameStamp


@dataclass(frozen=True)
class EpmState:
    engaged: bool = True
    faulted: bool = False
    hysteresis_counter: int = 0


def epm_step(
    state: AircraftState,
    limits: EnvelopeLimits,
    pilot_switch_request: bool,
    s: EpmState,
    hysteresis_frames: int = DEFAULT_HYSTERESIS_FRAMES,
) -> tuple[SwitchCommand, EpmStatusReport, EpmState]:
    """One monitor frame.

    Switches to pilot when limits have been exceeded for hysteresis_frames
    consecutive frames, when the pilot asks, or when the monitor itself is
    faulted. A non-finite state sample is indistinguishable from a broken
    sensor path and is treated as a fault.
    """
    assert hysteresis_frames >= 1, "hysteresis must be at least one frame"

    faulted = s.faulted
    fault_reason = "fault" if s.faulted else None
    if not faulted and "non-finite field" in state.check_invariants():
        faulted = True
        fault_reason = "non-finite-state"

    if faulted:
        nxt = EpmState(engaged=False, faulted=True, hysteresis_counter=0)
        report = EpmStatusReport(False, fault_reason or "fault", (), state.timestamp)
        return SwitchCommand(SWITCH_TO_PILOT, fault_reason), report, nxt

    violations = tuple(limits.violations(state))
    counter = s.hysteresis_counter + 1 if violations else 0

    if pilot_switch_request:
        reason = "pilot-request"
        switch = SwitchCommand(SWITCH_TO_PILOT, reason)
        engaged = False
    elif counter >= hysteresis_frames:
        reason = f"envelope:{violations[0]}"
        switch = SwitchCommand(SWITCH_TO_PILOT, reason)
        engaged = False
    else:
        reason = "nominal" if not violations else f"pending:{violations[0]}"
        switch = no_switch()
        engaged = True

    nxt = replace(s, engaged=engaged, hysteresis_counter=counter)
    report = EpmStatusReport(engaged, reason, violations, state.timestamp)
    return switch, report, nxt
