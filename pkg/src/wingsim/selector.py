"""Control selector.

Chooses, once per frame, whether the airframe flies the autonomy path (the
run-time-assurance filter's output) or the safety pilot's stick. Every
abnormal condition resolves the same way: hand the airplane to the pilot and
stay there. Autonomy is only re-entered through an explicit scripted
test-engineer action, never silently.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .core import ControlCommand, FrameStamp, maintain_command
from .epm import SWITCH_TO_PILOT, SwitchCommand
from .rta import RtaDecision

SOURCE_AUTONOMY = "autonomy"
SOURCE_PILOT = "pilot"

# Raised on the pilot-alert path the same frame the autonomy signal goes away.
ALERT_NO_AUTONOMY = "selector-no-autonomy-signal"
# Both command sources gone: surfaced as a critical alert for the monitors.
ALERT_NO_SOURCES = "selector-no-command-sources"


@dataclass(frozen=True)
class SelectorState:
    source: str = SOURCE_AUTONOMY
    faulted: bool = False
    frames_since_autonomy_signal: int = 0
    switch_reason: Optional[str] = None

    def __post_init__(self) -> None:
        assert self.source in (SOURCE_AUTONOMY, SOURCE_PILOT), f"bad source {self.source!r}"
        assert not (self.faulted and self.source == SOURCE_AUTONOMY), \
            "a faulted selector may not keep the autonomy path"


def reengage_autonomy(s: SelectorState) -> SelectorState:
    """Scripted test-engineer action; the only path back to autonomy."""
    if s.faulted:
        return s
    return replace(s, source=SOURCE_AUTONOMY, switch_reason=None,
                   frames_since_autonomy_signal=0)


def fault_selector(s: SelectorState) -> SelectorState:
    """Fault injection point. A broken selector must already hold the pilot
    path before its next select call; the state invariant enforces that."""
    return replace(s, source=SOURCE_PILOT, faulted=True,
                   switch_reason="selector-fault")


def select(
    rta_cmd: Optional[RtaDecision],
    pilot_cmd: Optional[ControlCommand],
    epm_switch: SwitchCommand,
    pilot_takeover: bool,
    s: SelectorState,
    stamp: FrameStamp,
) -> tuple[ControlCommand, tuple[str, ...], SelectorState]:
    """One selection frame. Returns the command sent to the airframe, pilot
    alerts raised this frame, and the next state.

    The switch to pilot latches for the rest of the scenario; only
    reengage_autonomy reverses it.
    """
    alerts: list[str] = []

    autonomy_ok = rta_cmd is not None and rta_cmd.status == "ok"
    frames_gap = 0 if rta_cmd is not None else s.frames_since_autonomy_signal + 1
    if rta_cmd is None:
        alerts.append(ALERT_NO_AUTONOMY)

    reason = s.switch_reason
    source = s.source
    if source == SOURCE_AUTONOMY:
        if epm_switch.kind == SWITCH_TO_PILOT:
            source, reason = SOURCE_PILOT, "epm-switch"
        elif pilot_takeover:
            source, reason = SOURCE_PILOT, "pilot-takeover"
        elif rta_cmd is None:
            source, reason = SOURCE_PILOT, "autonomy-signal-absent"
        elif not autonomy_ok:
            source, reason = SOURCE_PILOT, "rta-failed"

    if source == SOURCE_AUTONOMY:
        chosen: Optional[ControlCommand] = rta_cmd.output
    else:
        chosen = pilot_cmd

    if chosen is None:
        # last resort: hold attitude and make noise
        chosen = maintain_command(stamp)
        alerts.append(ALERT_NO_SOURCES)

    out = chosen if chosen.stamp == stamp else chosen.with_stamp(stamp)
    nxt = SelectorState(source=source, faulted=s.faulted,
                        frames_since_autonomy_signal=frames_gap,
                        switch_reason=reason)
    return out, tuple(alerts), nxt
