"""Deterministic manned-unmanned teaming flight-test simulator.

A two-ship (lead plus autonomous wingman) discrete-time simulation with a
run-time-assurance layer, envelope protection, a pilot model, fault
injection, trace recording, and runtime safety monitors.
"""

__version__ = "0.1.0"
