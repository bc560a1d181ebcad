"""Requirement registry tests: shape, totality, and catalog hygiene."""

from __future__ import annotations

import re
from collections import Counter

import pytest

from wingsim.core import ConfigError, FrameStamp, Vec3
from wingsim.datalink import PositionReport, blank_field, perturb_field
from wingsim.monitors import load_monitor_specs
from wingsim.requirements import (
    BY_ID,
    CHANNELS,
    HAZARD_IDS,
    MITIGATION_IDS,
    REPORT_FIELD_ROWS,
    ROWS,
    hazard_monitor_entries,
    monitor_catalog,
    monitored_rows,
    require_known_mitigations,
    traceability,
)

from support import make_state

EXPECTED_TABLE_COUNTS = {
    "W1": 5, "W2": 16, "W3": 9, "W4": 3,
    "W5": 5, "W6": 4, "W8": 2, "L1.5": 42,
}


def test_registry_size_and_table_counts():
    assert len(ROWS) == 86
    assert Counter(r.table for r in ROWS) == EXPECTED_TABLE_COUNTS


def test_class_split():
    counts = Counter(r.klass for r in ROWS)
    assert counts == {"monitored": 81, "design-time": 4, "out-of-scope": 1}
    assert len(MITIGATION_IDS) == 81
    assert set(MITIGATION_IDS) == {r.id for r in monitored_rows()}


def test_ids_are_unique_and_well_formed():
    ids = [r.id for r in ROWS]
    assert len(set(ids)) == len(ids)
    pat = re.compile(r"^RL(2\.W\d+|1\.5)\.\d+$")
    for rid in ids:
        assert pat.match(rid), rid


def test_every_monitored_row_is_executable():
    for r in monitored_rows():
        assert r.toggleable, r.id
        assert r.target, r.id
        assert r.scenario == f"uca-{r.id.lower()}", r.id
        assert r.note, r.id


def test_unmonitored_rows_carry_no_runtime_hooks():
    for r in ROWS:
        if r.klass == "monitored":
            continue
        assert not r.toggleable, r.id
        assert not r.monitors, r.id
        assert r.target is None and r.scenario is None, r.id
        assert r.note, r.id


def test_targets_resolve_to_catalog_entries():
    catalog_ids = {e["id"] for e in monitor_catalog()}
    for r in monitored_rows():
        assert r.target in catalog_ids, r.id


def test_hazard_targeted_rows():
    by_hazard = {r.id: r.target for r in monitored_rows()
                 if r.target in HAZARD_IDS}
    assert by_hazard == {
        "RL2.W2.1": "H3",
        "RL2.W2.9": "H2",
        "RL2.W4.1": "H1",
        "RL2.W5.5": "H6",
    }


def test_scenario_ids_unique():
    sids = [r.scenario for r in monitored_rows()]
    assert len(set(sids)) == len(sids)


def test_catalog_loads_as_monitor_specs():
    catalog = monitor_catalog()
    ids = [e["id"] for e in catalog]
    assert len(set(ids)) == len(ids)
    specs = load_monitor_specs(catalog)
    assert len(specs) == len(catalog)


def test_hazard_monitors_are_unscoped_rows_are_scoped():
    hazard_entries = hazard_monitor_entries()
    assert [e["id"] for e in hazard_entries] == list(HAZARD_IDS)
    for e in hazard_entries:
        assert e["severity"] == "hazard"
        assert not e["params"].get("scoped", False), e["id"]
    for r in monitored_rows():
        for m in r.monitors:
            assert m["severity"] == "requirement", m["id"]
            assert m["params"].get("scoped", False), m["id"]


def test_channels_are_unique_and_cover_the_monitors():
    assert len(set(CHANNELS)) == len(CHANNELS) == 15
    for e in monitor_catalog():
        p = e["params"]
        for key in ("when", "trigger", "response"):
            if key in p and isinstance(p[key], dict) and "channel" in p[key]:
                assert p[key]["channel"] in CHANNELS, e["id"]
        for ch in p.get("channels", ()):
            assert ch in CHANNELS, e["id"]


def test_traceability_is_total():
    matrix = traceability()
    assert len(matrix) == len(ROWS)
    assert {m["id"] for m in matrix} == set(BY_ID)
    for m in matrix:
        assert m["class"] in ("monitored", "design-time", "out-of-scope")
        if m["class"] == "monitored":
            assert m["target_monitor"] and m["scenario"]
        else:
            assert not m["target_monitor"] and not m["scenario"]


def test_require_known_mitigations():
    require_known_mitigations(MITIGATION_IDS)
    with pytest.raises(ConfigError):
        require_known_mitigations(["RL2.W99.1"])
    with pytest.raises(ConfigError):
        require_known_mitigations(["RL2.W2.5"])  # design-time, cannot toggle


def sample_report():
    return PositionReport(
        lead_state=make_state(north=500.0),
        test_point_id="TP-07",
        commanded_rejoin_point=Vec3(-250.0, 120.0, 0.0),
        invalid=False,
        invalid_details=(),
        report_timestamp=FrameStamp.at(0, 0.02),
    )


def test_report_field_rows_map_to_real_operations():
    assert set(REPORT_FIELD_ROWS) == {f"RL1.5.{n}" for n in range(11, 36)}
    report = sample_report()
    # a suppressed defect declaration only shows on a report that has one
    flagged = report.__class__(**{**report.__dict__, "invalid": True,
                                  "invalid_details": (("position", "x"),)})
    for rid, (fname, mode, value) in REPORT_FIELD_ROWS.items():
        assert BY_ID[rid].klass == "monitored", rid
        if mode == "corrupt":
            mutated = perturb_field(report, fname, value, dt=0.02)
            assert mutated != report, rid
        else:
            assert mode == "blank", rid
            base = flagged if fname == "invalid" else report
            mutated = blank_field(base, fname)
            assert mutated != base, rid
            if fname == "invalid":
                assert not mutated.invalid and mutated.invalid_details
