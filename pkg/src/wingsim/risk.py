"""Hazard risk classification.

Severity levels follow the MIL-STD-882E mishap severity table and the
probability bands follow the NASA S3001 quantitative bands; both standards
are public. MIL-STD-882E probability is qualitative (letters A through F,
F meaning a hazard identified and later eliminated), so the letter passes
through unchanged. Risk categories come entirely from a loaded matrix
config; no cell value is hardcoded.

Band boundary semantics, documented once here: the S3001 bands are written
with strict inequalities on both sides, so a boundary value belongs to the
lower band (p = 0.8 is level 4, not 5). p = 0 sits below every band and is
reported as level 1 with a note.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .core import ConfigError

SCHEME_MIL = "mil882e"
SCHEME_NASA = "nasa_s3001"

ENVIRONMENTAL_LEVELS = ("irreversible_significant", "reversible_significant",
                        "reversible_moderate", "minimal")

SEVERITY_NAMES = {1: "catastrophic", 2: "critical", 3: "marginal", 4: "negligible"}

NASA_BAND_NAMES = {5: "near certainty", 4: "highly likely", 3: "likely",
                   2: "low likelihood", 1: "not likely"}

MIL_PROBABILITY_LETTERS = ("A", "B", "C", "D", "E", "F")

# qualitative letter meanings per MIL-STD-882E; F marks an eliminated hazard
MIL_PROBABILITY_DESCRIPTIONS = {
    "A": "Likely to occur often in the life of an item.",
    "B": "Will occur several times in the life of an item.",
    "C": "Likely to occur sometime in the life of an item.",
    "D": "Unlikely, but possible to occur in the life of an item.",
    "E": "So unlikely, it can be assumed occurrence may not be experienced "
         "in the life of an item.",
    "F": "Incapable of occurrence. This level is used when potential hazards "
         "are identified and later eliminated.",
}

NASA_PROBABILITY_LEVELS = (1, 2, 3, 4, 5)
SEVERITY_LEVELS = (1, 2, 3, 4)

NOT_LIKELY_NOTE = "p=0 is below every band; reported as level 1 (not likely)"


@dataclass(frozen=True)
class SeverityAssessment:
    death_or_total_disability: bool = False
    hospitalization_3plus: bool = False
    lost_workday: bool = False
    environmental: str = "minimal"
    monetary_loss: float = 0.0

    def __post_init__(self) -> None:
        assert self.monetary_loss >= 0.0, "monetary loss cannot be negative"
        assert self.environmental in ENVIRONMENTAL_LEVELS, \
            f"unknown environmental level {self.environmental!r}"


@dataclass(frozen=True)
class ProbabilityAssessment:
    scheme: str
    mil_level: Optional[str] = None
    nasa_probability: Optional[float] = None

    def __post_init__(self) -> None:
        assert self.scheme in (SCHEME_MIL, SCHEME_NASA), \
            f"unknown scheme {self.scheme!r}"
        if self.scheme == SCHEME_MIL:
            assert self.mil_level in MIL_PROBABILITY_LETTERS, \
                f"MIL level must be one of A..F, got {self.mil_level!r}"
            assert self.nasa_probability is None, "exactly one scheme payload"
        else:
            assert self.nasa_probability is not None, "exactly one scheme payload"
            assert self.mil_level is None, "exactly one scheme payload"
            assert 0.0 <= self.nasa_probability <= 1.0, \
                f"probability outside [0,1]: {self.nasa_probability}"


def severity_level(s: SeverityAssessment) -> int:
    """Most severe applicable row wins; monetary bands are inclusive at
    their lower edge."""
    if (s.death_or_total_disability
            or s.environmental == "irreversible_significant"
            or s.monetary_loss >= 10_000_000.0):
        return 1
    if (s.hospitalization_3plus
            or s.environmental == "reversible_significant"
            or s.monetary_loss >= 1_000_000.0):
        return 2
    if (s.lost_workday
            or s.environmental == "reversible_moderate"
            or s.monetary_loss >= 100_000.0):
        return 3
    return 4


def nasa_probability_level(p: float) -> int:
    assert 0.0 <= p <= 1.0, f"probability outside [0,1]: {p}"
    if p > 0.8:
        return 5
    if p > 0.6:
        return 4
    if p > 0.4:
        return 3
    if p > 0.2:
        return 2
    return 1


def nasa_probability_note(p: float) -> Optional[str]:
    return NOT_LIKELY_NOTE if p == 0.0 else None


def probability_level(a: ProbabilityAssessment) -> Union[int, str]:
    """NASA fractions band to 1..5; MIL letters pass through untouched."""
    if a.scheme == SCHEME_MIL:
        return a.mil_level
    return nasa_probability_level(a.nasa_probability)


# ---------------------------------------------------------------------------
# Risk matrix
# ---------------------------------------------------------------------------

def _grid_for(scheme: str) -> tuple[tuple[int, ...], tuple[str, ...]]:
    if scheme == SCHEME_MIL:
        return SEVERITY_LEVELS, MIL_PROBABILITY_LETTERS
    return SEVERITY_LEVELS, tuple(str(v) for v in NASA_PROBABILITY_LEVELS)


@dataclass(frozen=True)
class RiskMatrixConfig:
    scheme: str
    cells: dict  # (severity int, probability str) -> category string

    def category(self, sev: int, prob: Union[int, str]) -> str:
        key = (sev, str(prob))
        if key not in self.cells:
            raise ConfigError(f"no matrix cell for severity {sev}, "
                              f"probability {prob} in scheme {self.scheme}")
        return self.cells[key]


def load_risk_matrix(obj: dict) -> RiskMatrixConfig:
    """Parse and validate a matrix config: the full scheme grid must be
    covered, nothing more, nothing less."""
    scheme = obj.get("scheme")
    if scheme not in (SCHEME_MIL, SCHEME_NASA):
        raise ConfigError(f"unknown risk matrix scheme {scheme!r}")
    raw = obj.get("cells")
    if not isinstance(raw, dict):
        raise ConfigError("risk matrix needs a cells object")
    sev_levels, prob_levels = _grid_for(scheme)
    cells = {}
    for sev_key, row in raw.items():
        try:
            sev = int(sev_key)
        except ValueError:
            raise ConfigError(f"bad severity key {sev_key!r}") from None
        if sev not in sev_levels:
            raise ConfigError(f"severity {sev} outside the scheme grid")
        if not isinstance(row, dict):
            raise ConfigError(f"severity {sev} row must be an object")
        for prob_key, category in row.items():
            if prob_key not in prob_levels:
                raise ConfigError(f"probability {prob_key!r} outside the "
                                  f"{scheme} grid")
            if not isinstance(category, str) or not category:
                raise ConfigError(f"cell ({sev},{prob_key}) must be a "
                                  "non-empty string")
            cells[(sev, prob_key)] = category
    for sev in sev_levels:
        for prob in prob_levels:
            if (sev, prob) not in cells:
                raise ConfigError(f"missing matrix cell ({sev},{prob}) "
                                  f"for scheme {scheme}")
    return RiskMatrixConfig(scheme, cells)


def risk_category(sev: int, prob: Union[int, str], m: RiskMatrixConfig) -> str:
    return m.category(sev, prob)


def classify(assessment: dict, matrix: RiskMatrixConfig) -> dict:
    """End-to-end classification of one parsed assessment record; the CLI
    subcommand is a thin wrapper around this."""
    sev_fields = assessment.get("severity", {})
    if not isinstance(sev_fields, dict):
        raise ConfigError("assessment severity must be an object")
    try:
        sev = SeverityAssessment(**sev_fields)
        prob = ProbabilityAssessment(
            scheme=assessment.get("scheme", ""),
            mil_level=assessment.get("mil_level"),
            nasa_probability=assessment.get("nasa_probability"),
        )
    except (AssertionError, TypeError) as e:
        raise ConfigError(f"bad assessment record: {e}") from None
    if prob.scheme != matrix.scheme:
        raise ConfigError(f"assessment scheme {prob.scheme} does not match "
                          f"matrix scheme {matrix.scheme}")
    level = severity_level(sev)
    p_level = probability_level(prob)
    out = {
        "severity_level": level,
        "severity_name": SEVERITY_NAMES[level],
        "probability_level": p_level,
        "category": risk_category(level, p_level, matrix),
    }
    if prob.scheme == SCHEME_NASA:
        out["probability_name"] = NASA_BAND_NAMES[p_level]
        note = nasa_probability_note(prob.nasa_probability)
        if note:
            out["note"] = note
    else:
        out["probability_description"] = MIL_PROBABILITY_DESCRIPTIONS[p_level]
    return out
