"""Circumplex affect scores: the prompt that requests them and the parser that reads them.

An utterance is scored on two complementary axes, each expressed as a pair of
percentages summing to 100: pleasure/misery (valence) and arousal/sleepiness
(activation). Estimator replies arrive as a single line like
``Pleasure: 80.0%, Misery: 20.0%, Arousal: 65.5%, Sleepiness: 34.5%``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

from .errors import ConfigurationError, InputError, ParseError

AXIS_SUM_TOLERANCE = 1.0  # max drift per axis before a reply is rejected
_EXACT_TOL = 1e-6

OUTPUT_TEMPLATE = "Pleasure: XX.X%, Misery: YY.Y%, Arousal: ZZ.Z%, Sleepiness: AA.A%"


@dataclass(frozen=True)
class AffectScore:
    """Four circumplex percentages; each axis sums to 100."""

    pleasure: float
    misery: float
    arousal: float
    sleepiness: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise InputError(f"{f.name} must be finite, got {v!r}")
            if not 0.0 <= v <= 100.0:
                raise InputError(f"{f.name} must be in [0, 100], got {v}")
        if abs(self.pleasure + self.misery - 100.0) > _EXACT_TOL:
            raise InputError(
                f"pleasure + misery must equal 100, got {self.pleasure + self.misery}"
            )
        if abs(self.arousal + self.sleepiness - 100.0) > _EXACT_TOL:
            raise InputError(
                f"arousal + sleepiness must equal 100, got {self.arousal + self.sleepiness}"
            )

    @classmethod
    def neutral(cls) -> "AffectScore":
        return cls(50.0, 50.0, 50.0, 50.0)

    @classmethod
    def from_valence_arousal(cls, pleasure: float, arousal: float) -> "AffectScore":
        """Build a score from the two primary percentages; complements are derived."""
        return cls(pleasure, 100.0 - pleasure, arousal, 100.0 - arousal)

    def as_dict(self) -> dict[str, float]:
        return {
            "pleasure": self.pleasure,
            "misery": self.misery,
            "arousal": self.arousal,
            "sleepiness": self.sleepiness,
        }


def format_affect(score: AffectScore) -> str:
    """Render a score in the estimator reply format, one decimal per field."""
    return (
        f"Pleasure: {score.pleasure:.1f}%, Misery: {score.misery:.1f}%, "
        f"Arousal: {score.arousal:.1f}%, Sleepiness: {score.sleepiness:.1f}%"
    )


_LABELS = ("pleasure", "misery", "arousal", "sleepiness")
_LABEL_RES = {
    label: re.compile(
        rf"\b{label}\s*[::]\s*([-+]?\d+(?:\.\d+)?)\s*%?", re.IGNORECASE
    )
    for label in _LABELS
}


def _renormalize(a: float, b: float, axis: str, raw: str) -> tuple[float, float]:
    total = a + b
    if abs(total - 100.0) > AXIS_SUM_TOLERANCE:
        raise ParseError(
            f"{axis} axis sums to {total:.3f}, outside 100 +/- {AXIS_SUM_TOLERANCE}",
            raw=raw,
        )
    return a * 100.0 / total, b * 100.0 / total


def parse_affect_response(raw: str) -> AffectScore:
    """Extract the four percentages from an estimator reply.

    Surrounding prose and flexible whitespace are tolerated, but all four
    labels must be present with numeric values in [0, 100]. An axis summing
    to 100 +/- 1 is proportionally rescaled to exactly 100; larger drift is
    rejected rather than silently corrected.
    """
    values: dict[str, float] = {}
    for label, pattern in _LABEL_RES.items():
        m = pattern.search(raw)
        if m is None:
            raise ParseError(f"label {label!r} not found in reply", raw=raw)
        v = float(m.group(1))
        if not 0.0 <= v <= 100.0:
            raise ParseError(f"{label} value {v} outside [0, 100]", raw=raw)
        values[label] = v

    pleasure, misery = _renormalize(values["pleasure"], values["misery"], "valence", raw)
    arousal, sleepiness = _renormalize(values["arousal"], values["sleepiness"], "activation", raw)
    return AffectScore(pleasure, misery, arousal, sleepiness)


@dataclass(frozen=True)
class PromptSpec:
    """The six sections of the estimation prompt, concatenated in order."""

    objective: str
    model_explanation: str
    procedure_criteria: str
    output_format: str
    considerations: str
    language_note: str


_SECTION_ORDER = (
    "objective",
    "model_explanation",
    "procedure_criteria",
    "output_format",
    "considerations",
    "language_note",
)


def build_prompt(spec: PromptSpec) -> str:
    """Concatenate the prompt sections into the system message text."""
    parts = []
    for name in _SECTION_ORDER:
        text = getattr(spec, name).strip()
        if not text:
            raise ConfigurationError(f"prompt section {name!r} is empty")
        parts.append(text)
    return "\n\n".join(parts)


def load_prompt_template(path: str | Path) -> PromptSpec:
    """Read a prompt template file with ``[section]`` markers into a PromptSpec.

    Lines starting with ``#`` before the first marker are header comments
    (version string and the like) and are ignored.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read prompt template {path}: {exc}") from exc
    return _parse_template(text, source=str(path))


def _parse_template(text: str, source: str) -> PromptSpec:
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for line in text.splitlines():
        stripped = line.strip()
        marker = re.fullmatch(r"\[([a-z_]+)\]", stripped)
        if marker:
            name = marker.group(1)
            if name not in _SECTION_ORDER:
                raise ConfigurationError(f"{source}: unknown prompt section {name!r}")
            if name in sections:
                raise ConfigurationError(f"{source}: duplicate prompt section {name!r}")
            sections[name] = []
            current = name
            continue
        if current is None:
            if stripped and not stripped.startswith("#"):
                raise ConfigurationError(f"{source}: text before first section marker")
            continue
        sections[current].append(line)
    missing = [name for name in _SECTION_ORDER if name not in sections]
    if missing:
        raise ConfigurationError(f"{source}: missing prompt sections {missing}")
    cleaned = {name: "\n".join(lines).strip() for name, lines in sections.items()}
    for name, body in cleaned.items():
        if not body:
            raise ConfigurationError(f"{source}: prompt section {name!r} is empty")
    return PromptSpec(**cleaned)


def default_prompt_spec() -> PromptSpec:
    """The prompt template shipped with the package."""
    text = resources.files("vibroaffect.data").joinpath("prompt_template.txt").read_text("utf-8")
    return _parse_template(text, source="vibroaffect/data/prompt_template.txt")
