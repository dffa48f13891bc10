"""Affect-to-vibration mapping.

Valence scales linearly onto tone frequency (unpleasant 60 Hz up to pleasant
500 Hz), arousal onto 16-bit peak amplitude (8000 up to 32767), and stimulus
duration grows with the kana/kanji composition of the utterance on top of a
0.5 s base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .affect import AffectScore
from .errors import InputError

FREQ_MIN_HZ = 60.0
FREQ_MAX_HZ = 500.0
AMP_MIN = 8000
AMP_MAX = 32767
BASE_DURATION_S = 0.5
KANA_SECONDS = 0.1   # per hiragana or katakana character
KANJI_SECONDS = 0.2  # per kanji character


@dataclass(frozen=True)
class VibrationParams:
    """One stimulus: sine frequency in Hz, 16-bit peak amplitude, duration in seconds."""

    frequency_hz: float
    amplitude: int
    duration_s: float

    def __post_init__(self):
        if not (FREQ_MIN_HZ <= self.frequency_hz <= FREQ_MAX_HZ):
            raise InputError(f"frequency {self.frequency_hz} outside [{FREQ_MIN_HZ}, {FREQ_MAX_HZ}] Hz")
        if not (AMP_MIN <= self.amplitude <= AMP_MAX):
            raise InputError(f"amplitude {self.amplitude} outside [{AMP_MIN}, {AMP_MAX}]")
        if not self.duration_s >= BASE_DURATION_S:
            raise InputError(f"duration {self.duration_s} below base {BASE_DURATION_S} s")

    def as_dict(self) -> dict:
        return {
            "frequency_hz": self.frequency_hz,
            "amplitude": self.amplitude,
            "duration_s": self.duration_s,
        }


class CharClass(Enum):
    HIRAGANA = "hiragana"
    KATAKANA = "katakana"
    KANJI = "kanji"
    OTHER = "other"


def _clamp_percent(value: float, name: str) -> float:
    if not math.isfinite(value):
        raise InputError(f"{name} must be finite, got {value!r}")
    return min(100.0, max(0.0, value))


def valence_to_frequency(valence: float) -> float:
    """Linear map of a 0-100 valence percentage onto 60-500 Hz."""
    v = _clamp_percent(valence, "valence")
    return FREQ_MIN_HZ + v * (FREQ_MAX_HZ - FREQ_MIN_HZ) / 100.0


def arousal_to_amplitude(arousal: float) -> int:
    """Linear map of a 0-100 arousal percentage onto the 8000-32767 peak range.

    Rounds half up so the integer result is deterministic at exact midpoints.
    """
    a = _clamp_percent(arousal, "arousal")
    raw = AMP_MIN + a * (AMP_MAX - AMP_MIN) / 100.0
    return min(AMP_MAX, int(math.floor(raw + 0.5)))


def classify_char(char: str) -> CharClass:
    """Classify one Unicode character; total over all scalar values."""
    if len(char) != 1:
        raise InputError(f"expected a single character, got {char!r}")
    cp = ord(char)
    if 0x3041 <= cp <= 0x3096 or 0x309D <= cp <= 0x309F:
        return CharClass.HIRAGANA
    if 0x30A1 <= cp <= 0x30FA or 0x30FC <= cp <= 0x30FE:
        return CharClass.KATAKANA
    if 0x4E00 <= cp <= 0x9FFF or 0x3400 <= cp <= 0x4DBF:
        return CharClass.KANJI
    return CharClass.OTHER


def compute_duration(text: str) -> float:
    """Stimulus seconds: 0.5 base, +0.1 per kana, +0.2 per kanji.

    Katakana is weighted like hiragana; Latin letters, digits, punctuation,
    and whitespace add nothing.
    """
    # Tally in integer tenths of a second so decimal steps stay exact.
    tenths = 5
    for char in text:
        cls = classify_char(char)
        if cls is CharClass.KANJI:
            tenths += 2
        elif cls is not CharClass.OTHER:
            tenths += 1
    return tenths / 10.0


def map_affect(score: AffectScore, text: str) -> VibrationParams:
    """Compose the three maps into the stimulus parameters for one utterance."""
    return VibrationParams(
        frequency_hz=valence_to_frequency(score.pleasure),
        amplitude=arousal_to_amplitude(score.arousal),
        duration_s=compute_duration(text),
    )
