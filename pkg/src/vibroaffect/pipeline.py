"""End-to-end rendering: utterance text to an enveloped PCM stimulus."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable

from .affect import AffectScore
from .estimators import EstimatorConfig, Lexicon, Transport, estimate_affect
from .mapping import VibrationParams, map_affect
from .synthesis import DEFAULT_SAMPLE_RATE, EnvelopeSpec, WaveBuffer, apply_envelope, synthesize


@dataclass(frozen=True)
class SpeakResult:
    text: str
    affect: AffectScore
    params: VibrationParams
    buffer: WaveBuffer
    synthesized_at: datetime


class Pipeline:
    """Reusable estimate -> map -> synthesize chain with injectable parts.

    ``estimate_fn`` overrides the estimator entirely (handy for stubs);
    otherwise estimation follows ``estimator`` config, with ``transport`` and
    ``lexicon`` forwarded so tests stay off the network.
    """

    def __init__(
        self,
        estimator: EstimatorConfig | None = None,
        sample_rate: int = DEFAULT_SAMPLE_RATE,
        envelope: EnvelopeSpec | None = None,
        *,
        transport: Transport | None = None,
        lexicon: Lexicon | None = None,
        prompt: str | None = None,
        estimate_fn: Callable[[str], AffectScore] | None = None,
    ):
        self.estimator = estimator or EstimatorConfig()
        self.sample_rate = sample_rate
        self.envelope = envelope if envelope is not None else EnvelopeSpec()
        self._transport = transport
        self._lexicon = lexicon
        self._prompt = prompt
        self._estimate_fn = estimate_fn

    def estimate(self, text: str) -> AffectScore:
        if self._estimate_fn is not None:
            return self._estimate_fn(text)
        return estimate_affect(
            text,
            self.estimator,
            transport=self._transport,
            lexicon=self._lexicon,
            prompt=self._prompt,
        )

    def render_from_affect(self, affect: AffectScore, text: str) -> SpeakResult:
        """Map and synthesize for an already-known affect score."""
        params = map_affect(affect, text)
        buf = apply_envelope(synthesize(params, self.sample_rate), self.envelope)
        return SpeakResult(
            text=text,
            affect=affect,
            params=params,
            buffer=buf,
            synthesized_at=datetime.now(timezone.utc),
        )

    def render(self, text: str) -> SpeakResult:
        return self.render_from_affect(self.estimate(text), text)
