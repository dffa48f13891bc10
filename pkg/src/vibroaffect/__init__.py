"""Affect-driven vibrotactile stimulus engine.

Turns utterance text into a sine-burst stimulus: valence picks the frequency
(60-500 Hz), arousal the 16-bit peak amplitude (8000-32767), and the kana and
kanji composition of the text stretches the duration beyond a 0.5 s base.
Includes an offline lexicon estimator, a remote chat-completion estimator,
PCM/WAV rendering with click-free envelopes, a start-signal playback queue,
a counterbalanced two-condition experiment runner, and an HTTP service.
"""

from .affect import (
    AffectScore,
    PromptSpec,
    build_prompt,
    default_prompt_spec,
    format_affect,
    load_prompt_template,
    parse_affect_response,
)
from .errors import (
    AliasingError,
    ConfigurationError,
    DeviceError,
    EstimationError,
    InputError,
    ParseError,
    StateError,
    TransportError,
    VibroAffectError,
)
from .estimators import (
    Backend,
    EstimatorConfig,
    Lexicon,
    default_lexicon,
    estimate_affect,
    lexicon_estimate,
    load_lexicon,
)
from .mapping import (
    CharClass,
    VibrationParams,
    arousal_to_amplitude,
    classify_char,
    compute_duration,
    map_affect,
    valence_to_frequency,
)
from .pipeline import Pipeline, SpeakResult
from .playback import (
    NullBackend,
    PlaybackReport,
    Player,
    QueuedPlayback,
    StartSignal,
    open_backend,
)
from .session import (
    IosRecord,
    Phrase,
    SessionLog,
    SessionPlan,
    SessionRunner,
    SummaryReport,
    TrialRecord,
    default_phrases,
    export_summary_csv,
    load_phrases,
    plan_session,
    record_ios,
    record_sam,
    run_scripted_session,
    run_trial,
    summarize,
)
from .synthesis import (
    EnvelopeSpec,
    WaveBuffer,
    apply_envelope,
    read_wav,
    synth_sine,
    synthesize,
    wav_bytes,
    write_wav,
)

__version__ = "0.1.0"
