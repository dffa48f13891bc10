"""TOML application config for the service and CLI.

Everything has a headless-safe default (null audio device, lexicon
estimator), so a missing config file means a config that runs anywhere.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigurationError
from .estimators import EstimatorConfig
from .synthesis import DEFAULT_SAMPLE_RATE, VALID_SAMPLE_RATES


@dataclass
class AppConfig:
    device: str = "null"
    sample_rate: int = DEFAULT_SAMPLE_RATE
    fade_in_ms: float = 5.0
    fade_out_ms: float = 5.0
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    phrases_path: Path | None = None
    ui_dir: Path | None = None

    def __post_init__(self):
        if self.sample_rate not in VALID_SAMPLE_RATES:
            raise ConfigurationError(
                f"sample_rate {self.sample_rate} not in {VALID_SAMPLE_RATES}"
            )


_AUDIO_KEYS = {"device", "sample_rate", "fade_in_ms", "fade_out_ms"}
_ESTIMATOR_KEYS = {"backend", "model_name", "endpoint_url", "max_retries", "timeout_s"}
_PATH_KEYS = {"prompt_template", "lexicon", "phrases", "ui_dir"}


def load_config(path: str | Path | None = None) -> AppConfig:
    """Load an AppConfig from a TOML file; None yields pure defaults."""
    if path is None:
        return AppConfig()
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid TOML: {exc}") from exc

    unknown_sections = set(doc) - {"audio", "estimator", "paths"}
    if unknown_sections:
        raise ConfigurationError(f"config {path}: unknown sections {sorted(unknown_sections)}")

    audio = doc.get("audio", {})
    estimator = doc.get("estimator", {})
    paths = doc.get("paths", {})
    for section, allowed, got in (
        ("audio", _AUDIO_KEYS, audio),
        ("estimator", _ESTIMATOR_KEYS, estimator),
        ("paths", _PATH_KEYS, paths),
    ):
        bad = set(got) - allowed
        if bad:
            raise ConfigurationError(f"config {path}: unknown [{section}] keys {sorted(bad)}")

    base = Path(path).resolve().parent

    def resolve(key: str) -> Path | None:
        value = paths.get(key)
        return (base / value).resolve() if value is not None else None

    est = EstimatorConfig(
        backend=estimator.get("backend", "lexicon"),
        model_name=estimator.get("model_name", "gpt-4o-mini"),
        endpoint_url=estimator.get("endpoint_url", EstimatorConfig().endpoint_url),
        max_retries=int(estimator.get("max_retries", 2)),
        timeout_s=float(estimator.get("timeout_s", 30.0)),
        lexicon_path=resolve("lexicon"),
        prompt_template_path=resolve("prompt_template"),
    )
    return AppConfig(
        device=str(audio.get("device", "null")),
        sample_rate=int(audio.get("sample_rate", DEFAULT_SAMPLE_RATE)),
        fade_in_ms=float(audio.get("fade_in_ms", 5.0)),
        fade_out_ms=float(audio.get("fade_out_ms", 5.0)),
        estimator=est,
        phrases_path=resolve("phrases"),
        ui_dir=resolve("ui_dir"),
    )
