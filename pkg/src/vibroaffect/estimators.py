"""Affect estimators: an offline lexicon backend and a remote chat-completion backend.

The lexicon backend is deterministic and needs no network, so tests and
headless runs never leave the process. The remote backend speaks the usual
chat-completions JSON over HTTPS and retries on both transport and parse
failures with a fresh, identical request each time.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping

import httpx

from .affect import (
    AffectScore,
    build_prompt,
    default_prompt_spec,
    load_prompt_template,
    parse_affect_response,
)
from .errors import (
    ConfigurationError,
    EstimationError,
    InputError,
    ParseError,
    TransportError,
)

API_KEY_ENV = "AFFECT_API_KEY"

# A transport takes the chat-completion request body and returns the decoded
# response body. Injectable so tests can stub the network away.
Transport = Callable[[dict], dict]


class Backend(str, Enum):
    LEXICON = "lexicon"
    REMOTE_LLM = "remote-llm"


@dataclass
class EstimatorConfig:
    backend: Backend = Backend.LEXICON
    model_name: str = "gpt-4o-mini"
    endpoint_url: str = "https://api.openai.com/v1/chat/completions"
    max_retries: int = 2
    timeout_s: float = 30.0
    lexicon_path: Path | None = None
    prompt_template_path: Path | None = None

    def __post_init__(self):
        self.backend = Backend(self.backend)
        if self.max_retries < 0:
            raise ConfigurationError("max_retries must be >= 0")
        if not self.timeout_s > 0:
            raise ConfigurationError("timeout must be > 0")


# ---------------------------------------------------------------------------
# Lexicon backend

@dataclass(frozen=True)
class Lexicon:
    version: str
    scale: float
    weights: Mapping[str, tuple[float, float]]  # token -> (valence, arousal)


_WORD_RE = re.compile(r"[a-z]+(?:'[a-z]+)?")
_CJK_RE = re.compile(r"[぀-ヿ㐀-䶿一-鿿]")


def load_lexicon(path: str | Path) -> Lexicon:
    """Parse a TSV lexicon file; header comments carry version and logistic scale."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read lexicon {path}: {exc}") from exc
    return _parse_lexicon(text, source=str(path))


def _parse_lexicon(text: str, source: str) -> Lexicon:
    version = None
    scale = None
    weights: dict[str, tuple[float, float]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            m = re.search(r"version\s*:?\s*(\S+)", body, re.IGNORECASE)
            if m and version is None:
                version = m.group(1).rstrip(",.")
            m = re.search(r"scale\s*:?\s*([0-9.]+)", body, re.IGNORECASE)
            if m and scale is None:
                scale = float(m.group(1))
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ConfigurationError(f"{source}:{lineno}: expected 3 tab-separated fields")
        token = parts[0].strip()
        try:
            valence_w, arousal_w = float(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ConfigurationError(f"{source}:{lineno}: non-numeric weight") from exc
        if not token:
            raise ConfigurationError(f"{source}:{lineno}: empty token")
        weights[token.lower()] = (valence_w, arousal_w)
    if version is None:
        raise ConfigurationError(f"{source}: header lacks a version string")
    if scale is None or not scale > 0:
        raise ConfigurationError(f"{source}: header lacks a positive logistic scale")
    return Lexicon(version=version, scale=scale, weights=weights)


@lru_cache(maxsize=1)
def default_lexicon() -> Lexicon:
    text = resources.files("vibroaffect.data").joinpath("lexicon.tsv").read_text("utf-8")
    return _parse_lexicon(text, source="vibroaffect/data/lexicon.tsv")


def _logistic_percent(weight_sum: float, scale: float) -> float:
    # Saturate early: beyond +/-60 the logistic is 0/100 to double precision.
    z = max(-60.0, min(60.0, weight_sum / scale))
    return 100.0 / (1.0 + math.exp(-z))


def lexicon_estimate(text: str, lexicon: Lexicon | None = None) -> AffectScore:
    """Deterministic offline estimate from summed lexicon weights.

    Latin tokens are matched as whole words; CJK lexicon entries are counted
    as substrings since Japanese text carries no word boundaries. Unknown
    tokens contribute nothing, so a no-hit utterance lands on the neutral
    midpoint (50/50 on both axes).
    """
    if not text.strip():
        raise InputError("utterance is empty")
    lex = lexicon if lexicon is not None else default_lexicon()
    lowered = text.lower()
    valence_sum = 0.0
    arousal_sum = 0.0
    words = _WORD_RE.findall(lowered)
    for token, (vw, aw) in lex.weights.items():
        if _CJK_RE.search(token):
            hits = lowered.count(token)
        else:
            hits = sum(1 for w in words if w == token)
        if hits:
            valence_sum += vw * hits
            arousal_sum += aw * hits
    pleasure = _logistic_percent(valence_sum, lex.scale)
    arousal = _logistic_percent(arousal_sum, lex.scale)
    return AffectScore.from_valence_arousal(pleasure, arousal)


# ---------------------------------------------------------------------------
# Remote chat-completion backend

def build_chat_payload(prompt: str, utterance: str, model_name: str) -> dict:
    # temperature 0 keeps repeat estimates as stable as the provider allows
    return {
        "model": model_name,
        "temperature": 0,
        "messages": [
            {"role": "system", "content": prompt},
            {"role": "user", "content": utterance},
        ],
    }


def extract_reply_text(response_body: dict) -> str:
    try:
        content = response_body["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise TransportError(f"chat response missing choices[0].message.content: {exc}") from exc
    if not isinstance(content, str):
        raise TransportError("chat response content is not text")
    return content


def http_transport(config: EstimatorConfig) -> Transport:
    """Real HTTPS transport. The API key comes from the environment and is
    passed only in the Authorization header, never logged or echoed."""

    def send(payload: dict) -> dict:
        api_key = os.environ.get(API_KEY_ENV, "")
        if not api_key:
            raise TransportError(f"environment variable {API_KEY_ENV} is not set")
        headers = {"Authorization": f"Bearer {api_key}"}
        try:
            resp = httpx.post(
                config.endpoint_url, json=payload, headers=headers, timeout=config.timeout_s
            )
            resp.raise_for_status()
            return resp.json()
        except httpx.HTTPError as exc:
            raise TransportError(f"chat endpoint request failed: {exc}") from exc
        except ValueError as exc:
            raise TransportError(f"chat endpoint returned non-JSON body: {exc}") from exc

    return send


def estimate_affect(
    text: str,
    config: EstimatorConfig | None = None,
    *,
    transport: Transport | None = None,
    lexicon: Lexicon | None = None,
    prompt: str | None = None,
) -> AffectScore:
    """Estimate circumplex percentages for an utterance.

    The lexicon backend never touches ``transport``. The remote backend sends
    prompt + utterance, parses the reply, and retries up to
    ``config.max_retries`` extra times on transport or parse failure before
    raising an EstimationError that names the last failure cause.
    """
    if not text.strip():
        raise InputError("utterance is empty")
    config = config or EstimatorConfig()

    if config.backend is Backend.LEXICON:
        if lexicon is None and config.lexicon_path is not None:
            lexicon = load_lexicon(config.lexicon_path)
        return lexicon_estimate(text, lexicon)

    if prompt is None:
        spec = (
            load_prompt_template(config.prompt_template_path)
            if config.prompt_template_path is not None
            else default_prompt_spec()
        )
        prompt = build_prompt(spec)
    send = transport if transport is not None else http_transport(config)
    payload = build_chat_payload(prompt, text, config.model_name)

    attempts = config.max_retries + 1
    last_exc: Exception | None = None
    for _ in range(attempts):
        try:
            reply = extract_reply_text(send(payload))
            return parse_affect_response(reply)
        except (TransportError, ParseError) as exc:
            last_exc = exc
    cause = "parse" if isinstance(last_exc, ParseError) else "transport"
    raise EstimationError(
        f"estimation failed after {attempts} attempts: {last_exc}",
        cause=cause,
        attempts=attempts,
    ) from last_exc
