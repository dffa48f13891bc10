"""HTTP facade: stimulus rendering for robot controllers plus session endpoints for the UI.

POST /speak runs estimate -> map -> synthesize. With ``render=play`` the
stimulus waits in the device queue until POST /speak/{id}/start fires its
start signal (the call a controller makes at speech onset). Session endpoints
expose the server-authoritative experiment state machine.
"""

from __future__ import annotations

import base64
import time
import uuid
from dataclasses import replace
from typing import Literal

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import AppConfig
from .errors import (
    ConfigurationError,
    DeviceError,
    EstimationError,
    InputError,
    StateError,
)
from .estimators import Backend, estimate_affect
from .pipeline import Pipeline
from .playback import Player, open_backend
from .session import (
    SessionLog,
    SessionRunner,
    default_phrases,
    load_phrases,
    plan_session,
)
from .synthesis import EnvelopeSpec, WaveBuffer, wav_bytes

PLAYBACK_EXPIRY_S = 60.0


class UnknownSessionError(Exception):
    pass


class SpeakRequest(BaseModel):
    text: str
    estimator: str | None = None  # "lexicon" or "llm"; default from app config
    render: Literal["play", "wav", "both"] = "wav"


class SamRequest(BaseModel):
    valence: int
    arousal: int
    nonce: str | None = None


class IosRequest(BaseModel):
    ios: int
    nonce: str | None = None


class SessionCreateRequest(BaseModel):
    participant_index: int = 0
    seed: int = 0
    participant_id: str | None = None
    phrases_path: str | None = None
    log_path: str | None = None


def _encode_wav(buf: WaveBuffer) -> str:
    return base64.b64encode(wav_bytes(buf)).decode("ascii")


def create_app(
    config: AppConfig | None = None,
    *,
    pipeline: Pipeline | None = None,
    player: Player | None = None,
) -> FastAPI:
    config = config or AppConfig()
    app = FastAPI(title="vibroaffect", docs_url=None, redoc_url=None)

    if pipeline is None:
        pipeline = Pipeline(
            estimator=config.estimator,
            sample_rate=config.sample_rate,
            envelope=EnvelopeSpec(config.fade_in_ms, config.fade_out_ms),
        )
    device_error: str | None = None
    if player is None:
        try:
            player = Player(open_backend(config.device), signal_timeout_s=PLAYBACK_EXPIRY_S)
        except DeviceError as exc:
            player = None
            device_error = str(exc)

    app.state.config = config
    app.state.pipeline = pipeline
    app.state.player = player
    app.state.device_error = device_error
    app.state.playbacks = {}       # playback id -> (QueuedPlayback, created monotonic)
    app.state.sessions = {}        # session id -> SessionRunner

    # -- error mapping ------------------------------------------------------

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "input", "message": str(exc)})

    @app.exception_handler(InputError)
    async def _input(request: Request, exc: InputError):
        return JSONResponse(status_code=400, content={"error": "input", "message": str(exc)})

    @app.exception_handler(ConfigurationError)
    async def _config(request: Request, exc: ConfigurationError):
        return JSONResponse(status_code=400, content={"error": "configuration", "message": str(exc)})

    @app.exception_handler(EstimationError)
    async def _estimation(request: Request, exc: EstimationError):
        return JSONResponse(
            status_code=502,
            content={"error": "estimation", "cause": exc.cause, "attempts": exc.attempts,
                     "message": str(exc)},
        )

    @app.exception_handler(DeviceError)
    async def _device(request: Request, exc: DeviceError):
        return JSONResponse(status_code=503, content={"error": "device", "message": str(exc)})

    @app.exception_handler(StateError)
    async def _state(request: Request, exc: StateError):
        return JSONResponse(status_code=409, content={"error": "state", "message": str(exc)})

    # -- core endpoints ------------------------------------------------------

    @app.get("/health")
    def health():
        return {"status": "ok"}

    def _prune_playbacks() -> None:
        now = time.monotonic()
        stale = [
            pid
            for pid, (item, created) in app.state.playbacks.items()
            if now - created > PLAYBACK_EXPIRY_S and not item.start_signal.fired
        ]
        for pid in stale:
            del app.state.playbacks[pid]

    @app.post("/speak")
    def speak(req: SpeakRequest):
        text = req.text
        if not text.strip():
            raise InputError("text is empty")

        if req.estimator is None:
            affect = pipeline.estimate(text)
        else:
            name = {"llm": Backend.REMOTE_LLM, "remote-llm": Backend.REMOTE_LLM,
                    "lexicon": Backend.LEXICON}.get(req.estimator)
            if name is None:
                raise InputError(f"unknown estimator {req.estimator!r}")
            override = replace(pipeline.estimator, backend=name)
            affect = estimate_affect(
                text, override, transport=pipeline._transport, lexicon=pipeline._lexicon
            )
        result = pipeline.render_from_affect(affect, text)

        playback_id = None
        if req.render in ("play", "both"):
            if app.state.player is None:
                raise DeviceError(app.state.device_error or "audio device unavailable")
            _prune_playbacks()
            queued = app.state.player.enqueue(result.buffer)
            playback_id = queued.id
            app.state.playbacks[playback_id] = (queued, time.monotonic())

        wav = _encode_wav(result.buffer) if req.render in ("wav", "both") else None
        return {
            "affect": result.affect.as_dict(),
            "params": result.params.as_dict(),
            "wav": wav,
            "playback_id": playback_id,
            "timing": {
                "duration_s": result.params.duration_s,
                "synthesized_at": result.synthesized_at.isoformat(),
            },
        }

    @app.post("/speak/{playback_id}/start")
    def start_playback(playback_id: str):
        entry = app.state.playbacks.get(playback_id)
        if entry is None:
            return JSONResponse(status_code=404, content={"error": "not-found",
                                                          "message": "unknown playback id"})
        item, created = entry
        if time.monotonic() - created > PLAYBACK_EXPIRY_S and not item.start_signal.fired:
            del app.state.playbacks[playback_id]
            return JSONResponse(status_code=404, content={"error": "not-found",
                                                          "message": "playback id expired"})
        item.start()  # idempotent; a second call is a no-op
        return Response(status_code=204)

    # -- session endpoints ----------------------------------------------------

    @app.post("/session")
    def create_session(req: SessionCreateRequest):
        if req.phrases_path is not None:
            phrases = load_phrases(req.phrases_path)
        elif config.phrases_path is not None:
            phrases = load_phrases(config.phrases_path)
        else:
            phrases = default_phrases()
        plan = plan_session(req.participant_index, phrases, req.seed, req.participant_id)
        for runner in app.state.sessions.values():
            if runner.plan.participant_id == plan.participant_id and not runner.done:
                raise StateError(
                    f"participant {plan.participant_id!r} already has an active session"
                )
        log = SessionLog(req.log_path) if req.log_path else None
        runner = SessionRunner(plan, phrases, pipeline, log=log, player=app.state.player)
        session_id = uuid.uuid4().hex
        app.state.sessions[session_id] = runner
        return {"session_id": session_id, "state": runner.state()}

    def _runner(session_id: str) -> SessionRunner:
        runner = app.state.sessions.get(session_id)
        if runner is None:
            raise UnknownSessionError(session_id)
        return runner

    @app.exception_handler(UnknownSessionError)
    async def _not_found(request: Request, exc: UnknownSessionError):
        return JSONResponse(status_code=404, content={"error": "not-found",
                                                      "message": f"unknown session {exc}"})

    @app.get("/session/{session_id}/state")
    def session_state(session_id: str):
        return _runner(session_id).state()

    @app.post("/session/{session_id}/advance")
    def session_advance(session_id: str):
        return _runner(session_id).advance()

    @app.post("/session/{session_id}/sam")
    def session_sam(session_id: str, req: SamRequest):
        return _runner(session_id).submit_sam(req.valence, req.arousal, nonce=req.nonce)

    @app.post("/session/{session_id}/ios")
    def session_ios(session_id: str, req: IosRequest):
        return _runner(session_id).submit_ios(req.ios, nonce=req.nonce)

    if config.ui_dir is not None and config.ui_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
