"""Command-line entry points: speak, serve, session run, demo.

Errors print one machine-readable JSON diagnostic line to stderr and map to
stable exit codes (2 input, 3 configuration, 4 estimation, 5 device).
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from dataclasses import replace
from pathlib import Path

from .config import AppConfig, load_config
from .errors import (
    ConfigurationError,
    DeviceError,
    EstimationError,
    InputError,
    VibroAffectError,
)
from .estimators import Backend
from .pipeline import Pipeline
from .playback import Player, open_backend
from .session import (
    SessionLog,
    default_phrases,
    export_summary_csv,
    load_phrases,
    plan_session,
    run_scripted_session,
    summarize,
)
from .synthesis import EnvelopeSpec, write_wav

EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_ESTIMATION = 4
EXIT_DEVICE = 5


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def _pipeline_from(config: AppConfig, estimator_name: str | None) -> Pipeline:
    est = config.estimator
    if estimator_name is not None:
        backend = Backend.REMOTE_LLM if estimator_name == "llm" else Backend.LEXICON
        est = replace(est, backend=backend)
    return Pipeline(
        estimator=est,
        sample_rate=config.sample_rate,
        envelope=EnvelopeSpec(config.fade_in_ms, config.fade_out_ms),
    )


def _cmd_speak(args) -> int:
    config = load_config(args.config)
    pipeline = _pipeline_from(config, args.estimator)
    result = pipeline.render(args.text)
    print(
        json.dumps(
            {
                "affect": result.affect.as_dict(),
                "params": result.params.as_dict(),
                "samples": len(result.buffer),
                "sample_rate": result.buffer.sample_rate,
            }
        )
    )
    if args.wav:
        write_wav(result.buffer, args.wav)
    if args.play:
        player = Player(open_backend(config.device))
        report = player.play_now(result.buffer)
        player.close()
        print(json.dumps({"playback": {"offset_s": report.start_offset_s,
                                       "simulated": report.simulated}}))
    return 0


def _bind_socket(host: str, port: int) -> socket.socket:
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((host, port))
    sock.listen(128)
    return sock


def _serve(app, host: str, port: int) -> int:
    import uvicorn

    sock = _bind_socket(host, port)
    bound_host, bound_port = sock.getsockname()
    print(json.dumps({"listening": f"http://{bound_host}:{bound_port}"}), flush=True)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])
    return 0


def _cmd_serve(args) -> int:
    from .service import create_app

    config = load_config(args.config)
    return _serve(create_app(config), args.host, args.port)


def _cmd_session_run(args) -> int:
    config = load_config(args.config)
    phrases = load_phrases(args.phrases) if args.phrases else (
        load_phrases(config.phrases_path) if config.phrases_path else default_phrases()
    )
    plan = plan_session(args.participant, phrases, args.seed)
    log = SessionLog(args.log) if args.log else None
    pipeline = _pipeline_from(config, None)

    if args.simulate:
        player = Player(open_backend(config.device))
        runner = run_scripted_session(plan, phrases, pipeline, log=log, player=player)
        player.close()
        report = summarize(runner.trials, runner.ios_records)
        if args.summary:
            export_summary_csv(report, args.summary)
        print(
            json.dumps(
                {
                    "participant_id": plan.participant_id,
                    "trials": len(runner.trials),
                    "ios_records": len(runner.ios_records),
                    "conditions": {
                        c: {"valence_mean": s.valence_mean, "arousal_mean": s.arousal_mean}
                        for c, s in report.conditions.items()
                    },
                }
            )
        )
        return 0

    from .service import create_app
    from .session import SessionRunner
    import uuid

    app = create_app(config)
    runner = SessionRunner(plan, phrases, app.state.pipeline, log=log, player=app.state.player)
    session_id = uuid.uuid4().hex
    app.state.sessions[session_id] = runner
    print(json.dumps({"session_id": session_id, "participant_id": plan.participant_id}), flush=True)
    return _serve(app, args.host, args.port)


def _cmd_demo(args) -> int:
    config = load_config(args.config)
    phrases = load_phrases(args.phrases) if args.phrases else default_phrases()
    pipeline = _pipeline_from(config, "lexicon")
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    print(f"{'id':>3}  {'freq Hz':>8}  {'amp':>6}  {'dur s':>6}  "
          f"{'pleasure':>8}  {'arousal':>7}  text")
    for phrase in phrases:
        result = pipeline.render(phrase.text)
        print(
            f"{phrase.id:>3}  {result.params.frequency_hz:>8.1f}  {result.params.amplitude:>6}  "
            f"{result.params.duration_s:>6.2f}  {result.affect.pleasure:>8.1f}  "
            f"{result.affect.arousal:>7.1f}  {phrase.text}"
        )
        if out_dir:
            write_wav(result.buffer, out_dir / f"phrase_{phrase.id:02d}.wav")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vibroaffect")
    parser.add_argument("--config", type=Path, default=None, help="TOML config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p_speak = sub.add_parser("speak", help="render one utterance to a stimulus")
    p_speak.add_argument("text")
    p_speak.add_argument("--estimator", choices=["lexicon", "llm"], default=None)
    p_speak.add_argument("--wav", type=Path, default=None, help="write the stimulus WAV here")
    p_speak.add_argument("--play", action="store_true", help="play on the configured device")
    p_speak.set_defaults(func=_cmd_speak)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8077)
    p_serve.set_defaults(func=_cmd_serve)

    p_session = sub.add_parser("session", help="experiment session commands")
    session_sub = p_session.add_subparsers(dest="session_command", required=True)
    p_run = session_sub.add_parser("run", help="plan a session and serve the experiment UI")
    p_run.add_argument("--participant", type=int, required=True)
    p_run.add_argument("--phrases", type=Path, default=None)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--log", type=Path, default=None, help="JSONL session log path")
    p_run.add_argument("--summary", type=Path, default=None, help="summary CSV path (simulate)")
    p_run.add_argument("--simulate", action="store_true",
                       help="run scripted ratings offline instead of serving")
    p_run.add_argument("--host", default="127.0.0.1")
    p_run.add_argument("--port", type=int, default=8077)
    p_run.set_defaults(func=_cmd_session_run)

    p_demo = sub.add_parser("demo", help="render every phrase with the offline estimator")
    p_demo.add_argument("--phrases", type=Path, default=None)
    p_demo.add_argument("--out-dir", type=Path, default=None)
    p_demo.set_defaults(func=_cmd_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        return _fail("input", str(exc), EXIT_INPUT)
    except ConfigurationError as exc:
        return _fail("configuration", str(exc), EXIT_CONFIG)
    except EstimationError as exc:
        return _fail("estimation", str(exc), EXIT_ESTIMATION)
    except DeviceError as exc:
        return _fail("device", str(exc), EXIT_DEVICE)
    except VibroAffectError as exc:
        return _fail("error", str(exc), 1)
    except OSError as exc:
        return _fail("io", str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
