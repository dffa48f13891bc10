"""CLI adapters: speak, demo, session run --simulate, serve."""

import json
import subprocess
import sys
import time
import wave

import httpx
import pytest

from vibroaffect.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSpeak:
    def test_writes_wav(self, tmp_path, capsys):
        out = tmp_path / "o.wav"
        code, stdout, _ = run_cli(
            capsys, "speak", "Every day is just so much fun!", "--estimator", "lexicon",
            "--wav", str(out),
        )
        assert code == 0
        assert out.exists()
        with wave.open(str(out), "rb") as w:
            assert w.getnframes() == 22050  # 0.5 s of latin text at 44.1 kHz
        info = json.loads(stdout.splitlines()[0])
        assert info["affect"]["pleasure"] > 50

    def test_empty_text_exit_2(self, capsys):
        code, _, stderr = run_cli(capsys, "speak", "")
        assert code == 2
        diag = json.loads(stderr.strip())
        assert diag["error"] == "input"

    def test_play_on_null_device(self, tmp_path, capsys):
        code, stdout, _ = run_cli(capsys, "speak", "hi there", "--play")
        assert code == 0
        lines = [json.loads(line) for line in stdout.splitlines()]
        assert lines[1]["playback"]["simulated"] is True

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text('[audio]\nsample_rate = 48000\n', encoding="utf-8")
        out = tmp_path / "o.wav"
        code, _, _ = run_cli(capsys, "--config", str(cfg), "speak", "hello", "--wav", str(out))
        assert code == 0
        with wave.open(str(out), "rb") as w:
            assert w.getframerate() == 48000

    def test_bad_config_exit_3(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text("[audio]\nvolume = 11\n", encoding="utf-8")
        code, _, stderr = run_cli(capsys, "--config", str(cfg), "speak", "hello")
        assert code == 3
        assert json.loads(stderr.strip())["error"] == "configuration"


class TestDemo:
    def test_stock_phrases(self, capsys):
        code, stdout, _ = run_cli(capsys, "demo")
        assert code == 0
        lines = stdout.strip().splitlines()
        assert len(lines) == 11  # header + ten phrases

    def test_out_dir(self, tmp_path, capsys):
        code, _, _ = run_cli(capsys, "demo", "--out-dir", str(tmp_path / "wavs"))
        assert code == 0
        assert len(list((tmp_path / "wavs").glob("*.wav"))) == 10

    def test_custom_phrase_file(self, tmp_path, capsys):
        phrases = tmp_path / "p.json"
        phrases.write_text(json.dumps([{"id": 1, "text": "so much fun"}]), encoding="utf-8")
        code, stdout, _ = run_cli(capsys, "demo", "--phrases", str(phrases))
        assert code == 0
        assert len(stdout.strip().splitlines()) == 2


class TestSessionRun:
    def test_simulate(self, tmp_path, capsys):
        log = tmp_path / "log.jsonl"
        summary = tmp_path / "summary.csv"
        code, stdout, _ = run_cli(
            capsys, "session", "run", "--participant", "0", "--seed", "7",
            "--simulate", "--log", str(log), "--summary", str(summary),
        )
        assert code == 0
        info = json.loads(stdout.strip())
        assert info["trials"] == 20
        assert info["ios_records"] == 2
        assert log.exists() and summary.exists()
        from vibroaffect import SessionLog

        trials, ios = SessionLog.load(log)
        assert len(trials) == 20 and len(ios) == 2


class TestServe:
    def test_ephemeral_port_binds_and_serves(self):
        proc = subprocess.Popen(
            [sys.executable, "-m", "vibroaffect.cli", "serve", "--port", "0"],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
        )
        try:
            line = proc.stdout.readline()
            info = json.loads(line)
            address = info["listening"]
            assert address.startswith("http://127.0.0.1:")
            deadline = time.monotonic() + 10
            last_error = None
            while time.monotonic() < deadline:
                try:
                    resp = httpx.get(f"{address}/health", timeout=1.0)
                    assert resp.json()["status"] == "ok"
                    break
                except httpx.HTTPError as exc:
                    last_error = exc
                    time.sleep(0.1)
            else:
                pytest.fail(f"service never came up: {last_error}")
        finally:
            proc.terminate()
            proc.wait(timeout=10)
