#!/usr/bin/env python3
"""Round-trip through the real HTTP service on an ephemeral port.

Starts the service in a background thread (null audio device), posts a
/speak request, decodes the returned WAV, queues a playback, and fires its
start signal the way a robot controller would at speech onset.
"""

import base64
import io
import socket
import threading
import wave

import httpx
import uvicorn

from vibroaffect.config import AppConfig
from vibroaffect.service import create_app


def main():
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.bind(("127.0.0.1", 0))
    sock.listen(16)
    host, port = sock.getsockname()
    base = f"http://{host}:{port}"

    app = create_app(AppConfig())
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    thread = threading.Thread(target=server.run, kwargs={"sockets": [sock]}, daemon=True)
    thread.start()

    with httpx.Client(base_url=base, timeout=10.0) as client:
        while True:
            try:
                if client.get("/health").status_code == 200:
                    break
            except httpx.HTTPError:
                pass

        resp = client.post(
            "/speak",
            json={"text": "I'm happy you're listening to me.",
                  "estimator": "lexicon", "render": "both"},
        )
        body = resp.json()
        print("affect:", body["affect"])
        print("params:", body["params"])

        with wave.open(io.BytesIO(base64.b64decode(body["wav"])), "rb") as w:
            print(f"wav: {w.getnframes()} frames at {w.getframerate()} Hz")

        playback_id = body["playback_id"]
        started = client.post(f"/speak/{playback_id}/start")
        print(f"start signal for {playback_id[:8]}...: HTTP {started.status_code}")

    server.should_exit = True
    thread.join(timeout=5)
    print("done")


if __name__ == "__main__":
    main()
