"""Audio output with a start-signal contract.

A queued stimulus never begins until its start signal fires; the signal is
the integration point an external speech source (robot controller, TTS)
triggers at utterance onset. The device is an exclusive resource: one Player
owns it and drains queued playbacks strictly FIFO.

The ``null`` backend consumes buffers instantly with simulated timing so the
whole stack runs headless and deterministic in CI.
"""

from __future__ import annotations

import queue
import threading
import time
import uuid
from dataclasses import dataclass

from .errors import DeviceError
from .synthesis import WaveBuffer

DEFAULT_SIGNAL_TIMEOUT_S = 60.0


@dataclass
class PlaybackReport:
    """Outcome of one playback attempt."""

    start_offset_s: float       # signal fire -> first-sample submission
    duration_s: float
    underruns: int = 0
    simulated: bool = False
    expired: bool = False       # start signal never fired within the timeout
    error: str | None = None    # device failure during submission, if any


class StartSignal:
    """One-shot synchronization event marking external onset (e.g. speech start).

    Firing is idempotent and records the monotonic time of the first fire.
    Firing a signal nobody waits on is a harmless no-op.
    """

    def __init__(self):
        self._event = threading.Event()
        self._lock = threading.Lock()
        self.fired_at: float | None = None

    def fire(self) -> None:
        with self._lock:
            if self.fired_at is None:
                self.fired_at = time.monotonic()
        self._event.set()

    def wait(self, timeout: float | None = None) -> bool:
        return self._event.wait(timeout)

    @property
    def fired(self) -> bool:
        return self._event.is_set()


class NullBackend:
    """In-memory device for tests and headless runs; records what it played."""

    name = "null"

    def __init__(self):
        self.played: list[WaveBuffer] = []
        self.submitted_at: list[float] = []

    def play(self, buf: WaveBuffer) -> int:
        self.submitted_at.append(time.monotonic())
        self.played.append(buf)
        return 0  # a simulated device never underruns

    @property
    def simulated(self) -> bool:
        return True


class SoundDeviceBackend:
    """Real output through the ``sounddevice`` package (optional dependency)."""

    simulated = False

    def __init__(self, device: str | int | None = None):
        try:
            import sounddevice  # noqa: F401
        except Exception as exc:
            raise DeviceError(
                "sounddevice is not installed or no audio host is available"
            ) from exc
        self._sd = sounddevice
        self.device = device
        self.name = str(device) if device is not None else "default"

    def play(self, buf: WaveBuffer) -> int:
        import numpy as np

        try:
            self._sd.play(
                buf.samples.astype(np.float32) / 32768.0,
                samplerate=buf.sample_rate,
                device=self.device,
                blocking=True,
            )
        except Exception as exc:
            raise DeviceError(f"playback failed on device {self.name}: {exc}") from exc
        return 0


def open_backend(name: str = "null", device=None):
    """Resolve a backend by config name. ``null`` is reserved for tests/CI."""
    if name == "null":
        return NullBackend()
    if name in ("default", "sounddevice"):
        return SoundDeviceBackend(device)
    # any other name is treated as a sounddevice device selector
    return SoundDeviceBackend(name)


class QueuedPlayback:
    """Handle for one stimulus waiting in the player queue."""

    def __init__(self, buffer: WaveBuffer, start_signal: StartSignal | None = None):
        self.id = uuid.uuid4().hex
        self.buffer = buffer
        self.start_signal = start_signal or StartSignal()
        self.created_at = time.monotonic()
        self._done = threading.Event()
        self.report: PlaybackReport | None = None

    def start(self) -> None:
        """Fire the start signal. Idempotent."""
        self.start_signal.fire()

    def wait(self, timeout: float | None = None) -> PlaybackReport | None:
        """Block until the player has finished (or expired) this playback."""
        self._done.wait(timeout)
        return self.report

    def _finish(self, report: PlaybackReport) -> None:
        self.report = report
        self._done.set()


class Player:
    """Single owner of one audio backend; drains queued playbacks FIFO.

    Each playback waits for its own start signal before samples are
    submitted. A signal that never fires expires after ``signal_timeout_s``
    and the queue moves on, so one abandoned token cannot wedge the device.
    """

    def __init__(self, backend=None, signal_timeout_s: float = DEFAULT_SIGNAL_TIMEOUT_S):
        self.backend = backend if backend is not None else NullBackend()
        self.signal_timeout_s = signal_timeout_s
        self._queue: queue.Queue[QueuedPlayback | None] = queue.Queue()
        self._worker = threading.Thread(target=self._run, name="vibroaffect-player", daemon=True)
        self._worker.start()

    def enqueue(self, buf: WaveBuffer, start_signal: StartSignal | None = None) -> QueuedPlayback:
        item = QueuedPlayback(buf, start_signal)
        self._queue.put(item)
        return item

    def play_now(self, buf: WaveBuffer, timeout: float | None = None) -> PlaybackReport:
        """Enqueue, fire immediately, and block until played."""
        item = self.enqueue(buf)
        item.start()
        report = item.wait(timeout)
        if report is None:
            raise DeviceError("playback did not complete in time")
        return report

    def close(self) -> None:
        self._queue.put(None)
        self._worker.join(timeout=5.0)

    def _run(self) -> None:
        while True:
            item = self._queue.get()
            if item is None:
                return
            fired = item.start_signal.wait(self.signal_timeout_s)
            if not fired:
                item._finish(
                    PlaybackReport(
                        start_offset_s=float("nan"),
                        duration_s=item.buffer.duration_s,
                        simulated=getattr(self.backend, "simulated", False),
                        expired=True,
                    )
                )
                continue
            submitted = time.monotonic()
            underruns = 0
            error = None
            try:
                underruns = self.backend.play(item.buffer)
            except DeviceError as exc:
                error = str(exc)  # reported, never fatal to the queue
            item._finish(
                PlaybackReport(
                    start_offset_s=submitted - (item.start_signal.fired_at or submitted),
                    duration_s=item.buffer.duration_s,
                    underruns=underruns,
                    simulated=getattr(self.backend, "simulated", False),
                    error=error,
                )
            )
