"""Sine-burst rendering to 16-bit mono PCM, raised-cosine envelopes, and WAV I/O.

Rendering is fully deterministic: phase starts at zero (first sample is 0),
sample values are ``rint(amplitude * sin(2*pi*f*n/rate))``, and the WAV writer
emits the canonical 44-byte RIFF/PCM header so identical buffers produce
byte-identical files.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AliasingError, InputError
from .mapping import VibrationParams

VALID_SAMPLE_RATES = (44100, 48000)
DEFAULT_SAMPLE_RATE = 44100


@dataclass(eq=False)
class WaveBuffer:
    """Immutable mono buffer of signed 16-bit samples at a fixed rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate not in VALID_SAMPLE_RATES:
            raise InputError(f"sample rate {self.sample_rate} not in {VALID_SAMPLE_RATES}")
        arr = np.asarray(self.samples)
        if arr.ndim != 1:
            raise InputError("samples must be one-dimensional (mono)")
        if arr.dtype != np.int16:
            if arr.size and (arr.min() < -32768 or arr.max() > 32767):
                raise InputError("sample values exceed the signed 16-bit range")
            arr = arr.astype(np.int16)
        else:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WaveBuffer):
            return NotImplemented
        return self.sample_rate == other.sample_rate and np.array_equal(
            self.samples, other.samples
        )

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate

    def to_bytes(self) -> bytes:
        """Little-endian PCM payload, 2 bytes per sample."""
        return self.samples.astype("<i2").tobytes()


def synth_sine(
    frequency_hz: float,
    amplitude: int,
    duration_s: float,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
) -> WaveBuffer:
    """Render ``round(duration * rate)`` samples of a zero-phase sine."""
    if sample_rate not in VALID_SAMPLE_RATES:
        raise InputError(f"sample rate {sample_rate} not in {VALID_SAMPLE_RATES}")
    if not np.isfinite(frequency_hz) or frequency_hz <= 0:
        raise InputError(f"frequency must be positive and finite, got {frequency_hz!r}")
    if frequency_hz >= sample_rate / 2:
        raise AliasingError(
            f"frequency {frequency_hz} Hz is at or above Nyquist for {sample_rate} Hz"
        )
    if not np.isfinite(duration_s) or duration_s < 0:
        raise InputError(f"duration must be non-negative, got {duration_s!r}")
    if not 0 <= amplitude <= 32767:
        raise InputError(f"amplitude {amplitude} outside [0, 32767]")
    n = round(duration_s * sample_rate)
    phase = np.arange(n, dtype=np.float64) * (2.0 * np.pi * frequency_hz / sample_rate)
    samples = np.rint(amplitude * np.sin(phase)).astype(np.int16)
    return WaveBuffer(samples, sample_rate)


def synthesize(params: VibrationParams, sample_rate: int = DEFAULT_SAMPLE_RATE) -> WaveBuffer:
    """Render one stimulus to PCM (no envelope applied)."""
    return synth_sine(params.frequency_hz, params.amplitude, params.duration_s, sample_rate)


@dataclass(frozen=True)
class EnvelopeSpec:
    """Raised-cosine onset/offset ramps; lengths in milliseconds."""

    fade_in_ms: float = 5.0
    fade_out_ms: float = 5.0
    shape: str = "raised-cosine"

    def __post_init__(self):
        if self.shape != "raised-cosine":
            raise InputError(f"unsupported envelope shape {self.shape!r}")
        if self.fade_in_ms < 0 or self.fade_out_ms < 0:
            raise InputError("fade lengths must be non-negative")


def _fade_samples(ms: float, sample_rate: int) -> int:
    return int(round(ms * sample_rate / 1000.0))


def apply_envelope(buf: WaveBuffer, env: EnvelopeSpec) -> WaveBuffer:
    """Ramp the first/last stretch of the buffer; interior samples stay bit-identical."""
    n_in = _fade_samples(env.fade_in_ms, buf.sample_rate)
    n_out = _fade_samples(env.fade_out_ms, buf.sample_rate)
    if n_in + n_out > len(buf):
        raise InputError(
            f"fades need {n_in + n_out} samples but buffer has {len(buf)}"
        )
    out = buf.samples.astype(np.float64)
    if n_in:
        ramp = 0.5 - 0.5 * np.cos(np.pi * np.arange(n_in) / n_in)
        out[:n_in] *= ramp
    if n_out:
        ramp = 0.5 - 0.5 * np.cos(np.pi * np.arange(n_out) / n_out)
        out[-n_out:] *= ramp[::-1]
    return WaveBuffer(np.rint(out).astype(np.int16), buf.sample_rate)


_WAV_HEADER = struct.Struct("<4sI4s4sIHHIIHH4sI")


def wav_bytes(buf: WaveBuffer) -> bytes:
    """Serialize to RIFF/WAVE with the canonical 44-byte header: PCM, mono, 16-bit."""
    data = buf.to_bytes()
    header = _WAV_HEADER.pack(
        b"RIFF",
        36 + len(data),
        b"WAVE",
        b"fmt ",
        16,                       # fmt chunk length
        1,                        # PCM
        1,                        # mono
        buf.sample_rate,
        buf.sample_rate * 2,      # byte rate
        2,                        # block align
        16,                       # bits per sample
        b"data",
        len(data),
    )
    return header + data


def write_wav(buf: WaveBuffer, path: str | Path) -> None:
    """Write the canonical WAV serialization of ``buf`` to ``path``."""
    with open(path, "wb") as fh:
        fh.write(wav_bytes(buf))


def read_wav(path: str | Path) -> WaveBuffer:
    """Read back a PCM mono 16-bit WAV; inverse of :func:`write_wav`."""
    raw = Path(path).read_bytes()
    if len(raw) < 44 or raw[0:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise InputError(f"{path}: not a RIFF/WAVE file")
    pos = 12
    fmt = None
    data = None
    while pos + 8 <= len(raw):
        chunk_id = raw[pos : pos + 4]
        (size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8 : pos + 8 + size]
        if chunk_id == b"fmt ":
            fmt = body
        elif chunk_id == b"data":
            data = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt is None or data is None:
        raise InputError(f"{path}: missing fmt or data chunk")
    audio_format, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if audio_format != 1 or channels != 1 or bits != 16:
        raise InputError(f"{path}: expected PCM mono 16-bit, got format={audio_format} channels={channels} bits={bits}")
    samples = np.frombuffer(data, dtype="<i2").astype(np.int16)
    return WaveBuffer(samples, rate)
