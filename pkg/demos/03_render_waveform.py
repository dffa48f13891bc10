#!/usr/bin/env python3
"""Render a stimulus to PCM, inspect its spectrum, and write a WAV file.

Shows the full synthesis path: parameters -> sine buffer -> raised-cosine
envelope -> WAV bytes, plus an FFT check that the dominant frequency matches.
"""

import math
import tempfile
from pathlib import Path

import numpy as np

from vibroaffect import (
    EnvelopeSpec,
    VibrationParams,
    apply_envelope,
    read_wav,
    synthesize,
    write_wav,
)


def main():
    params = VibrationParams(frequency_hz=280.0, amplitude=20384, duration_s=1.0)
    print(f"params: {params}")

    buf = synthesize(params, 44100)
    print(f"rendered {len(buf)} samples at {buf.sample_rate} Hz "
          f"({buf.duration_s:.2f} s)")
    print(f"peak |sample| = {np.max(np.abs(buf.samples))}")

    rms = float(np.sqrt(np.mean(buf.samples.astype(np.float64) ** 2)))
    print(f"rms = {rms:.1f} (theory {params.amplitude / math.sqrt(2):.1f})")

    x = buf.samples.astype(np.float64)
    spectrum = np.abs(np.fft.rfft(x, n=8 * len(x)))
    peak_hz = np.fft.rfftfreq(8 * len(x), 1.0 / 44100)[int(np.argmax(spectrum))]
    print(f"dominant spectral peak: {peak_hz:.2f} Hz")

    shaped = apply_envelope(buf, EnvelopeSpec(fade_in_ms=5.0, fade_out_ms=5.0))
    print(f"after envelope: first sample {shaped.samples[0]}, last {shaped.samples[-1]}")

    out = Path(tempfile.gettempdir()) / "vibroaffect_demo.wav"
    write_wav(shaped, out)
    back = read_wav(out)
    print(f"wrote {out} ({out.stat().st_size} bytes), read-back identical: {back == shaped}")


if __name__ == "__main__":
    main()
