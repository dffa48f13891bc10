"""PCM rendering, envelopes, and WAV round-trips."""

import math
import random
import struct
import wave

import numpy as np
import pytest

from vibroaffect import (
    AliasingError,
    EnvelopeSpec,
    InputError,
    VibrationParams,
    WaveBuffer,
    apply_envelope,
    read_wav,
    synth_sine,
    synthesize,
    wav_bytes,
    write_wav,
)


def count_zero_crossings(samples):
    nz = samples[samples != 0]
    return int(np.count_nonzero(np.diff(np.sign(nz))) )


class TestSynthesize:
    def test_sample_count(self):
        buf = synthesize(VibrationParams(60.0, 32767, 0.5), 44100)
        assert len(buf) == 22050

    def test_zero_crossing_count(self):
        buf = synthesize(VibrationParams(500.0, 32767, 0.5), 44100)
        crossings = count_zero_crossings(buf.samples)
        assert abs(crossings - 500) <= 1  # 2 * f * duration

    def test_peak_and_mean(self):
        buf = synthesize(VibrationParams(280.0, 20384, 1.0), 44100)
        assert int(np.max(np.abs(buf.samples))) == 20384
        assert abs(float(np.mean(buf.samples))) < 1.0

    def test_first_sample_is_zero(self):
        buf = synthesize(VibrationParams(123.0, 20000, 0.7), 44100)
        assert buf.samples[0] == 0

    def test_deterministic(self):
        p = VibrationParams(217.3, 15000, 0.83)
        assert synthesize(p, 48000) == synthesize(p, 48000)

    def test_invalid_sample_rate(self):
        with pytest.raises(InputError):
            synthesize(VibrationParams(100.0, 9000, 0.5), 22050)

    def test_aliasing_guard(self):
        with pytest.raises(AliasingError):
            synth_sine(22050.0, 9000, 0.5, 44100)
        with pytest.raises(AliasingError):
            synth_sine(30000.0, 9000, 0.5, 44100)
        # below Nyquist at 48 kHz but above it at 44.1 kHz
        assert len(synth_sine(23000.0, 9000, 0.1, 48000)) == 4800

    def test_rms_matches_sine_theory(self):
        rng = random.Random(29)
        for _ in range(20):
            params = VibrationParams(
                rng.uniform(60, 500), rng.randint(8000, 32767), rng.uniform(0.5, 2.0)
            )
            buf = synthesize(params, 44100)
            rms = float(np.sqrt(np.mean(buf.samples.astype(np.float64) ** 2)))
            assert rms == pytest.approx(params.amplitude / math.sqrt(2), rel=0.01)

    def test_spectral_peak(self):
        rng = random.Random(31)
        for _ in range(20):
            params = VibrationParams(
                rng.uniform(60, 500), rng.randint(8000, 32767), rng.uniform(0.5, 1.5)
            )
            buf = synthesize(params, 44100)
            x = buf.samples.astype(np.float64)
            spectrum = np.abs(np.fft.rfft(x, n=8 * len(x)))
            freqs = np.fft.rfftfreq(8 * len(x), 1.0 / 44100)
            peak = freqs[int(np.argmax(spectrum))]
            assert peak == pytest.approx(params.frequency_hz, abs=2.0)

    def test_no_clipping_at_parameter_corners(self):
        for f in (60.0, 500.0):
            for amp in (8000, 32767):
                buf = synthesize(VibrationParams(f, amp, 0.5), 44100)
                assert int(np.max(np.abs(buf.samples.astype(np.int32)))) <= 32767


class TestWaveBuffer:
    def test_immutability(self):
        buf = synthesize(VibrationParams(100.0, 9000, 0.5), 44100)
        with pytest.raises(ValueError):
            buf.samples[0] = 1

    def test_rejects_out_of_range(self):
        with pytest.raises(InputError):
            WaveBuffer(np.array([40000]), 44100)

    def test_rejects_bad_rate(self):
        with pytest.raises(InputError):
            WaveBuffer(np.zeros(10, dtype=np.int16), 8000)

    def test_duration(self):
        buf = WaveBuffer(np.zeros(48000, dtype=np.int16), 48000)
        assert buf.duration_s == 1.0


class TestEnvelope:
    def test_zero_fades_identity(self):
        buf = synthesize(VibrationParams(280.0, 20384, 0.5), 44100)
        assert apply_envelope(buf, EnvelopeSpec(0.0, 0.0)) == buf

    def test_onset_and_interior(self):
        buf = synthesize(VibrationParams(280.0, 20384, 0.5), 44100)
        shaped = apply_envelope(buf, EnvelopeSpec(5.0, 5.0))
        assert shaped.samples[0] == 0
        # 5 ms at 44100 is ~220 samples; index 221 lies beyond the ramp
        assert shaped.samples[221] == buf.samples[221]
        assert len(shaped) == len(buf)

    def test_interior_bit_identical(self):
        buf = synthesize(VibrationParams(333.0, 30000, 0.6), 44100)
        shaped = apply_envelope(buf, EnvelopeSpec(5.0, 5.0))
        n = 221
        assert np.array_equal(shaped.samples[n:-n], buf.samples[n:-n])

    def test_offset_ramp_ends_at_zero(self):
        buf = synthesize(VibrationParams(280.0, 20384, 0.5), 44100)
        shaped = apply_envelope(buf, EnvelopeSpec(5.0, 5.0))
        assert shaped.samples[-1] == 0

    def test_fades_longer_than_buffer(self):
        buf = WaveBuffer(np.zeros(100, dtype=np.int16), 44100)
        with pytest.raises(InputError):
            apply_envelope(buf, EnvelopeSpec(5.0, 5.0))  # needs ~441 samples

    def test_envelope_never_amplifies(self):
        buf = synthesize(VibrationParams(460.0, 32767, 0.5), 44100)
        shaped = apply_envelope(buf, EnvelopeSpec(5.0, 5.0))
        assert int(np.max(np.abs(shaped.samples.astype(np.int32)))) <= 32767

    def test_bad_shape_rejected(self):
        with pytest.raises(InputError):
            EnvelopeSpec(shape="linear")


class TestWav:
    def test_file_size(self, tmp_path):
        buf = synthesize(VibrationParams(60.0, 32767, 0.5), 44100)
        path = tmp_path / "a.wav"
        write_wav(buf, path)
        assert path.stat().st_size == 44 + 2 * 22050

    def test_header_layout(self, tmp_path):
        samples = np.array([0, 1000, -1000, 32767, -32768], dtype=np.int16)
        buf = WaveBuffer(samples, 48000)
        path = tmp_path / "h.wav"
        write_wav(buf, path)
        raw = path.read_bytes()
        # independent byte-by-byte header expectation
        expected = (
            b"RIFF"
            + struct.pack("<I", 36 + 10)
            + b"WAVE"
            + b"fmt "
            + struct.pack("<IHHIIHH", 16, 1, 1, 48000, 96000, 2, 16)
            + b"data"
            + struct.pack("<I", 10)
        )
        assert raw[:44] == expected
        assert raw[44:] == samples.astype("<i2").tobytes()

    def test_stdlib_wave_reads_it(self, tmp_path):
        buf = synthesize(VibrationParams(150.0, 12000, 0.5), 44100)
        path = tmp_path / "w.wav"
        write_wav(buf, path)
        with wave.open(str(path), "rb") as w:
            assert w.getnchannels() == 1
            assert w.getsampwidth() == 2
            assert w.getframerate() == 44100
            assert w.getnframes() == len(buf)
            assert w.readframes(len(buf)) == buf.to_bytes()

    def test_roundtrip_identity(self, tmp_path):
        buf = synthesize(VibrationParams(321.0, 28000, 0.55), 48000)
        path = tmp_path / "r.wav"
        write_wav(buf, path)
        back = read_wav(path)
        assert back == buf
        assert back.sample_rate == 48000

    def test_empty_buffer(self, tmp_path):
        buf = WaveBuffer(np.array([], dtype=np.int16), 44100)
        path = tmp_path / "e.wav"
        write_wav(buf, path)
        assert path.stat().st_size == 44
        assert read_wav(path) == buf

    def test_unwritable_path(self, tmp_path):
        buf = WaveBuffer(np.zeros(4, dtype=np.int16), 44100)
        with pytest.raises(OSError):
            write_wav(buf, tmp_path / "missing-dir" / "x.wav")

    def test_read_rejects_non_wav(self, tmp_path):
        path = tmp_path / "junk.wav"
        path.write_bytes(b"definitely not RIFF data, just filler bytes here")
        with pytest.raises(InputError):
            read_wav(path)

    def test_wav_bytes_matches_file(self, tmp_path):
        buf = synthesize(VibrationParams(280.0, 20384, 0.5), 44100)
        path = tmp_path / "b.wav"
        write_wav(buf, path)
        assert path.read_bytes() == wav_bytes(buf)
