"""WAV reading/writing: header validation, scaling, round-trip bounds."""

import io
import struct

import numpy as np
import pytest

from emospeech import audio_io
from emospeech.audio_io import AudioBuffer, load_wav, write_wav
from emospeech.errors import EmptyAudio, MalformedHeader, UnsupportedEncoding


def make_wav_bytes(frames: bytes, n_channels=1, sample_rate=16000, bits=16,
                   audio_format=1, fmt_extra=b""):
    """Assemble a minimal RIFF/WAVE file by hand, independent of the writer."""
    block_align = n_channels * (bits // 8)
    fmt = struct.pack(
        "<HHIIHH", audio_format, n_channels, sample_rate,
        sample_rate * block_align, block_align, bits,
    ) + fmt_extra
    chunks = b"WAVE"
    chunks += b"fmt " + struct.pack("<I", len(fmt)) + fmt
    if len(fmt) % 2:
        chunks += b"\x00"
    chunks += b"data" + struct.pack("<I", len(frames)) + frames
    if len(frames) % 2:
        chunks += b"\x00"
    return b"RIFF" + struct.pack("<I", len(chunks)) + chunks


def write_bytes(tmp_path, blob, name="t.wav"):
    path = tmp_path / name
    path.write_bytes(blob)
    return path


class TestLoad:
    def test_16bit_full_scale_sample(self, tmp_path):
        path = write_bytes(tmp_path, make_wav_bytes(struct.pack("<h", 32767)))
        buf = load_wav(path)
        assert buf.sample_rate_hz == 16000
        assert buf.samples.shape == (1,)
        assert buf.samples[0] == pytest.approx(32767 / 32768)

    def test_stereo_averages_to_mono(self, tmp_path):
        frames = struct.pack("<hh", 16384, -16384) * 5
        path = write_bytes(tmp_path, make_wav_bytes(frames, n_channels=2))
        buf = load_wav(path)
        assert np.array_equal(buf.samples, np.zeros(5))

    def test_zero_samples_preserved(self, tmp_path):
        frames = struct.pack("<1000h", *([0] * 1000))
        path = write_bytes(tmp_path, make_wav_bytes(frames))
        buf = load_wav(path)
        assert len(buf.samples) == 1000
        assert buf.sample_rate_hz == 16000
        assert np.array_equal(buf.samples, np.zeros(1000))

    def test_8bit_unsigned(self, tmp_path):
        # 8-bit PCM is unsigned with midpoint 128
        frames = bytes([128, 255, 0])
        path = write_bytes(tmp_path, make_wav_bytes(frames, bits=8))
        buf = load_wav(path)
        assert buf.samples == pytest.approx([0.0, 127 / 128, -1.0])

    def test_24bit(self, tmp_path):
        def pack24(v):
            return struct.pack("<i", v)[:3]
        frames = pack24(2 ** 23 - 1) + pack24(-(2 ** 23)) + pack24(0)
        path = write_bytes(tmp_path, make_wav_bytes(frames, bits=24))
        buf = load_wav(path)
        expected = [(2 ** 23 - 1) / 2 ** 23, -1.0, 0.0]
        assert buf.samples == pytest.approx(expected)

    def test_float32(self, tmp_path):
        frames = struct.pack("<4f", 0.5, -0.25, 1.5, -2.0)
        path = write_bytes(tmp_path, make_wav_bytes(frames, bits=32, audio_format=3))
        buf = load_wav(path)
        # out-of-range float samples clamp to [-1, 1]
        assert buf.samples == pytest.approx([0.5, -0.25, 1.0, -1.0])

    def test_not_riff(self, tmp_path):
        path = write_bytes(tmp_path, b"OggS" + b"\x00" * 40)
        with pytest.raises(MalformedHeader):
            load_wav(path)

    def test_not_wave(self, tmp_path):
        blob = make_wav_bytes(struct.pack("<h", 1))
        blob = blob[:8] + b"AVI " + blob[12:]
        with pytest.raises(MalformedHeader):
            load_wav(write_bytes(tmp_path, blob))

    def test_truncated_data_chunk(self, tmp_path):
        blob = make_wav_bytes(struct.pack("<4h", 1, 2, 3, 4))
        with pytest.raises(MalformedHeader):
            load_wav(write_bytes(tmp_path, blob[:-5]))

    def test_missing_data_chunk(self, tmp_path):
        blob = make_wav_bytes(b"")
        # strip the data chunk entirely
        idx = blob.index(b"data")
        path = write_bytes(tmp_path, blob[:idx])
        with pytest.raises(MalformedHeader):
            load_wav(path)

    def test_compressed_format_rejected(self, tmp_path):
        blob = make_wav_bytes(struct.pack("<h", 1), audio_format=85)
        with pytest.raises(UnsupportedEncoding):
            load_wav(write_bytes(tmp_path, blob))

    def test_odd_bit_depth_rejected(self, tmp_path):
        blob = make_wav_bytes(struct.pack("<h", 1), bits=12)
        with pytest.raises(UnsupportedEncoding):
            load_wav(write_bytes(tmp_path, blob))

    def test_three_channels_rejected(self, tmp_path):
        frames = struct.pack("<3h", 1, 2, 3)
        blob = make_wav_bytes(frames, n_channels=3)
        with pytest.raises(UnsupportedEncoding):
            load_wav(write_bytes(tmp_path, blob))

    def test_empty_data_chunk(self, tmp_path):
        with pytest.raises(EmptyAudio):
            load_wav(write_bytes(tmp_path, make_wav_bytes(b"")))

    def test_extra_chunks_skipped(self, tmp_path):
        # a LIST chunk between fmt and data must be ignored
        base = make_wav_bytes(struct.pack("<h", 16384))
        idx = base.index(b"data")
        extra = b"LIST" + struct.pack("<I", 4) + b"INFO"
        blob = base[:idx] + extra + base[idx:]
        blob = blob[:4] + struct.pack("<I", len(blob) - 8) + blob[8:]
        buf = load_wav(write_bytes(tmp_path, blob))
        assert buf.samples[0] == pytest.approx(0.5)


class TestWrite:
    def test_zero_buffer_writes_zero_bytes(self, tmp_path):
        path = tmp_path / "z.wav"
        write_wav(AudioBuffer(np.zeros(64), 16000), path)
        blob = path.read_bytes()
        idx = blob.index(b"data")
        size = struct.unpack_from("<I", blob, idx + 4)[0]
        assert size == 128
        assert blob[idx + 8:idx + 8 + size] == b"\x00" * 128

    def test_empty_buffer_rejected(self, tmp_path):
        with pytest.raises(EmptyAudio):
            write_wav(AudioBuffer(np.zeros(0), 16000), tmp_path / "e.wav")

    def test_io_failure(self, tmp_path):
        from emospeech.errors import IoFailure
        with pytest.raises(IoFailure):
            write_wav(AudioBuffer(np.zeros(4), 16000), tmp_path / "no_dir" / "x.wav")

    def test_round_trip_error_bound(self, tmp_path):
        rng = np.random.default_rng(7)
        for trial in range(5):
            samples = rng.uniform(-1.0, 1.0, size=500)
            path = tmp_path / f"rt{trial}.wav"
            write_wav(AudioBuffer(samples, 16000), path)
            back = load_wav(path)
            assert back.sample_rate_hz == 16000
            assert np.max(np.abs(back.samples - samples)) <= 2 ** -15

    def test_full_scale_round_trip(self, tmp_path):
        samples = np.array([1.0, -1.0, 0.0])
        path = tmp_path / "fs.wav"
        write_wav(AudioBuffer(samples, 8000), path)
        back = load_wav(path)
        assert np.max(np.abs(back.samples - samples)) <= 2 ** -15


class TestFuzz:
    def test_random_payloads_never_yield_nonfinite(self, tmp_path):
        # any byte payload behind a valid header must load to finite samples
        rng = np.random.default_rng(123)
        for trial in range(30):
            n = int(rng.integers(4, 400)) * 4
            payload = rng.integers(0, 256, size=n).astype(np.uint8).tobytes()
            fmt = 3 if trial % 2 else 1
            bits = 32 if fmt == 3 else 16
            blob = make_wav_bytes(payload, bits=bits, audio_format=fmt)
            buf = load_wav(write_bytes(tmp_path, blob, name=f"f{trial}.wav"))
            assert np.all(np.isfinite(buf.samples))
            assert np.max(np.abs(buf.samples)) <= 1.0


class TestBufferInvariants:
    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            AudioBuffer(np.array([0.0, np.nan]), 16000)

    def test_bad_rate_rejected(self):
        with pytest.raises(ValueError):
            AudioBuffer(np.zeros(4), 0)

    def test_duration(self):
        buf = AudioBuffer(np.zeros(8000), 16000)
        assert buf.duration_s == pytest.approx(0.5)
