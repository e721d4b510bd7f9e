"""Short-time DSP: pre-emphasis, framing, windowing, FFT, power spectrum."""

import math

import numpy as np
import pytest

from emospeech.audio_io import AudioBuffer
from emospeech import dsp
from emospeech.errors import (
    EmptyAudio,
    InvalidLength,
    LengthMismatch,
    NotPowerOfTwo,
    SignalTooShort,
)


def direct_dft(x, n):
    """O(N^2) DFT straight from the definition; oracle for the fast transform."""
    x = np.asarray(x, dtype=complex)
    padded = np.zeros(n, dtype=complex)
    padded[: len(x)] = x
    k = np.arange(n)
    basis = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return basis @ padded


def buf(samples, rate=16000):
    return AudioBuffer(np.asarray(samples, dtype=float), rate)


class TestPreEmphasize:
    def test_constant_signal(self):
        out = dsp.pre_emphasize(buf([1.0, 1.0, 1.0]), 0.97)
        assert out.samples == pytest.approx([1.0, 0.03, 0.03])

    def test_alpha_zero_identity(self):
        x = [0.3, -0.2, 0.9, 0.0]
        out = dsp.pre_emphasize(buf(x), 0.0)
        assert np.array_equal(out.samples, np.asarray(x))

    def test_impulse(self):
        out = dsp.pre_emphasize(buf([1.0, 0.0, 0.0]), 0.97)
        assert out.samples == pytest.approx([1.0, -0.97, 0.0])

    def test_empty_rejected(self):
        with pytest.raises(EmptyAudio):
            dsp.pre_emphasize(AudioBuffer(np.zeros(0), 16000), 0.97)

    def test_rate_preserved(self):
        out = dsp.pre_emphasize(buf([0.5, 0.5], rate=8000), 0.9)
        assert out.sample_rate_hz == 8000


class TestFrameSignal:
    def test_exact_single_frame(self):
        frames = dsp.frame_signal(buf(np.arange(400) / 400.0), 25.0, 10.0)
        assert frames.frames.shape == (1, 400)
        assert frames.frame_len == 400
        assert frames.hop_len == 160

    def test_three_frames(self):
        frames = dsp.frame_signal(buf(np.arange(720) / 720.0), 25.0, 10.0)
        assert frames.frames.shape == (3, 400)
        for i in range(3):
            assert frames.frames[i, 0] == pytest.approx(i * 160 / 720.0)

    def test_too_short(self):
        with pytest.raises(SignalTooShort):
            dsp.frame_signal(buf(np.zeros(399)), 25.0, 10.0)

    def test_trailing_samples_discarded(self):
        frames = dsp.frame_signal(buf(np.zeros(719)), 25.0, 10.0)
        assert frames.frames.shape == (2, 400)

    def test_frame_starts_recoverable(self):
        signal = np.arange(2000, dtype=float)
        frames = dsp.frame_signal(buf(signal / 2000.0), 25.0, 10.0)
        for i in range(frames.frames.shape[0]):
            start = int(round(frames.frames[i, 0] * 2000.0))
            assert start == i * frames.hop_len


class TestHammingWindow:
    def test_endpoints(self):
        for length in (2, 5, 64, 401):
            w = dsp.hamming_window(length)
            assert w[0] == pytest.approx(0.08, abs=1e-12)
            assert w[-1] == pytest.approx(0.08, abs=1e-12)

    def test_odd_midpoint_is_one(self):
        for length in (3, 9, 401):
            w = dsp.hamming_window(length)
            assert w[(length - 1) // 2] == pytest.approx(1.0, abs=1e-12)

    def test_length_four_values(self):
        # independent evaluation of 0.54 - 0.46*cos(2*pi*n/3)
        expected = [0.54 - 0.46 * math.cos(2 * math.pi * n / 3) for n in range(4)]
        assert expected[1] == pytest.approx(0.77)
        w = dsp.hamming_window(4)
        assert w == pytest.approx(expected, abs=1e-12)
        assert w == pytest.approx([0.08, 0.77, 0.77, 0.08], abs=1e-12)

    def test_symmetry_and_range(self):
        for length in (2, 3, 17, 400, 1024):
            w = dsp.hamming_window(length)
            assert np.max(np.abs(w - w[::-1])) < 1e-12
            assert np.all(w > 0)
            assert np.all(w <= 1.0)

    def test_too_short_rejected(self):
        with pytest.raises(InvalidLength):
            dsp.hamming_window(1)


class TestApplyWindow:
    def test_ones_frame_yields_window(self):
        frames = dsp.frame_signal(buf(np.ones(400)), 25.0, 10.0)
        w = dsp.hamming_window(400)
        out = dsp.apply_window(frames, w)
        assert out.frames[0] == pytest.approx(w)

    def test_zero_frame_stays_zero(self):
        frames = dsp.frame_signal(buf(np.zeros(400)), 25.0, 10.0)
        out = dsp.apply_window(frames, dsp.hamming_window(400))
        assert np.array_equal(out.frames, np.zeros((1, 400)))

    def test_known_product(self):
        frames = dsp.FrameMatrix(np.full((1, 4), 2.0), 4, 2, 16000)
        out = dsp.apply_window(frames, dsp.hamming_window(4))
        assert out.frames[0] == pytest.approx([0.16, 1.54, 1.54, 0.16], abs=1e-12)

    def test_length_mismatch(self):
        frames = dsp.frame_signal(buf(np.zeros(400)), 25.0, 10.0)
        with pytest.raises(LengthMismatch):
            dsp.apply_window(frames, dsp.hamming_window(128))


class TestFft:
    def test_impulse(self):
        out = dsp.fft(np.array([1.0, 0, 0, 0, 0, 0, 0, 0]))
        assert out == pytest.approx(np.ones(8, dtype=complex), abs=1e-12)

    def test_constant_ones(self):
        out = dsp.fft(np.ones(8))
        expected = np.zeros(8, dtype=complex)
        expected[0] = 8
        assert out == pytest.approx(expected, abs=1e-12)

    def test_matches_direct_dft(self):
        rng = np.random.default_rng(42)
        for n in (2, 4, 8, 32, 128, 256):
            for _ in range(5):
                x = rng.normal(size=n)
                assert np.max(np.abs(dsp.fft(x) - direct_dft(x, n))) < 1e-9

    def test_complex_input(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=16) + 1j * rng.normal(size=16)
        assert np.max(np.abs(dsp.fft(x) - direct_dft(x, 16))) < 1e-9

    def test_zero_padding(self):
        x = np.array([1.0, 2.0, 3.0])
        assert dsp.fft(x, 8) == pytest.approx(direct_dft(x, 8), abs=1e-9)

    def test_linearity(self):
        rng = np.random.default_rng(9)
        x, y = rng.normal(size=64), rng.normal(size=64)
        lhs = dsp.fft(2.5 * x - 1.25 * y)
        rhs = 2.5 * dsp.fft(x) - 1.25 * dsp.fft(y)
        assert np.max(np.abs(lhs - rhs)) < 1e-9

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=128)
        bins = dsp.fft(x)
        for k in range(1, 128):
            assert abs(bins[k] - np.conj(bins[128 - k])) < 1e-12

    def test_non_power_of_two_rejected(self):
        with pytest.raises(NotPowerOfTwo):
            dsp.fft(np.zeros(12))
        with pytest.raises(NotPowerOfTwo):
            dsp.fft(np.zeros(8), 12)

    def test_size_below_input_rejected(self):
        with pytest.raises(LengthMismatch):
            dsp.fft(np.zeros(8), 4)


class TestPowerSpectrum:
    def test_zero_frame(self):
        out = dsp.power_spectrum(np.zeros(400), 512)
        assert out.shape == (257,)
        assert np.array_equal(out, np.zeros(257))

    def test_cosine_concentrates_energy(self):
        n = 256
        for k0 in (1, 5, 100):
            x = np.cos(2 * np.pi * k0 * np.arange(n) / n)
            p = dsp.power_spectrum(x, n)
            others = np.delete(p, k0)
            assert np.max(others) < 1e-9 * p[k0]

    def test_parseval(self):
        rng = np.random.default_rng(17)
        w = dsp.hamming_window(400)
        for _ in range(20):
            x = rng.normal(size=400) * w
            p = dsp.power_spectrum(x, 512)
            time_energy = np.sum(x ** 2)
            freq_energy = p[0] + 2 * np.sum(p[1:-1]) + p[-1]
            assert abs(freq_energy - time_energy) < 1e-9 * max(time_energy, 1.0)

    def test_all_non_negative(self):
        rng = np.random.default_rng(23)
        p = dsp.power_spectrum(rng.normal(size=400), 512)
        assert np.all(p >= 0)

    def test_frame_longer_than_nfft_rejected(self):
        with pytest.raises(LengthMismatch):
            dsp.power_spectrum(np.zeros(600), 512)

    def test_non_power_of_two_rejected(self):
        with pytest.raises(NotPowerOfTwo):
            dsp.power_spectrum(np.zeros(400), 500)


class TestBatchHelpers:
    def test_power_spectra_matches_per_frame(self):
        rng = np.random.default_rng(31)
        signal = rng.uniform(-0.5, 0.5, size=4000)
        frames = dsp.frame_signal(buf(signal), 25.0, 10.0)
        windowed = dsp.apply_window(frames, dsp.hamming_window(frames.frame_len))
        batch = dsp.power_spectra(windowed, 512)
        for i in range(windowed.frames.shape[0]):
            row = dsp.power_spectrum(windowed.frames[i], 512)
            assert np.max(np.abs(batch[i] - row)) < 1e-12

    def test_next_pow2(self):
        assert dsp.next_pow2(1) == 1
        assert dsp.next_pow2(2) == 2
        assert dsp.next_pow2(3) == 4
        assert dsp.next_pow2(400) == 512
        assert dsp.next_pow2(512) == 512
