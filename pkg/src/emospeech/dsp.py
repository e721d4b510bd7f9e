"""Short-time signal processing: pre-emphasis, framing, windows, FFT, power."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer
from .errors import (
    EmptyAudio,
    InvalidLength,
    LengthMismatch,
    NotPowerOfTwo,
    SignalTooShort,
)


@dataclass(frozen=True)
class FrameMatrix:
    """Equal-length frames cut from a signal; frame i starts at i * hop_len."""

    frames: np.ndarray
    frame_len: int
    hop_len: int
    sample_rate_hz: int

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        object.__setattr__(self, "frames", frames)
        if frames.ndim != 2 or frames.shape[1] != self.frame_len:
            raise ValueError("frames must be 2-D with frame_len columns")
        if not 0 < self.hop_len <= self.frame_len:
            raise ValueError("hop_len must satisfy 0 < hop_len <= frame_len")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def hop_ms(self) -> float:
        return 1000.0 * self.hop_len / self.sample_rate_hz


def pre_emphasize(buffer: AudioBuffer, alpha: float) -> AudioBuffer:
    """First-order high-pass: y[0] = x[0], y[n] = x[n] - alpha * x[n-1]."""
    if len(buffer) == 0:
        raise EmptyAudio("cannot pre-emphasize an empty buffer")
    x = buffer.samples
    y = np.empty_like(x)
    y[0] = x[0]
    y[1:] = x[1:] - alpha * x[:-1]
    return AudioBuffer(y, buffer.sample_rate_hz)


def frame_signal(buffer: AudioBuffer, frame_ms: float, hop_ms: float) -> FrameMatrix:
    """Cut the signal into overlapping frames; trailing partial frames drop."""
    rate = buffer.sample_rate_hz
    frame_len = int(round(frame_ms * rate / 1000.0))
    hop_len = int(round(hop_ms * rate / 1000.0))
    if frame_len < 1 or hop_len < 1:
        raise ValueError("frame and hop must each span at least one sample")
    if hop_len > frame_len:
        raise ValueError("hop must not exceed the frame length")
    n = len(buffer)
    if n < frame_len:
        raise SignalTooShort(f"{n} samples < one {frame_len}-sample frame")
    count = (n - frame_len) // hop_len + 1
    idx = np.arange(frame_len)[None, :] + hop_len * np.arange(count)[:, None]
    return FrameMatrix(buffer.samples[idx], frame_len, hop_len, rate)


def hamming_window(length: int) -> np.ndarray:
    """Tapering weights 0.54 - 0.46*cos(2*pi*n/(L-1))."""
    if length < 2:
        raise InvalidLength("window needs at least 2 samples")
    n = np.arange(length)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (length - 1))


def apply_window(frames: FrameMatrix, window: np.ndarray) -> FrameMatrix:
    """Multiply every frame elementwise by the window."""
    window = np.asarray(window, dtype=np.float64)
    if window.shape != (frames.frame_len,):
        raise LengthMismatch(
            f"window length {window.size} != frame length {frames.frame_len}"
        )
    return FrameMatrix(
        frames.frames * window, frames.frame_len, frames.hop_len,
        frames.sample_rate_hz,
    )


def next_pow2(n: int) -> int:
    """Smallest power of two >= n."""
    return 1 << max(0, (n - 1).bit_length())


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _fft_batch(data: np.ndarray) -> np.ndarray:
    """Iterative radix-2 decimation-in-time transform along the last axis."""
    n = data.shape[-1]
    if n == 1:
        return data.astype(np.complex128, copy=True)
    levels = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(levels):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    out = data[..., rev].astype(np.complex128, copy=False)
    span = 1
    while span < n:
        twiddle = np.exp(-1j * np.pi * np.arange(span) / span)
        shaped = out.reshape(*out.shape[:-1], n // (2 * span), 2, span)
        even = shaped[..., 0, :]
        odd = shaped[..., 1, :] * twiddle
        out = np.concatenate([even + odd, even - odd], axis=-1).reshape(out.shape)
        span *= 2
    return out


def fft(x, n: int | None = None) -> np.ndarray:
    """Discrete Fourier transform of a real or complex vector, size power of 2.

    The input is zero-padded to n when shorter; bins follow the definition
    X[k] = sum_n x[n] * exp(-2j*pi*k*n/n_fft).
    """
    x = np.asarray(x)
    if n is None:
        n = x.shape[-1]
    if not _is_pow2(n):
        raise NotPowerOfTwo(f"transform size {n} is not a power of two")
    if x.shape[-1] > n:
        raise LengthMismatch(f"input length {x.shape[-1]} exceeds size {n}")
    padded = np.zeros(x.shape[:-1] + (n,), dtype=np.complex128)
    padded[..., : x.shape[-1]] = x
    return _fft_batch(padded)


def power_spectrum(frame, n_fft: int) -> np.ndarray:
    """One-sided power spectrum P[k] = |X[k]|^2 / n_fft, k = 0..n_fft/2."""
    frame = np.asarray(frame, dtype=np.float64)
    bins = fft(frame, n_fft)
    spectrum = np.abs(bins[..., : n_fft // 2 + 1]) ** 2 / n_fft
    return spectrum


def power_spectra(frames: FrameMatrix, n_fft: int) -> np.ndarray:
    """Per-frame one-sided power spectra as an (n_frames, n_fft/2+1) matrix."""
    return power_spectrum(frames.frames, n_fft)
