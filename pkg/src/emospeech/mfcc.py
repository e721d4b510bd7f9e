"""Mel filterbank, cepstral coefficients, and the smoothed energy contour."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import LOG_FLOOR
from .errors import (
    DimensionMismatch,
    EmptyInput,
    EvenSmoothWidth,
    InvalidBand,
    InvalidCoeffCount,
    NegativeFrequency,
    TooFewBins,
)


def hz_to_mel(f_hz):
    """Perceptual mel scale: mel = 2595 * log10(1 + f/700)."""
    f = np.asarray(f_hz, dtype=np.float64)
    if np.any(f < 0):
        raise NegativeFrequency("frequency must be >= 0 Hz")
    mel = 2595.0 * np.log10(1.0 + f / 700.0)
    return float(mel) if np.isscalar(f_hz) else mel


def mel_to_hz(mel):
    """Inverse mel scale: f = 700 * (10^(mel/2595) - 1)."""
    m = np.asarray(mel, dtype=np.float64)
    f = 700.0 * (10.0 ** (m / 2595.0) - 1.0)
    return float(f) if np.isscalar(mel) else f


@dataclass(frozen=True)
class MelFilterbank:
    """Triangular filters over FFT bins, with mel-uniform band edges.

    ``filters`` rows are sampled at bin frequencies with each peak snapped to
    a bin and scaled to exactly 1.0; ``center_freqs_hz``/``edge_freqs_hz``
    keep the exact (un-snapped) mel-uniform frequencies.
    """

    filters: np.ndarray
    center_freqs_hz: np.ndarray
    edge_freqs_hz: np.ndarray
    sample_rate_hz: int
    n_fft: int

    def __post_init__(self):
        filters = np.asarray(self.filters, dtype=np.float64)
        centers = np.asarray(self.center_freqs_hz, dtype=np.float64)
        edges = np.asarray(self.edge_freqs_hz, dtype=np.float64)
        object.__setattr__(self, "filters", filters)
        object.__setattr__(self, "center_freqs_hz", centers)
        object.__setattr__(self, "edge_freqs_hz", edges)
        if filters.ndim != 2 or filters.shape[0] != centers.size:
            raise ValueError("one filter row per center frequency required")
        if np.any(filters < 0):
            raise ValueError("filter weights must be non-negative")
        if np.any(np.abs(filters.max(axis=1) - 1.0) > 1e-12):
            raise ValueError("every filter row must peak at exactly 1.0")
        if np.any(np.diff(centers) <= 0):
            raise ValueError("center frequencies must be strictly increasing")

    @property
    def n_filters(self) -> int:
        return self.filters.shape[0]

    @property
    def n_bins(self) -> int:
        return self.filters.shape[1]


def build_filterbank(sample_rate_hz: int, n_fft: int, n_filters: int,
                     f_min_hz: float, f_max_hz: float) -> MelFilterbank:
    """Construct n_filters triangles between f_min and f_max, mel-uniform."""
    nyquist = sample_rate_hz / 2.0
    if n_filters < 2:
        raise ValueError("need at least 2 filters")
    if not 0.0 <= f_min_hz < f_max_hz or f_max_hz > nyquist:
        raise InvalidBand(
            f"band [{f_min_hz}, {f_max_hz}] invalid for Nyquist {nyquist}"
        )
    mel_edges = np.linspace(hz_to_mel(f_min_hz), hz_to_mel(f_max_hz), n_filters + 2)
    edge_freqs = mel_to_hz(mel_edges)
    edge_bins = np.floor((n_fft + 1) * edge_freqs / sample_rate_hz).astype(np.int64)
    if np.any(np.diff(edge_bins) < 1):
        raise TooFewBins(
            f"n_fft={n_fft} cannot resolve {n_filters} filters in this band"
        )
    n_bins = n_fft // 2 + 1
    filters = np.zeros((n_filters, n_bins))
    for m in range(n_filters):
        lo, mid, hi = edge_bins[m], edge_bins[m + 1], edge_bins[m + 2]
        rise = np.arange(lo, mid + 1)
        filters[m, rise] = (rise - lo) / (mid - lo)
        fall = np.arange(mid, hi + 1)
        filters[m, fall] = (hi - fall) / (hi - mid)
        filters[m, mid] = 1.0
    return MelFilterbank(filters, edge_freqs[1:-1], edge_freqs,
                         sample_rate_hz, n_fft)


@dataclass(frozen=True)
class MfccMatrix:
    """Per-frame cepstral coefficients; column 0 is the log-energy proxy."""

    coefficients: np.ndarray
    hop_ms: float

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.float64)
        object.__setattr__(self, "coefficients", coeffs)
        if coeffs.ndim != 2 or coeffs.shape[1] < 2:
            raise ValueError("coefficient matrix needs at least 2 columns")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")

    @property
    def n_frames(self) -> int:
        return self.coefficients.shape[0]


def dct_ii(rows, n_coeffs: int) -> np.ndarray:
    """Unnormalized DCT-II of each row: c[j] = sum_m v[m]*cos(pi*j*(m+0.5)/M)."""
    matrix = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    m = np.arange(matrix.shape[1])
    j = np.arange(n_coeffs)
    basis = np.cos(np.pi * np.outer(j, m + 0.5) / matrix.shape[1])
    return matrix @ basis.T


def compute_mfcc(power_frames, bank: MelFilterbank, n_coeffs: int,
                 hop_ms: float, log_floor: float = LOG_FLOOR) -> MfccMatrix:
    """Filter energies -> floored natural log -> unnormalized DCT-II.

    c[j] = sum_m log(max(e[m], floor)) * cos(pi*j*(m+0.5)/n_filters).
    """
    power = np.atleast_2d(np.asarray(power_frames, dtype=np.float64))
    if power.shape[1] != bank.n_bins:
        raise DimensionMismatch(
            f"{power.shape[1]} spectrum bins != {bank.n_bins} filter columns"
        )
    if not 2 <= n_coeffs <= bank.n_filters:
        raise InvalidCoeffCount(
            f"n_coeffs={n_coeffs} outside [2, {bank.n_filters}]"
        )
    energies = power @ bank.filters.T
    logs = np.log(np.maximum(energies, log_floor))
    return MfccMatrix(dct_ii(logs, n_coeffs), hop_ms)


def energy_contour(mfcc: MfccMatrix, smooth_frames: int) -> np.ndarray:
    """Centered moving average of coefficient 0; edges shrink the window."""
    if mfcc.n_frames == 0:
        raise EmptyInput("no frames to smooth")
    if smooth_frames < 1 or smooth_frames % 2 == 0:
        raise EvenSmoothWidth("smoothing width must be a positive odd integer")
    c0 = mfcc.coefficients[:, 0]
    n = c0.size
    if smooth_frames == 1:
        return c0.copy()
    half = smooth_frames // 2
    # Averaging anchored at the first value: a constant input must come out
    # exactly constant, and cumsum over the raw values leaks rounding noise
    # into that flat case.
    anchor = c0[0]
    csum = np.concatenate([[0.0], np.cumsum(c0 - anchor)])
    lo = np.clip(np.arange(n) - half, 0, n)
    hi = np.clip(np.arange(n) + half + 1, 0, n)
    return (csum[hi] - csum[lo]) / (hi - lo) + anchor
