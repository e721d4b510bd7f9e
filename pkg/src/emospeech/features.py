"""Energy-contour peak detection and the scalar inter-peak distance feature."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import dsp, mfcc
from .audio_io import AudioBuffer
from .config import PipelineConfig
from .errors import ContourTooShort, InsufficientPeaks


@dataclass(frozen=True)
class PeakList:
    """Detected contour peaks: frame indices, contour values, frame hop."""

    indices: tuple
    values: tuple
    hop_ms: float

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must pair up")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("peak indices must be strictly increasing")

    def __len__(self):
        return len(self.indices)


@dataclass(frozen=True)
class FeatureRecord:
    """One labeled utterance: timing feature, optional heart rate, class."""

    subject_id: str
    utterance_id: str
    feature_distance_ms: float
    heart_rate_bpm: float | None
    label: str

    def __post_init__(self):
        fd = float(self.feature_distance_ms)
        if not np.isfinite(fd) or fd <= 0:
            raise ValueError("feature_distance_ms must be finite and positive")
        object.__setattr__(self, "feature_distance_ms", fd)
        if self.heart_rate_bpm is not None:
            hr = float(self.heart_rate_bpm)
            if not np.isfinite(hr) or hr <= 0:
                raise ValueError("heart_rate_bpm must be finite and positive")
            object.__setattr__(self, "heart_rate_bpm", hr)
        if not self.label:
            raise ValueError("label must be non-empty")


def detect_peaks(contour, min_prominence: float, min_separation_frames: int,
                 hop_ms: float) -> PeakList:
    """Find prominent local maxima at least min_separation_frames apart.

    A candidate rises strictly above its left neighbor and at least matches
    its right. Prominence measures its height over the higher of the two
    valleys separating it from the nearest taller candidate on each side
    (contour edges act as barriers). Among surviving candidates closer than
    the separation, the taller wins; ties favor the lower index.
    """
    c = np.asarray(contour, dtype=np.float64)
    n = c.size
    if n < 3:
        raise ContourTooShort(f"contour of {n} samples has no interior")
    interior = np.arange(1, n - 1)
    cand = interior[(c[interior] > c[interior - 1]) & (c[interior] >= c[interior + 1])]

    kept = []
    for pos, i in enumerate(cand):
        higher_left = [j for j in cand[:pos] if c[j] > c[i]]
        higher_right = [j for j in cand[pos + 1:] if c[j] > c[i]]
        left_from = higher_left[-1] + 1 if higher_left else 0
        right_to = higher_right[0] if higher_right else n
        left_min = np.min(c[left_from:i])
        right_min = np.min(c[i + 1:right_to])
        prominence = c[i] - max(left_min, right_min)
        if prominence >= min_prominence:
            kept.append(i)

    accepted = []
    for i in sorted(kept, key=lambda i: (-c[i], i)):
        if all(abs(i - j) >= min_separation_frames for j in accepted):
            accepted.append(i)
    accepted.sort()
    return PeakList(tuple(accepted), tuple(c[i] for i in accepted), hop_ms)


def peak_distance_feature(peaks: PeakList) -> float:
    """Mean consecutive inter-peak gap in milliseconds."""
    if len(peaks) < 2:
        raise InsufficientPeaks(f"{len(peaks)} peak(s); need at least 2")
    gaps = np.diff(np.asarray(peaks.indices))
    return float(np.mean(gaps) * peaks.hop_ms)


@lru_cache(maxsize=32)
def _cached_window(length: int) -> np.ndarray:
    return dsp.hamming_window(length)


@lru_cache(maxsize=32)
def _cached_bank(sample_rate_hz, n_fft, n_filters, f_min_hz, f_max_hz):
    return mfcc.build_filterbank(sample_rate_hz, n_fft, n_filters,
                                 f_min_hz, f_max_hz)


def compute_contour(buffer: AudioBuffer, config: PipelineConfig):
    """Run the MFCC chain and return (contour, hop_ms, power, mfcc_matrix)."""
    emphasized = dsp.pre_emphasize(buffer, config.pre_emphasis_alpha)
    frames = dsp.frame_signal(emphasized, config.frame_ms, config.hop_ms)
    windowed = dsp.apply_window(frames, _cached_window(frames.frame_len))
    n_fft = config.n_fft if config.n_fft is not None else dsp.next_pow2(frames.frame_len)
    power = dsp.power_spectra(windowed, n_fft)
    f_max = config.f_max_hz if config.f_max_hz is not None else buffer.sample_rate_hz / 2.0
    bank = _cached_bank(buffer.sample_rate_hz, n_fft, config.n_filters,
                        config.f_min_hz, f_max)
    coeffs = mfcc.compute_mfcc(power, bank, config.n_coeffs,
                               hop_ms=frames.hop_ms, log_floor=config.log_floor)
    contour = mfcc.energy_contour(coeffs, config.smooth_frames)
    return contour, frames.hop_ms, power, coeffs


def find_contour_peaks(contour, hop_ms: float, config: PipelineConfig) -> PeakList:
    """Apply the configured relative prominence and separation to a contour."""
    spread = float(np.max(contour) - np.min(contour))
    return detect_peaks(contour, config.prominence_frac * spread,
                        config.separation_frames, hop_ms=hop_ms)


def extract_record(buffer: AudioBuffer, config: PipelineConfig, subject_id: str,
                   utterance_id: str, label: str,
                   heart_rate_bpm: float | None = None) -> FeatureRecord:
    """Full chain from audio to one labeled feature record."""
    contour, hop_ms, _, _ = compute_contour(buffer, config)
    peaks = find_contour_peaks(contour, hop_ms, config)
    distance = peak_distance_feature(peaks)
    return FeatureRecord(subject_id, utterance_id, distance, heart_rate_bpm, label)
