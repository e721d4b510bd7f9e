"""Deterministic synthetic corpus: harmonic tone bursts whose spacing varies
by emotion, plus per-subject timing/heart-rate variation and a CSV manifest."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .audio_io import AudioBuffer, write_wav
from .errors import InvalidProfile, IoFailure
from .seeding import derive_seed, rng_from

BURST_COUNT = 5
BURST_DURATION_MS = 25.0
INTERVAL_JITTER_FRAC = 0.05
LEAD_IN_MS = 40.0
TAIL_MS = 60.0
HEART_RATE_JITTER_FRAC = 0.02
SAMPLE_RATE_HZ = 16000
SUBJECT_VARIABILITY_FRAC = 0.25
UTTERANCES_PER_EMOTION = 30

# per-emotion timing and voice defaults: spacing encodes the intended ordering
# sadness (D) > neutral (A) > anger (B) > joy (C)
_BASE_PROFILES = {
    "A": dict(burst_interval_ms=180.0, f0_hz=200.0, amplitude=0.5,
              heart_rate_bpm=72.0),
    "B": dict(burst_interval_ms=140.0, f0_hz=240.0, amplitude=0.8,
              heart_rate_bpm=95.0),
    "C": dict(burst_interval_ms=100.0, f0_hz=260.0, amplitude=0.7,
              heart_rate_bpm=88.0),
    "D": dict(burst_interval_ms=240.0, f0_hz=180.0, amplitude=0.4,
              heart_rate_bpm=62.0),
}

_HARMONIC_GAINS = (1.0, 0.5, 0.25)


@dataclass(frozen=True)
class EmotionProfile:
    """Synthesis recipe for one emotion's utterances."""

    emotion: str
    f0_hz: float
    burst_interval_ms: float
    burst_count: int
    burst_duration_ms: float
    amplitude: float
    interval_jitter_frac: float
    heart_rate_bpm: float
    lead_in_ms: float = 0.0

    def validate(self) -> "EmotionProfile":
        if self.burst_count < 2:
            raise InvalidProfile("burst_count must be at least 2")
        if self.burst_interval_ms <= 0 or self.burst_duration_ms <= 0:
            raise InvalidProfile("interval and duration must be positive")
        if self.burst_duration_ms >= self.burst_interval_ms:
            raise InvalidProfile("burst_duration_ms must undercut the interval")
        if not 0.0 < self.amplitude <= 1.0:
            raise InvalidProfile("amplitude must lie in (0, 1]")
        if self.interval_jitter_frac < 0:
            raise InvalidProfile("interval_jitter_frac must be non-negative")
        if self.f0_hz <= 0:
            raise InvalidProfile("f0_hz must be positive")
        if self.heart_rate_bpm <= 0:
            raise InvalidProfile("heart_rate_bpm must be positive")
        if self.lead_in_ms < 0:
            raise InvalidProfile("lead_in_ms must be non-negative")
        return self


def default_profiles(emotions=("A", "B", "C")) -> dict[str, EmotionProfile]:
    """Default profile per emotion label; lead-in keeps the first burst
    clear of the contour edge so its peak stays detectable."""
    profiles = {}
    for emotion in emotions:
        if emotion not in _BASE_PROFILES:
            raise ValueError(f"no default profile for emotion {emotion!r}")
        profiles[emotion] = EmotionProfile(
            emotion=emotion, burst_count=BURST_COUNT,
            burst_duration_ms=BURST_DURATION_MS,
            interval_jitter_frac=INTERVAL_JITTER_FRAC, lead_in_ms=LEAD_IN_MS,
            **_BASE_PROFILES[emotion],
        ).validate()
    return profiles


@dataclass(frozen=True)
class CorpusSpec:
    """Shape and randomness of a synthetic corpus."""

    n_subjects: int
    utterances_per_emotion: int = UTTERANCES_PER_EMOTION
    emotions: tuple = ("A", "B", "C")
    subject_variability_frac: float = SUBJECT_VARIABILITY_FRAC
    master_seed: int = 0
    sample_rate_hz: int = SAMPLE_RATE_HZ

    def validate(self) -> "CorpusSpec":
        if self.n_subjects < 1:
            raise ValueError("n_subjects must be at least 1")
        if self.utterances_per_emotion < 2:
            raise ValueError("utterances_per_emotion must be at least 2")
        if self.subject_variability_frac < 0:
            raise ValueError("subject_variability_frac must be non-negative")
        if not self.emotions or len(set(self.emotions)) != len(self.emotions):
            raise ValueError("emotions must be non-empty and unique")
        return self


def _burst_waveform(profile: EmotionProfile, sample_rate_hz: int) -> np.ndarray:
    """One raised-cosine harmonic burst, peak scaled to profile.amplitude."""
    n = int(round(profile.burst_duration_ms * sample_rate_hz / 1000.0))
    if n < 2:
        raise InvalidProfile("burst_duration_ms too short for the sample rate")
    t = np.arange(n) / sample_rate_hz
    duration_s = profile.burst_duration_ms / 1000.0
    envelope = 0.5 * (1.0 - np.cos(2.0 * np.pi * t / duration_s))
    tone = np.zeros(n)
    for harmonic, gain in enumerate(_HARMONIC_GAINS, start=1):
        tone += gain * np.sin(2.0 * np.pi * harmonic * profile.f0_hz * t)
    burst = envelope * tone
    peak = np.max(np.abs(burst))
    if peak == 0.0:
        raise InvalidProfile("burst waveform is silent")
    return (burst / peak) * profile.amplitude


def synth_utterance(profile: EmotionProfile, sample_rate_hz: int,
                    seed: int) -> AudioBuffer:
    """Bursts at onset k = lead_in + k*interval*(1 + jitter_k), jitter seeded."""
    profile.validate()
    rng = np.random.default_rng(seed)
    jitter = profile.interval_jitter_frac
    jitters = rng.uniform(-jitter, jitter, profile.burst_count)
    onsets_ms = profile.lead_in_ms + (
        np.arange(profile.burst_count) * profile.burst_interval_ms
        * (1.0 + jitters))
    burst = _burst_waveform(profile, sample_rate_hz)
    onset_samples = np.round(onsets_ms * sample_rate_hz / 1000.0).astype(int)
    tail = int(round(TAIL_MS * sample_rate_hz / 1000.0))
    x = np.zeros(onset_samples[-1] + burst.size + tail)
    for start in onset_samples:
        x[start:start + burst.size] += burst
    return AudioBuffer(np.clip(x, -1.0, 1.0), sample_rate_hz)


@dataclass(frozen=True)
class ManifestRow:
    subject_id: str
    utterance_id: str
    emotion: str
    wav_path: str
    heart_rate_bpm: float
    true_interval_ms: float


MANIFEST_HEADER = ("subject_id", "utterance_id", "emotion", "wav_path",
                   "heart_rate_bpm", "true_interval_ms")


def synth_corpus(spec: CorpusSpec, out_dir) -> Path:
    """Generate WAVs plus a manifest CSV; returns the manifest path.

    Each subject draws one timing factor (scales every emotion's interval and
    f0 together, so per-subject emotion ordering is preserved) and an
    independent heart-rate factor; each utterance adds small heart-rate jitter.
    """
    spec.validate()
    profiles = default_profiles(spec.emotions)
    out = Path(out_dir)
    try:
        (out / "wavs").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create corpus directory {out}: {exc}") from exc

    rows = []
    for s in range(spec.n_subjects):
        subject_rng = rng_from(spec.master_seed, "subject", s)
        timing_factor = 1.0 + subject_rng.uniform(-1.0, 1.0) * spec.subject_variability_frac
        rate_factor = 1.0 + subject_rng.uniform(-1.0, 1.0) * spec.subject_variability_frac
        subject_id = f"s{s:02d}"
        for emotion in spec.emotions:
            base = profiles[emotion]
            scaled = replace(
                base,
                burst_interval_ms=base.burst_interval_ms * timing_factor,
                f0_hz=base.f0_hz * timing_factor,
                heart_rate_bpm=base.heart_rate_bpm * rate_factor,
            ).validate()
            for i in range(spec.utterances_per_emotion):
                utterance_seed = derive_seed(spec.master_seed, "utterance",
                                             s, emotion, i)
                buffer = synth_utterance(scaled, spec.sample_rate_hz,
                                         utterance_seed)
                hr_rng = rng_from(spec.master_seed, "heart-rate", s, emotion, i)
                heart_rate = scaled.heart_rate_bpm * (
                    1.0 + hr_rng.uniform(-HEART_RATE_JITTER_FRAC,
                                         HEART_RATE_JITTER_FRAC))
                utterance_id = f"{subject_id}_{emotion}_{i:03d}"
                rel_path = f"wavs/{utterance_id}.wav"
                write_wav(buffer, out / rel_path)
                rows.append(ManifestRow(
                    subject_id, utterance_id, emotion, rel_path,
                    heart_rate, scaled.burst_interval_ms))

    manifest_path = out / "manifest.csv"
    try:
        with open(manifest_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(MANIFEST_HEADER)
            for row in rows:
                writer.writerow([
                    row.subject_id, row.utterance_id, row.emotion, row.wav_path,
                    repr(row.heart_rate_bpm), repr(row.true_interval_ms),
                ])
    except OSError as exc:
        raise IoFailure(f"cannot write manifest {manifest_path}: {exc}") from exc
    return manifest_path


def load_manifest(path) -> list[ManifestRow]:
    """Read a manifest CSV back into rows."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != MANIFEST_HEADER:
                raise IoFailure(f"{path} is not a corpus manifest")
            rows = []
            for record in reader:
                if len(record) != len(MANIFEST_HEADER):
                    raise IoFailure(f"malformed manifest row: {record!r}")
                rows.append(ManifestRow(
                    record[0], record[1], record[2], record[3],
                    float(record[4]), float(record[5])))
    except OSError as exc:
        raise IoFailure(f"cannot read manifest {path}: {exc}") from exc
    return rows
