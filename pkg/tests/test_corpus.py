"""Synthetic burst-timing corpus: utterance synthesis and corpus generation."""

import csv
import hashlib
from dataclasses import replace

import numpy as np
import pytest

from emospeech import corpus, features
from emospeech.audio_io import load_wav
from emospeech.config import PipelineConfig
from emospeech.errors import InvalidProfile
from emospeech.seeding import derive_seed


def plain_profile(**overrides):
    base = dict(
        emotion="A", f0_hz=217.0, burst_interval_ms=200.0, burst_count=3,
        burst_duration_ms=25.0, amplitude=0.5, interval_jitter_frac=0.0,
        heart_rate_bpm=72.0,
    )
    base.update(overrides)
    return corpus.EmotionProfile(**base)


class TestEmotionProfile:
    def test_duration_must_undercut_interval(self):
        with pytest.raises(InvalidProfile):
            plain_profile(burst_duration_ms=200.0).validate()

    def test_burst_count_minimum(self):
        with pytest.raises(InvalidProfile):
            plain_profile(burst_count=1).validate()

    def test_amplitude_range(self):
        with pytest.raises(InvalidProfile):
            plain_profile(amplitude=0.0).validate()
        with pytest.raises(InvalidProfile):
            plain_profile(amplitude=1.5).validate()

    def test_negative_jitter(self):
        with pytest.raises(InvalidProfile):
            plain_profile(interval_jitter_frac=-0.1).validate()

    def test_defaults_cover_declared_emotions(self):
        profiles = corpus.default_profiles(("A", "B", "C", "D"))
        intervals = {e: p.burst_interval_ms for e, p in profiles.items()}
        # timing separations: sadness > neutral > anger > joy
        assert intervals["D"] > intervals["A"] > intervals["B"] > intervals["C"]
        for profile in profiles.values():
            profile.validate()


class TestSynthUtterance:
    def test_onsets_exact_without_jitter(self):
        profile = plain_profile()
        buf = corpus.synth_utterance(profile, 16000, seed=1)
        x = buf.samples
        n_dur = int(round(25.0 * 16))
        for k, onset_ms in enumerate((0.0, 200.0, 400.0)):
            start = int(round(onset_ms * 16))
            # the raised cosine is zero at the exact onset sample ...
            assert x[start] == 0.0
            # ... nonzero immediately after, and silent right before
            assert x[start + 1] != 0.0
            if k:
                prev_end = int(round((k - 1) * 200.0 * 16)) + n_dur
                assert np.all(x[prev_end:start + 1] == 0.0)

    def test_peak_amplitude_matches_profile(self):
        buf = corpus.synth_utterance(plain_profile(amplitude=0.62), 16000, seed=3)
        assert np.max(np.abs(buf.samples)) == pytest.approx(0.62, abs=1e-12)

    def test_deterministic_per_seed(self):
        profile = plain_profile(interval_jitter_frac=0.05)
        a = corpus.synth_utterance(profile, 16000, seed=9)
        b = corpus.synth_utterance(profile, 16000, seed=9)
        assert np.array_equal(a.samples, b.samples)

    def test_seed_changes_jittered_timing(self):
        profile = plain_profile(interval_jitter_frac=0.05)
        a = corpus.synth_utterance(profile, 16000, seed=1)
        b = corpus.synth_utterance(profile, 16000, seed=2)
        assert a.samples.shape != b.samples.shape or not np.array_equal(
            a.samples, b.samples)

    def test_invalid_profile_rejected(self):
        with pytest.raises(InvalidProfile):
            corpus.synth_utterance(plain_profile(burst_count=0), 16000, seed=0)

    def test_lead_in_shifts_every_onset(self):
        shifted = corpus.synth_utterance(
            plain_profile(lead_in_ms=40.0), 16000, seed=5)
        start = int(round(40.0 * 16))
        assert np.all(shifted.samples[:start + 1] == 0.0)
        assert shifted.samples[start + 1] != 0.0


class TestPipelineAgainstGenerator:
    CFG = PipelineConfig()

    def test_three_bursts_give_three_peaks_at_centers(self):
        profile = replace(corpus.default_profiles(("A",))["A"], burst_count=3)
        seed = derive_seed("three-burst-check")
        buf = corpus.synth_utterance(profile, 16000, seed)
        contour, hop_ms, _, _ = features.compute_contour(buf, self.CFG)
        peaks = features.find_contour_peaks(contour, hop_ms, self.CFG)
        assert len(peaks) == 3
        rng = np.random.default_rng(seed)
        jitters = rng.uniform(-profile.interval_jitter_frac,
                              profile.interval_jitter_frac, 3)
        for k, idx in enumerate(peaks.indices):
            onset_ms = profile.lead_in_ms + k * profile.burst_interval_ms * (
                1.0 + jitters[k])
            center_frame = (onset_ms + profile.burst_duration_ms / 2.0
                            - self.CFG.frame_ms / 2.0) / self.CFG.hop_ms
            assert abs(idx - center_frame) <= 1.0 + 1e-9

    def test_default_profile_distance_tracks_interval(self):
        for emotion, profile in corpus.default_profiles(("A", "B", "C", "D")).items():
            buf = corpus.synth_utterance(profile, 16000, derive_seed("d", emotion))
            record = features.extract_record(buf, self.CFG, "s", "u", emotion)
            err = abs(record.feature_distance_ms - profile.burst_interval_ms)
            assert err / profile.burst_interval_ms <= 0.15


class TestSynthCorpus:
    def test_counts_and_manifest(self, tmp_path):
        spec = corpus.CorpusSpec(n_subjects=1, utterances_per_emotion=4,
                                 emotions=("A", "B", "C"), master_seed=0)
        manifest_path = corpus.synth_corpus(spec, tmp_path / "c")
        wavs = sorted((tmp_path / "c" / "wavs").glob("*.wav"))
        assert len(wavs) == 12
        with open(manifest_path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["subject_id", "utterance_id", "emotion", "wav_path",
                          "heart_rate_bpm", "true_interval_ms"]
        assert len(rows) == 13
        emotions = sorted({r[2] for r in rows[1:]})
        assert emotions == ["A", "B", "C"]
        for row in rows[1:]:
            assert (tmp_path / "c" / row[3]).exists()

    def test_zero_variability_fixes_intervals(self, tmp_path):
        spec = corpus.CorpusSpec(n_subjects=3, utterances_per_emotion=2,
                                 emotions=("A", "B"), subject_variability_frac=0.0,
                                 master_seed=5)
        manifest_path = corpus.synth_corpus(spec, tmp_path / "c")
        rows = corpus.load_manifest(manifest_path)
        by_emotion = {}
        for row in rows:
            by_emotion.setdefault(row.emotion, set()).add(row.true_interval_ms)
        profiles = corpus.default_profiles(("A", "B"))
        for emotion, intervals in by_emotion.items():
            assert intervals == {profiles[emotion].burst_interval_ms}

    def test_variability_scales_subjects_consistently(self, tmp_path):
        spec = corpus.CorpusSpec(n_subjects=4, utterances_per_emotion=2,
                                 emotions=("A", "C"), subject_variability_frac=0.25,
                                 master_seed=2)
        rows = corpus.load_manifest(corpus.synth_corpus(spec, tmp_path / "c"))
        profiles = corpus.default_profiles(("A", "C"))
        factors = {}
        for row in rows:
            factor = row.true_interval_ms / profiles[row.emotion].burst_interval_ms
            factors.setdefault(row.subject_id, set()).add(round(factor, 12))
        # one shared timing factor per subject, within the variability band
        for subject, subject_factors in factors.items():
            assert len(subject_factors) == 1
            factor = next(iter(subject_factors))
            assert 0.75 - 1e-9 <= factor <= 1.25 + 1e-9
        assert len({next(iter(v)) for v in factors.values()}) == 4

    def test_heart_rate_varies_but_stays_near_profile(self, tmp_path):
        spec = corpus.CorpusSpec(n_subjects=3, utterances_per_emotion=5,
                                 emotions=("B",), subject_variability_frac=0.25,
                                 master_seed=7)
        rows = corpus.load_manifest(corpus.synth_corpus(spec, tmp_path / "c"))
        base = corpus.default_profiles(("B",))["B"].heart_rate_bpm
        rates = [row.heart_rate_bpm for row in rows]
        assert len(set(rates)) > 1
        for rate in rates:
            assert base * 0.75 * 0.98 <= rate <= base * 1.25 * 1.02

    def test_deterministic_corpus_bytes(self, tmp_path):
        spec = corpus.CorpusSpec(n_subjects=2, utterances_per_emotion=2,
                                 emotions=("A", "B"), master_seed=11)
        path_a = corpus.synth_corpus(spec, tmp_path / "a")
        path_b = corpus.synth_corpus(spec, tmp_path / "b")

        def digest(root):
            out = {}
            for p in sorted(root.rglob("*")):
                if p.is_file():
                    out[str(p.relative_to(root))] = hashlib.sha256(
                        p.read_bytes()).hexdigest()
            return out

        assert digest(tmp_path / "a") == digest(tmp_path / "b")
        assert path_a.name == path_b.name

    def test_wavs_load_cleanly(self, tmp_path):
        spec = corpus.CorpusSpec(n_subjects=1, utterances_per_emotion=2,
                                 emotions=("C",), master_seed=3)
        manifest_path = corpus.synth_corpus(spec, tmp_path / "c")
        for row in corpus.load_manifest(manifest_path):
            buf = load_wav(manifest_path.parent / row.wav_path)
            assert buf.sample_rate_hz == 16000
            assert np.max(np.abs(buf.samples)) > 0.1
