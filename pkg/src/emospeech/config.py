"""Pipeline configuration: every tunable analysis parameter in one place."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

PRE_EMPHASIS_ALPHA = 0.97
FRAME_MS = 25.0
HOP_MS = 10.0
N_FILTERS = 26
N_COEFFS = 13
F_MIN_HZ = 0.0
LOG_FLOOR = 1e-10
SMOOTH_FRAMES = 5
PROMINENCE_FRAC = 0.2
SEPARATION_FRAMES = 4

_NONE_WORDS = {"none", "auto", ""}


@dataclass(frozen=True)
class PipelineConfig:
    """Parameters of the feature-extraction chain.

    ``n_fft`` of None means "next power of two at or above the frame length";
    ``f_max_hz`` of None means the Nyquist frequency of the input.
    """

    pre_emphasis_alpha: float = PRE_EMPHASIS_ALPHA
    frame_ms: float = FRAME_MS
    hop_ms: float = HOP_MS
    n_fft: int | None = None
    n_filters: int = N_FILTERS
    n_coeffs: int = N_COEFFS
    f_min_hz: float = F_MIN_HZ
    f_max_hz: float | None = None
    log_floor: float = LOG_FLOOR
    smooth_frames: int = SMOOTH_FRAMES
    prominence_frac: float = PROMINENCE_FRAC
    separation_frames: int = SEPARATION_FRAMES

    def validate(self) -> "PipelineConfig":
        if not 0.0 <= self.pre_emphasis_alpha < 1.0:
            raise ValueError("pre_emphasis_alpha must lie in [0, 1)")
        if self.frame_ms <= 0 or self.hop_ms <= 0:
            raise ValueError("frame_ms and hop_ms must be positive")
        if self.hop_ms > self.frame_ms:
            raise ValueError("hop_ms must not exceed frame_ms")
        if self.n_fft is not None and self.n_fft < 1:
            raise ValueError("n_fft must be positive")
        if self.n_filters < 2:
            raise ValueError("n_filters must be at least 2")
        if not 2 <= self.n_coeffs <= self.n_filters:
            raise ValueError("n_coeffs must lie in [2, n_filters]")
        if self.f_min_hz < 0:
            raise ValueError("f_min_hz must be non-negative")
        if self.f_max_hz is not None and self.f_max_hz <= self.f_min_hz:
            raise ValueError("f_max_hz must exceed f_min_hz")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")
        if self.smooth_frames < 1 or self.smooth_frames % 2 == 0:
            raise ValueError("smooth_frames must be a positive odd integer")
        if self.prominence_frac < 0:
            raise ValueError("prominence_frac must be non-negative")
        if self.separation_frames < 1:
            raise ValueError("separation_frames must be at least 1")
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(name: str, raw: str):
    text = raw.strip()
    ftype = _FIELD_TYPES[name]
    if "None" in ftype and text.lower() in _NONE_WORDS:
        return None
    if ftype.startswith("int"):
        return int(text)
    return float(text)


def parse_config_text(text: str, base: PipelineConfig | None = None) -> PipelineConfig:
    """Parse flat ``key=value`` lines (# comments allowed) over a base config."""
    cfg = base if base is not None else PipelineConfig()
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"config line {lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        try:
            overrides[key] = _coerce(key, value)
        except ValueError as exc:
            raise ValueError(f"config line {lineno}: bad value for {key!r}: {exc}") from None
    return replace(cfg, **overrides).validate()


def load_config(path, base: PipelineConfig | None = None) -> PipelineConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), base=base)


def apply_overrides(cfg: PipelineConfig, pairs) -> PipelineConfig:
    """Apply ``key=value`` strings (e.g. from command-line flags) onto a config."""
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"expected key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ValueError(f"unknown config key {key!r}")
        overrides[key] = _coerce(key, value)
    return replace(cfg, **overrides).validate()
