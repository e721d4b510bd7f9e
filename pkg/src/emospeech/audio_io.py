"""Reading and writing PCM WAV files as normalized mono sample buffers."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import EmptyAudio, IoFailure, MalformedHeader, UnsupportedEncoding

_PCM = 1
_IEEE_FLOAT = 3


@dataclass(frozen=True)
class AudioBuffer:
    """Mono audio: float64 samples (nominal range [-1, 1]) plus sample rate.

    Samples must be finite; intermediate processing stages (e.g. pre-emphasis)
    may exceed unit range, so magnitude is normalized at load/write time only.
    """

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if samples.size and not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if int(self.sample_rate_hz) <= 0:
            raise ValueError("sample_rate_hz must be positive")
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))

    def __len__(self):
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


def _parse_chunks(blob: bytes):
    """Yield (chunk_id, payload) pairs from a RIFF body, honoring pad bytes."""
    if len(blob) < 12 or blob[:4] != b"RIFF" or blob[8:12] != b"WAVE":
        raise MalformedHeader("not a RIFF/WAVE file")
    pos = 12
    while pos + 8 <= len(blob):
        cid = blob[pos:pos + 4]
        (size,) = struct.unpack_from("<I", blob, pos + 4)
        start = pos + 8
        if start + size > len(blob):
            raise MalformedHeader(f"chunk {cid!r} truncated")
        yield cid, blob[start:start + size]
        pos = start + size + (size % 2)


def _decode_samples(data: bytes, audio_format: int, bits: int) -> np.ndarray:
    if audio_format == _IEEE_FLOAT:
        raw32 = np.frombuffer(data, dtype="<f4").copy()
        raw32[~np.isfinite(raw32)] = 0.0
        return np.clip(raw32.astype(np.float64), -1.0, 1.0)
    if bits == 8:
        raw = np.frombuffer(data, dtype=np.uint8).astype(np.float64)
        return (raw - 128.0) / 128.0
    if bits == 16:
        raw = np.frombuffer(data, dtype="<i2").astype(np.float64)
        return raw / 32768.0
    # 24-bit: widen each triple to a sign-extended 32-bit integer
    triples = np.frombuffer(data, dtype=np.uint8).reshape(-1, 3)
    wide = np.zeros((triples.shape[0], 4), dtype=np.uint8)
    wide[:, :3] = triples
    wide[:, 3] = np.where(triples[:, 2] & 0x80, 0xFF, 0x00)
    raw = wide.view("<i4").ravel().astype(np.float64)
    return raw / float(2 ** 23)


def load_wav(path) -> AudioBuffer:
    """Load a PCM (8/16/24-bit) or 32-bit float WAV as normalized mono."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    fmt = None
    data = None
    for cid, payload in _parse_chunks(blob):
        if cid == b"fmt " and fmt is None:
            if len(payload) < 16:
                raise MalformedHeader("fmt chunk too small")
            fmt = struct.unpack_from("<HHIIHH", payload, 0)
        elif cid == b"data":
            data = payload
            break
    if fmt is None or data is None:
        raise MalformedHeader("missing fmt or data chunk")

    audio_format, n_channels, sample_rate, _, _, bits = fmt
    if sample_rate <= 0:
        raise MalformedHeader("invalid sample rate")
    if n_channels not in (1, 2):
        raise UnsupportedEncoding(f"{n_channels} channels not supported")
    if audio_format == _PCM:
        if bits not in (8, 16, 24):
            raise UnsupportedEncoding(f"{bits}-bit integer PCM not supported")
    elif audio_format == _IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedEncoding(f"{bits}-bit float not supported")
    else:
        raise UnsupportedEncoding(f"audio format {audio_format} not supported")

    bytes_per_sample = bits // 8
    frame_bytes = bytes_per_sample * n_channels
    usable = (len(data) // frame_bytes) * frame_bytes
    samples = _decode_samples(data[:usable], audio_format, bits)
    if n_channels == 2:
        samples = samples.reshape(-1, 2).mean(axis=1)
    if samples.size == 0:
        raise EmptyAudio("file contains no samples")
    return AudioBuffer(samples, sample_rate)


def write_wav(buffer: AudioBuffer, path) -> None:
    """Write a buffer as 16-bit mono PCM; round-trip error stays within 2^-15."""
    if len(buffer) == 0:
        raise EmptyAudio("cannot write an empty buffer")
    clipped = np.clip(buffer.samples, -1.0, 1.0)
    quantized = np.clip(np.round(clipped * 32768.0), -32768, 32767).astype("<i2")
    data = quantized.tobytes()

    header = b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, _PCM, 1, buffer.sample_rate_hz,
        buffer.sample_rate_hz * 2, 2, 16,
    )
    header += b"data" + struct.pack("<I", len(data))
    blob = b"RIFF" + struct.pack("<I", len(header) + len(data)) + header + data
    try:
        with open(path, "wb") as fh:
            fh.write(blob)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
