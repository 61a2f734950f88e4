"""Binary per-video feature files.

Layout: ``b"CVCF"`` then little-endian uint32 version, n_frames and
feature_dim, then ``n_frames * feature_dim`` little-endian float32 values
in frame-major order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import CorruptFile, EmptyFeatureSequence, IoFailure, ShapeMismatch

FEATURE_MAGIC = b"CVCF"
FEATURE_VERSION = 1
_HEADER = struct.Struct("<4sIII")


@dataclass
class FeatureSequence:
    """Per-frame feature vectors of one video, shape ``(n_frames, feature_dim)``."""

    video_id: str
    frames: np.ndarray

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float32)
        if frames.ndim != 2:
            raise ShapeMismatch(f"{self.video_id}: frames must be 2-D, got shape {frames.shape}")
        if frames.shape[0] == 0:
            raise EmptyFeatureSequence(f"{self.video_id}: no frames")
        if not np.isfinite(frames).all():
            raise ValueError(f"{self.video_id}: non-finite feature values")
        self.frames = frames

    @property
    def num_frames(self):
        return self.frames.shape[0]

    @property
    def feature_dim(self):
        return self.frames.shape[1]

    def video_feature(self):
        """Whole-video vector: the frame mean (a single frame is returned as-is)."""
        return self.frames.astype(np.float64).mean(axis=0)

    def __eq__(self, other):
        return (isinstance(other, FeatureSequence) and self.video_id == other.video_id
                and self.frames.shape == other.frames.shape
                and self.frames.tobytes() == other.frames.tobytes())


def encode_features(seq: FeatureSequence) -> bytes:
    n, d = seq.frames.shape
    return _HEADER.pack(FEATURE_MAGIC, FEATURE_VERSION, n, d) + seq.frames.astype("<f4").tobytes()


def save_features(path, seq: FeatureSequence) -> None:
    try:
        Path(path).write_bytes(encode_features(seq))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def load_features(path, video_id=None) -> FeatureSequence:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    if len(raw) < _HEADER.size:
        raise CorruptFile(f"{path}: truncated header")
    magic, version, n, d = _HEADER.unpack_from(raw)
    if magic != FEATURE_MAGIC:
        raise CorruptFile(f"{path}: bad magic {magic!r}")
    if version != FEATURE_VERSION:
        raise CorruptFile(f"{path}: unsupported version {version}")
    payload = raw[_HEADER.size:]
    if len(payload) != 4 * n * d:
        raise CorruptFile(f"{path}: header says {n}x{d} floats, payload has {len(payload) // 4}")
    frames = np.frombuffer(payload, dtype="<f4").reshape(n, d).astype(np.float32)
    return FeatureSequence(video_id if video_id is not None else path.stem, frames)
