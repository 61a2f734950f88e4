"""Synthetic crowd features conditioned on an attribute triple.

Each label owns a basis vector ``B`` (eight orthonormal directions scaled
by :data:`BASIS_SCALE`), and the label's movement and direction set a drift
``D`` along a ninth orthonormal direction: the sign encodes in/out and a
running crowd drifts twice as fast as a walking one.  A video samples
``frames_per_video`` sorted frame indices ``t`` from a clip of
``clip_length`` frames and emits ``B + t * D + noise``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..errors import InvalidConfig
from ..grammar import AttributeTriple, Direction, Movement, Size, all_triples, render_caption
from .features import FeatureSequence, save_features
from .manifest import MANIFEST_NAME, DatasetManifest, Record

BASIS_SCALE = 3.0
WALK_SPEED = 0.05
FEATURE_DIR = "features"


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    num_videos: int = 98
    frames_per_video: int = 16
    feature_dim: int = 64
    noise_scale: float = 0.1
    run_fraction: float = 0.21
    balanced: bool = False
    clip_length: int = 32
    # separate from ``seed`` so corpora drawn with different seeds share a basis
    basis_seed: int = 0

    def validate(self):
        if self.num_videos < 0:
            raise InvalidConfig("num_videos must be non-negative")
        if self.frames_per_video < 1:
            raise InvalidConfig("frames_per_video must be positive")
        if self.feature_dim < len(all_triples()) + 1:
            raise InvalidConfig(f"feature_dim must be at least {len(all_triples()) + 1}")
        if self.noise_scale < 0:
            raise InvalidConfig("noise_scale must be non-negative")
        if not 0.0 <= self.run_fraction <= 1.0:
            raise InvalidConfig("run_fraction must lie in [0, 1]")
        if self.clip_length < self.frames_per_video:
            raise InvalidConfig("clip_length must be at least frames_per_video")

    def as_dict(self):
        return asdict(self)


def attribute_directions(feature_dim, basis_seed=0):
    """Nine orthonormal rows: one per label (class-id order) plus the drift axis."""
    k = len(all_triples()) + 1
    g = np.random.default_rng(basis_seed).standard_normal((feature_dim, k))
    q, r = np.linalg.qr(g)
    # fix QR's sign ambiguity so the basis depends only on the seed
    return (q * np.sign(np.diag(r))).T


def drift(triple: AttributeTriple, axis):
    speed = WALK_SPEED * (2.0 if triple.movement is Movement.RUN else 1.0)
    sign = 1.0 if triple.direction is Direction.IN else -1.0
    return sign * speed * axis


def _draw_triple(rng, config, index):
    if config.balanced:
        return all_triples()[index % len(all_triples())]
    size = Size.MANY if rng.random() < 0.5 else Size.FEW
    movement = Movement.RUN if rng.random() < config.run_fraction else Movement.WALK
    direction = Direction.IN if rng.random() < 0.5 else Direction.OUT
    return AttributeTriple(size, movement, direction)


def generate_sequences(config: GeneratorConfig):
    """Return ``[(FeatureSequence, AttributeTriple), ...]`` for ``config``."""
    config.validate()
    dirs = attribute_directions(config.feature_dim, config.basis_seed)
    bases = {t: BASIS_SCALE * dirs[i] for i, t in enumerate(all_triples())}
    axis = dirs[-1]
    rng = np.random.default_rng(config.seed)
    out = []
    for i in range(config.num_videos):
        triple = _draw_triple(rng, config, i)
        t = np.sort(rng.choice(config.clip_length, size=config.frames_per_video, replace=False))
        noise = rng.standard_normal((config.frames_per_video, config.feature_dim))
        frames = bases[triple] + t[:, None] * drift(triple, axis) + config.noise_scale * noise
        out.append((FeatureSequence(f"video_{i:03d}", frames.astype(np.float32)), triple))
    return out


def generate_dataset(config: GeneratorConfig, out_dir=None):
    """Generate a corpus; when ``out_dir`` is given, write feature files and manifest.

    Returns ``(manifest, sequences)``; every record starts with split "train".
    """
    pairs = generate_sequences(config)
    root = Path(out_dir) if out_dir is not None else Path(".")
    records = [Record(seq.video_id, f"{FEATURE_DIR}/{seq.video_id}.cvcf", render_caption(triple))
               for seq, triple in pairs]
    manifest = DatasetManifest(records, root)
    if out_dir is not None:
        (root / FEATURE_DIR).mkdir(parents=True, exist_ok=True)
        for seq, _ in pairs:
            save_features(root / FEATURE_DIR / f"{seq.video_id}.cvcf", seq)
        manifest.save(root / MANIFEST_NAME)
    return manifest, [seq for seq, _ in pairs]
