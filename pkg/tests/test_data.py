import itertools
import struct

import numpy as np
import pytest

from crowdcap.data import (
    DatasetManifest,
    FeatureSequence,
    GeneratorConfig,
    Record,
    attribute_directions,
    generate_dataset,
    generate_sequences,
    load_features,
    save_features,
    split_dataset,
)
from crowdcap.data.generator import BASIS_SCALE
from crowdcap.errors import (
    CorruptFile,
    EmptyFeatureSequence,
    InsufficientRecords,
    InvalidConfig,
    IoFailure,
    NotALabel,
)
from crowdcap.grammar import Caption, Movement, all_labels, all_triples, parse_caption


def _dir_bytes(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


class TestFeatureFiles:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(0)
        seq = FeatureSequence("v", rng.standard_normal((16, 64)).astype(np.float32))
        save_features(tmp_path / "v.cvcf", seq)
        back = load_features(tmp_path / "v.cvcf")
        assert back == seq
        assert back.frames.tobytes() == seq.frames.tobytes()

    def test_layout(self, tmp_path):
        seq = FeatureSequence("v", np.arange(6, dtype=np.float32).reshape(2, 3))
        save_features(tmp_path / "v.cvcf", seq)
        raw = (tmp_path / "v.cvcf").read_bytes()
        assert raw[:4] == b"CVCF"
        assert struct.unpack("<III", raw[4:16]) == (1, 2, 3)
        assert raw[16:] == np.arange(6, dtype="<f4").tobytes()

    def test_generated_roundtrip(self, tmp_path):
        for seq, _ in generate_sequences(GeneratorConfig(num_videos=3, seed=5)):
            save_features(tmp_path / "x.cvcf", seq)
            assert load_features(tmp_path / "x.cvcf", video_id=seq.video_id) == seq

    def test_bad_magic(self, tmp_path):
        save_features(tmp_path / "v.cvcf", FeatureSequence("v", np.ones((2, 3))))
        raw = bytearray((tmp_path / "v.cvcf").read_bytes())
        raw[:4] = b"NOPE"
        (tmp_path / "v.cvcf").write_bytes(bytes(raw))
        with pytest.raises(CorruptFile):
            load_features(tmp_path / "v.cvcf")

    def test_truncated_payload(self, tmp_path):
        save_features(tmp_path / "v.cvcf", FeatureSequence("v", np.ones((16, 8))))
        raw = (tmp_path / "v.cvcf").read_bytes()
        (tmp_path / "v.cvcf").write_bytes(raw[:-8 * 4])  # 15 frames of payload
        with pytest.raises(CorruptFile):
            load_features(tmp_path / "v.cvcf")

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoFailure):
            load_features(tmp_path / "absent.cvcf")

    def test_invariants(self):
        with pytest.raises(EmptyFeatureSequence):
            FeatureSequence("v", np.zeros((0, 4)))
        with pytest.raises(ValueError):
            FeatureSequence("v", np.array([[np.nan, 1.0]]))


class TestGenerator:
    def test_deterministic_files(self, tmp_path):
        config = GeneratorConfig(seed=3, num_videos=10)
        generate_dataset(config, tmp_path / "a")
        generate_dataset(config, tmp_path / "b")
        a, b = _dir_bytes(tmp_path / "a"), _dir_bytes(tmp_path / "b")
        assert a == b
        assert len([k for k in a if k.endswith(".cvcf")]) == 10

    def test_different_seeds_differ(self):
        a = generate_sequences(GeneratorConfig(seed=1, num_videos=4))
        b = generate_sequences(GeneratorConfig(seed=2, num_videos=4))
        assert any(x.frames.tobytes() != y.frames.tobytes() for (x, _), (y, _) in zip(a, b))

    def test_balanced_one_per_label(self):
        manifest, _ = generate_dataset(GeneratorConfig(num_videos=8, balanced=True))
        assert sorted(r.caption.text for r in manifest) == sorted(c.text for c in all_labels())

    def test_captions_parse(self):
        manifest, seqs = generate_dataset(GeneratorConfig(num_videos=50, seed=9))
        for r, s in zip(manifest, seqs):
            parse_caption(r.caption)
            assert s.frames.shape == (16, 64)
            assert np.isfinite(s.frames).all()

    def test_run_fraction_monte_carlo(self):
        shares = []
        for seed in range(50):
            pairs = generate_sequences(GeneratorConfig(seed=seed, num_videos=100, run_fraction=0.21,
                                                       feature_dim=9, frames_per_video=1, clip_length=1))
            shares.append(np.mean([t.movement is Movement.RUN for _, t in pairs]))
        assert abs(np.mean(shares) - 0.21) <= 0.05

    def test_noise_free_class_means_separated(self):
        pairs = generate_sequences(GeneratorConfig(num_videos=32, balanced=True, noise_scale=0.0))
        means = {}
        for seq, triple in pairs:
            means.setdefault(triple, []).append(seq.video_feature())
        centers = [np.mean(means[t], axis=0) for t in all_triples()]
        separation = BASIS_SCALE * np.sqrt(2)
        for a, b in itertools.combinations(centers, 2):
            assert np.linalg.norm(a - b) >= separation - 1e-4

    def test_basis_is_orthonormal(self):
        d = attribute_directions(64, basis_seed=0)
        np.testing.assert_allclose(d @ d.T, np.eye(9), atol=1e-12)

    @pytest.mark.parametrize("kwargs", [
        dict(feature_dim=4), dict(noise_scale=-1.0), dict(run_fraction=1.5),
        dict(frames_per_video=0), dict(clip_length=8, frames_per_video=16),
    ])
    def test_invalid_config(self, kwargs):
        with pytest.raises(InvalidConfig):
            generate_sequences(GeneratorConfig(**kwargs))


class TestManifest:
    def test_save_load(self, tmp_path):
        manifest, _ = generate_dataset(GeneratorConfig(num_videos=5), tmp_path)
        loaded = DatasetManifest.load(tmp_path)
        assert loaded.records == manifest.records
        text = (tmp_path / "manifest.tsv").read_text(encoding="utf-8")
        assert text.startswith("#")
        assert all(len(line.split("\t")) == 4 for line in text.splitlines()[1:])

    def test_rejects_bad_caption(self, tmp_path):
        generate_dataset(GeneratorConfig(num_videos=2), tmp_path)
        path = tmp_path / "manifest.tsv"
        path.write_text(path.read_text().replace("people", "persons", 1))
        with pytest.raises(NotALabel):
            DatasetManifest.load(tmp_path)

    def test_rejects_missing_file(self, tmp_path):
        generate_dataset(GeneratorConfig(num_videos=2), tmp_path)
        (tmp_path / "features" / "video_000.cvcf").unlink()
        with pytest.raises(IoFailure):
            DatasetManifest.load(tmp_path)

    def test_rejects_duplicate_ids(self):
        rec = Record("a", "a.cvcf", Caption.from_text("many people walk in"))
        with pytest.raises(ValueError):
            DatasetManifest([rec, rec])


def _records(n):
    labels = all_labels()
    return DatasetManifest([Record(f"v{i}", f"v{i}.cvcf", labels[i % 8]) for i in range(n)])


class TestSplit:
    @pytest.mark.parametrize("n, counts", [(98, (70, 19, 9)), (49, (45, 0, 4))])
    def test_sizes(self, n, counts):
        tagged = split_dataset(_records(n), counts, seed=0)
        sizes = tuple(len(tagged.subset(s)) for s in ("train", "val", "test"))
        assert sizes == counts
        assert {r.video_id for r in tagged} == {f"v{i}" for i in range(n)}

    def test_deterministic(self):
        a = split_dataset(_records(98), (70, 19, 9), seed=4)
        b = split_dataset(_records(98), (70, 19, 9), seed=4)
        c = split_dataset(_records(98), (70, 19, 9), seed=5)
        assert a.records == b.records
        assert a.records != c.records

    def test_insufficient(self):
        with pytest.raises(InsufficientRecords):
            split_dataset(_records(98), (98, 1, 0))

    def test_drops_unassigned(self):
        tagged = split_dataset(_records(10), (3, 2, 1), seed=0)
        assert len(tagged) == 6
