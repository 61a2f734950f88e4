"""Dataset manifest: one tab-separated record per video.

Columns are ``video_id``, feature file path (relative to the manifest's
directory), caption text and split tag.  Lines starting with ``#`` are
comments.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..errors import CorruptFile, InsufficientRecords, IoFailure
from ..grammar import Caption, as_caption, parse_caption
from .features import load_features

SPLITS = ("train", "val", "test")
MANIFEST_NAME = "manifest.tsv"


@dataclass(frozen=True)
class Record:
    video_id: str
    path: str
    caption: Caption
    split: str = "train"


@dataclass
class DatasetManifest:
    records: list
    root: Path = Path(".")

    def __post_init__(self):
        self.root = Path(self.root)
        ids = [r.video_id for r in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate video ids in manifest")
        for r in self.records:
            parse_caption(r.caption)
            if r.split not in SPLITS:
                raise ValueError(f"{r.video_id}: unknown split tag {r.split!r}")

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def subset(self, split) -> "DatasetManifest":
        return DatasetManifest([r for r in self.records if r.split == split], self.root)

    def feature_path(self, record: Record) -> Path:
        return self.root / record.path

    def load_features(self, record: Record):
        return load_features(self.feature_path(record), video_id=record.video_id)

    def load_all(self):
        """``(feature sequences, captions)`` in record order."""
        return [self.load_features(r) for r in self.records], [r.caption for r in self.records]

    def dumps(self) -> str:
        lines = ["# video_id\tpath\tcaption\tsplit"]
        lines += [f"{r.video_id}\t{r.path}\t{r.caption.text}\t{r.split}" for r in self.records]
        return "\n".join(lines) + "\n"

    def save(self, path=None) -> Path:
        path = Path(path) if path is not None else self.root / MANIFEST_NAME
        try:
            path.write_text(self.dumps(), encoding="utf-8")
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        return path

    @classmethod
    def load(cls, path, check_files=True) -> "DatasetManifest":
        """Read a manifest file, or ``<dir>/manifest.tsv`` when given a directory."""
        path = Path(path)
        if path.is_dir():
            path = path / MANIFEST_NAME
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        records = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise CorruptFile(f"{path}:{lineno}: expected 4 tab-separated fields")
            vid, rel, caption, split = fields
            records.append(Record(vid, rel, as_caption(caption), split))
        manifest = cls(records, path.parent)
        if check_files:
            missing = [r.path for r in records if not manifest.feature_path(r).is_file()]
            if missing:
                raise IoFailure(f"{path}: missing feature files: {missing[:5]}")
        return manifest


def split_dataset(manifest: DatasetManifest, counts, seed=0) -> DatasetManifest:
    """Shuffle with ``seed`` and tag the first ``counts`` records train/val/test.

    Records beyond ``sum(counts)`` are dropped from the returned manifest.
    """
    counts = tuple(int(c) for c in counts)
    if len(counts) != 3 or min(counts) < 0:
        raise ValueError(f"counts must be three non-negative integers, got {counts}")
    if sum(counts) > len(manifest):
        raise InsufficientRecords(f"split {counts} needs {sum(counts)} records, have {len(manifest)}")
    order = np.random.default_rng(seed).permutation(len(manifest))
    tags = [s for s, c in zip(SPLITS, counts) for _ in range(c)]
    chosen = sorted(zip(order[:len(tags)], tags))
    records = [replace(manifest.records[i], split=tag) for i, tag in chosen]
    return DatasetManifest(records, manifest.root)
