"""Feature files, dataset manifests, splitting and the synthetic generator."""

from .features import FeatureSequence, load_features, save_features
from .generator import GeneratorConfig, attribute_directions, generate_dataset, generate_sequences
from .manifest import DatasetManifest, Record, split_dataset

__all__ = [
    "FeatureSequence", "load_features", "save_features", "GeneratorConfig",
    "attribute_directions", "generate_dataset", "generate_sequences",
    "DatasetManifest", "Record", "split_dataset",
]
