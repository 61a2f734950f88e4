"""The whole-video classifier and the S2VT sequence captioner."""

from .classifier import (
    ClassifierConfig,
    ClassifierRun,
    LinearClassifier,
    classify,
    one_hot,
    train_classifier,
)
from .s2vt import (
    CaptionerRun,
    S2VTConfig,
    S2VTModel,
    caption_forward_loss,
    greedy_decode,
    sentence_accuracy,
    train_captioner,
)

__all__ = [
    "ClassifierConfig", "ClassifierRun", "LinearClassifier", "classify", "one_hot",
    "train_classifier", "CaptionerRun", "S2VTConfig", "S2VTModel",
    "caption_forward_loss", "greedy_decode", "sentence_accuracy", "train_captioner",
]
