"""Two-layer sequence-to-sequence captioner in the S2VT arrangement.

Layer 1 reads frame features; layer 2 reads ``[h1, embed(word)]`` and its
hidden state is projected to vocabulary logits.  During the ``n`` encoding
steps layer 2 sees the PAD embedding; during decoding layer 1 sees a zero
(PAD) frame and layer 2 sees BOS followed by the previous word.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    EmptyDataset,
    EmptyFeatureSequence,
    IncompatibleCheckpoint,
    LengthMismatch,
    NonFiniteLoss,
    ShapeMismatch,
)
from ..grammar import MAX_CAPTION_LEN, Caption, Vocabulary, as_caption, decode_tokens, default_vocabulary, encode_tokens
from ..numerics import (
    DEFAULT_CLIP_NORM,
    ParameterStore,
    StepDecaySchedule,
    Tensor,
    concat,
    embedding,
    load_checkpoint,
    no_grad,
    save_checkpoint,
    sgd_step,
    softmax_cross_entropy,
)
from ..recurrent import make_cell

log = logging.getLogger(__name__)


@dataclass
class S2VTConfig:
    feature_dim: int = 2048
    hidden_dim: int = 512
    embed_dim: int = 512
    cell_kind: str = "gru"
    max_caption_len: int = MAX_CAPTION_LEN
    schedule: StepDecaySchedule = field(default_factory=lambda: StepDecaySchedule(4e-5, 0.8, 200))
    max_epochs: int = 2000
    seed: int = 0
    clip_norm: float | None = DEFAULT_CLIP_NORM
    eval_every: int = 10

    def __post_init__(self):
        self.cell_kind = self.cell_kind.lower()
        if self.cell_kind not in ("lstm", "gru"):
            raise ValueError(f"cell_kind must be 'lstm' or 'gru', got {self.cell_kind!r}")
        for name in ("feature_dim", "hidden_dim", "embed_dim", "max_caption_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


def _stack_frames(features):
    """Batch of feature sequences -> array ``(batch, n, dim)``."""
    arrays = [np.asarray(getattr(f, "frames", f), dtype=np.float64) for f in features]
    if not arrays:
        raise EmptyFeatureSequence("no feature sequences")
    for a in arrays:
        if a.ndim != 2:
            raise ShapeMismatch(f"feature sequence must be (frames, dim), got {a.shape}")
        if a.shape[0] == 0:
            raise EmptyFeatureSequence("feature sequence has no frames")
    if len({a.shape for a in arrays}) != 1:
        raise ShapeMismatch("sequences in one batch must share (frames, dim)")
    return np.stack(arrays)


class S2VTModel:
    def __init__(self, config: S2VTConfig, vocab: Vocabulary | None = None):
        self.config = config
        self.vocab = vocab or default_vocabulary()
        c = config
        self.store = ParameterStore(c.seed)
        self.embed = self.store.uniform("embed", (len(self.vocab), c.embed_dim), fan_in=c.embed_dim)
        self.layer1 = make_cell(c.cell_kind, self.store, "layer1", c.feature_dim, c.hidden_dim)
        self.layer2 = make_cell(c.cell_kind, self.store, "layer2", c.hidden_dim + c.embed_dim, c.hidden_dim)
        self.out_W = self.store.uniform("out.W", (c.hidden_dim, len(self.vocab)))
        self.out_b = self.store.uniform("out.b", (len(self.vocab),), fan_in=c.hidden_dim)

    # forward pieces

    def _words(self, ids):
        return embedding(self.embed, ids)

    def _encode(self, frames):
        """Run the encoding stage; return the two layer states after ``n`` frames."""
        batch, n, dim = frames.shape
        if dim != self.config.feature_dim:
            raise ShapeMismatch(f"feature dim {dim} != model feature_dim {self.config.feature_dim}")
        s1 = self.layer1.initial_state(batch)
        s2 = self.layer2.initial_state(batch)
        pad = self._words(np.full(batch, self.vocab.pad_id))
        for t in range(n):
            s1 = self.layer1.step(Tensor(frames[:, t, :]), s1)
            s2 = self.layer2.step(concat([s1.h, pad]), s2)
        return s1, s2

    def _decode_step(self, s1, s2, word_ids):
        batch = len(word_ids)
        s1 = self.layer1.step(Tensor(np.zeros((batch, self.config.feature_dim))), s1)
        s2 = self.layer2.step(concat([s1.h, self._words(word_ids)]), s2)
        return s1, s2, s2.h @ self.out_W + self.out_b

    def step_logits(self, features, target_ids):
        """Teacher-forced logits, one ``(batch, vocab)`` array per decoding step.

        Step ``i`` is fed ``target_ids[:, i]`` and predicts ``target_ids[:, i + 1]``.
        """
        frames = _stack_frames(features)
        target_ids = np.asarray(target_ids, dtype=np.intp)
        s1, s2 = self._encode(frames)
        out = []
        for i in range(target_ids.shape[1] - 1):
            s1, s2, logits = self._decode_step(s1, s2, target_ids[:, i])
            out.append(logits)
        return out

    def batch_loss(self, features, target_ids, mean=True):
        """Sum over decode steps of ``-log P(target)``; averaged over the batch when ``mean``.

        ``target_ids`` rows are encoded captions (BOS ... EOS PAD...).  Steps
        after the last EOS in the batch are not run; PAD targets carry no loss.
        """
        target_ids = np.asarray(target_ids, dtype=np.intp)
        if target_ids.ndim != 2:
            raise ShapeMismatch("target_ids must be (batch, length)")
        batch = target_ids.shape[0]
        if len(features) != batch:
            raise LengthMismatch(f"{len(features)} feature sequences for {batch} targets")
        live = target_ids[:, 1:] != self.vocab.pad_id
        steps = int(live.any(axis=0).nonzero()[0].max()) + 1 if live.any() else 0
        logits = self.step_logits(features, target_ids[:, :steps + 1])
        scale = 1.0 / batch if mean else 1.0
        loss = None
        for i, lg in enumerate(logits):
            term = softmax_cross_entropy(lg, target_ids[:, i + 1], live[:, i] * scale)
            loss = term if loss is None else loss + term
        return loss if loss is not None else Tensor(0.0)

    def encode_caption(self, caption):
        return encode_tokens(caption, self.vocab, self.config.max_caption_len)

    def decode_batch(self, features):
        """Greedy decoding for a batch of equally shaped sequences."""
        frames = _stack_frames(features)
        batch = frames.shape[0]
        banned = [self.vocab.bos_id, self.vocab.pad_id]
        with no_grad():
            s1, s2 = self._encode(frames)
            words = np.full(batch, self.vocab.bos_id)
            emitted = np.full((batch, self.config.max_caption_len), self.vocab.pad_id)
            done = np.zeros(batch, dtype=bool)
            for i in range(self.config.max_caption_len):
                s1, s2, logits = self._decode_step(s1, s2, words)
                scores = logits.data.copy()
                scores[:, banned] = -np.inf
                # np.argmax returns the first maximum: ties go to the lowest id
                words = scores.argmax(axis=1)
                words[done] = self.vocab.pad_id
                emitted[:, i] = words
                done |= words == self.vocab.eos_id
                if done.all():
                    break
        return [decode_tokens(row, self.vocab) for row in emitted]

    # persistence

    def metadata(self):
        c = self.config
        return {
            "model": "s2vt",
            "cell_kind": c.cell_kind,
            "feature_dim": c.feature_dim,
            "hidden_dim": c.hidden_dim,
            "embed_dim": c.embed_dim,
            "max_caption_len": c.max_caption_len,
            "vocab_hash": self.vocab.digest(),
            "vocab": " ".join(self.vocab.content_tokens),
        }

    def save(self, path):
        save_checkpoint(path, self.store.snapshot(), self.metadata())

    @classmethod
    def load(cls, path, vocab: Vocabulary | None = None):
        state, meta = load_checkpoint(path)
        if meta.get("model") != "s2vt":
            raise IncompatibleCheckpoint(f"{path}: not an S2VT checkpoint")
        vocab = vocab or Vocabulary(meta["vocab"].split())
        if vocab.digest() != meta["vocab_hash"]:
            raise IncompatibleCheckpoint(f"{path}: vocabulary hash mismatch")
        config = S2VTConfig(
            feature_dim=int(meta["feature_dim"]),
            hidden_dim=int(meta["hidden_dim"]),
            embed_dim=int(meta["embed_dim"]),
            cell_kind=meta["cell_kind"],
            max_caption_len=int(meta["max_caption_len"]),
        )
        model = cls(config, vocab)
        model.store.load_state(state)
        return model


def caption_forward_loss(model: S2VTModel, features, target) -> Tensor:
    """Negative log-likelihood of one caption given one feature sequence.

    ``target`` may be a caption or an already encoded id sequence.
    """
    frames = np.asarray(getattr(features, "frames", features))
    if frames.ndim != 2 or frames.shape[0] == 0:
        raise EmptyFeatureSequence("need at least one frame")
    if isinstance(target, (str, Caption)):
        target = model.encode_caption(target)
    return model.batch_loss([frames], np.asarray([target]), mean=False)


def _batches(features):
    """Group indices by sequence shape so each group stacks into one array."""
    groups = {}
    for i, f in enumerate(features):
        groups.setdefault(np.shape(getattr(f, "frames", f)), []).append(i)
    return list(groups.values())


def greedy_decode(model: S2VTModel, features) -> Caption | list[Caption]:
    """Decode one sequence (returns a Caption) or a list of them (returns a list)."""
    single = hasattr(features, "frames") or (isinstance(features, np.ndarray) and features.ndim == 2)
    items = [features] if single else list(features)
    out = [None] * len(items)
    for idx in _batches(items):
        for i, cap in zip(idx, model.decode_batch([items[i] for i in idx])):
            out[i] = cap
    return out[0] if single else out


def sentence_accuracy(predictions, references) -> float:
    """Fraction of predictions whose token sequence equals the reference exactly."""
    predictions, references = list(predictions), list(references)
    if len(predictions) != len(references):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(references)} references")
    if not predictions:
        return float("nan")
    hits = sum(as_caption(p).tokens == as_caption(r).tokens for p, r in zip(predictions, references))
    return hits / len(predictions)


@dataclass
class CaptionerRun:
    model: S2VTModel
    trace: list


def _mean_loss(model, groups, n_total):
    loss = None
    for feats, targets in groups:
        term = model.batch_loss(feats, targets, mean=False) * (1.0 / n_total)
        loss = term if loss is None else loss + term
    return loss


def train_captioner(features, captions, config: S2VTConfig, val=None, vocab=None,
                    stop_at_accuracy=None) -> CaptionerRun:
    """Full-batch gradient descent on the mean caption loss.

    Accuracies are evaluated every ``config.eval_every`` epochs and at the
    last epoch (NaN elsewhere).  With ``stop_at_accuracy`` training halts
    after the first evaluation whose train accuracy reaches that value.
    """
    features, captions = list(features), [as_caption(c) for c in captions]
    if not features:
        raise EmptyDataset("no training examples")
    if len(features) != len(captions):
        raise LengthMismatch("features and captions differ in length")
    model = S2VTModel(config, vocab)
    encoded = np.asarray([model.encode_caption(c) for c in captions])
    groups = [([features[i] for i in idx], encoded[idx]) for idx in _batches(features)]
    val_feats, val_caps = val if val is not None else ([], [])

    trace = []
    for epoch in range(config.max_epochs):
        loss = _mean_loss(model, groups, len(features))
        value = float(loss.data)
        if not np.isfinite(value):
            raise NonFiniteLoss(f"epoch {epoch}: loss {value}")
        row = {"epoch": epoch, "lr": config.schedule.lr(epoch), "loss": value,
               "train_acc": float("nan"), "val_acc": float("nan")}
        if epoch % config.eval_every == 0 or epoch == config.max_epochs - 1:
            row["train_acc"] = sentence_accuracy(greedy_decode(model, features), captions)
            if val_feats:
                row["val_acc"] = sentence_accuracy(greedy_decode(model, val_feats), val_caps)
            log.info("epoch %d lr %.3g loss %.5f train_acc %.3f", epoch, row["lr"], value, row["train_acc"])
        trace.append(row)
        if stop_at_accuracy is not None and row["train_acc"] >= stop_at_accuracy:
            break
        loss.backward()
        sgd_step(model.store, config.schedule, epoch, config.clip_norm)
    return CaptionerRun(model, trace)
