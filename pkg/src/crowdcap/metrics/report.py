"""Corpus evaluation report with the columns of the usual captioning table."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

from ..errors import DegenerateCorpus, EmptyCorpus, LengthMismatch
from .bleu import bleu_n
from .cider import cider
from .meteor import corpus_meteor
from .ngrams import as_reference_set, as_tokens
from .rouge import corpus_rouge_l

log = logging.getLogger(__name__)

COLUMNS = (
    ("bleu_1", "BLEU-1"),
    ("bleu_2", "BLEU-2"),
    ("bleu_3", "BLEU-3"),
    ("bleu_4", "BLEU-4"),
    ("cider", "CIDEr"),
    ("meteor", "METEOR"),
    ("rouge_l", "ROUGE_L"),
)


@dataclass(frozen=True)
class EvalReport:
    """Metric scores in percent plus sentence accuracy in [0, 1]."""

    bleu_1: float
    bleu_2: float
    bleu_3: float
    bleu_4: float
    cider: float
    meteor: float
    rouge_l: float
    accuracy: float

    def as_dict(self):
        return asdict(self)

    def to_table(self, label="model"):
        width = max(len(label), len("Metric"))
        head = ["Metric".ljust(width)] + [title.rjust(8) for _, title in COLUMNS] + ["Accuracy".rjust(9)]
        row = [label.ljust(width)] + [f"{getattr(self, key):8.2f}" for key, _ in COLUMNS]
        row.append(f"{self.accuracy:9.3f}")
        return "  ".join(head) + "\n" + "  ".join(row) + "\n"

    def to_keyvalue(self):
        return "".join(f"{k}={v!r}\n" for k, v in self.as_dict().items())

    def render(self, label="model"):
        return self.to_table(label) + "\n" + self.to_keyvalue()


def build_report(predictions, references) -> EvalReport:
    """Score aligned predictions against references (one or several per item).

    Accuracy counts predictions equal to any of their references.  CIDEr is
    NaN when the references do not form at least two distinct documents.
    """
    predictions, references = list(predictions), list(references)
    if len(predictions) != len(references):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(references)} references")
    if not predictions:
        raise EmptyCorpus("nothing to evaluate")
    try:
        cider_score = 100.0 * cider(predictions, references)
    except DegenerateCorpus as exc:
        log.warning("CIDEr undefined: %s", exc)
        cider_score = math.nan
    hits = sum(as_tokens(p) in as_reference_set(r) for p, r in zip(predictions, references))
    return EvalReport(
        bleu_1=100.0 * bleu_n(predictions, references, 1),
        bleu_2=100.0 * bleu_n(predictions, references, 2),
        bleu_3=100.0 * bleu_n(predictions, references, 3),
        bleu_4=100.0 * bleu_n(predictions, references, 4),
        cider=cider_score,
        meteor=100.0 * corpus_meteor(predictions, references),
        rouge_l=100.0 * corpus_rouge_l(predictions, references),
        accuracy=hits / len(predictions),
    )
