"""BLEU, METEOR, ROUGE-L and CIDEr for the closed caption language."""

from .bleu import BleuConfig, bleu, bleu_n, brevity_penalty, modified_precision, sentence_bleu
from .cider import cider, cider_scores
from .meteor import MeteorConfig, align, corpus_meteor, meteor, meteor_components
from .ngrams import ngram_counts
from .report import EvalReport, build_report
from .rouge import corpus_rouge_l, lcs_length, rouge_l

__all__ = [
    "BleuConfig", "bleu", "bleu_n", "brevity_penalty", "modified_precision", "sentence_bleu",
    "cider", "cider_scores", "MeteorConfig", "align", "corpus_meteor", "meteor",
    "meteor_components", "ngram_counts", "EvalReport", "build_report", "corpus_rouge_l",
    "lcs_length", "rouge_l",
]
