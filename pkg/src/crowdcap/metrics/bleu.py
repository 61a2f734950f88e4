"""Corpus BLEU: clipped n-gram precision with a brevity penalty."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import EmptyCorpus, LengthMismatch, ZeroLengthCandidate
from .ngrams import as_reference_set, as_tokens, ngram_counts


@dataclass(frozen=True)
class BleuConfig:
    max_order: int = 4
    weights: tuple = field(default=None)

    def __post_init__(self):
        if self.max_order < 1:
            raise ValueError("max_order must be at least 1")
        if self.weights is None:
            object.__setattr__(self, "weights", (1.0 / self.max_order,) * self.max_order)
        if len(self.weights) != self.max_order:
            raise ValueError("need one weight per order")
        if min(self.weights) < 0 or abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must be non-negative and sum to 1")


def _prepare(candidates, references):
    candidates = [as_tokens(c) for c in candidates]
    references = [as_reference_set(r) for r in references]
    if len(candidates) != len(references):
        raise LengthMismatch(f"{len(candidates)} candidates vs {len(references)} reference sets")
    if not candidates:
        raise EmptyCorpus("no candidates")
    return candidates, references


def clipped_counts(candidate, references, n):
    """``(clipped matches, total candidate n-grams)`` for one sentence."""
    cand = ngram_counts(candidate, n)
    max_ref = {}
    for ref in references:
        for gram, count in ngram_counts(ref, n).items():
            max_ref[gram] = max(max_ref.get(gram, 0), count)
    matched = sum(min(count, max_ref.get(gram, 0)) for gram, count in cand.items())
    return matched, sum(cand.values())


def modified_precision(candidates, references, n):
    """Corpus-level clipped n-gram precision ``p_n``.

    Returns 0 when the candidates hold no n-grams of this order.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    candidates, references = _prepare(candidates, references)
    matched = total = 0
    for cand, refs in zip(candidates, references):
        m, t = clipped_counts(cand, refs, n)
        matched += m
        total += t
    return matched / total if total else 0.0


def brevity_penalty(c, r):
    """1 if ``c > r`` else ``exp(1 - r/c)``."""
    if c <= 0:
        raise ZeroLengthCandidate("candidate length must be positive")
    return 1.0 if c > r else math.exp(1.0 - r / c)


def effective_reference_length(candidate_len, references):
    """Reference length closest to the candidate; ties go to the shorter one."""
    return min((abs(len(r) - candidate_len), len(r)) for r in references)[1]


def bleu(candidates, references, config: BleuConfig | None = None):
    """Corpus BLEU over aligned candidates and reference sets."""
    config = config or BleuConfig()
    candidates, references = _prepare(candidates, references)
    c = sum(len(x) for x in candidates)
    r = sum(effective_reference_length(len(x), refs) for x, refs in zip(candidates, references))
    log_sum = 0.0
    for n, w in enumerate(config.weights, start=1):
        p = modified_precision(candidates, references, n)
        if p == 0.0:
            if w > 0:
                return 0.0
            continue
        log_sum += w * math.log(p)
    return brevity_penalty(c, r) * math.exp(log_sum)


def sentence_bleu(candidate, references, config: BleuConfig | None = None):
    return bleu([candidate], [references], config)


def bleu_n(candidates, references, max_order):
    """Cumulative BLEU-n with uniform weights over orders ``1..max_order``."""
    return bleu(candidates, references, BleuConfig(max_order))
