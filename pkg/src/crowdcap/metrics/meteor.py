"""METEOR with exact surface matching only (no stemming or synonyms)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..errors import EmptyCorpus, LengthMismatch
from .ngrams import as_reference_set, as_tokens


@dataclass(frozen=True)
class MeteorConfig:
    recall_weight: float = 9.0
    gamma: float = 0.5
    beta: float = 3.0

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must be in (0, 1]")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.recall_weight < 0:
            raise ValueError("recall_weight must be non-negative")


def align(candidate, reference):
    """Best unigram alignment: most matches, then fewest chunks.

    Returns ``(matches, chunks)``.  Exhaustive search with memoization over
    (candidate position, used reference positions, previous match).
    """
    cand, ref = tuple(candidate), tuple(reference)
    positions = {}
    for j, w in enumerate(ref):
        positions.setdefault(w, []).append(j)

    @lru_cache(maxsize=None)
    def best(i, used, prev):
        if i == len(cand):
            return 0, 0
        m, negc = best(i + 1, used, -1)
        result = (m, negc)
        for j in positions.get(cand[i], ()):
            if used >> j & 1:
                continue
            m, negc = best(i + 1, used | (1 << j), j)
            opens = 0 if prev >= 0 and j == prev + 1 else 1
            result = max(result, (m + 1, negc - opens))
        return result

    m, negc = best(0, 0, -1)
    return m, -negc


def meteor_components(candidate, reference, config: MeteorConfig | None = None):
    """Dict with matches, chunks, precision, recall, fmean, penalty and score."""
    config = config or MeteorConfig()
    cand, ref = as_tokens(candidate), as_tokens(reference)
    m, ch = align(cand, ref)
    out = {"matches": m, "chunks": ch, "precision": 0.0, "recall": 0.0,
           "fmean": 0.0, "penalty": 0.0, "score": 0.0}
    if m == 0:
        return out
    p, r = m / len(cand), m / len(ref)
    w = config.recall_weight
    fmean = (1.0 + w) * p * r / (r + w * p)
    pen = config.gamma * (ch / m) ** config.beta
    out.update(precision=p, recall=r, fmean=fmean, penalty=pen, score=(1.0 - pen) * fmean)
    return out


def meteor(candidate, references, config: MeteorConfig | None = None):
    """Sentence METEOR; with several references the best one counts."""
    refs = as_reference_set(references)
    return max(meteor_components(candidate, r, config)["score"] for r in refs)


def corpus_meteor(candidates, references, config: MeteorConfig | None = None):
    candidates, references = list(candidates), list(references)
    if len(candidates) != len(references):
        raise LengthMismatch(f"{len(candidates)} candidates vs {len(references)} references")
    if not candidates:
        raise EmptyCorpus("no candidates")
    return sum(meteor(c, r, config) for c, r in zip(candidates, references)) / len(candidates)
