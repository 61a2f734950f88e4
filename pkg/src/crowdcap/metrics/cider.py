"""CIDEr: TF-IDF weighted n-gram cosine similarity against the references.

Plain consensus form: no length penalty and no count clipping.  Document
frequencies come from the evaluation references, one document per video.
"""

from __future__ import annotations

import math

from ..errors import DegenerateCorpus, EmptyCorpus, LengthMismatch
from .ngrams import as_reference_set, as_tokens, ngram_counts

CIDER_MAX_ORDER = 4


def document_frequencies(reference_sets, n):
    df = {}
    for refs in reference_sets:
        grams = set()
        for ref in refs:
            grams.update(ngram_counts(ref, n))
        for g in grams:
            df[g] = df.get(g, 0) + 1
    return df


def tfidf_vector(tokens, n, df, num_docs):
    log_n = math.log(num_docs)
    return {g: c * (log_n - math.log(max(1, df.get(g, 0))))
            for g, c in ngram_counts(tokens, n).items()}


def cosine(a, b):
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return sum(v * b.get(g, 0.0) for g, v in a.items()) / (na * nb)


def cider_scores(candidates, references, max_order=CIDER_MAX_ORDER):
    """Per-video CIDEr scores (mean over orders ``1..max_order``)."""
    candidates = [as_tokens(c) for c in candidates]
    reference_sets = [as_reference_set(r) for r in references]
    if len(candidates) != len(reference_sets):
        raise LengthMismatch(f"{len(candidates)} candidates vs {len(reference_sets)} reference sets")
    if not candidates:
        raise EmptyCorpus("no candidates")
    if len({frozenset(refs) for refs in reference_sets}) < 2:
        raise DegenerateCorpus("CIDEr needs at least two distinct reference documents")
    num_docs = len(reference_sets)
    scores = [0.0] * len(candidates)
    for n in range(1, max_order + 1):
        df = document_frequencies(reference_sets, n)
        for i, (cand, refs) in enumerate(zip(candidates, reference_sets)):
            vc = tfidf_vector(cand, n, df, num_docs)
            sims = [cosine(vc, tfidf_vector(r, n, df, num_docs)) for r in refs]
            scores[i] += sum(sims) / len(sims) / max_order
    return scores


def cider(candidates, references, max_order=CIDER_MAX_ORDER):
    scores = cider_scores(candidates, references, max_order)
    return sum(scores) / len(scores)
