"""ROUGE-L: longest-common-subsequence F-measure."""

from __future__ import annotations

from ..errors import EmptyCorpus, LengthMismatch
from .ngrams import as_reference_set, as_tokens

ROUGE_BETA = 1.2


def lcs_length(a, b):
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate, references, beta=ROUGE_BETA):
    """``(1 + b^2) P R / (R + b^2 P)`` with ``P = LCS/|cand|``, ``R = LCS/|ref|``.

    With several references the best F-measure counts.
    """
    cand = as_tokens(candidate)
    best = 0.0
    for ref in as_reference_set(references):
        lcs = lcs_length(cand, ref)
        if lcs == 0:
            continue
        p, r = lcs / len(cand), lcs / len(ref)
        best = max(best, (1 + beta ** 2) * p * r / (r + beta ** 2 * p))
    return best


def corpus_rouge_l(candidates, references, beta=ROUGE_BETA):
    candidates, references = list(candidates), list(references)
    if len(candidates) != len(references):
        raise LengthMismatch(f"{len(candidates)} candidates vs {len(references)} references")
    if not candidates:
        raise EmptyCorpus("no candidates")
    return sum(rouge_l(c, r, beta) for c, r in zip(candidates, references)) / len(candidates)
