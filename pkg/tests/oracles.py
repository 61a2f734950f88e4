"""Brute-force reference implementations used only by the tests.

Each one takes a different route from the library code: explicit
enumeration instead of counters and dynamic programming, products instead
of log sums.
"""

import itertools
import math


def grams(tokens, n):
    return [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def bleu_oracle(candidates, reference_sets, max_order=4):
    precisions = []
    for n in range(1, max_order + 1):
        matched = total = 0
        for cand, refs in zip(candidates, reference_sets):
            cg = grams(cand, n)
            total += len(cg)
            for g in set(cg):
                ceiling = max(grams(r, n).count(g) for r in refs)
                matched += min(cg.count(g), ceiling)
        precisions.append(matched / total if total else 0.0)
    if min(precisions) == 0:
        return 0.0
    c = sum(len(x) for x in candidates)
    r = 0
    for cand, refs in zip(candidates, reference_sets):
        lengths = sorted(len(x) for x in refs)
        r += min(lengths, key=lambda L: abs(L - len(cand)))
    bp = 1.0 if c > r else math.exp(1 - r / c)
    return bp * math.prod(precisions) ** (1.0 / max_order)


def meteor_alignments(cand, ref):
    """Yield (matches, chunks) for every one-to-one exact-match alignment."""
    for k in range(len(cand) + 1):
        for cpos in itertools.combinations(range(len(cand)), k):
            for rpos in itertools.permutations(range(len(ref)), k):
                if all(cand[i] == ref[j] for i, j in zip(cpos, rpos)):
                    chunks = 0
                    for t in range(k):
                        joined = t > 0 and cpos[t] == cpos[t - 1] + 1 and rpos[t] == rpos[t - 1] + 1
                        chunks += 0 if joined else 1
                    yield k, chunks


def meteor_oracle(cand, ref, recall_weight=9.0, gamma=0.5, beta=3.0):
    m, neg_ch = max((m, -ch) for m, ch in meteor_alignments(cand, ref))
    if m == 0:
        return 0.0
    ch = -neg_ch
    p, r = m / len(cand), m / len(ref)
    alpha = recall_weight / (recall_weight + 1)
    fmean = p * r / (alpha * p + (1 - alpha) * r)
    return fmean * (1 - gamma * (ch / m) ** beta)


def _is_subsequence(seq, of):
    it = iter(of)
    return all(any(x == y for y in it) for x in seq)


def lcs_oracle(a, b):
    for k in range(min(len(a), len(b)), 0, -1):
        if any(_is_subsequence(s, b) for s in itertools.combinations(a, k)):
            return k
    return 0


def rouge_l_oracle(cand, ref, beta=1.2):
    lcs = lcs_oracle(cand, ref)
    if lcs == 0:
        return 0.0
    p, r = lcs / len(cand), lcs / len(ref)
    return (1 + beta ** 2) * p * r / (r + beta ** 2 * p)


def cider_oracle(candidates, reference_sets, max_order=4):
    docs = len(reference_sets)
    total = 0.0
    for cand, refs in zip(candidates, reference_sets):
        score = 0.0
        for n in range(1, max_order + 1):
            vocab = sorted({g for s in [cand, *refs] for g in grams(s, n)})

            def idf(g):
                df = sum(any(g in grams(r, n) for r in rs) for rs in reference_sets)
                return math.log(docs) - math.log(max(df, 1))

            def vec(s):
                return [grams(s, n).count(g) * idf(g) for g in vocab]

            vc = vec(cand)
            sims = []
            for ref in refs:
                vr = vec(ref)
                denom = math.sqrt(sum(x * x for x in vc)) * math.sqrt(sum(x * x for x in vr))
                sims.append(sum(x * y for x, y in zip(vc, vr)) / denom if denom else 0.0)
            score += sum(sims) / len(sims)
        total += score / max_order
    return total / len(candidates)
