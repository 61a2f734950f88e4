from __future__ import annotations

from collections import Counter

from ..grammar import Caption, tokenize


def as_tokens(sentence) -> tuple[str, ...]:
    if isinstance(sentence, Caption):
        return sentence.tokens
    if isinstance(sentence, str):
        return tuple(tokenize(sentence))
    return tuple(sentence)


def as_reference_set(refs) -> list[tuple[str, ...]]:
    """A single reference (string or Caption) or a list of references."""
    if isinstance(refs, (str, Caption)):
        return [as_tokens(refs)]
    return [as_tokens(r) for r in refs]


def ngram_counts(tokens, n) -> Counter:
    tokens = tuple(tokens)
    return Counter(tokens[i:i + n] for i in range(len(tokens) - n + 1))
