"""The closed crowd-caption language.

Three binary attributes (crowd size, movement, flow direction) give eight
label sentences of the form ``"<size> people <movement> <direction>"``.
This module owns the attribute triples, the label list (whose index is the
classifier class id), the vocabulary and the id encoding used by the
sequence model.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import NotALabel, UnknownToken

PAD = "<pad>"
BOS = "<bos>"
EOS = "<eos>"
SPECIALS = (PAD, BOS, EOS)

MAX_CAPTION_LEN = 8
NUM_ATTRIBUTES = 3


class Size(enum.Enum):
    MANY = "many"
    FEW = "few"


class Movement(enum.Enum):
    WALK = "walk"
    RUN = "run"


class Direction(enum.Enum):
    IN = "in"
    OUT = "out"


@dataclass(frozen=True, order=False)
class AttributeTriple:
    size: Size
    movement: Movement
    direction: Direction

    def __str__(self):
        return f"({self.size.name}, {self.movement.name}, {self.direction.name})"


@dataclass(frozen=True)
class Caption:
    """A sequence of content tokens (no BOS/EOS/PAD)."""

    tokens: tuple[str, ...]

    @classmethod
    def from_text(cls, text: str) -> "Caption":
        return cls(tuple(tokenize(text)))

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def __len__(self):
        return len(self.tokens)

    def __str__(self):
        return self.text


def tokenize(text: str) -> list[str]:
    """Lowercase and split on whitespace."""
    return text.lower().split()


def as_caption(caption) -> Caption:
    if isinstance(caption, Caption):
        return caption
    if isinstance(caption, str):
        return Caption.from_text(caption)
    return Caption(tuple(caption))


def render_caption(triple: AttributeTriple) -> Caption:
    return Caption((triple.size.value, "people", triple.movement.value, triple.direction.value))


def all_triples() -> list[AttributeTriple]:
    """Triples in class-id order: size-major, then movement, then direction."""
    return [AttributeTriple(s, m, d) for s, m, d in itertools.product(Size, Movement, Direction)]


def all_labels() -> list[Caption]:
    """The eight label sentences; list index is the classifier class id."""
    return [render_caption(t) for t in all_triples()]


_PARSE_TABLE = {render_caption(t).tokens: t for t in all_triples()}


def parse_caption(caption) -> AttributeTriple:
    tokens = as_caption(caption).tokens
    try:
        return _PARSE_TABLE[tokens]
    except KeyError:
        raise NotALabel(f"not a label sentence: {' '.join(tokens)!r}") from None


def label_id(caption) -> int:
    return all_triples().index(parse_caption(caption))


class Vocabulary:
    """Bijective token <-> id map. Specials come first: PAD=0, BOS=1, EOS=2."""

    def __init__(self, content_tokens: Iterable[str]):
        content = list(content_tokens)
        if len(set(content)) != len(content):
            raise ValueError("duplicate content tokens")
        if set(content) & set(SPECIALS):
            raise ValueError("content tokens overlap with specials")
        self.content_tokens = tuple(content)
        self._tokens = SPECIALS + self.content_tokens
        self._ids = {tok: i for i, tok in enumerate(self._tokens)}

    @property
    def tokens(self) -> tuple[str, ...]:
        return self._tokens

    @property
    def pad_id(self) -> int:
        return self._ids[PAD]

    @property
    def bos_id(self) -> int:
        return self._ids[BOS]

    @property
    def eos_id(self) -> int:
        return self._ids[EOS]

    def id_of(self, token: str) -> int:
        try:
            return self._ids[token]
        except KeyError:
            raise UnknownToken(token) from None

    def token_of(self, idx: int) -> str:
        return self._tokens[idx]

    def __len__(self):
        return len(self._tokens)

    def __contains__(self, token):
        return token in self._ids

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self._tokens == other._tokens

    def __repr__(self):
        return f"Vocabulary({list(self.content_tokens)!r})"

    def digest(self) -> str:
        """Short stable hash of the token list, stored in model checkpoints."""
        return hashlib.sha256("\n".join(self._tokens).encode("utf-8")).hexdigest()[:16]

    def save(self, path) -> None:
        Path(path).write_text("".join(tok + "\n" for tok in self._tokens), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if tuple(lines[: len(SPECIALS)]) != SPECIALS:
            raise ValueError(f"{path}: vocabulary must start with {SPECIALS}")
        return cls(lines[len(SPECIALS):])


def default_vocabulary() -> Vocabulary:
    """Six attribute words plus the constant word "people"."""
    words = [a.value for enum_cls in (Size, Movement, Direction) for a in enum_cls]
    return Vocabulary(words + ["people"])


def encode_tokens(caption, vocab: Vocabulary, max_len: int = MAX_CAPTION_LEN) -> list[int]:
    """``[BOS, w1..wm, EOS, PAD...]`` with total length ``max_len + 2``."""
    tokens = as_caption(caption).tokens
    if len(tokens) > max_len:
        raise ValueError(f"caption longer than max_len={max_len}")
    ids = [vocab.bos_id] + [vocab.id_of(t) for t in tokens] + [vocab.eos_id]
    return ids + [vocab.pad_id] * (max_len + 2 - len(ids))


def decode_tokens(ids: Sequence[int], vocab: Vocabulary) -> Caption:
    out = []
    for i in ids:
        i = int(i)
        if i == vocab.eos_id:
            break
        if i in (vocab.bos_id, vocab.pad_id):
            continue
        out.append(vocab.token_of(i))
    return Caption(tuple(out))
