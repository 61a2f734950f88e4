import pytest

from crowdcap.errors import NotALabel, UnknownToken
from crowdcap.grammar import (
    BOS,
    EOS,
    MAX_CAPTION_LEN,
    PAD,
    AttributeTriple,
    Caption,
    Direction,
    Movement,
    Size,
    Vocabulary,
    all_labels,
    all_triples,
    decode_tokens,
    default_vocabulary,
    encode_tokens,
    label_id,
    parse_caption,
    render_caption,
)


@pytest.mark.parametrize("triple, text", [
    (AttributeTriple(Size.MANY, Movement.WALK, Direction.IN), "many people walk in"),
    (AttributeTriple(Size.FEW, Movement.RUN, Direction.OUT), "few people run out"),
    (AttributeTriple(Size.MANY, Movement.RUN, Direction.IN), "many people run in"),
])
def test_render(triple, text):
    assert render_caption(triple).text == text


def test_parse_examples():
    assert parse_caption("many people walk in") == AttributeTriple(Size.MANY, Movement.WALK, Direction.IN)
    assert parse_caption(Caption.from_text("few people run out")) == AttributeTriple(
        Size.FEW, Movement.RUN, Direction.OUT)


@pytest.mark.parametrize("bad", ["people many walk in", "many people walk", "", "many people jog in"])
def test_parse_rejects_non_labels(bad):
    with pytest.raises(NotALabel):
        parse_caption(bad)


def test_parse_render_roundtrip_exhaustive():
    triples = all_triples()
    assert len(triples) == 2 ** 3
    for t in triples:
        assert parse_caption(render_caption(t)) == t
    assert len({render_caption(t) for t in triples}) == 8


def test_all_labels_order():
    labels = all_labels()
    assert len(labels) == 8
    assert len(set(labels)) == 8
    assert labels[0].text == "many people walk in"
    assert [c.text for c in labels[:4]] == [
        "many people walk in", "many people walk out", "many people run in", "many people run out"]
    assert all(label_id(c) == i for i, c in enumerate(labels))


def test_vocabulary_contents():
    v = default_vocabulary()
    assert v.tokens[:3] == (PAD, BOS, EOS)
    attribute_words = set(v.content_tokens) - {"people"}
    assert attribute_words == {"many", "few", "walk", "run", "in", "out"}
    assert len(v) == 10
    assert [v.id_of(t) for t in v.tokens] == list(range(len(v)))
    for caption in all_labels():
        assert all(tok in v.content_tokens for tok in caption.tokens)


def test_vocabulary_save_load(tmp_path):
    v = default_vocabulary()
    path = tmp_path / "vocab.txt"
    v.save(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[:3] == [PAD, BOS, EOS]
    loaded = Vocabulary.load(path)
    assert loaded == v
    assert loaded.digest() == v.digest()


def test_encode_example():
    v = default_vocabulary()
    ids = encode_tokens("many people walk in", v)
    expected = [v.bos_id, v.id_of("many"), v.id_of("people"), v.id_of("walk"), v.id_of("in"), v.eos_id]
    assert ids == expected + [v.pad_id] * 4
    assert len(ids) == MAX_CAPTION_LEN + 2


def test_encode_empty_caption():
    v = default_vocabulary()
    assert encode_tokens(Caption(()), v) == [v.bos_id, v.eos_id] + [v.pad_id] * MAX_CAPTION_LEN


def test_encode_unknown_token():
    with pytest.raises(UnknownToken):
        encode_tokens("many people walk red", default_vocabulary())


def test_encode_decode_roundtrip():
    v = default_vocabulary()
    for caption in all_labels():
        assert decode_tokens(encode_tokens(caption, v), v) == caption
