"""
The caption language
====================

Every caption is "<size> people <movement> <direction>", so the whole
language is eight sentences.
"""

from crowdcap.grammar import (
    all_labels, all_triples, decode_tokens, default_vocabulary, encode_tokens, parse_caption,
    render_caption,
)

# the eight labels, in classifier class-id order
for class_id, caption in enumerate(all_labels()):
    print(class_id, caption.text)

# parsing inverts rendering
for triple in all_triples():
    assert parse_caption(render_caption(triple)) == triple
print(parse_caption("few people run out"))

# ids: PAD, BOS, EOS first, then the content words
vocab = default_vocabulary()
print(vocab.tokens)
ids = encode_tokens("many people walk in", vocab)
print(ids)  # BOS ... EOS then PAD up to the fixed length
print(decode_tokens(ids, vocab).text)
