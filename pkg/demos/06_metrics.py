"""
Scoring captions
================

Seven of eight predictions are right; the last gets the direction wrong.
"""

from crowdcap.grammar import all_labels
from crowdcap.metrics import build_report, meteor, meteor_components, rouge_l, sentence_bleu

refs = [c.text for c in all_labels()]
preds = refs[:-1] + ["few people run in"]

print(build_report(preds, refs).render("demo"))

# METEOR never reaches 1: even a perfect match forms one chunk
print(meteor("many people walk in", "many people walk in"), 127 / 128)
print(meteor_components("few people run in", "few people run out"))

# one wrong word kills sentence BLEU-4 (no 4-gram survives) but not ROUGE-L
print(sentence_bleu("few people run in", "few people run out"))
print(rouge_l("few people run in", "few people run out"))
