"""
Whole-video classification
==========================

Average the frames of each video, then a single linear softmax layer picks
one of the eight labels.
"""

import numpy as np

from crowdcap.data import GeneratorConfig, generate_dataset, split_dataset
from crowdcap.grammar import all_labels, label_id
from crowdcap.models import ClassifierConfig, classify, train_classifier
from crowdcap.numerics import StepDecaySchedule

manifest, seqs = generate_dataset(GeneratorConfig(num_videos=98, noise_scale=0.3))
tagged = split_dataset(manifest, (70, 19, 9), seed=0)
by_id = {s.video_id: s for s in seqs}


def arrays(split):
    part = tagged.subset(split)
    return (np.stack([by_id[r.video_id].video_feature() for r in part]),
            np.array([label_id(r.caption) for r in part]))


X, y = arrays("train")
test = arrays("test")

# the synthetic features need a much larger step than pretrained CNN features
config = ClassifierConfig(input_dim=X.shape[1], epochs=200, schedule=StepDecaySchedule(0.5, 0.5, 10))
run = train_classifier(X, y, config, val=arrays("val"), test=test)
for row in run.trace[::40]:
    print(row)

# one video through the classifier
z, k = classify(test[0][0], run.model)
print("probabilities", z.round(3))
print("predicted:", all_labels()[k].text, "| truth:", all_labels()[test[1][0]].text)
