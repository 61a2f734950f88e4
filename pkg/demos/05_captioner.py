"""
Sequence-to-sequence captioning
===============================

Two stacked recurrent layers read the frame features, then emit words one at
a time.  On one video per label the model should memorize all eight.
"""

from crowdcap.data import GeneratorConfig, generate_dataset
from crowdcap.grammar import all_triples, parse_caption, render_caption
from crowdcap.models import S2VTConfig, caption_forward_loss, greedy_decode, sentence_accuracy, train_captioner
from crowdcap.numerics import StepDecaySchedule

_, seqs = generate_dataset(GeneratorConfig(num_videos=8, balanced=True, noise_scale=0.1))
captions = [render_caption(t) for t in all_triples()]

config = S2VTConfig(feature_dim=64, hidden_dim=32, embed_dim=16, cell_kind="gru",
                    schedule=StepDecaySchedule(0.5, 0.8, 200), max_epochs=200, eval_every=10)
run = train_captioner(seqs, captions, config, stop_at_accuracy=1.0)
for row in run.trace[::10]:
    print(f"epoch {row['epoch']:3d}  loss {row['loss']:.4f}  train acc {row['train_acc']}")

decoded = greedy_decode(run.model, seqs)
for got, want in zip(decoded, captions):
    print(f"{got.text:<22} {'ok' if got == want else 'WRONG'}  {parse_caption(got)}")
print("sentence accuracy", sentence_accuracy(decoded, captions))
print("loss on first video", float(caption_forward_loss(run.model, seqs[0], captions[0]).data))
