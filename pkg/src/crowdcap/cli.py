"""Command-line entry point: ``crowdcap <command> ...``.

Exit codes: 0 ok, 2 usage, 3 I/O failure, 4 training divergence,
5 checkpoint/feature incompatibility, 6 verification failure.

Every command accepts ``--config FILE`` with flat ``key=value`` lines (keys
are the long flag names with dashes or underscores); explicit flags win
over file values, and commands that write an output directory record the
resolved settings in ``<out>/config.txt``.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .data import DatasetManifest, GeneratorConfig, generate_dataset, load_features, split_dataset
from .errors import (
    CorruptFile,
    IncompatibleCheckpoint,
    IoFailure,
    NonFiniteLoss,
    ShapeMismatch,
)
from .grammar import default_vocabulary, label_id
from .metrics import build_report
from .models import (
    ClassifierConfig,
    S2VTConfig,
    S2VTModel,
    greedy_decode,
    sentence_accuracy,
    train_captioner,
    train_classifier,
)
from .numerics import StepDecaySchedule
from .verify import COMPONENTS, DEFAULT_TOLERANCE, gradcheck_suite

log = logging.getLogger("crowdcap")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DIVERGED, EXIT_MISMATCH, EXIT_VERIFY = 0, 2, 3, 4, 5, 6


class UsageError(Exception):
    pass


# config handling

DEFAULTS = {
    "gen-data": dict(seed=0, num_videos=98, frames=16, feature_dim=64, noise=0.1,
                     run_fraction=0.21, balanced=False, clip_length=32, basis_seed=0,
                     split=None, split_seed=0),
    "train-classifier": dict(seed=0, epochs=200, lr=1e-4, decay=0.5, period=10, clip=5.0,
                             train_split="train"),
    "train-captioner": dict(seed=0, epochs=2000, lr=4e-5, decay=0.8, period=200, clip=5.0,
                            cell="gru", hidden_dim=512, embed_dim=512, max_caption_len=8,
                            eval_every=10, train_split="train"),
}


def read_config_file(path):
    """Parse flat ``key=value`` lines; ``#`` starts a comment line."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _coerce(value, default):
    if not isinstance(value, str) or default is None or isinstance(default, str):
        return value
    if isinstance(default, bool):
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"not a boolean: {value!r}")
    try:
        return type(default)(value)
    except ValueError:
        raise UsageError(f"cannot parse {value!r} as {type(default).__name__}") from None


def resolve(section, args):
    """Defaults, then config-file values, then explicitly given flags."""
    defaults = DEFAULTS[section]
    resolved = dict(defaults)
    if getattr(args, "config", None):
        for key, value in read_config_file(args.config).items():
            if key in defaults:
                resolved[key] = _coerce(value, defaults[key])
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


def write_resolved(out_dir, command, settings):
    lines = [f"command={command}"] + [f"{k}={'' if v is None else v}" for k, v in sorted(settings.items())]
    (Path(out_dir) / "config.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _fmt(value):
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(value)
    return str(value)


def write_trace(path, trace):
    keys = list(trace[0]) if trace else ["epoch", "lr", "loss", "train_acc", "val_acc"]
    lines = ["\t".join(keys)] + ["\t".join(_fmt(row[k]) for k in keys) for row in trace]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# commands

def cmd_gen_data(args):
    s = resolve("gen-data", args)
    config = GeneratorConfig(seed=s["seed"], num_videos=s["num_videos"], frames_per_video=s["frames"],
                             feature_dim=s["feature_dim"], noise_scale=s["noise"],
                             run_fraction=s["run_fraction"], balanced=s["balanced"],
                             clip_length=s["clip_length"], basis_seed=s["basis_seed"])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest, _ = generate_dataset(config, out)
    if s["split"]:
        try:
            counts = [int(c) for c in str(s["split"]).split(",")]
        except ValueError:
            raise UsageError(f"--split expects three comma-separated integers, got {s['split']!r}") from None
        manifest = split_dataset(manifest, counts, seed=s["split_seed"])
        manifest.save()
    write_resolved(out, "gen-data", s)
    print(f"wrote {len(manifest)} videos to {out}")
    return EXIT_OK


def _load_split(data, split):
    manifest = DatasetManifest.load(data)
    part = manifest.subset(split)
    return manifest, part


def cmd_train(args):
    if args.model == "classifier":
        return _train_classifier(args)
    return _train_captioner(args)


def _train_classifier(args):
    s = resolve("train-classifier", args)
    manifest, train = _load_split(args.data, s["train_split"])
    if not len(train):
        raise UsageError(f"no records tagged {s['train_split']!r} in {args.data}")

    def arrays(part):
        if not len(part):
            return None
        X = np.stack([part.load_features(r).video_feature() for r in part])
        return X, np.asarray([label_id(r.caption) for r in part])

    X, y = arrays(train)
    config = ClassifierConfig(input_dim=X.shape[1], epochs=s["epochs"], seed=s["seed"],
                              schedule=StepDecaySchedule(s["lr"], s["decay"], s["period"]),
                              clip_norm=s["clip"] if s["clip"] > 0 else None)
    run = train_classifier(X, y, config, val=arrays(manifest.subset("val")),
                           test=arrays(manifest.subset("test")))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    run.model.save(out / "classifier.cvcp")
    write_trace(out / "trace.tsv", run.trace)
    write_resolved(out, "train classifier", s)
    final = float(np.mean(run.model.predict(X) == y))
    print(f"trained classifier for {config.epochs} epochs; train accuracy {final:.4f}")
    return EXIT_OK


def _train_captioner(args):
    s = resolve("train-captioner", args)
    if s["cell"] not in ("lstm", "gru"):
        raise UsageError(f"--cell must be lstm or gru, got {s['cell']!r}")
    manifest, train = _load_split(args.data, s["train_split"])
    if not len(train):
        raise UsageError(f"no records tagged {s['train_split']!r} in {args.data}")
    feats, caps = train.load_all()
    val = manifest.subset("val")
    config = S2VTConfig(feature_dim=feats[0].feature_dim, hidden_dim=s["hidden_dim"],
                        embed_dim=s["embed_dim"], cell_kind=s["cell"],
                        max_caption_len=s["max_caption_len"], max_epochs=s["epochs"], seed=s["seed"],
                        schedule=StepDecaySchedule(s["lr"], s["decay"], s["period"]),
                        clip_norm=s["clip"] if s["clip"] > 0 else None, eval_every=s["eval_every"])
    run = train_captioner(feats, caps, config, val=val.load_all() if len(val) else None)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    run.model.save(out / "captioner.cvcp")
    write_trace(out / "trace.tsv", run.trace)
    write_resolved(out, "train captioner", s)
    acc = sentence_accuracy(greedy_decode(run.model, feats), caps)
    print(f"trained {config.cell_kind} captioner for {config.max_epochs} epochs; "
          f"train sentence accuracy {acc:.4f}")
    return EXIT_OK


def cmd_caption(args):
    model = S2VTModel.load(args.checkpoint)
    if model.vocab.digest() != default_vocabulary().digest():
        raise IncompatibleCheckpoint("checkpoint vocabulary differs from the caption grammar")
    seqs = [load_features(p) for p in args.features]
    if args.data:
        manifest = DatasetManifest.load(args.data)
        records = manifest.subset(args.split) if args.split else manifest
        seqs += [manifest.load_features(r) for r in records]
    for seq in seqs:
        if seq.feature_dim != model.config.feature_dim:
            raise IncompatibleCheckpoint(
                f"{seq.video_id}: feature dim {seq.feature_dim} != checkpoint {model.config.feature_dim}")
    for caption in greedy_decode(model, seqs) if seqs else []:
        print(caption.text)
    return EXIT_OK


def _read_lines(path):
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def cmd_evaluate(args):
    hyps, refs = _read_lines(args.hypotheses), _read_lines(args.references)
    if len(hyps) != len(refs):
        raise UsageError(f"{len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise UsageError("no sentences to evaluate")
    text = build_report(hyps, refs).render(args.label)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_gradcheck(args):
    seeds = range(args.seed, args.seed + args.num_seeds)
    worst = gradcheck_suite(seeds=seeds, tolerance=args.tolerance, step=args.step,
                            max_coords=args.coords, inject_fault=args.inject_fault)
    failed = False
    for name, err in worst.items():
        ok = err < args.tolerance
        failed |= not ok
        print(f"{name:<12} max_rel_err={err:.3e}  {'ok' if ok else 'FAIL'}")
    return EXIT_VERIFY if failed else EXIT_OK


# parser

def build_parser():
    p = argparse.ArgumentParser(prog="crowdcap", description="Crowd video captioning toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log training progress")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value settings file")
    common.add_argument("--seed", type=int)

    g = sub.add_parser("gen-data", parents=[common], help="write a synthetic dataset")
    g.add_argument("--out", required=True)
    g.add_argument("--num-videos", type=int)
    g.add_argument("--frames", type=int, help="frames per video")
    g.add_argument("--feature-dim", type=int)
    g.add_argument("--noise", type=float, help="Gaussian noise scale")
    g.add_argument("--run-fraction", type=float)
    g.add_argument("--clip-length", type=int)
    g.add_argument("--basis-seed", type=int)
    g.add_argument("--balanced", action="store_const", const=True, help="one video per label, cycling")
    g.add_argument("--split", help="train,val,test counts, e.g. 70,19,9")
    g.add_argument("--split-seed", type=int)
    g.set_defaults(func=cmd_gen_data)

    t = sub.add_parser("train", parents=[common], help="train a classifier or captioner")
    t.add_argument("model", choices=["classifier", "captioner"])
    t.add_argument("--data", required=True, help="dataset directory or manifest")
    t.add_argument("--out", required=True)
    t.add_argument("--epochs", type=int)
    t.add_argument("--lr", type=float, help="base learning rate")
    t.add_argument("--decay", type=float, help="learning-rate factor per period")
    t.add_argument("--period", type=int, help="epochs between decays")
    t.add_argument("--clip", type=float, help="global gradient-norm clip (0 disables)")
    t.add_argument("--train-split")
    t.add_argument("--cell", help="captioner cell: lstm or gru")
    t.add_argument("--hidden-dim", type=int)
    t.add_argument("--embed-dim", type=int)
    t.add_argument("--max-caption-len", type=int)
    t.add_argument("--eval-every", type=int)
    t.set_defaults(func=cmd_train)

    c = sub.add_parser("caption", parents=[common], help="greedy-decode captions")
    c.add_argument("--checkpoint", required=True)
    c.add_argument("features", nargs="*", help="feature files (.cvcf)")
    c.add_argument("--data", help="also caption the videos of this dataset")
    c.add_argument("--split", help="restrict --data to one split")
    c.set_defaults(func=cmd_caption)

    e = sub.add_parser("evaluate", parents=[common], help="score hypotheses against references")
    e.add_argument("hypotheses")
    e.add_argument("references")
    e.add_argument("--label", default="model")
    e.add_argument("--out", help="directory for report.txt")
    e.set_defaults(func=cmd_evaluate)

    v = sub.add_parser("gradcheck", parents=[common], help="finite-difference gradient checks")
    v.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    v.add_argument("--step", type=float, default=1e-5)
    v.add_argument("--num-seeds", type=int, default=10)
    v.add_argument("--coords", type=int, default=100, help="coordinates probed per check")
    v.add_argument("--inject-fault", choices=COMPONENTS, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_gradcheck, seed=0)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (IncompatibleCheckpoint, ShapeMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except NonFiniteLoss as exc:
        print(f"error: training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (IoFailure, CorruptFile, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
