"""Command-line interface.

Subcommands: split, annotate, eval-rules, estimate-cm, train, evaluate,
curve. Exit codes: 0 success, 1 usage error, 2 data or format error,
3 reseed budget exceeded (every retry of some run was degenerate). All
file outputs are written atomically.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import config as config_mod
from .corpus import (
    NER,
    TOPIC,
    Dataset,
    ParseError,
    SplitSpec,
    attach_weak_layer,
    drop_abstained,
    parse_conll,
    parse_topic_tsv,
    split_dataset,
    write_conll,
    write_topic_tsv,
)
from .embeddings import HashedEmbeddings, load_word_embeddings
from .experiment import (
    ABSTAIN_LABEL,
    CurveConfig,
    DegenerateRunsError,
    channel_pairs,
    default_size_ladder,
    make_dev_scorer,
    prepare_arrays,
    regroup_tags,
    run_learning_curve,
    task_labels,
    write_curve_outputs,
)
from .fileio import atomic_write_text, write_csv
from .metrics import (
    PRF,
    classification_prf,
    format_prf_table,
    per_type_span_prf,
    prf_csv_rows,
    span_prf,
)
from .model import NoisyChannelClassifier, load_checkpoint, save_checkpoint
from .noise import (
    estimate_confusion_matrix,
    read_confusion_tsv,
    reorder_channel,
    smooth_confusion_matrix,
    write_confusion_tsv,
)

REPORT_HEADER = ("setting", "seed", "label", "precision", "recall", "f1", "support")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures turned into exit code 1."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _load_dataset(path, task: str) -> Dataset:
    text = Path(path).read_text(encoding="utf-8")
    if task == NER:
        return parse_conll(text)
    return parse_topic_tsv(text)


def _load_embeddings(args):
    if getattr(args, "embeddings", None):
        return load_word_embeddings(args.embeddings)
    return HashedEmbeddings(dim=args.hash_dim, seed=args.hash_seed)


def _add_task(parser):
    parser.add_argument("--task", required=True, choices=(NER, TOPIC))


def _add_embedding_flags(parser):
    parser.add_argument("--embeddings", help="word2vec-format text file")
    parser.add_argument(
        "--hash-dim",
        type=int,
        default=32,
        help="dimension of hashed fallback vectors when --embeddings is absent",
    )
    parser.add_argument("--hash-seed", type=int, default=0)


def _write_dataset(dataset: Dataset, path, layer: str = "gold"):
    if dataset.task == NER:
        atomic_write_text(path, write_conll(dataset, layer))
    else:
        atomic_write_text(path, write_topic_tsv(dataset, layer))


def _report(per_label: dict[str, PRF], setting: str, seed, out):
    print(format_prf_table(per_label))
    if out:
        write_csv(out, REPORT_HEADER, prf_csv_rows(setting, seed, per_label))
        print(f"wrote {out}")


def _classification_report(gold, pred, labels) -> dict[str, PRF]:
    per_label = classification_prf(gold, pred, labels=labels)
    scored = list(per_label.values())
    n = len(scored)
    per_label["macro"] = PRF(
        sum(p.precision for p in scored) / n,
        sum(p.recall for p in scored) / n,
        sum(p.f1 for p in scored) / n,
        sum(p.support for p in scored),
    )
    tp = sum(1 for g, p in zip(gold, pred) if g == p and g in set(labels))
    n_pred = sum(1 for p in pred if p in set(labels))
    n_gold = sum(1 for g in gold if g in set(labels))
    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    per_label["micro"] = PRF(precision, recall, f1, n_gold)
    return per_label


def _span_report(gold_layers, pred_layers) -> dict[str, PRF]:
    per_label = per_type_span_prf(gold_layers, pred_layers)
    per_label["overall"] = span_prf(gold_layers, pred_layers)
    return per_label


def cmd_split(args) -> int:
    dataset = _load_dataset(args.data, args.task)
    ratios = tuple(float(r) for r in args.ratios.split(","))
    spec = SplitSpec(ratios=ratios, unit=args.unit, seed=args.seed)
    parts = split_dataset(dataset, spec)
    out_dir = Path(args.out_dir)
    ext = "conll" if args.task == NER else "tsv"
    for name, part in zip(("train", "dev", "test"), parts):
        _write_dataset(part, out_dir / f"{name}.{ext}")
        print(f"{name}: {len(part)} sentences, {part.num_tokens} tokens")
    return 0


def cmd_annotate(args) -> int:
    dataset = _load_dataset(args.data, args.task)
    annotator = config_mod.load_annotator(args.rules, args.task)
    annotated = annotator.fit().transform(dataset)
    _write_dataset(annotated, args.out, layer="weak")
    if args.task == TOPIC:
        n_abstained = sum(1 for s in annotated.sentences if s.weak_class is None)
        print(
            f"annotated {len(annotated)} headlines, {n_abstained} abstained"
        )
    else:
        n_spans = sum(
            1 for s in annotated.sentences for t in s.weak_tags if t.startswith("B-")
        )
        print(f"annotated {len(annotated)} sentences, {n_spans} spans")
    print(f"wrote {args.out}")
    return 0


def cmd_eval_rules(args) -> int:
    gold = _load_dataset(args.gold, args.task)
    weak = _load_dataset(args.weak, args.task)
    merged = attach_weak_layer(gold, weak)
    if args.task == NER:
        per_label = _span_report(
            [s.gold_tags for s in merged.sentences],
            [s.weak_tags for s in merged.sentences],
        )
    else:
        gold_labels = [s.gold_class for s in merged.sentences]
        pred_labels = [
            s.weak_class if s.weak_class is not None else ABSTAIN_LABEL
            for s in merged.sentences
        ]
        per_label = _classification_report(gold_labels, pred_labels, gold.label_set)
        n_abstained = pred_labels.count(ABSTAIN_LABEL)
        print(f"abstained: {n_abstained}/{len(pred_labels)}")
    _report(per_label, setting="rules", seed=args.seed, out=args.out)
    return 0


def cmd_estimate_cm(args) -> int:
    clean = _load_dataset(args.clean, args.task)
    weak = _load_dataset(args.weak, args.task)
    merged = attach_weak_layer(clean, weak)
    labels = task_labels(merged)
    pairs = channel_pairs(merged)
    C = estimate_confusion_matrix(
        [c for c, _ in pairs], [n for _, n in pairs], labels
    )
    C = smooth_confusion_matrix(C, args.beta)
    write_confusion_tsv(args.out, C, labels)
    print(f"estimated {len(labels)}x{len(labels)} matrix from {len(pairs)} pairs")
    print(f"wrote {args.out}")
    return 0


def cmd_train(args) -> int:
    clean = _load_dataset(args.clean, args.task)
    dev = _load_dataset(args.dev, args.task)
    datasets = [clean, dev]
    noisy_ds = None
    if args.noisy:
        if not args.cm:
            raise UsageError("--noisy requires --cm")
        noisy_ds = drop_abstained(_load_dataset(args.noisy, args.task))
        datasets.append(noisy_ds)
    labels = task_labels(*datasets)
    emb = _load_embeddings(args)

    clean_arrays = prepare_arrays(clean, emb, labels, layer="gold")
    dev_arrays = prepare_arrays(dev, emb, labels, layer="gold")
    fit_kwargs = {
        "dev": (dev_arrays.X, dev_arrays.y),
        "scorer": make_dev_scorer(dev_arrays),
    }
    if noisy_ds is not None:
        noisy_arrays = prepare_arrays(noisy_ds, emb, labels, layer="gold")
        C, cm_labels = read_confusion_tsv(args.cm)
        C = reorder_channel(C, cm_labels, labels)
        fit_kwargs["noisy"] = (noisy_arrays.X, noisy_arrays.y)
        fit_kwargs["channel"] = C

    model = NoisyChannelClassifier(
        n_classes=len(labels),
        n_epochs=args.epochs,
        learning_rate=(
            args.learning_rate
            if args.learning_rate is not None
            else (0.1 if args.task == TOPIC else 0.05)
        ),
        seed=args.seed,
    )
    model.fit(clean_arrays.X, clean_arrays.y, **fit_kwargs)
    save_checkpoint(model, args.out, args.task, labels)
    print(
        f"best epoch {model.best_epoch_} dev F1 {model.best_dev_score_:.4f}"
    )
    print(f"wrote {args.out}")
    if args.history:
        write_csv(
            args.history,
            ("epoch", "loss", "dev_f1", "n_clean", "n_noisy"),
            (
                (r.epoch, r.loss, "" if r.dev_score is None else r.dev_score,
                 r.n_clean, r.n_noisy)
                for r in model.history_
            ),
        )
        print(f"wrote {args.history}")
    return 0


def cmd_evaluate(args) -> int:
    model, task, labels = load_checkpoint(args.checkpoint)
    if task != args.task:
        raise ValueError(
            f"checkpoint is for task {task!r}, requested {args.task!r}"
        )
    data = _load_dataset(args.data, args.task)
    emb = _load_embeddings(args)
    arrays = prepare_arrays(data, emb, tuple(labels), layer="gold")
    pred = model.predict(arrays.X)
    if args.task == NER:
        per_label = _span_report(arrays.gold_layers, regroup_tags(pred, arrays))
    else:
        index_to_label = dict(enumerate(labels))
        gold_labels = [index_to_label[i] for i in arrays.y]
        pred_labels = [index_to_label[i] for i in pred]
        per_label = _classification_report(
            gold_labels, pred_labels, sorted(set(gold_labels))
        )
    _report(per_label, setting=args.setting, seed=args.seed, out=args.out)
    return 0


def cmd_curve(args) -> int:
    spec = config_mod.load_experiment_config(args.config)
    train = _load_dataset(spec.train_path, spec.task)
    dev = _load_dataset(spec.dev_path, spec.task)
    if "distant" in spec.settings:
        if spec.rules_path is None:
            raise UsageError("distant setting needs 'rules' in the config")
        annotator = config_mod.load_annotator(spec.rules_path, spec.task)
        train = annotator.fit().transform(train)
    if spec.embeddings_path is not None:
        emb = load_word_embeddings(spec.embeddings_path)
    else:
        emb = HashedEmbeddings(dim=spec.hash_dim, seed=spec.master_seed)
    sizes = spec.sizes if spec.sizes is not None else default_size_ladder(len(train))
    curve = CurveConfig(
        sizes=sizes,
        n_seeds=spec.n_seeds,
        settings=spec.settings,
        master_seed=spec.master_seed,
        beta=spec.beta,
        max_reseeds=spec.max_reseeds,
        n_epochs=spec.n_epochs,
        learning_rate=spec.learning_rate,
        init_bound=spec.init_bound,
        dev_downsize=spec.dev_downsize,
    )
    out_dir = Path(args.out_dir) if args.out_dir else spec.out_dir
    result = run_learning_curve(train, dev, emb, curve)
    paths = write_curve_outputs(result, out_dir)
    for setting, size, mean, stderr in result.summary:
        print(f"{setting} size={size}: {mean:.4f} +/- {stderr:.4f}")
    print(f"wrote {paths['runs']}")
    print(f"wrote {paths['summary']}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="weaksup", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="partition a corpus into train/dev/test")
    _add_task(p)
    p.add_argument("--data", required=True)
    p.add_argument("--ratios", default="0.7,0.1,0.2", help="comma-separated fractions")
    p.add_argument("--unit", choices=("sentence", "token"), default="sentence")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("annotate", help="apply distant-supervision rules")
    _add_task(p)
    p.add_argument("--data", required=True)
    p.add_argument("--rules", required=True, help="rule config INI")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("eval-rules", help="score weak labels against gold")
    _add_task(p)
    p.add_argument("--gold", required=True)
    p.add_argument("--weak", required=True)
    p.add_argument("--seed", type=int, default=0, help="seed column for the CSV")
    p.add_argument("--out", help="write CSV report here")
    p.set_defaults(func=cmd_eval_rules)

    p = sub.add_parser("estimate-cm", help="estimate a confusion matrix")
    _add_task(p)
    p.add_argument("--clean", required=True, help="gold-labeled file")
    p.add_argument("--weak", required=True, help="parallel weakly labeled file")
    p.add_argument("--beta", type=float, default=0.8, help="smoothing exponent")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate_cm)

    p = sub.add_parser("train", help="train the noise-channel classifier")
    _add_task(p)
    p.add_argument("--clean", required=True, help="gold training file")
    p.add_argument("--dev", required=True)
    p.add_argument("--noisy", help="weakly labeled pool file")
    p.add_argument("--cm", help="confusion-matrix TSV for the noisy pool")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    _add_embedding_flags(p)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--history", help="write per-epoch CSV here")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a checkpoint on a dataset")
    _add_task(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--setting", default="model", help="setting column for the CSV")
    p.add_argument("--seed", type=int, default=0, help="seed column for the CSV")
    _add_embedding_flags(p)
    p.add_argument("--out", help="write CSV report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("curve", help="sweep the learning-curve grid")
    p.add_argument("--config", required=True, help="experiment INI")
    p.add_argument("--out-dir", help="override the config's output directory")
    p.set_defaults(func=cmd_curve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except DegenerateRunsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ParseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
