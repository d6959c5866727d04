"""Learning-curve harness: repeated training runs over growing clean
subsets, with and without the weakly labeled pool, aggregated per size.

Subsets are nested (the 50-sentence subset contains the 10-sentence one)
because every size draws from the same master-seeded permutation. Run
variation comes from the model seed alone; each run's seed is derived
from (master seed, setting, size, seed index, attempt), where attempt
counts reseeds after degenerate runs. A run is degenerate when at least
two supported dev classes score exactly zero F1; the harness retries it
with fresh seeds up to ``max_reseeds`` times and gives up afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import (
    NER,
    TOPIC,
    Dataset,
    downsample,
    downsized_dev_target,
    repair_bio,
    tag_alphabet,
)
from .embeddings import ner_features, sentence_offsets, topic_features
from .fileio import write_csv
from .metrics import (
    aggregate_runs,
    is_degenerate,
    macro_f1,
    per_type_span_prf,
    span_f1,
    span_prf,
)
from .model import NoisyChannelClassifier
from .noise import estimate_confusion_matrix, smooth_confusion_matrix

DEFAULT_LEARNING_RATES = {TOPIC: 0.1, NER: 0.05}

CLEAN_SETTING = "clean"
DISTANT_SETTING = "distant"


def derive_run_seed(master_seed: int, *path: int) -> int:
    """Collision-free integer seed for one run, stable across processes."""
    seq = np.random.SeedSequence([int(master_seed), *[int(p) for p in path]])
    return int(seq.generate_state(1)[0])


def task_labels(*datasets) -> tuple[str, ...]:
    """Model label inventory: classes for topic, the full BIO2 tag
    alphabet over all entity types for NER."""
    tasks = {d.task for d in datasets}
    if len(tasks) != 1:
        raise ValueError(f"datasets mix tasks: {sorted(tasks)}")
    merged = sorted(set().union(*(d.label_set for d in datasets)))
    if tasks == {NER}:
        return tag_alphabet(merged)
    return tuple(merged)


@dataclass(frozen=True)
class TaskArrays:
    """Featurized view of one dataset split for one label layer."""

    X: np.ndarray
    y: np.ndarray
    labels: tuple[str, ...]
    task: str
    sentences: tuple
    offsets: np.ndarray | None = None

    @property
    def gold_layers(self) -> list:
        return [s.gold_tags for s in self.sentences]


def prepare_arrays(dataset: Dataset, emb, labels, layer: str = "gold") -> TaskArrays:
    """Features and integer targets for one split.

    Topic sentences without a label in the requested layer (abstentions)
    are dropped. NER targets are token-level tag indices; the sentence
    offsets allow regrouping flat predictions into sentences.
    """
    if layer not in ("gold", "weak"):
        raise ValueError(f"unknown layer {layer!r}")
    index = {label: i for i, label in enumerate(labels)}
    if dataset.task == TOPIC:
        kept = []
        targets = []
        for sent in dataset.sentences:
            label = sent.gold_class if layer == "gold" else sent.weak_class
            if label is None:
                if layer == "gold":
                    raise ValueError("a sentence is missing its gold class")
                continue
            kept.append(sent)
            targets.append(index[label])
        if not kept:
            raise ValueError(f"no sentences carry a {layer} class label")
        X = topic_features(kept, emb)
        return TaskArrays(
            X, np.asarray(targets, dtype=np.int64), tuple(labels), TOPIC, tuple(kept)
        )

    targets = []
    for sent in dataset.sentences:
        tags = sent.gold_tags if layer == "gold" else sent.weak_tags
        if tags is None:
            raise ValueError(f"a sentence is missing its {layer} tags")
        targets.extend(index[tag] for tag in tags)
    sentences = dataset.sentences
    X = ner_features(sentences, emb)
    return TaskArrays(
        X,
        np.asarray(targets, dtype=np.int64),
        tuple(labels),
        NER,
        tuple(sentences),
        offsets=sentence_offsets(sentences),
    )


def regroup_tags(flat_indices, arrays: TaskArrays) -> list[tuple[str, ...]]:
    """Flat token label indices back into per-sentence BIO2-valid tag
    tuples; orphan I-X predictions are re-headed to B-X."""
    if arrays.offsets is None:
        raise ValueError("regrouping needs NER arrays")
    tags = [arrays.labels[i] for i in flat_indices]
    bounds = arrays.offsets
    return [
        repair_bio(tags[bounds[i] : bounds[i + 1]]) for i in range(len(bounds) - 1)
    ]


def make_dev_scorer(arrays: TaskArrays):
    """Scorer fed to the training loop: span F1 for NER (exact match over
    decoded spans), macro F1 over the full class inventory for topic."""
    if arrays.task == TOPIC:
        label_range = list(range(len(arrays.labels)))
        return lambda y_true, y_pred: macro_f1(y_true, y_pred, labels=label_range)
    gold_layers = arrays.gold_layers

    def scorer(y_true, y_pred) -> float:
        return span_f1(gold_layers, regroup_tags(y_pred, arrays))

    return scorer


def degenerate_run(arrays: TaskArrays, y_pred) -> bool:
    """Collapse test on dev predictions: two or more supported classes
    (entity types for NER) with exactly zero F1."""
    if arrays.task == TOPIC:
        return is_degenerate(
            list(arrays.y), list(y_pred), labels=range(len(arrays.labels))
        )
    per_type = per_type_span_prf(arrays.gold_layers, regroup_tags(y_pred, arrays))
    dead = sum(1 for prf in per_type.values() if prf.support > 0 and prf.f1 == 0.0)
    return dead >= 2


def channel_pairs(dataset: Dataset):
    """(gold, weak) label pairs for confusion estimation; token-level
    tags for NER, sentence classes for topic (abstentions skipped)."""
    pairs = []
    for sent in dataset.sentences:
        if dataset.task == TOPIC:
            if sent.gold_class is None or sent.weak_class is None:
                continue
            pairs.append((sent.gold_class, sent.weak_class))
        else:
            if sent.gold_tags is None or sent.weak_tags is None:
                raise ValueError("channel estimation needs both tag layers")
            pairs.extend(zip(sent.gold_tags, sent.weak_tags))
    return pairs


def estimate_dataset_channel(dataset: Dataset, labels, beta: float = 0.8) -> np.ndarray:
    """Smoothed confusion matrix from a split carrying both label layers."""
    pairs = channel_pairs(dataset)
    clean = [c for c, _ in pairs]
    noisy = [n for _, n in pairs]
    return smooth_confusion_matrix(
        estimate_confusion_matrix(clean, noisy, labels), beta
    )


class DegenerateRunsError(RuntimeError):
    """Every attempt at one run collapsed; the reseed budget is spent."""


def default_size_ladder(n_train: int) -> tuple[int, ...]:
    """Standard training-size ladder capped by the corpus: 10, 20, 50,
    100, 200, 400, then the full size."""
    if n_train < 1:
        raise ValueError("training set is empty")
    ladder = [s for s in (10, 20, 50, 100, 200, 400) if s < n_train]
    ladder.append(n_train)
    return tuple(ladder)


@dataclass(frozen=True)
class CurveConfig:
    """Grid definition for one learning-curve sweep.

    ``sizes`` must be strictly increasing. ``learning_rate`` of None picks
    the task default (0.1 topic, 0.05 NER). ``dev_downsize`` shrinks the
    dev set by the training subset's factor, floored at ten sentences.
    """

    sizes: tuple[int, ...]
    n_seeds: int = 10
    settings: tuple[str, ...] = (CLEAN_SETTING, DISTANT_SETTING)
    master_seed: int = 0
    beta: float = 0.8
    max_reseeds: int = 3
    n_epochs: int = 50
    learning_rate: float | None = None
    init_bound: float = 0.1
    dev_downsize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "settings", tuple(self.settings))
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise ValueError("sizes must be positive")
        if any(b >= a for a, b in zip(self.sizes[1:], self.sizes)):
            raise ValueError(f"sizes must be strictly increasing: {self.sizes}")
        if self.n_seeds < 1:
            raise ValueError("n_seeds must be positive")
        unknown = set(self.settings) - {CLEAN_SETTING, DISTANT_SETTING}
        if not self.settings or unknown:
            raise ValueError(f"unknown settings: {sorted(unknown)}")
        if self.max_reseeds < 0:
            raise ValueError("max_reseeds must be non-negative")


@dataclass(frozen=True)
class RunRecord:
    setting: str
    size: int
    seed: int
    f1: float
    attempt: int


@dataclass(frozen=True)
class CurveResult:
    runs: tuple[RunRecord, ...]
    summary: tuple[tuple[str, int, float, float], ...]
    config: CurveConfig = field(repr=False, default=None)


def _fit_run(setting, clean_arrays, noisy_arrays, channel, dev_arrays, config, run_seed):
    lr = config.learning_rate
    if lr is None:
        lr = DEFAULT_LEARNING_RATES[clean_arrays.task]
    model = NoisyChannelClassifier(
        n_classes=len(clean_arrays.labels),
        n_epochs=config.n_epochs,
        learning_rate=lr,
        init_bound=config.init_bound,
        seed=run_seed,
    )
    scorer = make_dev_scorer(dev_arrays)
    kwargs = {"dev": (dev_arrays.X, dev_arrays.y), "scorer": scorer}
    if setting == DISTANT_SETTING:
        kwargs["noisy"] = (noisy_arrays.X, noisy_arrays.y)
        kwargs["channel"] = channel
    model.fit(clean_arrays.X, clean_arrays.y, **kwargs)
    pred = model.predict(dev_arrays.X)
    return float(model.best_dev_score_), degenerate_run(dev_arrays, pred)


def run_learning_curve(train: Dataset, dev: Dataset, emb, config: CurveConfig) -> CurveResult:
    """Run the full grid of (setting, size, seed) training runs.

    The distant setting needs weak labels on ``train``: the weak layer of
    the size-limited clean subset estimates the channel, and the weak
    layer of the whole training set forms the noisy pool.
    """
    if train.task != dev.task:
        raise ValueError("train and dev must share a task")
    labels = task_labels(train, dev)
    if max(config.sizes) > len(train):
        raise ValueError(
            f"largest size {max(config.sizes)} exceeds {len(train)} training sentences"
        )

    noisy_arrays = None
    if DISTANT_SETTING in config.settings:
        noisy_arrays = prepare_arrays(train, emb, labels, layer="weak")

    runs: list[RunRecord] = []
    for s_idx, setting in enumerate(config.settings):
        for z_idx, size in enumerate(config.sizes):
            clean_sub = downsample(train, size, config.master_seed)
            if config.dev_downsize:
                dev_size = downsized_dev_target(len(dev), size, len(train))
                dev_sub = downsample(dev, dev_size, config.master_seed)
            else:
                dev_sub = dev
            clean_arrays = prepare_arrays(clean_sub, emb, labels, layer="gold")
            dev_arrays = prepare_arrays(dev_sub, emb, labels, layer="gold")
            channel = None
            if setting == DISTANT_SETTING:
                channel = estimate_dataset_channel(clean_sub, labels, config.beta)
            for seed_idx in range(config.n_seeds):
                for attempt in range(config.max_reseeds + 1):
                    run_seed = derive_run_seed(
                        config.master_seed, s_idx, z_idx, seed_idx, attempt
                    )
                    f1, collapsed = _fit_run(
                        setting,
                        clean_arrays,
                        noisy_arrays,
                        channel,
                        dev_arrays,
                        config,
                        run_seed,
                    )
                    if not collapsed:
                        runs.append(RunRecord(setting, size, seed_idx, f1, attempt))
                        break
                else:
                    raise DegenerateRunsError(
                        f"run (setting={setting}, size={size}, seed={seed_idx}) "
                        f"stayed degenerate after {config.max_reseeds + 1} attempts"
                    )

    summary = []
    for setting in config.settings:
        for size in config.sizes:
            scores = [r.f1 for r in runs if r.setting == setting and r.size == size]
            mean, stderr = aggregate_runs(scores)
            summary.append((setting, size, mean, stderr))
    return CurveResult(runs=tuple(runs), summary=tuple(summary), config=config)


def write_curve_outputs(result: CurveResult, out_dir) -> dict:
    """runs.csv (one line per run) and summary.csv (mean and standard
    error per setting and size); identical inputs give identical bytes."""
    from pathlib import Path

    out_dir = Path(out_dir)
    runs_path = write_csv(
        out_dir / "runs.csv",
        ("setting", "size", "seed", "f1"),
        ((r.setting, r.size, r.seed, r.f1) for r in result.runs),
    )
    summary_path = write_csv(
        out_dir / "summary.csv",
        ("setting", "size", "mean_f1", "stderr"),
        result.summary,
    )
    return {"runs": runs_path, "summary": summary_path}


ABSTAIN_LABEL = "ABSTAIN"


def evaluate_rules(dataset: Dataset) -> dict:
    """Score the weak layer against gold on one split.

    NER reports exact span precision/recall/F1 overall and per type.
    Topic reports macro F1 over the gold classes (abstentions predict
    the reserved ABSTAIN label, which can never match) plus accuracy on
    the covered subset and the abstain rate.
    """
    if dataset.task == NER:
        gold = []
        weak = []
        for sent in dataset.sentences:
            if sent.gold_tags is None or sent.weak_tags is None:
                raise ValueError("rule evaluation needs both tag layers")
            gold.append(sent.gold_tags)
            weak.append(sent.weak_tags)
        overall = span_prf(gold, weak)
        per_type = per_type_span_prf(gold, weak)
        return {
            "task": NER,
            "precision": overall.precision,
            "recall": overall.recall,
            "f1": overall.f1,
            "per_type": {
                etype: {
                    "precision": prf.precision,
                    "recall": prf.recall,
                    "f1": prf.f1,
                    "support": prf.support,
                }
                for etype, prf in per_type.items()
            },
        }

    gold = []
    pred = []
    for sent in dataset.sentences:
        if sent.gold_class is None:
            raise ValueError("rule evaluation needs gold classes")
        gold.append(sent.gold_class)
        pred.append(sent.weak_class if sent.weak_class is not None else ABSTAIN_LABEL)
    covered = [(g, p) for g, p in zip(gold, pred) if p != ABSTAIN_LABEL]
    return {
        "task": TOPIC,
        "macro_f1": macro_f1(gold, pred, labels=dataset.label_set),
        "abstain_rate": 1.0 - len(covered) / len(gold),
        "covered_accuracy": (
            sum(1 for g, p in covered if g == p) / len(covered) if covered else 0.0
        ),
    }
