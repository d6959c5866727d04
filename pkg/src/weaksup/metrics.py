"""Evaluation metrics: span-level F1 for NER, per-class and averaged P/R/F1
for classification, and aggregation across repeated runs.

Span F1 follows the exact-match convention: a predicted span counts as a
true positive only when both its boundaries and its type equal a gold
span's. Precision and recall with a zero denominator are defined as 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import extract_spans, spans_to_tags


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def f1_score(precision: float, recall: float) -> float:
    return _safe_div(2.0 * precision * recall, precision + recall)


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float
    support: int


def span_prf(gold_layers, pred_layers) -> PRF:
    """Corpus-level span precision/recall/F1 over parallel tag sequences.

    Counts are pooled over all sentences (micro averaging). Duplicate
    matches are impossible since spans within one sentence are disjoint;
    matching is exact on (start, end, type).
    """
    gold_layers = list(gold_layers)
    pred_layers = list(pred_layers)
    if len(gold_layers) != len(pred_layers):
        raise ValueError(
            f"{len(gold_layers)} gold sentences vs {len(pred_layers)} predicted"
        )
    tp = 0
    n_gold = 0
    n_pred = 0
    for gold_tags, pred_tags in zip(gold_layers, pred_layers):
        if len(tuple(gold_tags)) != len(tuple(pred_tags)):
            raise ValueError("gold and predicted sentences have different lengths")
        gold = set(extract_spans(gold_tags))
        pred = set(extract_spans(pred_tags))
        tp += len(gold & pred)
        n_gold += len(gold)
        n_pred += len(pred)
    precision = _safe_div(tp, n_pred)
    recall = _safe_div(tp, n_gold)
    return PRF(precision, recall, f1_score(precision, recall), n_gold)


def span_f1(gold_layers, pred_layers) -> float:
    return span_prf(gold_layers, pred_layers).f1


def per_type_span_prf(gold_layers, pred_layers) -> dict[str, PRF]:
    """Span P/R/F1 restricted to each entity type that occurs anywhere."""
    gold_layers = [tuple(layer) for layer in gold_layers]
    pred_layers = [tuple(layer) for layer in pred_layers]
    types: set[str] = set()
    for layers in (gold_layers, pred_layers):
        for tags in layers:
            types.update(span.etype for span in extract_spans(tags))

    def keep_only(layers, etype):
        out = []
        for tags in layers:
            spans = [s for s in extract_spans(tags) if s.etype == etype]
            out.append(spans_to_tags(spans, len(tags)))
        return out

    return {
        etype: span_prf(keep_only(gold_layers, etype), keep_only(pred_layers, etype))
        for etype in sorted(types)
    }


def classification_prf(gold, pred, labels=None) -> dict[str, PRF]:
    """One-vs-rest precision/recall/F1 per class label.

    ``labels`` fixes the evaluated classes (and the dict order); by default
    every label occurring in either sequence is scored, sorted. Predictions
    of classes outside ``labels`` still count against precision of nothing
    but do consume the gold item's recall as a miss.
    """
    gold = list(gold)
    pred = list(pred)
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold labels vs {len(pred)} predicted")
    if labels is None:
        labels = sorted(set(gold) | set(pred))
    result = {}
    for label in labels:
        tp = sum(1 for g, p in zip(gold, pred) if g == label and p == label)
        fp = sum(1 for g, p in zip(gold, pred) if g != label and p == label)
        fn = sum(1 for g, p in zip(gold, pred) if g == label and p != label)
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        result[label] = PRF(precision, recall, f1_score(precision, recall), tp + fn)
    return result


def macro_f1(gold, pred, labels=None) -> float:
    """Unweighted mean of per-class F1 scores."""
    per_class = classification_prf(gold, pred, labels)
    if not per_class:
        raise ValueError("no labels to average over")
    return sum(prf.f1 for prf in per_class.values()) / len(per_class)


def micro_f1(gold, pred, labels=None) -> float:
    """F1 from pooled per-class counts; equals accuracy when every item
    has exactly one gold and one predicted label from ``labels``."""
    gold = list(gold)
    pred = list(pred)
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold labels vs {len(pred)} predicted")
    if labels is None:
        labels = sorted(set(gold) | set(pred))
    labels = set(labels)
    tp = sum(1 for g, p in zip(gold, pred) if g == p and g in labels)
    n_pred = sum(1 for p in pred if p in labels)
    n_gold = sum(1 for g in gold if g in labels)
    precision = _safe_div(tp, n_pred)
    recall = _safe_div(tp, n_gold)
    return f1_score(precision, recall)


def accuracy(gold, pred) -> float:
    gold = list(gold)
    pred = list(pred)
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold labels vs {len(pred)} predicted")
    if not gold:
        raise ValueError("cannot score an empty sequence")
    return sum(1 for g, p in zip(gold, pred) if g == p) / len(gold)


def aggregate_runs(scores) -> tuple[float, float]:
    """Mean and standard error over repeated runs of one configuration.

    The standard error is the sample standard deviation (n-1 denominator)
    divided by sqrt(n). A single run has standard error 0.
    """
    scores = [float(s) for s in scores]
    n = len(scores)
    if n == 0:
        raise ValueError("cannot aggregate zero runs")
    mean = sum(scores) / n
    if n == 1:
        return mean, 0.0
    var = sum((s - mean) ** 2 for s in scores) / (n - 1)
    return mean, math.sqrt(var) / math.sqrt(n)


def degenerate_class_count(gold, pred, labels=None) -> int:
    """Number of classes with gold support that score exactly F1 = 0."""
    per_class = classification_prf(gold, pred, labels)
    return sum(1 for prf in per_class.values() if prf.support > 0 and prf.f1 == 0.0)


def is_degenerate(gold, pred, labels=None, threshold: int = 2) -> bool:
    """Convergence check: True when at least ``threshold`` supported classes
    end up with zero F1, the signature of a collapsed model."""
    return degenerate_class_count(gold, pred, labels) >= threshold


def convergence_filter(per_class: dict[str, PRF], threshold: int = 2) -> bool:
    """Flag (True) a run whose dev metrics show ``threshold`` or more
    supported classes at exactly zero F1; such runs get reseeded."""
    dead = sum(1 for prf in per_class.values() if prf.support > 0 and prf.f1 == 0.0)
    return dead >= threshold


def format_prf_table(per_label: dict[str, PRF]) -> str:
    """Fixed-width human-readable metrics table, one row per label."""
    width = max([len("label"), *(len(str(l)) for l in per_label)])
    lines = [
        f"{'label':<{width}}  {'precision':>9}  {'recall':>9}  {'f1':>9}  {'support':>7}"
    ]
    for label, prf in per_label.items():
        lines.append(
            f"{label:<{width}}  {prf.precision:>9.4f}  {prf.recall:>9.4f}"
            f"  {prf.f1:>9.4f}  {prf.support:>7d}"
        )
    return "\n".join(lines)


def prf_csv_rows(setting: str, seed, per_label: dict[str, PRF]):
    """Rows for the machine-readable report:
    (setting, seed, label, precision, recall, f1, support)."""
    return [
        (setting, seed, label, prf.precision, prf.recall, prf.f1, prf.support)
        for label, prf in per_label.items()
    ]
