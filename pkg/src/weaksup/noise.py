"""Label-noise channel: estimating, smoothing, and applying a confusion
matrix that relates clean labels to weakly annotated ones.

The channel is a row-stochastic matrix C with C[i, j] = P(noisy = j |
clean = i), estimated by counting label pairs on data where both layers
exist. A model's clean-label distribution p maps to its predicted noisy
distribution via q = p @ C.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .fileio import atomic_write_text, format_value
from .validation import (
    as_float_array,
    check_simplex_rows,
    check_square_stochastic,
)


def identity_channel(n_classes: int) -> np.ndarray:
    if n_classes < 1:
        raise ValueError("need at least one class")
    return np.eye(n_classes, dtype=np.float64)


def _flatten_aligned(clean, noisy):
    """Accept flat label sequences or per-sentence nested ones; yield pairs."""
    clean = list(clean)
    noisy = list(noisy)
    if len(clean) != len(noisy):
        raise ValueError(f"{len(clean)} clean items vs {len(noisy)} noisy items")
    nested = any(not isinstance(c, str) and hasattr(c, "__iter__") for c in clean)
    if not nested:
        return list(zip(clean, noisy))
    pairs = []
    for i, (c_seq, n_seq) in enumerate(zip(clean, noisy)):
        c_seq = list(c_seq)
        n_seq = list(n_seq)
        if len(c_seq) != len(n_seq):
            raise ValueError(
                f"sentence {i}: {len(c_seq)} clean labels vs {len(n_seq)} noisy"
            )
        pairs.extend(zip(c_seq, n_seq))
    return pairs


def confusion_counts(clean, noisy, labels) -> np.ndarray:
    """Raw (K, K) pair counts, rows indexed by clean label, columns by noisy."""
    labels = list(labels)
    if len(set(labels)) != len(labels):
        raise ValueError("labels contains duplicates")
    index = {label: i for i, label in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.float64)
    for c, n in _flatten_aligned(clean, noisy):
        if c not in index:
            raise ValueError(f"clean label {c!r} not in label list")
        if n not in index:
            raise ValueError(f"noisy label {n!r} not in label list")
        counts[index[c], index[n]] += 1.0
    return counts


def estimate_confusion_matrix(clean, noisy, labels) -> np.ndarray:
    """Row-normalized confusion matrix from aligned label sequences.

    Inputs may be flat label lists or per-sentence lists of tag lists
    (token-level estimation). A clean label that never occurs gets an
    identity row: with no evidence, the channel passes it through.
    """
    counts = confusion_counts(clean, noisy, labels)
    return normalize_rows(counts)


def normalize_rows(counts) -> np.ndarray:
    """Divide each row by its sum; all-zero rows become identity rows."""
    counts = as_float_array(counts, "counts")
    if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
        raise ValueError(f"counts must be square 2d, got shape {counts.shape}")
    if np.any(counts < 0):
        raise ValueError("counts must be non-negative")
    sums = counts.sum(axis=1)
    C = np.empty_like(counts)
    for i, s in enumerate(sums):
        if s == 0.0:
            C[i] = 0.0
            C[i, i] = 1.0
        else:
            C[i] = counts[i] / s
    return C


def smooth_confusion_matrix(C, beta: float = 0.8) -> np.ndarray:
    """Temper the channel: raise entries to the power beta, renormalize rows.

    beta = 1 returns the matrix unchanged; beta below 1 pulls rows toward
    uniform, softening overconfident estimates from small samples, while
    keeping each row's ranking of columns (argmax in particular) intact.
    """
    C = check_square_stochastic(C, "confusion matrix")
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    if beta == 1.0:
        return C.copy()
    powered = np.power(C, beta)
    return powered / powered.sum(axis=1, keepdims=True)


def apply_noise_channel(p, C) -> np.ndarray:
    """Map clean-label distribution(s) through the channel: q = p @ C.

    Accepts a single (K,) vector or an (n, K) batch and returns the same
    shape. Rows of the result are again probability vectors.
    """
    C = check_square_stochastic(C, "confusion matrix")
    p_arr = as_float_array(p, "distribution")
    single = p_arr.ndim == 1
    P = check_simplex_rows(p_arr, "distribution")
    if P.shape[1] != C.shape[0]:
        raise ValueError(
            f"distribution has {P.shape[1]} classes, channel has {C.shape[0]}"
        )
    Q = P @ C
    return Q[0] if single else Q


def write_confusion_tsv(path, C, labels) -> None:
    """Matrix file: a header line of labels, then K tab-separated rows."""
    C = check_square_stochastic(C, "confusion matrix")
    labels = [str(l) for l in labels]
    if len(labels) != C.shape[0]:
        raise ValueError(f"{len(labels)} labels for a {C.shape[0]}-row matrix")
    lines = ["\t".join(labels)]
    for row in C:
        lines.append("\t".join(format_value(float(v)) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_confusion_tsv(path):
    """Inverse of write_confusion_tsv; returns (matrix, labels)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    rows = [line for line in lines if line.strip()]
    if not rows:
        raise ValueError(f"{path}: empty confusion-matrix file")
    labels = rows[0].split("\t")
    K = len(labels)
    if len(rows) != K + 1:
        raise ValueError(f"{path}: expected {K} matrix rows, found {len(rows) - 1}")
    try:
        C = np.array(
            [[float(v) for v in line.split("\t")] for line in rows[1:]],
            dtype=np.float64,
        )
    except ValueError as exc:
        raise ValueError(f"{path}: bad probability value: {exc}") from None
    if C.shape != (K, K):
        raise ValueError(f"{path}: matrix shape {C.shape} does not match header")
    return check_square_stochastic(C, "confusion matrix"), labels


def reorder_channel(C, from_labels, to_labels) -> np.ndarray:
    """Permute a channel's rows and columns into a different label order."""
    C = check_square_stochastic(C, "confusion matrix")
    from_labels = list(from_labels)
    to_labels = list(to_labels)
    if sorted(from_labels) != sorted(to_labels):
        raise ValueError(
            f"label inventories differ: {sorted(from_labels)} vs {sorted(to_labels)}"
        )
    perm = [from_labels.index(label) for label in to_labels]
    return C[np.ix_(perm, perm)]
