"""Input validation helpers shared by the numeric modules.

Each check raises ValueError with the offending name in the message and
returns the validated (possibly converted) array, so calls can be chained
at function entry.
"""

from __future__ import annotations

import numpy as np


def as_float_array(x, name: str = "array") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinity")
    return arr


def check_consistent_length(**named_seqs) -> int:
    lengths = {name: len(seq) for name, seq in named_seqs.items()}
    if len(set(lengths.values())) > 1:
        detail = ", ".join(f"{k}={v}" for k, v in lengths.items())
        raise ValueError(f"inconsistent lengths: {detail}")
    return next(iter(lengths.values()))


def check_square_stochastic(C, name: str = "matrix", atol: float = 1e-6) -> np.ndarray:
    """Validate a square row-stochastic matrix (rows are distributions)."""
    C = as_float_array(C, name)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"{name} must be square 2d, got shape {C.shape}")
    if np.any(C < -atol):
        raise ValueError(f"{name} has negative entries")
    sums = C.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > atol)
    if bad.size:
        raise ValueError(
            f"{name} row {bad[0]} sums to {sums[bad[0]]!r}, expected 1"
        )
    return C


def check_simplex_rows(P, name: str = "probabilities", atol: float = 1e-6) -> np.ndarray:
    """Validate an (n, K) batch of probability vectors; 1d input is one row."""
    P = as_float_array(P, name)
    if P.ndim == 1:
        P = P[None, :]
    if P.ndim != 2:
        raise ValueError(f"{name} must be 1d or 2d, got shape {P.shape}")
    if np.any(P < -atol):
        raise ValueError(f"{name} has negative entries")
    sums = P.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > atol)
    if bad.size:
        raise ValueError(f"{name} row {bad[0]} sums to {sums[bad[0]]!r}, expected 1")
    return P


def check_label_indices(y, n_classes: int, name: str = "labels") -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"{name} must be 1d, got shape {y.shape}")
    if y.size and (not np.issubdtype(y.dtype, np.integer)):
        raise ValueError(f"{name} must be integer class indices")
    if y.size and (y.min() < 0 or y.max() >= n_classes):
        raise ValueError(f"{name} out of range for {n_classes} classes")
    return y.astype(np.int64, copy=False)
