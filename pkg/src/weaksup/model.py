"""Linear softmax classifier trained jointly on clean and weak labels.

The model is a single linear layer with softmax output. Clean examples
use the ordinary cross-entropy; weak (noisy) examples are scored through
a confusion-matrix channel: the predicted clean distribution p becomes
q = p @ C and the loss is cross-entropy against the noisy label under q.
Passing no channel treats the extra examples as clean, and an identity
channel reproduces that treatment bit for bit.

Training is plain full-batch gradient descent, one step per epoch, with
a fresh subsample of the noisy pool each epoch sized to the clean set.
When a dev set is given, the parameters from the best dev epoch are kept.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .fileio import read_json, write_json
from .metrics import macro_f1
from .validation import (
    as_float_array,
    check_label_indices,
    check_square_stochastic,
)


def softmax(Z) -> np.ndarray:
    """Row-wise softmax, shifted by the row max for stability."""
    Z = as_float_array(Z, "logits")
    shifted = Z - Z.max(axis=-1, keepdims=True)
    P = np.exp(shifted)
    P /= P.sum(axis=-1, keepdims=True)
    return P


class Part(NamedTuple):
    """One labeled batch entering the mixed loss.

    ``channel`` is the (K, K) confusion matrix for weak labels, or None
    for clean labels. ``weight`` scales this part's contribution.
    """

    features: np.ndarray
    targets: np.ndarray
    weight: float = 1.0
    channel: np.ndarray | None = None


def mixed_loss_and_gradients(W, b, parts):
    """Weighted-mean cross-entropy and its gradients over several parts.

    The loss is sum_p(weight_p * sum_i loss_pi) / sum_p(weight_p * n_p):
    a weighted mean over individual decisions, not over parts, so a part
    with more examples carries proportionally more of the gradient. With
    all weights 1 this is exactly the plain mean over the pooled examples.

    Returns (loss, dW, db) with dW, db shaped like W, b.
    """
    W = as_float_array(W, "weights")
    b = as_float_array(b, "bias")
    if W.ndim != 2:
        raise ValueError(f"weights must be 2d, got shape {W.shape}")
    n_classes = W.shape[1]
    if b.shape != (n_classes,):
        raise ValueError(f"bias shape {b.shape} does not match {n_classes} classes")

    dW = np.zeros_like(W)
    db = np.zeros_like(b)
    loss_sum = 0.0
    denom = 0.0
    for part in parts:
        X = as_float_array(part.features, "features")
        if X.ndim != 2 or X.shape[1] != W.shape[0]:
            raise ValueError(
                f"features shape {X.shape} does not match weights {W.shape}"
            )
        y = check_label_indices(part.targets, n_classes, "targets")
        n = X.shape[0]
        if y.shape[0] != n:
            raise ValueError(f"{n} feature rows vs {y.shape[0]} targets")
        if n == 0:
            continue
        weight = float(part.weight)
        if weight < 0:
            raise ValueError(f"part weight must be non-negative, got {weight}")

        P = softmax(X @ W + b)
        rows = np.arange(n)
        if part.channel is None:
            losses = -np.log(P[rows, y])
            G = P.copy()
            G[rows, y] -= 1.0
        else:
            C = check_square_stochastic(part.channel, "channel")
            if C.shape[0] != n_classes:
                raise ValueError(
                    f"channel has {C.shape[0]} classes, model has {n_classes}"
                )
            M = P * C[:, y].T
            q = M.sum(axis=1)
            losses = -np.log(q)
            G = P - M / q[:, None]

        loss_sum += weight * losses.sum()
        dW += weight * (X.T @ G)
        db += weight * G.sum(axis=0)
        denom += weight * n

    if denom == 0.0:
        raise ValueError("no examples in any part")
    return loss_sum / denom, dW / denom, db / denom


def epoch_noisy_indices(seed: int, epoch: int, pool_size: int, size: int) -> np.ndarray:
    """Indices of the noisy subsample for one epoch.

    A generator seeded by (seed, epoch) permutes the pool and the first
    ``size`` positions are taken, so the draw is reproducible per epoch
    and independent of every other epoch.
    """
    if not 0 <= size <= pool_size:
        raise ValueError(f"size {size} out of range 0..{pool_size}")
    rng = np.random.default_rng([seed, epoch])
    return rng.permutation(pool_size)[:size]


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    loss: float
    dev_score: float | None
    n_clean: int
    n_noisy: int


class NoisyChannelClassifier(ClassifierMixin, BaseEstimator):
    """Linear softmax model with confusion-channel training.

    Parameters
    ----------
    n_classes : number of output classes; targets are indices below this
    n_epochs : gradient steps (one full-batch step per epoch)
    learning_rate : step size
    clean_weight, noisy_weight : per-decision weights of the two parts
    init_bound : weights start uniform in [-init_bound, init_bound]
    subsample_noisy : cap the per-epoch noisy draw at the clean-set size
    seed : drives weight init and the per-epoch noisy subsample
    """

    def __init__(
        self,
        n_classes: int,
        n_epochs: int = 50,
        learning_rate: float = 0.1,
        clean_weight: float = 1.0,
        noisy_weight: float = 1.0,
        init_bound: float = 0.1,
        subsample_noisy: bool = True,
        seed: int = 0,
    ):
        self.n_classes = n_classes
        self.n_epochs = n_epochs
        self.learning_rate = learning_rate
        self.clean_weight = clean_weight
        self.noisy_weight = noisy_weight
        self.init_bound = init_bound
        self.subsample_noisy = subsample_noisy
        self.seed = seed

    def _check_params(self):
        if self.n_classes < 2:
            raise ValueError("need at least two classes")
        if self.n_epochs < 1:
            raise ValueError("n_epochs must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.init_bound < 0:
            raise ValueError("init_bound must be non-negative")

    def fit(
        self,
        X,
        y,
        noisy=None,
        channel=None,
        dev=None,
        scorer=None,
        callback=None,
    ):
        """Train on clean (X, y), optionally mixing in weak labels.

        noisy : (X_noisy, y_noisy) pool subsampled each epoch
        channel : confusion matrix for the noisy part; None treats the
            noisy labels as clean
        dev : (X_dev, y_dev) used to pick the best epoch's parameters
        scorer : callable(y_true, y_pred) -> float for dev scoring;
            defaults to macro F1 over all classes
        callback : callable(epoch, W, b) invoked after each step with
            parameter copies, for trajectory inspection
        """
        self._check_params()
        X = as_float_array(X, "X")
        if X.ndim != 2:
            raise ValueError(f"X must be 2d, got shape {X.shape}")
        y = check_label_indices(y, self.n_classes, "y")
        n_clean = X.shape[0]
        if n_clean == 0:
            raise ValueError("clean set is empty")
        if y.shape[0] != n_clean:
            raise ValueError(f"{n_clean} rows in X vs {y.shape[0]} labels")
        n_features = X.shape[1]

        if noisy is not None:
            X_noisy = as_float_array(noisy[0], "X_noisy")
            y_noisy = check_label_indices(noisy[1], self.n_classes, "y_noisy")
            if X_noisy.ndim != 2 or X_noisy.shape[1] != n_features:
                raise ValueError("noisy features do not match clean feature width")
            if X_noisy.shape[0] != y_noisy.shape[0]:
                raise ValueError("noisy features and labels disagree in length")
            if X_noisy.shape[0] == 0:
                raise ValueError("noisy pool is empty")
            if channel is not None:
                channel = check_square_stochastic(channel, "channel")
                if channel.shape[0] != self.n_classes:
                    raise ValueError("channel size does not match n_classes")
            pool = X_noisy.shape[0]
            subsample = min(n_clean, pool) if self.subsample_noisy else pool
        elif channel is not None:
            raise ValueError("channel given without a noisy pool")

        if dev is not None:
            X_dev = as_float_array(dev[0], "X_dev")
            y_dev = check_label_indices(dev[1], self.n_classes, "y_dev")
            if scorer is None:
                labels = list(range(self.n_classes))
                scorer = lambda yt, yp: macro_f1(yt, yp, labels=labels)

        rng = np.random.default_rng([self.seed])
        W = rng.uniform(-self.init_bound, self.init_bound, (n_features, self.n_classes))
        b = np.zeros(self.n_classes, dtype=np.float64)

        history: list[EpochRecord] = []
        best_score = None
        best_epoch = None
        best_params = None
        for epoch in range(self.n_epochs):
            parts = [Part(X, y, self.clean_weight, None)]
            n_drawn = 0
            if noisy is not None:
                idx = epoch_noisy_indices(
                    self.seed, epoch, X_noisy.shape[0], subsample
                )
                parts.append(
                    Part(X_noisy[idx], y_noisy[idx], self.noisy_weight, channel)
                )
                n_drawn = subsample
            loss, dW, db = mixed_loss_and_gradients(W, b, parts)
            W = W - self.learning_rate * dW
            b = b - self.learning_rate * db

            dev_score = None
            if dev is not None:
                pred = np.argmax(X_dev @ W + b, axis=1)
                dev_score = float(scorer(list(y_dev), list(pred)))
                if best_score is None or dev_score > best_score:
                    best_score = dev_score
                    best_epoch = epoch
                    best_params = (W.copy(), b.copy())
            history.append(
                EpochRecord(epoch, float(loss), dev_score, n_clean, n_drawn)
            )
            if callback is not None:
                callback(epoch, W.copy(), b.copy())

        if best_params is not None:
            W, b = best_params
            self.best_epoch_ = best_epoch
            self.best_dev_score_ = best_score
        else:
            self.best_epoch_ = self.n_epochs - 1
            self.best_dev_score_ = None
        self.weights_ = W
        self.bias_ = b
        self.history_ = tuple(history)
        self.n_features_in_ = n_features
        self.classes_ = np.arange(self.n_classes)
        return self

    def _check_fitted(self):
        if not hasattr(self, "weights_"):
            raise RuntimeError("this classifier has not been fitted yet")

    def decision_function(self, X) -> np.ndarray:
        self._check_fitted()
        X = as_float_array(X, "X")
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValueError(f"X shape {X.shape} does not match fitted model")
        return X @ self.weights_ + self.bias_

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.decision_function(X), axis=1)


CHECKPOINT_FORMAT = "weaksup-linear"


def save_checkpoint(model: NoisyChannelClassifier, path, task: str, labels) -> None:
    """Write fitted parameters plus the label inventory as JSON."""
    model._check_fitted()
    labels = list(labels)
    if len(labels) != model.n_classes:
        raise ValueError(f"{len(labels)} labels for {model.n_classes} classes")
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": 1,
        "task": task,
        "labels": labels,
        "n_features": int(model.n_features_in_),
        "weights": [[float(v) for v in row] for row in model.weights_],
        "bias": [float(v) for v in model.bias_],
    }
    write_json(path, payload)


def load_checkpoint(path):
    """Read a checkpoint; returns (model, task, labels)."""
    payload = read_json(path)
    if payload.get("format") != CHECKPOINT_FORMAT or payload.get("version") != 1:
        raise ValueError(f"{path} is not a recognized model checkpoint")
    labels = list(payload["labels"])
    W = np.asarray(payload["weights"], dtype=np.float64)
    b = np.asarray(payload["bias"], dtype=np.float64)
    if W.shape != (payload["n_features"], len(labels)) or b.shape != (len(labels),):
        raise ValueError(f"{path} has inconsistent parameter shapes")
    model = NoisyChannelClassifier(n_classes=len(labels))
    model.weights_ = W
    model.bias_ = b
    model.history_ = ()
    model.best_epoch_ = None
    model.best_dev_score_ = None
    model.n_features_in_ = int(payload["n_features"])
    model.classes_ = np.arange(len(labels))
    return model, payload["task"], labels
