"""Forward evaluation of trained cascade models.

Neurons are evaluated in layer order; each one sees the outputs of all
earlier neurons plus its wired feature columns.  Evaluation is read-only,
so one model can serve many threads concurrently.
"""

from __future__ import annotations

import numpy as np

from .domain import CascadeModel, Dataset, Feature
from .errors import DataError
from .fitting import sigmoid

__all__ = [
    "forward",
    "forward_batch",
    "classify",
    "classify_batch",
    "used_features",
    "error_rate",
    "accuracy",
]


def _wired_rows(wiring, X: np.ndarray, prior: np.ndarray) -> np.ndarray:
    """Stack one input row per wiring source: earlier outputs or feature columns."""
    rows = []
    for src in wiring:
        if isinstance(src, Feature):
            if src.column >= X.shape[1]:
                raise DataError(
                    f"model reads feature column {src.column}, data has "
                    f"{X.shape[1]} columns"
                )
            rows.append(X[:, src.column])
        else:
            rows.append(prior[src.layer - 1])
    return np.vstack(rows)


def forward_batch(model: CascadeModel, features) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate every neuron on a batch of raw examples.

    Returns (outputs, final) where outputs has one row per neuron in layer
    order and final is the last row.  When the model carries normalization
    statistics they are applied to the raw features first; the features
    must then provide exactly the training-time column count.
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2:
        raise DataError(f"features must form a 2-dimensional matrix, got {X.shape}")
    if model.normalization_stats is not None:
        X = model.normalization_stats.transform(X)
    elif X.shape[1] < model.required_features:
        raise DataError(
            f"model reads {model.required_features} feature columns, "
            f"data has {X.shape[1]}"
        )
    n = X.shape[0]
    outputs = np.empty((model.size, n))
    for idx, neuron in enumerate(model.neurons):
        rows = _wired_rows(neuron.wiring, X, outputs[:idx])
        outputs[idx] = sigmoid(neuron.weights[0] + neuron.weights[1:] @ rows)
    return outputs, outputs[-1]


def forward(model: CascadeModel, example) -> tuple[np.ndarray, float]:
    """Evaluate one example; returns (per-neuron outputs, final output)."""
    x = np.asarray(example, dtype=float)
    if x.ndim != 1:
        raise DataError(f"an example must be a vector, got shape {x.shape}")
    outputs, final = forward_batch(model, x[np.newaxis, :])
    return outputs[:, 0], float(final[0])


def classify(model: CascadeModel, example, threshold: float = 0.5) -> int:
    """Label one example: 1 when the final output reaches the threshold."""
    _, final = forward(model, example)
    return int(final >= threshold)


def classify_batch(model: CascadeModel, features, threshold: float = 0.5) -> np.ndarray:
    """Vector of 0/1 labels for a batch of examples."""
    _, final = forward_batch(model, features)
    return (final >= threshold).astype(float)


def used_features(model: CascadeModel) -> tuple[int, ...]:
    """Feature columns read by the model, in first-use order, without repeats."""
    seen: dict[int, None] = {}
    for neuron in model.neurons:
        for column in neuron.feature_columns():
            seen.setdefault(column, None)
    return tuple(seen)


def error_rate(model: CascadeModel, data: Dataset, threshold: float = 0.5) -> float:
    """Percentage of examples the model labels incorrectly."""
    if data.n == 0:
        raise DataError("cannot score an empty dataset")
    labels = classify_batch(model, data.features, threshold)
    wrong = int(np.count_nonzero(labels != data.targets))
    return 100.0 * wrong / data.n


def accuracy(model: CascadeModel, data: Dataset, threshold: float = 0.5) -> float:
    """Percentage labeled correctly; complements error_rate to exactly 100."""
    return 100.0 - error_rate(model, data, threshold)
