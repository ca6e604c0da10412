"""Value types for cascade network training.

Everything here is an immutable value object: arrays are copied on
construction and marked read-only, so instances can be shared freely
between threads or worker processes without synchronization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .errors import DataError

__all__ = [
    "MAX_SEED",
    "Dataset",
    "SplitAB",
    "PrevNeuron",
    "Feature",
    "InputSource",
    "NeuronSpec",
    "FeatureStats",
    "CascadeModel",
    "TrainConfig",
    "FitnessRecord",
    "validate_dataset",
    "require_valid_dataset",
]

MAX_SEED = 2**64 - 1


def _frozen_array(values, dtype=float, ndim=None, name="array") -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Dataset:
    """A feature matrix with one binary target per row.

    The constructor only coerces shapes and dtypes.  Semantic checks
    (binary targets, matching lengths, finite values, enough columns) are
    the job of :func:`validate_dataset`, so that broken inputs can be
    inspected and reported item by item instead of dying at construction.
    """

    features: np.ndarray  # (n, m)
    targets: np.ndarray  # (n,), values expected in {0, 1}
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "features", _frozen_array(self.features, ndim=2, name="features")
        )
        object.__setattr__(
            self, "targets", _frozen_array(self.targets, ndim=1, name="targets")
        )
        if self.feature_names is not None:
            names = tuple(str(s) for s in self.feature_names)
            if len(names) != self.features.shape[1]:
                raise ValueError(
                    f"{len(names)} feature names for {self.features.shape[1]} columns"
                )
            object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]

    def take(self, indices) -> "Dataset":
        """Row subset, in the order given."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.targets[idx], self.feature_names)


def validate_dataset(d: Dataset) -> list[str]:
    """Check every Dataset invariant and return an itemized violation list.

    An empty list means the dataset is valid.
    """
    violations: list[str] = []
    if d.targets.shape[0] != d.n:
        violations.append(
            f"features have {d.n} rows but there are {d.targets.shape[0]} targets"
        )
    if d.m < 2:
        violations.append("at least two features required")
    for i in np.nonzero((d.targets != 0.0) & (d.targets != 1.0))[0]:
        violations.append(f"non-binary target at row {int(i)}")
    for i, j in np.argwhere(~np.isfinite(d.features)):
        violations.append(f"non-finite feature value at row {int(i)}, column {int(j)}")
    return violations


def require_valid_dataset(d: Dataset) -> None:
    """Raise :class:`DataError` listing every violation, if there are any."""
    violations = validate_dataset(d)
    if violations:
        raise DataError("invalid dataset: " + "; ".join(violations))


@dataclass(frozen=True)
class SplitAB:
    """Fitting/validation partition of a training set.

    ``set_a`` is fitted on, ``set_b`` is only ever measured on.
    ``indices_a``/``indices_b`` record which source rows each subset came
    from and must not intersect.
    """

    set_a: Dataset
    set_b: Dataset
    indices_a: np.ndarray
    indices_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self,
            "indices_a",
            _frozen_array(self.indices_a, dtype=np.int64, ndim=1, name="indices_a"),
        )
        object.__setattr__(
            self,
            "indices_b",
            _frozen_array(self.indices_b, dtype=np.int64, ndim=1, name="indices_b"),
        )
        if self.set_a.m != self.set_b.m:
            raise ValueError(
                f"subsets disagree on feature count: {self.set_a.m} vs {self.set_b.m}"
            )
        if self.set_a.n < 1 or self.set_b.n < 1:
            raise ValueError("both subsets need at least one example")
        if len(self.indices_a) != self.set_a.n or len(self.indices_b) != self.set_b.n:
            raise ValueError("source-row index arrays must match subset sizes")
        if np.intersect1d(self.indices_a, self.indices_b).size:
            raise ValueError("fitting and validation subsets share source rows")

    @property
    def n_a(self) -> int:
        return self.set_a.n

    @property
    def n_b(self) -> int:
        return self.set_b.n

    @property
    def m(self) -> int:
        return self.set_a.m


@dataclass(frozen=True)
class PrevNeuron:
    """Wiring source: the output of the neuron at an earlier layer (1-based)."""

    layer: int

    def __post_init__(self):
        if self.layer < 1:
            raise ValueError("referenced layer must be >= 1")


@dataclass(frozen=True)
class Feature:
    """Wiring source: one feature column of the dataset (0-based)."""

    column: int

    def __post_init__(self):
        if self.column < 0:
            raise ValueError("feature column must be >= 0")


InputSource = Union[PrevNeuron, Feature]


@dataclass(frozen=True)
class NeuronSpec:
    """One cascade neuron: layer index, ordered input wiring, weights.

    A neuron at layer ``r`` normally has ``p = r + 1`` inputs wired as
    (output of neuron r-1, ..., output of neuron 1, anchor feature,
    candidate feature), and ``p + 1`` weights with the bias first.  A
    single-input layer-1 neuron is also allowed: it is the fallback shape
    used when growth never improves on the best single feature.
    """

    layer: int
    wiring: tuple[InputSource, ...]
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "wiring", tuple(self.wiring))
        object.__setattr__(
            self, "weights", _frozen_array(self.weights, ndim=1, name="weights")
        )
        if self.layer < 1:
            raise ValueError("layer must be >= 1")
        for src in self.wiring:
            if not isinstance(src, (PrevNeuron, Feature)):
                raise TypeError(f"unknown wiring source {src!r}")
        if len(self.weights) != len(self.wiring) + 1:
            raise ValueError(
                f"{len(self.wiring)} inputs need {len(self.wiring) + 1} weights "
                f"(bias first), got {len(self.weights)}"
            )
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")
        self._check_wiring()

    def _check_wiring(self):
        r, wiring = self.layer, self.wiring
        if r == 1 and len(wiring) == 1:
            if not isinstance(wiring[0], Feature):
                raise ValueError("a single-input neuron must read a feature column")
            return
        if len(wiring) != r + 1:
            raise ValueError(f"layer {r} neuron needs {r + 1} inputs, got {len(wiring)}")
        for offset, src in enumerate(wiring[: r - 1]):
            expected = r - 1 - offset
            if not (isinstance(src, PrevNeuron) and src.layer == expected):
                raise ValueError(
                    f"input {offset} of the layer-{r} neuron must be the output "
                    f"of neuron {expected}"
                )
        tail = wiring[r - 1 :]
        if not all(isinstance(src, Feature) for src in tail):
            raise ValueError("the last two inputs must be feature columns")
        if tail[0].column == tail[1].column:
            raise ValueError("the two feature inputs must use distinct columns")

    @property
    def p(self) -> int:
        """Number of inputs (the bias is not counted)."""
        return len(self.wiring)

    def feature_columns(self) -> tuple[int, ...]:
        """Feature columns this neuron reads, in wiring order."""
        return tuple(src.column for src in self.wiring if isinstance(src, Feature))


@dataclass(frozen=True)
class FeatureStats:
    """Per-feature location and scale captured on the training data.

    ``std`` keeps the raw sample standard deviation; a zero entry marks a
    constant column, which :meth:`transform` maps to 0 instead of dividing.
    """

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", _frozen_array(self.mean, ndim=1, name="mean"))
        object.__setattr__(self, "std", _frozen_array(self.std, ndim=1, name="std"))
        if self.mean.shape != self.std.shape:
            raise ValueError("mean and std must have the same length")
        if not (np.all(np.isfinite(self.mean)) and np.all(np.isfinite(self.std))):
            raise ValueError("statistics must be finite")
        if np.any(self.std < 0):
            raise ValueError("standard deviations must be >= 0")

    @property
    def m(self) -> int:
        return len(self.mean)

    @property
    def constant_columns(self) -> tuple[int, ...]:
        """Columns whose training variance was zero."""
        return tuple(int(j) for j in np.nonzero(self.std == 0.0)[0])

    def transform(self, features) -> np.ndarray:
        """Center and scale a row vector or matrix; constant columns map to 0."""
        X = np.asarray(features, dtype=float)
        if X.shape[-1] != self.m:
            raise DataError(
                f"feature count mismatch: statistics cover {self.m} columns, "
                f"data has {X.shape[-1]}"
            )
        out = np.zeros_like(X)
        scaled = self.std > 0.0
        out[..., scaled] = (X[..., scaled] - self.mean[scaled]) / self.std[scaled]
        return out


@dataclass(frozen=True)
class CascadeModel:
    """An accepted cascade: neurons in layer order plus the evidence trail.

    ``criterion_history`` starts with the best single-feature criterion and
    gains one entry per accepted neuron; it must decrease strictly, which
    is exactly the acceptance rule, so any constructible model is sound.
    The last neuron is the output neuron.  ``normalization_stats``, when
    present, are applied to raw inputs before evaluation so the model sees
    the same scale it was trained on.
    """

    neurons: tuple[NeuronSpec, ...]
    anchor_feature: int
    criterion_history: tuple[float, ...]
    normalization_stats: FeatureStats | None = None
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        neurons = tuple(sorted(self.neurons, key=lambda nr: nr.layer))
        object.__setattr__(self, "neurons", neurons)
        history = tuple(float(c) for c in self.criterion_history)
        object.__setattr__(self, "criterion_history", history)
        object.__setattr__(self, "anchor_feature", int(self.anchor_feature))
        if self.feature_names is not None:
            object.__setattr__(
                self, "feature_names", tuple(str(s) for s in self.feature_names)
            )

        if not neurons:
            raise ValueError("a model must contain at least one neuron")
        layers = [nr.layer for nr in neurons]
        if layers != list(range(1, len(neurons) + 1)):
            raise ValueError(f"neuron layers must be exactly 1..{len(neurons)}, got {layers}")
        if self.anchor_feature < 0:
            raise ValueError("anchor feature must be a column index")
        for nr in neurons:
            if nr.feature_columns()[0] != self.anchor_feature:
                raise ValueError(
                    f"layer-{nr.layer} neuron is not wired to anchor feature "
                    f"{self.anchor_feature}"
                )

        degenerate = len(neurons) == 1 and neurons[0].p == 1
        if degenerate:
            if len(history) != 1:
                raise ValueError(
                    "a single-input fallback model records exactly one criterion value"
                )
        elif len(history) != len(neurons) + 1:
            raise ValueError(
                f"criterion history needs {len(neurons) + 1} entries for "
                f"{len(neurons)} neurons, got {len(history)}"
            )
        for c in history:
            if not (math.isfinite(c) and c >= 0.0):
                raise ValueError("criterion values must be finite and >= 0")
        if any(not b < a for a, b in zip(history, history[1:])):
            raise ValueError("criterion history must decrease strictly")

        min_m = max(c for nr in neurons for c in nr.feature_columns()) + 1
        if self.normalization_stats is not None and self.normalization_stats.m < min_m:
            raise ValueError(
                f"normalization covers {self.normalization_stats.m} columns but the "
                f"wiring reads column {min_m - 1}"
            )
        if self.feature_names is not None and len(self.feature_names) < min_m:
            raise ValueError(
                f"{len(self.feature_names)} feature names but the wiring reads "
                f"column {min_m - 1}"
            )
        if (
            self.normalization_stats is not None
            and self.feature_names is not None
            and self.normalization_stats.m != len(self.feature_names)
        ):
            raise ValueError("normalization statistics and feature names disagree on m")

    @property
    def size(self) -> int:
        """Number of neurons."""
        return len(self.neurons)

    @property
    def required_features(self) -> int:
        """How many feature columns an input row must provide.

        Exact when normalization statistics or feature names are attached,
        otherwise the smallest width the wiring can be evaluated on.
        """
        if self.normalization_stats is not None:
            return self.normalization_stats.m
        if self.feature_names is not None:
            return len(self.feature_names)
        return max(c for nr in self.neurons for c in nr.feature_columns()) + 1

    def with_normalization(
        self,
        stats: FeatureStats | None,
        feature_names: tuple[str, ...] | None = None,
    ) -> "CascadeModel":
        """Copy of this model with normalization (and optionally names) attached."""
        return replace(
            self,
            normalization_stats=stats,
            feature_names=self.feature_names if feature_names is None else feature_names,
        )


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for neuron fitting and cascade growth.

    chi: learning rate of the projection update.
    delta: minimal decrement of the validation error; fitting stops as soon
        as one step gains less than this.
    max_fit_steps: hard cap on fitting iterations per neuron.
    max_layers: hard cap on cascade depth.
    seed: master seed; all randomness is derived from it.
    init_sigma: standard deviation of the Gaussian weight initialization.
    classification_threshold: sigmoid output at or above which an example
        is labeled 1.
    advance_on_accept: when True, growth moves on to the next ranked
        feature after an acceptance instead of retrying the same feature
        one layer deeper.
    """

    chi: float = 1.9
    delta: float = 0.0015
    max_fit_steps: int = 100
    max_layers: int = 50
    seed: int = 0
    init_sigma: float = 1.0
    classification_threshold: float = 0.5
    advance_on_accept: bool = False

    def __post_init__(self):
        if not self.chi > 0:
            raise ValueError("chi must be positive")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.max_fit_steps < 1:
            raise ValueError("max_fit_steps must be >= 1")
        if self.max_layers < 1:
            raise ValueError("max_layers must be >= 1")
        if not 0 <= self.seed <= MAX_SEED:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.init_sigma < 0:
            raise ValueError("init_sigma must be >= 0")
        if not 0.0 < self.classification_threshold < 1.0:
            raise ValueError("classification_threshold must be inside (0, 1)")


@dataclass(frozen=True)
class FitnessRecord:
    """Criterion value of the single-input neuron built on one feature.

    An infinite score marks a feature whose fit failed; such features rank
    last.
    """

    feature: int
    score: float

    def __post_init__(self):
        object.__setattr__(self, "feature", int(self.feature))
        object.__setattr__(self, "score", float(self.score))
        if self.feature < 0:
            raise ValueError("feature must be a column index")
        if math.isnan(self.score) or self.score < 0.0:
            raise ValueError("score must be >= 0")
