"""Cascade growth by validated acceptance, plus the restart harness.

Growth ranks all single-feature neurons on the validation criterion,
anchors the cascade on the best one, then repeatedly fits a candidate
neuron wired to all earlier outputs, the anchor, and the next ranked
feature.  A candidate joins the cascade only if it strictly lowers the
criterion; otherwise the ranked list advances.  The restart harness
repeats growth from many random initializations and keeps the model with
the lowest training error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cascade import error_rate, used_features
from .data_io import split_odd_even
from .domain import (
    CascadeModel,
    Dataset,
    Feature,
    FitnessRecord,
    NeuronSpec,
    PrevNeuron,
    SplitAB,
    TrainConfig,
)
from .errors import DataError, EcnnError
from .fitting import (
    FitResult,
    design_matrix,
    fit_neuron,
    fit_neuron_from_init,
    init_weights,
    sigmoid,
)

__all__ = [
    "STOP_FEATURES_EXHAUSTED",
    "STOP_MAX_LAYERS",
    "AcceptedRecord",
    "RejectedRecord",
    "EvolveTrace",
    "RunSummary",
    "rank_features",
    "build_candidate",
    "evolve",
    "anchor_model",
    "child_seed",
    "rng_for_run",
    "select_best",
    "multi_run",
]

STOP_FEATURES_EXHAUSTED = "feature-list-exhausted"
STOP_MAX_LAYERS = "max-layers-reached"


@dataclass(frozen=True)
class AcceptedRecord:
    """One accepted growth step: the neuron's layer, its candidate feature,
    and the criterion value that beat the previous best."""

    layer: int
    feature: int
    criterion: float

    def __post_init__(self):
        if self.layer < 1:
            raise ValueError("layer must be >= 1")
        if self.feature < 0:
            raise ValueError("feature must be a column index")
        if not (math.isfinite(self.criterion) and self.criterion >= 0):
            raise ValueError("criterion must be finite and >= 0")


@dataclass(frozen=True)
class RejectedRecord:
    """One rejected candidate: the ranked-list position it was drawn from,
    its feature, the criterion it scored, and the best criterion it had to
    beat (which it did not)."""

    position: int
    feature: int
    criterion: float
    best_before: float

    def __post_init__(self):
        if self.position < 1:
            raise ValueError("position is 1-based")
        if self.feature < 0:
            raise ValueError("feature must be a column index")
        if not (math.isfinite(self.criterion) and self.criterion >= 0):
            raise ValueError("criterion must be finite and >= 0")
        if not math.isfinite(self.best_before):
            raise ValueError("best_before must be finite")
        if self.criterion < self.best_before:
            raise ValueError("a rejected candidate cannot beat the best criterion")


@dataclass(frozen=True)
class EvolveTrace:
    """Full evidence trail of one growth run."""

    ranked_features: tuple[FitnessRecord, ...]
    accepted: tuple[AcceptedRecord, ...]
    rejected: tuple[RejectedRecord, ...]
    stop_reason: str
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "ranked_features", tuple(self.ranked_features))
        object.__setattr__(self, "accepted", tuple(self.accepted))
        object.__setattr__(self, "rejected", tuple(self.rejected))
        if not self.ranked_features:
            raise ValueError("a trace requires at least one ranked feature")
        if self.stop_reason not in (STOP_FEATURES_EXHAUSTED, STOP_MAX_LAYERS):
            raise ValueError(f"unknown stop reason {self.stop_reason!r}")
        layers = [rec.layer for rec in self.accepted]
        if layers != list(range(1, len(layers) + 1)):
            raise ValueError("accepted layers must be exactly 1..R in order")
        chain = [rec.criterion for rec in self.accepted]
        if math.isfinite(self.ranked_features[0].score):
            chain = [self.ranked_features[0].score] + chain
        if any(not b < a for a, b in zip(chain, chain[1:])):
            raise ValueError("accepted criteria must decrease strictly")
        positions = [rec.position for rec in self.rejected]
        if any(b < a for a, b in zip(positions, positions[1:])):
            raise ValueError("rejected positions must be non-decreasing")
        if self.degenerate and self.accepted:
            raise ValueError("a degenerate run accepts no candidates")


@dataclass(frozen=True)
class RunSummary:
    """One restart's outcome.  ``seed`` alone reproduces the run's random
    stream.  A run that raised records the message in ``error`` and is
    excluded from best-model selection."""

    run_index: int
    seed: int
    model_size: int
    train_error_pct: float
    test_error_pct: float
    selected_features: tuple[int, ...]
    error: str | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "selected_features", tuple(int(f) for f in self.selected_features)
        )
        if self.run_index < 0:
            raise ValueError("run_index must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")
        if self.error is None:
            if self.model_size < 1:
                raise ValueError("a run that produced a model has at least one neuron")
            if not 0.0 <= self.train_error_pct <= 100.0:
                raise ValueError("train error is a percentage")
            if not (
                math.isnan(self.test_error_pct) or 0.0 <= self.test_error_pct <= 100.0
            ):
                raise ValueError("test error is a percentage or NaN when unmeasured")
        elif self.model_size != 0:
            raise ValueError("a failed run has no model")


def _ranking_fits(
    split: SplitAB, init: np.ndarray, config: TrainConfig
) -> list[FitResult | None]:
    """Fit one single-input neuron per feature, all from the same init.

    Sharing the init makes scores directly comparable: byte-identical
    feature columns get exactly equal criteria.  A failed fit yields None.
    """
    fits: list[FitResult | None] = []
    for column in range(split.m):
        try:
            fits.append(
                fit_neuron_from_init(
                    split, (Feature(column),), None, None, init, config
                )
            )
        except EcnnError:
            fits.append(None)
    return fits


def _sorted_records(fits: list[FitResult | None]) -> tuple[FitnessRecord, ...]:
    records = [
        FitnessRecord(column, math.inf if fit is None else fit.criterion)
        for column, fit in enumerate(fits)
    ]
    return tuple(sorted(records, key=lambda rec: (rec.score, rec.feature)))


def rank_features(
    split: SplitAB, config: TrainConfig, rng: np.random.Generator
) -> tuple[FitnessRecord, ...]:
    """Score every feature by its single-input neuron's criterion, ascending.

    Ties break toward the lower column index.  A feature whose fit fails
    ranks last with an infinite score.  The head of the list is the anchor
    and its score is the starting criterion of growth.
    """
    init = init_weights(2, config.init_sigma, rng)
    return _sorted_records(_ranking_fits(split, init, config))


def build_candidate(
    r: int, anchor: int, candidate_feature: int, prior_layer_count: int
) -> tuple:
    """Wiring of the layer-r candidate: every earlier neuron's output from
    newest to oldest, then the anchor feature, then the candidate feature."""
    if r < 1:
        raise ValueError("layer index must be >= 1")
    if prior_layer_count != r - 1:
        raise ValueError(
            f"a layer-{r} candidate needs {r - 1} prior layers, "
            f"got {prior_layer_count}"
        )
    if anchor == candidate_feature:
        raise ValueError(
            f"candidate feature must differ from the anchor (both are {anchor})"
        )
    previous = tuple(PrevNeuron(layer) for layer in range(r - 1, 0, -1))
    return previous + (Feature(anchor), Feature(candidate_feature))


def _degenerate_model(
    split: SplitAB, anchor: int, anchor_fit: FitResult
) -> CascadeModel:
    neuron = NeuronSpec(layer=1, wiring=(Feature(anchor),), weights=anchor_fit.weights)
    return CascadeModel(
        neurons=(neuron,),
        anchor_feature=anchor,
        criterion_history=(anchor_fit.criterion,),
        feature_names=split.set_a.feature_names,
    )


def evolve(
    split: SplitAB, config: TrainConfig, rng: np.random.Generator
) -> tuple[CascadeModel, EvolveTrace]:
    """Grow one cascade on a fitting/validation split.

    Ranks features, anchors on the best one, then walks the ranked list
    from position 2: each candidate neuron is fitted and joins the cascade
    only if its criterion strictly beats the current best.  A rejection
    advances to the next ranked feature; an acceptance retries the same
    feature one layer deeper unless ``config.advance_on_accept`` is set.
    Growth stops when the ranked list is exhausted or the cascade reaches
    ``config.max_layers``.  If nothing is ever accepted, the result is the
    anchor's single-input neuron alone, flagged degenerate in the trace.
    """
    init = init_weights(2, config.init_sigma, rng)
    fits = _ranking_fits(split, init, config)
    ranked = _sorted_records(fits)
    anchor = ranked[0].feature
    anchor_fit = fits[anchor]
    if anchor_fit is None:
        raise EcnnError("every single-feature fit failed; nothing to grow from")

    neurons: list[NeuronSpec] = []
    prior_a: list[np.ndarray] = []
    prior_b: list[np.ndarray] = []
    history = [anchor_fit.criterion]
    accepted: list[AcceptedRecord] = []
    rejected: list[RejectedRecord] = []
    h = 2
    while True:
        if len(neurons) >= config.max_layers:
            stop_reason = STOP_MAX_LAYERS
            break
        if h > split.m:
            stop_reason = STOP_FEATURES_EXHAUSTED
            break
        candidate = ranked[h - 1].feature
        r = len(neurons) + 1
        wiring = build_candidate(r, anchor, candidate, len(neurons))
        fit = fit_neuron(split, wiring, prior_a, prior_b, config, rng)
        if fit.criterion < history[-1]:
            neuron = NeuronSpec(layer=r, wiring=wiring, weights=fit.weights)
            neurons.append(neuron)
            prior_a.append(
                sigmoid(fit.weights @ design_matrix(split.set_a, wiring, prior_a))
            )
            prior_b.append(
                sigmoid(fit.weights @ design_matrix(split.set_b, wiring, prior_b))
            )
            history.append(fit.criterion)
            accepted.append(AcceptedRecord(r, candidate, fit.criterion))
            if config.advance_on_accept:
                h += 1
        else:
            rejected.append(
                RejectedRecord(h, candidate, fit.criterion, best_before=history[-1])
            )
            h += 1

    if neurons:
        model = CascadeModel(
            neurons=tuple(neurons),
            anchor_feature=anchor,
            criterion_history=tuple(history),
            feature_names=split.set_a.feature_names,
        )
        degenerate = False
    else:
        model = _degenerate_model(split, anchor, anchor_fit)
        degenerate = True
    trace = EvolveTrace(
        ranked_features=ranked,
        accepted=tuple(accepted),
        rejected=tuple(rejected),
        stop_reason=stop_reason,
        degenerate=degenerate,
    )
    return model, trace


def anchor_model(
    split: SplitAB, config: TrainConfig, rng: np.random.Generator
) -> CascadeModel:
    """The best single-feature classifier alone, exactly as growth would
    rank it.

    Consumes the random stream the same way :func:`evolve` does, so with a
    fresh generator from the same seed it reproduces the anchor neuron of
    that run; this is the baseline a grown cascade has to beat.
    """
    init = init_weights(2, config.init_sigma, rng)
    fits = _ranking_fits(split, init, config)
    ranked = _sorted_records(fits)
    anchor_fit = fits[ranked[0].feature]
    if anchor_fit is None:
        raise EcnnError("every single-feature fit failed; nothing to grow from")
    return _degenerate_model(split, ranked[0].feature, anchor_fit)


def child_seed(master_seed: int, run_index: int) -> int:
    """Derive the 64-bit seed of one restart from the master seed."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(0, int(run_index)))
    return int(seq.generate_state(1, np.uint64)[0])


def rng_for_run(master_seed: int, run_index: int) -> np.random.Generator:
    """Fresh generator for one restart, reproducible from the master seed."""
    return np.random.default_rng(child_seed(master_seed, run_index))


def select_best(summaries: list[RunSummary]) -> RunSummary:
    """The restart protocol's winner: minimal training error, ties broken
    by smaller model, then by lower run index.  Failed runs are skipped."""
    completed = [s for s in summaries if s.error is None]
    if not completed:
        raise EcnnError("every run failed; no model to select")
    return min(
        completed, key=lambda s: (s.train_error_pct, s.model_size, s.run_index)
    )


def multi_run(
    train: Dataset,
    test: Dataset | None,
    config: TrainConfig,
    runs: int,
) -> tuple[CascadeModel, list[RunSummary]]:
    """Grow ``runs`` cascades from different initializations, keep the best.

    All runs share the same odd/even fitting/validation split of ``train``;
    only the weight-initialization stream differs, seeded per run from
    ``config.seed``.  Train and test data are used exactly as given, so
    normalize beforehand if normalization is wanted.  Returns the model
    with minimal training error (ties: smaller model, then lower run
    index) plus one summary per run in run order.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if test is not None and test.m != train.m:
        raise DataError(
            f"train and test disagree on feature count: {train.m} vs {test.m}"
        )
    split = split_odd_even(train)
    summaries: list[RunSummary] = []
    models: dict[int, CascadeModel] = {}
    for run_index in range(runs):
        seed = child_seed(config.seed, run_index)
        rng = np.random.default_rng(seed)
        try:
            model, _ = evolve(split, config, rng)
            threshold = config.classification_threshold
            train_err = error_rate(model, train, threshold)
            test_err = (
                error_rate(model, test, threshold) if test is not None else math.nan
            )
            summaries.append(
                RunSummary(
                    run_index=run_index,
                    seed=seed,
                    model_size=model.size,
                    train_error_pct=train_err,
                    test_error_pct=test_err,
                    selected_features=used_features(model),
                )
            )
            models[run_index] = model
        except EcnnError as exc:
            summaries.append(
                RunSummary(
                    run_index=run_index,
                    seed=seed,
                    model_size=0,
                    train_error_pct=math.nan,
                    test_error_pct=math.nan,
                    selected_features=(),
                    error=str(exc),
                )
            )
    best = select_best(summaries)
    return models[best.run_index], summaries
