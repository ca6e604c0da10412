"""Single-neuron weight fitting by iterative residual projection.

A candidate neuron is a sigmoid unit over a fixed input wiring.  Its
weights are updated full-batch on the fitting subset while a validation
error is tracked on the held-out subset; fitting stops as soon as one
iteration improves the validation error by less than ``delta``.  The
final validation error doubles as the neuron's selection criterion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .domain import Dataset, Feature, PrevNeuron, SplitAB, TrainConfig
from .errors import DataError, SingularInputError

__all__ = [
    "SIGMOID_CLAMP",
    "FitResult",
    "sigmoid",
    "neuron_output",
    "design_matrix",
    "error_vector",
    "validation_error",
    "projection_update",
    "init_weights",
    "fit_neuron_from_init",
    "fit_neuron",
]

# Sigmoid outputs are kept this far away from 0 and 1 so that residual
# arithmetic stays finite even for saturated units.
SIGMOID_CLAMP = 1e-12


def sigmoid(x):
    """Logistic function clamped to [SIGMOID_CLAMP, 1 - SIGMOID_CLAMP]."""
    return np.clip(expit(x), SIGMOID_CLAMP, 1.0 - SIGMOID_CLAMP)


def neuron_output(inputs, weights) -> float:
    """Sigmoid unit output for one example.

    ``weights`` has the bias first, so the activation is
    ``weights[0] + inputs @ weights[1:]``.
    """
    u = np.asarray(inputs, dtype=float)
    w = np.asarray(weights, dtype=float)
    if u.ndim != 1 or w.ndim != 1:
        raise DataError("inputs and weights must be vectors")
    if len(w) != len(u) + 1:
        raise DataError(
            f"{len(u)} inputs need {len(u) + 1} weights (bias first), got {len(w)}"
        )
    return float(sigmoid(w[0] + u @ w[1:]))


def _prior_matrix(prior_outputs, n: int) -> np.ndarray:
    if prior_outputs is None or len(prior_outputs) == 0:
        return np.zeros((0, n))
    arr = np.asarray(prior_outputs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != n:
        raise DataError(
            f"prior outputs must be stacked as (layers, {n}), got shape {arr.shape}"
        )
    return arr


def design_matrix(subset: Dataset, wiring, prior_outputs) -> np.ndarray:
    """Stack the wired inputs of one neuron over all examples of a subset.

    Returns a (p + 1, n) matrix whose first row is the constant bias input
    1; the remaining rows follow wiring order.  ``prior_outputs`` holds one
    row per already-built neuron, indexed by layer.
    """
    n = subset.n
    prior = _prior_matrix(prior_outputs, n)
    rows = [np.ones(n)]
    for src in wiring:
        if isinstance(src, PrevNeuron):
            if src.layer > len(prior):
                raise DataError(
                    f"wiring references neuron {src.layer} but only "
                    f"{len(prior)} prior outputs are available"
                )
            rows.append(prior[src.layer - 1])
        elif isinstance(src, Feature):
            if src.column >= subset.m:
                raise DataError(
                    f"wiring references feature column {src.column} but the "
                    f"data has {subset.m} columns"
                )
            rows.append(subset.features[:, src.column])
        else:
            raise DataError(f"unknown wiring source {src!r}")
    return np.vstack(rows)


def error_vector(subset: Dataset, wiring, prior_outputs, weights) -> np.ndarray:
    """Per-example residuals sigmoid(output) - target over a subset."""
    U = design_matrix(subset, wiring, prior_outputs)
    w = np.asarray(weights, dtype=float)
    if len(w) != U.shape[0]:
        raise DataError(
            f"wiring of {U.shape[0] - 1} inputs needs {U.shape[0]} weights, "
            f"got {len(w)}"
        )
    return sigmoid(w @ U) - subset.targets


def validation_error(residuals_b) -> float:
    """Euclidean norm of a residual vector."""
    r = np.asarray(residuals_b, dtype=float)
    if r.ndim != 1 or len(r) == 0:
        raise ValueError("residuals must form a non-empty vector")
    return float(np.linalg.norm(r))


def projection_update(weights, inputs_a, residuals_a, chi: float) -> np.ndarray:
    """One full-batch projection step w - chi * (U eta) / ||U||^2.

    ``inputs_a`` is the (p + 1, n_A) design matrix including the bias row;
    the norm is the Frobenius norm over all of its entries, bias row
    included.
    """
    w = np.asarray(weights, dtype=float)
    U = np.asarray(inputs_a, dtype=float)
    eta = np.asarray(residuals_a, dtype=float)
    if U.ndim != 2:
        raise DataError(f"design matrix must be 2-dimensional, got shape {U.shape}")
    if w.shape != (U.shape[0],) or eta.shape != (U.shape[1],):
        raise DataError(
            f"shape mismatch: weights {w.shape}, design {U.shape}, "
            f"residuals {eta.shape}"
        )
    norm_sq = float(np.sum(U * U))
    if norm_sq == 0.0:
        raise SingularInputError(
            "the design matrix is identically zero; the projection step is undefined"
        )
    return w - (chi / norm_sq) * (U @ eta)


def init_weights(p_plus_bias: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Draw an initial weight vector from a centered Gaussian."""
    if p_plus_bias < 2:
        raise ValueError("a neuron has at least a bias and one input weight")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    return rng.normal(0.0, sigma, p_plus_bias)


@dataclass(frozen=True)
class FitResult:
    """Outcome of fitting one neuron.

    ``eb_trace`` records the validation error at every iterate visited,
    so ``criterion`` is always its last entry and ``steps_taken`` its
    length.  When fitting stops because the validation error went UP,
    ``weights`` are the better previous iterate while ``criterion`` keeps
    the last measured (worse) value; the criterion is what acceptance
    decisions consume, so it must never understate the error.
    """

    weights: np.ndarray
    criterion: float
    steps_taken: int
    eb_trace: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, copy=True)
        trace = np.array(self.eb_trace, dtype=float, copy=True)
        w.flags.writeable = False
        trace.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "eb_trace", trace)
        object.__setattr__(self, "criterion", float(self.criterion))
        object.__setattr__(self, "steps_taken", int(self.steps_taken))
        if w.ndim != 1 or not np.all(np.isfinite(w)):
            raise ValueError("weights must be a finite vector")
        if trace.ndim != 1 or len(trace) != self.steps_taken or self.steps_taken < 1:
            raise ValueError("eb_trace must hold one entry per step taken")
        if not np.all(np.isfinite(trace)) or np.any(trace < 0):
            raise ValueError("validation errors must be finite and >= 0")
        if self.criterion != trace[-1]:
            raise ValueError("criterion must equal the last trace entry")


def fit_neuron_from_init(
    split: SplitAB,
    wiring,
    prior_outputs_a,
    prior_outputs_b,
    init: np.ndarray,
    config: TrainConfig,
) -> FitResult:
    """Fit a neuron starting from the given weight vector.

    Iterates the projection rule on the fitting subset while measuring the
    validation error after every iterate (the initial weights count as
    step 1).  Stops when one step improves the validation error by less
    than ``config.delta``, first checked at step 2, or at
    ``config.max_fit_steps``.
    """
    U_A = design_matrix(split.set_a, wiring, prior_outputs_a)
    U_B = design_matrix(split.set_b, wiring, prior_outputs_b)
    y_a = split.set_a.targets
    y_b = split.set_b.targets
    w_cur = np.asarray(init, dtype=float)
    if w_cur.shape != (U_A.shape[0],):
        raise DataError(
            f"wiring of {U_A.shape[0] - 1} inputs needs {U_A.shape[0]} initial "
            f"weights, got {w_cur.shape}"
        )
    w_prev = w_cur
    prev_eb = np.inf
    trace: list[float] = []
    for k in range(1, config.max_fit_steps + 1):
        eb = validation_error(sigmoid(w_cur @ U_B) - y_b)
        trace.append(eb)
        if k >= 2 and prev_eb - eb < config.delta:
            final = w_prev if eb > prev_eb else w_cur
            return FitResult(final, eb, k, np.asarray(trace))
        if k < config.max_fit_steps:
            residuals_a = sigmoid(w_cur @ U_A) - y_a
            w_prev, prev_eb = w_cur, eb
            w_cur = projection_update(w_cur, U_A, residuals_a, config.chi)
    return FitResult(w_cur, trace[-1], len(trace), np.asarray(trace))


def fit_neuron(
    split: SplitAB,
    wiring,
    prior_outputs_a,
    prior_outputs_b,
    config: TrainConfig,
    rng: np.random.Generator,
) -> FitResult:
    """Fit a neuron from a fresh Gaussian initialization drawn from rng."""
    init = init_weights(len(tuple(wiring)) + 1, config.init_sigma, rng)
    return fit_neuron_from_init(
        split, wiring, prior_outputs_a, prior_outputs_b, init, config
    )
