"""Aligned observation/model data and the first-order skill metrics.

A model's score is its time-averaged squared departure from the
observations, and the correspondence between two models is the matching
time-averaged product of their residuals.  Everything downstream reduces
to dot products of residual vectors, so this module keeps residuals as
plain float64 arrays and exposes pure functions over them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, EnsdiagError, PerfectModelError, ValidationError

__all__ = [
    "WEIGHT_SUM_TOL",
    "COSINE_OVERSHOOT_TOL",
    "SCORE_AGREEMENT_RTOL",
    "ObservationSeries",
    "ModelEnsemble",
    "ResidualSet",
    "WeightVector",
    "CorrespondenceMatrix",
    "residuals",
    "model_score",
    "model_scores",
    "correspondence_matrix",
    "cosine_matrix",
    "average_residual",
    "ensemble_score",
]

#: Absolute tolerance on the weight-sum-to-one invariant.
WEIGHT_SUM_TOL = 1e-12

#: Rounding may push cosines past [-1, 1] by at most this much; values
#: inside the overshoot band are clamped, anything worse is a bug.
COSINE_OVERSHOOT_TOL = 1e-12

#: Required relative agreement between the direct and the expanded
#: formulation of the ensemble score.
SCORE_AGREEMENT_RTOL = 1e-10


def _require_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} must be finite")


def _frozen_float_array(values, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    _require_finite(arr, what)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ObservationSeries:
    """Observed values on a contiguous run of integer time steps."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times)
        if times.ndim != 1 or times.size == 0:
            raise ValidationError("times must be a non-empty 1-d sequence")
        if np.issubdtype(times.dtype, np.floating):
            if not np.all(np.isfinite(times)) or not np.all(times == np.trunc(times)):
                raise ValidationError("times must be integers")
            times = times.astype(np.int64)
        elif np.issubdtype(times.dtype, np.integer):
            times = times.astype(np.int64)
        else:
            raise ValidationError("times must be integers")
        if times.size > 1 and not np.all(np.diff(times) == 1):
            raise ValidationError("times must be consecutive increasing integers")
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.shape != times.shape:
            raise ValidationError("times and values must have the same length")
        _require_finite(values, "observed values")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def n_points(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True, eq=False)
class ModelEnsemble:
    """Named model output series, all on one shared time grid.

    Duplicate output series under distinct names are allowed; duplicate
    names are not.
    """

    model_names: tuple[str, ...]
    outputs: np.ndarray

    def __post_init__(self) -> None:
        names = tuple(str(n) for n in self.model_names)
        if not names:
            raise ValidationError("at least one model is required")
        if len(set(names)) != len(names):
            raise ValidationError("model names must be distinct")
        try:
            outputs = np.array(self.outputs, dtype=np.float64, copy=True)
        except ValueError as exc:
            raise ValidationError(
                "model output series must all have the same length"
            ) from exc
        if outputs.ndim != 2:
            raise ValidationError(
                "outputs must have shape (n_models, n_points)"
            )
        if outputs.shape[0] != len(names):
            raise ValidationError("one output series is required per model name")
        if outputs.shape[1] == 0:
            raise ValidationError("model output series must be non-empty")
        _require_finite(outputs, "model outputs")
        outputs.setflags(write=False)
        object.__setattr__(self, "model_names", names)
        object.__setattr__(self, "outputs", outputs)

    @property
    def n_models(self) -> int:
        return int(self.outputs.shape[0])

    @property
    def n_points(self) -> int:
        return int(self.outputs.shape[1])


@dataclass(frozen=True, eq=False)
class ResidualSet:
    """Model-minus-observation vectors plus the normalization divisor.

    ``n_points`` is the number of aligned time points and is the divisor
    used by every score in this package.
    """

    residuals: np.ndarray
    n_points: int

    def __post_init__(self) -> None:
        arr = np.array(self.residuals, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValidationError("residuals must have shape (n_models, n_points)")
        _require_finite(arr, "residuals")
        n = int(self.n_points)
        if n != arr.shape[1]:
            raise ValidationError(
                f"n_points ({n}) must equal the residual length ({arr.shape[1]})"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "residuals", arr)
        object.__setattr__(self, "n_points", n)

    @property
    def n_models(self) -> int:
        return int(self.residuals.shape[0])


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Nonnegative weights summing to one."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_float_array(self.weights, "weights")
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("weights must be a non-empty 1-d sequence")
        if np.any(arr < 0.0):
            raise ValidationError("weights must be nonnegative")
        total = float(arr.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(
                f"weights must sum to 1 within {WEIGHT_SUM_TOL}; got {total!r}"
            )
        object.__setattr__(self, "weights", arr)

    @property
    def n_models(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True, eq=False)
class CorrespondenceMatrix:
    """Symmetric positive-semidefinite matrix of time-averaged residual products.

    The diagonal carries the per-model scores.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_float_array(self.entries, "correspondence entries")
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValidationError("correspondence entries must form a square matrix")
        if not np.array_equal(arr, arr.T):
            raise ValidationError("correspondence matrix must be symmetric")
        scale = max(1.0, float(np.abs(arr).max()))
        if float(np.linalg.eigvalsh(arr).min()) < -1e-10 * scale:
            raise ValidationError("correspondence matrix must be positive semidefinite")
        object.__setattr__(self, "entries", arr)

    @property
    def n_models(self) -> int:
        return int(self.entries.shape[0])


def residuals(ensemble: ModelEnsemble, obs: ObservationSeries) -> ResidualSet:
    """Subtract the observations from every model series.

    Raises AlignmentError when the ensemble and the observations do not
    have the same number of points.
    """
    if ensemble.n_points != obs.n_points:
        raise AlignmentError(
            f"ensemble has {ensemble.n_points} points but observations have "
            f"{obs.n_points}"
        )
    return ResidualSet(ensemble.outputs - obs.values, obs.n_points)


def model_score(z, n_points: int) -> float:
    """Mean-squared departure of one residual vector: ``||z||^2 / n_points``."""
    arr = np.asarray(z, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("residual vector must be non-empty and 1-d")
    _require_finite(arr, "residual vector")
    n = int(n_points)
    if n < 1 or n != arr.size:
        raise ValidationError(
            f"n_points ({n_points}) must equal the residual length ({arr.size})"
        )
    return float(arr @ arr) / n


def model_scores(rs: ResidualSet) -> np.ndarray:
    """Per-model scores for a whole residual set, as a 1-d array."""
    z = rs.residuals
    return np.einsum("mt,mt->m", z, z) / rs.n_points


def _correspondence_entries(rs: ResidualSet) -> np.ndarray:
    """Raw symmetric correspondence array, without the type-level checks."""
    z = rs.residuals
    raw = (z @ z.T) / rs.n_points
    entries = 0.5 * (raw + raw.T)
    diag = entries.diagonal()
    scores = model_scores(rs)
    if not np.allclose(diag, scores, rtol=1e-12, atol=0.0):
        raise EnsdiagError(
            "internal inconsistency: correspondence diagonal departs from "
            "the per-model scores"
        )
    return entries


def correspondence_matrix(rs: ResidualSet) -> CorrespondenceMatrix:
    """Mutual-agreement matrix: entry (m, m') is the time-averaged product
    of the two residual vectors; the diagonal equals the per-model scores."""
    return CorrespondenceMatrix(_correspondence_entries(rs))


def cosine_matrix(rs: ResidualSet) -> np.ndarray:
    """Pairwise cosines of the residual vectors.

    The diagonal is exactly 1 and off-diagonal entries are clamped into
    [-1, 1].  Raises PerfectModelError when any member has zero residual,
    since its direction is undefined.
    """
    entries = _correspondence_entries(rs)
    diag = entries.diagonal()
    zero = np.flatnonzero(diag == 0.0)
    if zero.size:
        raise PerfectModelError(zero)
    norms = np.sqrt(diag)
    cosines = entries / np.outer(norms, norms)
    overshoot = float(np.abs(cosines).max()) - 1.0
    if overshoot > COSINE_OVERSHOOT_TOL:
        raise EnsdiagError(
            f"internal inconsistency: cosine overshoot {overshoot:.3e} exceeds "
            f"the rounding allowance {COSINE_OVERSHOOT_TOL}"
        )
    cosines = np.clip(cosines, -1.0, 1.0)
    np.fill_diagonal(cosines, 1.0)
    return cosines


def _check_weight_length(rs: ResidualSet, w: WeightVector) -> np.ndarray:
    if w.n_models != rs.n_models:
        raise ValidationError(
            f"weight vector has {w.n_models} entries but the ensemble has "
            f"{rs.n_models} models"
        )
    return w.weights


def average_residual(rs: ResidualSet, w: WeightVector) -> np.ndarray:
    """Residual of the weighted-average model.

    Because the weights sum to one, averaging the residuals equals
    averaging the model outputs and then subtracting the observations.
    """
    weights = _check_weight_length(rs, w)
    return weights @ rs.residuals


def ensemble_score(rs: ResidualSet, w: WeightVector) -> float:
    """Score of the weighted-average model.

    Computed directly from the averaged residual, and cross-checked
    against the quadratic expansion in per-model scores and pairwise
    correspondences.  The two must agree to SCORE_AGREEMENT_RTOL
    (relative to the size of the expansion's terms, so that exact
    cancellations near zero do not trip the check); the direct value is
    returned.
    """
    weights = _check_weight_length(rs, w)
    zbar = weights @ rs.residuals
    direct = float(zbar @ zbar) / rs.n_points

    entries = _correspondence_entries(rs)
    scores = entries.diagonal().copy()
    off = entries.copy()
    np.fill_diagonal(off, 0.0)
    diag_term = float((weights * weights) @ scores)
    cross_term = float(weights @ off @ weights)
    expansion = diag_term + cross_term

    scale = diag_term + float(weights @ np.abs(off) @ weights)
    bound = SCORE_AGREEMENT_RTOL * max(abs(direct), abs(expansion), scale)
    if abs(direct - expansion) > bound:
        raise EnsdiagError(
            "internal inconsistency: direct ensemble score "
            f"{direct!r} and its expansion {expansion!r} disagree"
        )
    return direct
