"""Longitudinal compositional data: smoothing, normalisation and the square-root map.

Compositions (nonnegative vectors summing to one) are mapped to the
nonnegative orthant of the unit sphere by taking componentwise square roots.
Zeros need no special treatment.
"""

from dataclasses import dataclass

import numpy as np

from rfpca.data import TrajectorySample
from rfpca.errors import EmptyKernelWindow, NegativeCoordinate, ValidationError, ZeroRowSum

ORTHANT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class CountPanel:
    subject_id: str
    times: np.ndarray  # (m,)
    counts: np.ndarray  # (m, J)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        if counts.ndim != 2 or counts.shape[0] != times.size:
            raise ValidationError(f"subject {self.subject_id}: counts shape {counts.shape} vs {times.size} times")
        if np.any(counts < 0):
            raise ValidationError(f"subject {self.subject_id}: negative counts")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "counts", counts)


@dataclass(frozen=True, eq=False)
class CompositionCurve:
    subject_id: str
    times: np.ndarray
    proportions: np.ndarray  # (m, J), rows on the simplex


def epanechnikov(u):
    u = np.asarray(u, dtype=float)
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


def smooth_counts(panel, bandwidth, eval_grid):
    """Nadaraya-Watson smoothing of every count column with an Epanechnikov kernel."""
    if not bandwidth > 0:
        raise ValidationError(f"bandwidth must be positive, got {bandwidth}")
    eval_grid = np.atleast_1d(np.asarray(eval_grid, dtype=float))
    weights = epanechnikov((eval_grid[:, None] - panel.times[None, :]) / bandwidth)
    total = weights.sum(axis=1)
    if np.any(total <= 0.0):
        t = eval_grid[np.argmax(total <= 0.0)]
        raise EmptyKernelWindow(f"subject {panel.subject_id}: no observation within {bandwidth} of t={t}")
    smoothed = weights @ panel.counts / total[:, None]
    return CountPanel(panel.subject_id, eval_grid, np.maximum(smoothed, 0.0))


def to_proportions(panel):
    sums = panel.counts.sum(axis=1, keepdims=True)
    if np.any(sums <= 0):
        raise ZeroRowSum(f"subject {panel.subject_id}: a time point has zero total count")
    props = panel.counts / sums
    props = props / props.sum(axis=1, keepdims=True)
    return CompositionCurve(panel.subject_id, panel.times.copy(), props)


def _unit_interval(times):
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise ValidationError("need at least two time points")
    return (times - times[0]) / (times[-1] - times[0])


def sqrt_embed(comp):
    """Componentwise square root; times are rescaled linearly onto [0, 1]."""
    props = np.asarray(comp.proportions, dtype=float)
    if np.any(props < 0) or np.max(np.abs(props.sum(axis=1) - 1.0)) > 1e-12:
        raise ValidationError(f"subject {comp.subject_id}: rows are not compositions")
    points = np.sqrt(props)
    points = points / np.linalg.norm(points, axis=1, keepdims=True)
    return TrajectorySample(comp.subject_id, _unit_interval(comp.times), points)


def orthant_violations(points):
    """Boolean flag per point: some coordinate is below -ORTHANT_TOL."""
    return np.any(np.asarray(points) < -ORTHANT_TOL, axis=-1)


def sphere_to_composition(sample, times=None, allow_outside=False):
    """Square coordinates back to proportions.

    Coordinates in [-ORTHANT_TOL, 0) are clamped to zero and the row
    renormalised. Points further outside the orthant raise NegativeCoordinate
    unless ``allow_outside`` is set, in which case they are squared as is and
    should be reported through :func:`orthant_violations`.
    """
    points = np.asarray(sample.points, dtype=float)
    outside = orthant_violations(points)
    if np.any(outside) and not allow_outside:
        j = int(np.argmax(outside))
        raise NegativeCoordinate(
            f"subject {sample.subject_id}: point {j} has coordinate {points[j].min():.3g} outside the orthant"
        )
    clean = np.where(outside[:, None], points, np.maximum(points, 0.0))
    props = clean**2
    props = props / props.sum(axis=1, keepdims=True)
    times = sample.grid if times is None else np.asarray(times, dtype=float)
    return CompositionCurve(sample.subject_id, times, props)


def counts_to_sphere(panel, bandwidth, eval_grid):
    """Smooth, normalise and embed one subject's counts."""
    return sqrt_embed(to_proportions(smooth_counts(panel, bandwidth, eval_grid)))
