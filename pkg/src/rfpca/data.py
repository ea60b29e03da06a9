"""Containers for trajectories observed on a shared uniform time grid."""

from dataclasses import dataclass

import numpy as np

from rfpca.errors import GridMismatch, ValidationError

GRID_TOL = 1e-9


def uniform_grid(m):
    """The grid t_j = (j-1)/(m-1), j = 1..m."""
    if m < 2:
        raise ValidationError(f"grid needs at least 2 points, got {m}")
    return np.linspace(0.0, 1.0, m)


def check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValidationError("grid needs at least 2 time points")
    steps = np.diff(grid)
    if np.any(steps <= 0):
        raise ValidationError("grid must be strictly increasing")
    if np.max(np.abs(steps - steps.mean())) > GRID_TOL:
        raise ValidationError("grid must be uniformly spaced")
    if grid[0] < -GRID_TOL or grid[-1] > 1.0 + GRID_TOL:
        raise ValidationError("grid must lie in [0, 1]")
    return grid


@dataclass(frozen=True, eq=False)
class TrajectorySample:
    """One subject's curve: ``points[j]`` is the manifold point at ``grid[j]``."""

    subject_id: str
    grid: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        grid = check_grid(self.grid)
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or points.shape[0] != grid.size:
            raise ValidationError(
                f"subject {self.subject_id}: {points.shape[0] if points.ndim else 0} points "
                f"for {grid.size} grid times"
            )
        object.__setattr__(self, "subject_id", str(self.subject_id))
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "points", points)


@dataclass(frozen=True, eq=False)
class TangentProcess:
    """Log-mapped curve; ``vectors[j]`` is tangent at the mean curve's j-th point."""

    subject_id: str
    grid: np.ndarray
    vectors: np.ndarray


def stack_samples(samples):
    """Return ``(grid, curves, ids)`` with curves of shape (n, m, ambient_dim).

    Raises GridMismatch when the samples do not share one grid.
    """
    samples = list(samples)
    if not samples:
        raise ValidationError("no samples given")
    grid = samples[0].grid
    for s in samples[1:]:
        if s.grid.shape != grid.shape or np.max(np.abs(s.grid - grid)) > GRID_TOL:
            raise GridMismatch(
                f"subject {s.subject_id} has grid {s.grid.tolist()} but subject "
                f"{samples[0].subject_id} has grid {grid.tolist()}"
            )
    dims = {s.points.shape[1] for s in samples}
    if len(dims) != 1:
        raise ValidationError(f"samples have differing ambient dimensions {sorted(dims)}")
    curves = np.stack([s.points for s in samples])
    return grid, curves, [s.subject_id for s in samples]


def samples_from_array(curves, grid=None, ids=None):
    curves = np.asarray(curves, dtype=float)
    n, m = curves.shape[:2]
    grid = uniform_grid(m) if grid is None else grid
    ids = [str(i) for i in range(n)] if ids is None else ids
    return [TrajectorySample(ids[i], grid, curves[i]) for i in range(n)]
