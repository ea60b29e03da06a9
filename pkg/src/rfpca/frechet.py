"""Intrinsic Fréchet means of manifold-valued samples."""

from dataclasses import dataclass

import numpy as np

from rfpca import manifold as mf
from rfpca.data import stack_samples
from rfpca.errors import LogUndefined, NoConvergence, ValidationError


@dataclass(frozen=True)
class FrechetConfig:
    max_iterations: int = 200
    gradient_tolerance: float = 1e-10
    step_size: float = 1.0

    def __post_init__(self):
        if self.max_iterations <= 0 or self.gradient_tolerance <= 0 or self.step_size <= 0:
            raise ValidationError(f"FrechetConfig fields must be strictly positive: {self}")


def _initial_point(spec, points):
    try:
        return mf.project_to_manifold(spec, points.mean(axis=0))
    except ValidationError:
        return points[0].copy()


def frechet_mean_point(spec, points, config=FrechetConfig(), init=None):
    """Minimise the mean squared geodesic distance to ``points``.

    Fixed-point iteration ``p <- exp_p(step * mean_i log_p(x_i))`` until the
    Riemannian gradient norm drops below ``config.gradient_tolerance``. Starts
    from ``init`` or, by default, from the projected Euclidean average.
    """
    points = mf._coords(spec, np.atleast_2d(points), "points")
    if points.shape[0] == 0:
        raise ValidationError("need at least one point")
    p = _initial_point(spec, points) if init is None else mf._coords(spec, init, "init").copy()

    grad_norm = np.inf
    for _ in range(config.max_iterations + 1):
        grad = mf._log(spec, p[None, :], points).mean(axis=0)
        if spec.is_sphere:
            # the mean of tangent vectors is tangent; remove rounding drift
            grad = grad - (grad @ p) * p
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= config.gradient_tolerance:
            return p
        p = mf._exp(spec, p, config.step_size * grad)
    raise NoConvergence(
        f"Fréchet mean did not converge in {config.max_iterations} iterations "
        f"(gradient norm {grad_norm:.3g})",
        gradient_norm=grad_norm,
    )


def frechet_objective(spec, p, points):
    """Mean squared geodesic distance from ``p`` to ``points``."""
    return float(np.mean(mf._distance(spec, np.asarray(p)[None, :], np.asarray(points)) ** 2))


def frechet_mean_curve(spec, curves, config=FrechetConfig(), warm_start=True):
    """Pointwise Fréchet mean of curves on a shared grid.

    ``curves`` is a list of TrajectorySample or an ``(n, m, ambient_dim)`` array.

    With ``warm_start`` the solver at time j starts from the mean at time j-1;
    otherwise each time point is cold-started from its projected average.
    """
    if not isinstance(curves, np.ndarray):
        _, curves, _ = stack_samples(curves)
    curves = np.asarray(curves, dtype=float)
    if curves.ndim != 3:
        raise ValidationError(f"expected an (n, m, ambient_dim) array, got shape {curves.shape}")
    m = curves.shape[1]
    mean = np.empty(curves.shape[1:])
    prev = None
    for j in range(m):
        try:
            mean[j] = frechet_mean_point(spec, curves[:, j], config, init=prev if warm_start else None)
        except (NoConvergence, LogUndefined) as exc:
            raise type(exc)(f"time index {j}: {exc}") from exc
        prev = mean[j]
    return mean
