"""Synthetic trajectories on S^2 and SO(3) with a known Karhunen-Loève structure.

Curves are ``X(t) = exp_{mu(t)}(sum_k xi_k phi_k(t))`` with independent
Gaussian scores of variance ``decay_base ** (k / 2)`` and eigenfunctions
built from orthonormal shifted Legendre polynomials.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre

from rfpca import manifold as mf
from rfpca.data import TrajectorySample, uniform_grid
from rfpca.errors import KOutOfRange, ValidationError

MAX_DEGREE = 20
NORTH_POLE = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class SimConfig:
    manifold: mf.ManifoldSpec = field(default_factory=lambda: mf.ManifoldSpec.sphere(2))
    n: int = 100
    m: int = 20
    n_components: int = 20
    decay_base: float = 0.07
    seed: int = 0
    # degree of the first Legendre polynomial used (1: zeta_1 is linear)
    first_degree: int = 1

    def __post_init__(self):
        if self.n < 1 or self.m < 2:
            raise ValidationError("need n >= 1 and m >= 2")
        if not 0.0 < self.decay_base < 1.0:
            raise ValidationError("decay_base must lie in (0, 1)")
        if not 1 <= self.n_components <= MAX_DEGREE:
            raise ValidationError(f"n_components must lie in [1, {MAX_DEGREE}]")
        if self.first_degree not in (0, 1):
            raise ValidationError("first_degree must be 0 or 1")
        if not (self.manifold == mf.ManifoldSpec.sphere(2) or self.manifold == mf.ManifoldSpec.so3()):
            raise ValidationError(f"simulation design exists for sphere:2 and so3, not {self.manifold}")

    @property
    def grid(self):
        return uniform_grid(self.m)

    @property
    def score_variances(self):
        k = np.arange(1, self.n_components + 1)
        return self.decay_base ** (k / 2.0)


def legendre_basis(k, t, first_degree=1):
    """k-th orthonormal shifted Legendre polynomial on [0, 1] (k = 1..20).

    With ``first_degree=1`` the k-th element has degree k; with 0 it has
    degree k-1 and the first element is the constant.
    """
    if not 1 <= k <= MAX_DEGREE:
        raise KOutOfRange(f"Legendre index {k} outside [1, {MAX_DEGREE}]")
    degree = k - 1 + first_degree
    coef = np.zeros(degree + 1)
    coef[degree] = np.sqrt(2 * degree + 1)
    return legendre.legval(2.0 * np.asarray(t, dtype=float) - 1.0, coef)


def true_fve(config):
    """Tangent-space FVE of the first K components, K = 1..n_components."""
    var = config.score_variances
    return np.cumsum(var) / var.sum()


def gen_mean_curve(config):
    t = config.grid
    a = 2.0 * t
    b = 0.3 * np.pi * np.sin(np.pi * t)
    if config.manifold.is_sphere:
        # (a, b, 0) in the tangent basis e1, e2 at the north pole
        v = np.stack([a, b, np.zeros_like(t)], axis=-1)
        return mf._exp(config.manifold, NORTH_POLE, v)
    return mf._as_flat(mf.so3_exp(mf.iota_embed(a, b, np.zeros_like(t))))


def gen_eigenfunctions(config, mean_curve=None):
    """Eigenfunctions on the grid, shape (n_components, m, ambient_dim)."""
    t = config.grid
    mean_curve = gen_mean_curve(config) if mean_curve is None else mean_curve

    def zeta(k, s):
        return legendre_basis(k, s, config.first_degree)

    out = []
    if config.manifold.is_sphere:
        rotations = np.stack([mf.rotation_between(NORTH_POLE, mu) for mu in mean_curve])
        for k in range(1, config.n_components + 1):
            raw = np.stack([zeta(k, t / 2), zeta(k, (t + 1) / 2), np.zeros_like(t)], axis=-1)
            out.append(np.einsum("jab,jb->ja", rotations, raw) / np.sqrt(2.0))
    else:
        for k in range(1, config.n_components + 1):
            skew = mf.iota_embed(zeta(k, t / 3), zeta(k, (t + 1) / 3), zeta(k, (t + 2) / 3))
            out.append(mf._as_flat(skew) / np.sqrt(6.0))
    return np.stack(out)


def draw_scores(config):
    """Scores (n, n_components).

    Each (subject, component) pair owns a Philox counter block keyed by the
    seed, so any subset of subjects reproduces the same values.
    """
    sd = np.sqrt(config.score_variances)
    scores = np.empty((config.n, config.n_components))
    key = config.seed & 0xFFFFFFFFFFFFFFFF
    for i in range(config.n):
        for k in range(config.n_components):
            gen = np.random.Generator(np.random.Philox(key=key, counter=[0, 0, k, i]))
            scores[i, k] = sd[k] * gen.standard_normal()
    return scores


@dataclass(frozen=True, eq=False)
class SimulatedData:
    samples: list
    scores: np.ndarray  # (n, n_components)
    mean_curve: np.ndarray  # (m, D)
    eigenfunctions: np.ndarray  # (n_components, m, D)
    tangent: np.ndarray  # (n, m, D)
    config: SimConfig

    @property
    def curves(self):
        return np.stack([s.points for s in self.samples])


def gen_samples(config, scores=None):
    """Draw ``config.n`` curves; ``scores`` overrides the random scores."""
    mean_curve = gen_mean_curve(config)
    phi = gen_eigenfunctions(config, mean_curve)
    scores = draw_scores(config) if scores is None else np.asarray(scores, dtype=float)
    tangent = np.tensordot(scores, phi, axes=(1, 0))
    curves = mf._exp(config.manifold, mean_curve[None], tangent)
    grid = config.grid
    samples = [TrajectorySample(f"s{i:04d}", grid, curves[i]) for i in range(config.n)]
    return SimulatedData(samples, scores, mean_curve, phi, tangent, config)
