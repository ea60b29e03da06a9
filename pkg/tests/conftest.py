import numpy as np
import pytest
from hypothesis import strategies as st

from rfpca import manifold as mf

S2 = mf.ManifoldSpec.sphere(2)
SO3 = mf.ManifoldSpec.so3()


def random_sphere(rng, size, dim=3):
    x = rng.normal(size=(size, dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def random_rotation(rng, size, max_angle=np.pi * 0.95):
    axis = random_sphere(rng, size)
    angle = rng.uniform(0, max_angle, size=size)
    skew = mf.iota_embed(axis[:, 2], -axis[:, 1], axis[:, 0]) * angle[:, None, None]
    return mf._as_flat(mf.so3_exp(skew))


def random_points(spec, rng, size):
    return random_sphere(rng, size, spec.ambient_dim) if spec.is_sphere else random_rotation(rng, size)


def grid_search_frechet(points, step=1e-3):
    """Brute-force minimiser of the mean squared great-circle distance on S^2.

    A global pass over a (polar, azimuth) grid at 0.01 rad, then a local pass
    at ``step`` around the best cell.
    """

    def objective(theta, phi):
        cand = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], -1)
        ang = np.arccos(np.clip(cand @ points.T, -1, 1))
        return np.mean(ang**2, axis=-1), cand

    theta, phi = np.meshgrid(np.arange(0, np.pi + 1e-9, 0.01), np.arange(-np.pi, np.pi, 0.01), indexing="ij")
    val, cand = objective(theta, phi)
    i = np.unravel_index(np.argmin(val), val.shape)
    t0, p0 = theta[i], phi[i]
    theta, phi = np.meshgrid(np.arange(t0 - 0.02, t0 + 0.02, step), np.arange(p0 - 0.02, p0 + 0.02, step),
                             indexing="ij")
    val, cand = objective(theta, phi)
    return cand[np.unravel_index(np.argmin(val), val.shape)]


unit_floats = st.floats(-1.0, 1.0, allow_nan=False)
vec3 = st.tuples(unit_floats, unit_floats, unit_floats).filter(lambda v: np.linalg.norm(v) > 1e-3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
