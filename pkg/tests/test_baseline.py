import warnings

import numpy as np
import pytest

from rfpca.baseline import fit_l2_fpca, geodesic_fve_l2
from rfpca.data import samples_from_array, uniform_grid
from rfpca.errors import RankDeficientWarning, ValidationError, ZeroVariance
from rfpca.fpca import compute_log_processes, fit_rfpca
from rfpca.simulate import SimConfig, gen_samples

from conftest import S2, SO3


def test_identical_samples():
    curve = gen_samples(SimConfig(n=1, seed=0)).curves[0]
    samples = samples_from_array(np.stack([curve] * 4))
    with pytest.warns(RankDeficientWarning):
        model = fit_l2_fpca(samples, 2)
    np.testing.assert_array_equal(model.eigenvalues, 0.0)
    np.testing.assert_allclose(model.mean, curve, atol=1e-15)
    with pytest.raises(ZeroVariance):
        geodesic_fve_l2(S2, samples, model, 1)


def test_planar_data_rank_two(rng):
    m = 15
    t = uniform_grid(m)
    center = np.stack([t, t**2, np.ones(m)], axis=-1)
    f = np.stack([np.sin(3 * t), np.zeros(m), t], axis=-1)
    g = np.stack([np.ones(m), np.cos(t), -t], axis=-1)
    coef = rng.normal(size=(30, 2))
    coef -= coef.mean(axis=0)
    curves = center + coef[:, :1, None] * f + coef[:, 1:, None] * g
    with pytest.warns(RankDeficientWarning):
        model = fit_l2_fpca(samples_from_array(curves), 3)
    assert model.fve[1] == pytest.approx(1.0, abs=1e-10)
    assert model.eigenvalues[2] == 0.0


def test_full_rank_geodesic_fve():
    data = gen_samples(SimConfig(n=8, seed=5))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankDeficientWarning)
        model = fit_l2_fpca(data.samples, 8)
    assert geodesic_fve_l2(S2, data.samples, model, 8)[2] == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("spec", [S2, SO3], ids=str)
def test_geodesic_fve_at_most_one(spec):
    data = gen_samples(SimConfig(manifold=spec, n=30, seed=6))
    model = fit_l2_fpca(data.samples, 5)
    for k in range(6):
        assert geodesic_fve_l2(spec, data.samples, model, k)[2] <= 1 + 1e-12


@pytest.mark.parametrize("spec", [S2, SO3], ids=str)
def test_matches_rfpca_on_tangent_data(spec):
    data = gen_samples(SimConfig(manifold=spec, n=25, seed=7))
    rf = fit_rfpca(spec, data.samples, 6)
    tangent = [t.vectors for t in compute_log_processes(spec, data.samples, rf.mean_curve)]
    l2 = fit_l2_fpca(samples_from_array(np.stack(tangent)), 6)
    np.testing.assert_allclose(l2.eigenvalues, rf.eigenvalues, atol=1e-10)


def test_lonlat_chart():
    data = gen_samples(SimConfig(n=30, seed=8))
    model = fit_l2_fpca(data.samples, 4, chart="lonlat")
    assert model.mean.shape == (20, 2)
    fves = [geodesic_fve_l2(S2, data.samples, model, k)[2] for k in range(1, 5)]
    assert np.all(np.diff(fves) > 0) and fves[-1] < 1
    with pytest.raises(ValidationError):
        fit_l2_fpca(data.samples, 2, chart="polar")


def test_simulation_l2_fve():
    """K = 3 geodesic FVE of the L2 baseline over 20 replicates of the S^2 design."""
    values = []
    for seed in range(20):
        data = gen_samples(SimConfig(n=100, seed=seed))
        model = fit_l2_fpca(data.samples, 3)
        values.append(geodesic_fve_l2(S2, data.samples, model, 3)[2])
    assert abs(100 * np.mean(values) - 93.1) <= 1.5
