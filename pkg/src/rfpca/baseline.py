"""Conventional multivariate L2 FPCA that ignores the manifold constraint.

Used as the comparison method: its truncated reconstructions are pushed
back onto the manifold and scored with the same geodesic residuals as RFPCA.
"""

from dataclasses import dataclass, field

import numpy as np

from rfpca import manifold as mf
from rfpca.data import stack_samples
from rfpca.errors import KOutOfRange, ValidationError, ZeroVariance
from rfpca.fpca import ZERO_VARIANCE, multivariate_fpca, vec
from rfpca.frechet import FrechetConfig, frechet_mean_curve
from rfpca.io import lonlat_to_s2, s2_to_lonlat

CHARTS = ("ambient", "lonlat")


@dataclass(frozen=True, eq=False)
class L2Model:
    grid: np.ndarray
    mean: np.ndarray  # (m, D) pointwise Euclidean average, in chart coordinates
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray  # (K, m, D)
    scores: np.ndarray  # (n, K)
    fve: np.ndarray  # Euclidean FVE, K = 1..k_max
    subject_ids: tuple = field(default=())
    chart: str = "ambient"

    @property
    def k_max(self):
        return self.eigenvalues.size


def to_chart(curves, chart):
    if chart == "ambient":
        return np.asarray(curves, dtype=float)
    if chart == "lonlat":
        lon, lat = s2_to_lonlat(curves)
        # keep longitude continuous along each curve
        lon = np.degrees(np.unwrap(np.radians(lon), axis=-1))
        return np.stack([lon, lat], axis=-1)
    raise ValidationError(f"unknown chart {chart!r}; expected one of {CHARTS}")


def from_chart(spec, coords, chart):
    """Map chart coordinates back onto the manifold."""
    if chart == "ambient":
        return mf.project_to_manifold(spec, coords)
    if not spec == mf.ManifoldSpec.sphere(2):
        raise ValidationError("the lonlat chart is only defined for sphere:2")
    lat = np.clip(coords[..., 1], -90.0, 90.0)
    return lonlat_to_s2(coords[..., 0], lat)


def fit_l2_fpca(samples, k_max, chart="ambient"):
    """Multivariate FPCA with Euclidean centring; same Vec, scaling and sign rules as RFPCA."""
    grid, curves, ids = stack_samples(samples)
    coords = to_chart(curves, chart)
    n, m, d = coords.shape
    if n < 2:
        raise ValidationError("L2 FPCA needs at least two samples")
    if not 1 <= k_max <= min(n, m * d):
        raise KOutOfRange(f"k_max={k_max} outside [1, {min(n, m * d)}]")
    mean = coords.mean(axis=0)
    centred = coords - mean
    eigenvalues, eigenfunctions, scores = multivariate_fpca(centred, k_max)

    total = float(np.mean(np.sum(centred**2, axis=-1)))
    fve = np.full(k_max, np.nan)
    if total >= ZERO_VARIANCE:
        flat = vec(centred)
        for k in range(1, k_max + 1):
            recon = scores[:, :k] @ vec(eigenfunctions[:k])
            fve[k - 1] = 1.0 - np.mean(np.sum((flat - recon) ** 2, axis=-1)) / m / total
    return L2Model(grid, mean, eigenvalues, eigenfunctions, scores, fve, tuple(ids), chart)


def reconstruct_l2(model, scores, k):
    """K-truncated reconstruction in chart coordinates."""
    if not 0 <= k <= model.k_max:
        raise KOutOfRange(f"K={k} outside [0, {model.k_max}]")
    return model.mean + np.tensordot(np.asarray(scores)[..., :k], model.eigenfunctions[:k], axes=(-1, 0))


def geodesic_fve_l2(spec, samples, model, k, mean_curve=None, config=FrechetConfig()):
    """Return ``(U_0, U_K, FVE_K)`` of the L2 reconstructions under the geodesic distance.

    Reconstructions are mapped back onto the manifold before measuring
    distances. U_0 is measured from the geodesic Fréchet mean curve (computed
    here unless ``mean_curve`` is given) so the denominator matches RFPCA's.
    """
    _, curves, _ = stack_samples(samples)
    if mean_curve is None:
        mean_curve = frechet_mean_curve(spec, curves, config)
    u_0 = float(np.mean(mf._distance(spec, curves, mean_curve[None]) ** 2))
    if u_0 < ZERO_VARIANCE:
        raise ZeroVariance("total variance about the mean curve is zero; FVE is undefined")
    flat = vec(to_chart(curves, model.chart) - model.mean)
    scores = flat @ vec(model.eigenfunctions).T / model.grid.size
    recon = from_chart(spec, reconstruct_l2(model, scores, k), model.chart)
    u_k = float(np.mean(mf._distance(spec, curves, recon) ** 2))
    return u_0, u_k, (u_0 - u_k) / u_0
