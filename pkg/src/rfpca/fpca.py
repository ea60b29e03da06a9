"""Riemannian functional principal component analysis.

The fit follows the discretised recipe for trajectories on a uniform grid of
m times: pointwise Fréchet mean curve, log-map of every curve onto the mean's
tangent spaces, then a multivariate FPCA of the stacked tangent vectors. All
time integrals use the uniform weight 1/m.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from rfpca import manifold as mf
from rfpca.data import TangentProcess, stack_samples
from rfpca.eigen import jacobi_eigh
from rfpca.errors import (
    GammaOutOfRange,
    InsufficientComponentsWarning,
    KOutOfRange,
    LogUndefined,
    RankDeficientWarning,
    ValidationError,
    ZeroVariance,
)
from rfpca.frechet import FrechetConfig, frechet_mean_curve

EIGEN_FLOOR = 1e-12
ZERO_VARIANCE = 1e-15


@dataclass(frozen=True, eq=False)
class RfpcaModel:
    spec: mf.ManifoldSpec
    grid: np.ndarray
    mean_curve: np.ndarray  # (m, D)
    eigenvalues: np.ndarray  # (K,)
    eigenfunctions: np.ndarray  # (K, m, D)
    scores: np.ndarray  # (n, K)
    fve: np.ndarray  # (K,), entry k-1 is FVE_k
    subject_ids: tuple = field(default=())
    compositional: bool = False

    @property
    def k_max(self):
        return self.eigenvalues.size

    @property
    def n_subjects(self):
        return self.scores.shape[0]


# ---------------------------------------------------------------------------
# shared multivariate FPCA machinery

def vec(curves):
    """Stack the columns of each m x D matrix: all m values of coordinate 1, then 2, ..."""
    curves = np.asarray(curves)
    return np.swapaxes(curves, -1, -2).reshape(curves.shape[:-2] + (-1,))


def unvec(vectors, m):
    vectors = np.asarray(vectors)
    d = vectors.shape[-1] // m
    return np.swapaxes(vectors.reshape(vectors.shape[:-1] + (d, m)), -1, -2)


def fix_sign(vectors):
    """Flip columns so each column's largest-magnitude entry (first on ties) is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sorted_eigenpairs(cov):
    """Jacobi eigenpairs of ``cov`` in decreasing order, sign-fixed.

    Eigenvalues of magnitude below EIGEN_FLOOR are set to zero; exact ties are
    broken by the lexicographic order of the sign-fixed eigenvectors.
    """
    w, psi = jacobi_eigh(cov)
    psi = fix_sign(psi)
    w = np.where(np.abs(w) < EIGEN_FLOOR, 0.0, w)
    order = sorted(range(w.size), key=lambda i: (-w[i], tuple(psi[:, i])))
    return w[order], psi[:, order]


def multivariate_fpca(tangent, k_max, normal_penalty=None):
    """Eigen-analysis of the (m*D) x (m*D) covariance of the stacked curves.

    ``tangent`` has shape (n, m, D) and is used uncentred. ``normal_penalty``
    (optional (m*D) x (m*D) projector, in vec order) is subtracted from the
    covariance so that directions outside the tangent spaces sort last; it does
    not change any eigenpair inside them. Returns eigenvalues (K,),
    eigenfunctions (K, m, D) and scores (n, K).
    """
    tangent = np.asarray(tangent, dtype=float)
    n, m, _ = tangent.shape
    flat = vec(tangent)
    cov = flat.T @ flat / n
    target = cov
    if normal_penalty is not None:
        target = cov - max(1.0, float(np.trace(cov))) * normal_penalty
    omega, psi = sorted_eigenpairs(target)
    omega = np.maximum(omega[:k_max], 0.0)
    psi = psi[:, :k_max]
    if np.any(omega == 0.0):
        warnings.warn(
            f"{int(np.sum(omega == 0.0))} of {k_max} leading eigenvalues are below {EIGEN_FLOOR:g}",
            RankDeficientWarning,
            stacklevel=3,
        )
    phi_vec = np.sqrt(m) * psi
    eigenvalues = omega / m
    scores = flat @ phi_vec / m
    eigenfunctions = unvec(phi_vec.T, m)
    return eigenvalues, eigenfunctions, scores


def _normal_projector(spec, mean_curve):
    """Projector onto the normal directions of every tangent space, in vec order."""
    m, d = mean_curve.shape
    blocks = np.zeros((m, d, d))
    if spec.is_sphere:
        blocks[:] = mean_curve[:, :, None] * mean_curve[:, None, :]
    else:
        # symmetric part of a flattened 3x3 matrix
        eye = np.eye(9).reshape(9, 3, 3)
        sym = 0.5 * (eye + np.swapaxes(eye, -1, -2))
        blocks[:] = sym.reshape(9, 9)
    big = np.zeros((d, m, d, m))
    for j in range(m):
        big[:, j, :, j] = blocks[j]
    return big.reshape(d * m, d * m)


# ---------------------------------------------------------------------------
# the estimator

def log_curves(spec, mean_curve, curves):
    """Array form of :func:`compute_log_processes`, shape (n, m, D)."""
    curves = np.asarray(curves, dtype=float)
    try:
        return mf._log(spec, mean_curve[None, :, :], curves)
    except LogUndefined:
        for i in range(curves.shape[0]):
            for j in range(curves.shape[1]):
                try:
                    mf._log(spec, mean_curve[j], curves[i, j])
                except LogUndefined as exc:
                    raise LogUndefined(f"subject {i}, time index {j}: {exc}") from exc
        raise


def compute_log_processes(spec, samples, mean_curve):
    grid, curves, ids = stack_samples(samples)
    mean_curve = np.asarray(mean_curve, dtype=float)
    if mean_curve.shape != curves.shape[1:]:
        raise ValidationError(f"mean curve shape {mean_curve.shape} != sample shape {curves.shape[1:]}")
    vectors = log_curves(spec, mean_curve, curves)
    return [TangentProcess(ids[i], grid, vectors[i]) for i in range(len(ids))]


def fit_rfpca(spec, samples, k_max, config=FrechetConfig()):
    """Fit RFPCA to samples on a shared uniform grid, keeping ``k_max`` components."""
    grid, curves, ids = stack_samples(samples)
    n, m, d = curves.shape
    if d != spec.ambient_dim:
        raise ValidationError(f"samples have ambient dimension {d}, {spec} needs {spec.ambient_dim}")
    if n < 2:
        raise ValidationError("RFPCA needs at least two samples")
    limit = min(n, m * spec.intrinsic_dim)
    if not 1 <= k_max <= limit:
        raise KOutOfRange(f"k_max={k_max} outside [1, {limit}]")

    mean_curve = frechet_mean_curve(spec, curves, config)
    tangent = log_curves(spec, mean_curve, curves)
    eigenvalues, eigenfunctions, scores = multivariate_fpca(
        tangent, k_max, normal_penalty=_normal_projector(spec, mean_curve)
    )
    model = RfpcaModel(
        spec=spec,
        grid=grid,
        mean_curve=mean_curve,
        eigenvalues=eigenvalues,
        eigenfunctions=eigenfunctions,
        scores=scores,
        fve=np.zeros(k_max),
        subject_ids=tuple(ids),
    )
    _, residuals = geodesic_residuals(model, curves, scores)
    try:
        fve = _fve_from_residuals(residuals)[1:]
    except ZeroVariance:
        # every curve equals the mean; FVE is undefined
        fve = np.full(k_max, np.nan)
    object.__setattr__(model, "fve", fve)
    return model


def project_scores(model, curves):
    """Scores of curves (n, m, D) on the model's eigenfunctions."""
    tangent = log_curves(model.spec, model.mean_curve, curves)
    m = model.grid.size
    return vec(tangent) @ vec(model.eigenfunctions).T / m


def truncate_representation(model, scores, k):
    """Tangent and manifold curves of the K-truncated representation.

    ``scores`` is one subject's score row (at least ``k`` entries); K = 0
    returns the zero tangent curve and the mean curve.
    """
    if not 0 <= k <= model.k_max:
        raise KOutOfRange(f"K={k} outside [0, {model.k_max}]")
    scores = np.asarray(scores, dtype=float)
    tangent = np.tensordot(scores[..., :k], model.eigenfunctions[:k], axes=(-1, 0))
    if k == 0:
        return tangent, np.broadcast_to(model.mean_curve, tangent.shape).copy()
    return tangent, mf._exp(model.spec, model.mean_curve, tangent)


def geodesic_residuals(model, curves, scores=None):
    """Mean squared geodesic residual U_K for K = 0..k_max.

    Returns ``(tangent_residuals, geodesic_residuals)``, both of length
    k_max + 1; the tangent one is the 1/m-weighted squared L2 distance between
    each log curve and its truncation.
    """
    curves = np.asarray(curves, dtype=float)
    scores = project_scores(model, curves) if scores is None else scores
    tangent = log_curves(model.spec, model.mean_curve, curves)
    tan_res = np.empty(model.k_max + 1)
    geo_res = np.empty(model.k_max + 1)
    for k in range(model.k_max + 1):
        vk, xk = truncate_representation(model, scores, k)
        tan_res[k] = np.mean(np.sum((tangent - vk) ** 2, axis=-1))
        geo_res[k] = np.mean(mf._distance(model.spec, curves, xk) ** 2)
    return tan_res, geo_res


def _fve_from_residuals(residuals):
    if residuals[0] < ZERO_VARIANCE:
        raise ZeroVariance("total variance about the mean curve is zero; FVE is undefined")
    return (residuals[0] - residuals) / residuals[0]


def compute_fve(spec, samples, model, k):
    """Return ``(U_0, U_K, FVE_K)`` under the geodesic distance."""
    if not 0 <= k <= model.k_max:
        raise KOutOfRange(f"K={k} outside [0, {model.k_max}]")
    if spec != model.spec:
        raise ValidationError(f"model was fitted on {model.spec}, not {spec}")
    grid, curves, _ = stack_samples(samples)
    if grid.size != model.grid.size:
        raise ValidationError("samples and model use different grids")
    scores = project_scores(model, curves)
    _, u0 = truncate_representation(model, scores, 0)
    u_0 = float(np.mean(mf._distance(spec, curves, u0) ** 2))
    _, xk = truncate_representation(model, scores, k)
    u_k = float(np.mean(mf._distance(spec, curves, xk) ** 2))
    if u_0 < ZERO_VARIANCE:
        raise ZeroVariance("total variance about the mean curve is zero; FVE is undefined")
    return u_0, u_k, (u_0 - u_k) / u_0


def select_num_components(model, gamma):
    """Smallest K whose FVE reaches ``gamma``."""
    if not 0.0 < gamma < 1.0:
        raise GammaOutOfRange(f"gamma={gamma} must lie in (0, 1)")
    hits = np.nonzero(np.asarray(model.fve) >= gamma)[0]
    if hits.size == 0:
        warnings.warn(
            f"no K <= {model.k_max} reaches FVE {gamma}; returning k_max",
            InsufficientComponentsWarning,
            stacklevel=2,
        )
        return model.k_max
    return int(hits[0]) + 1


def mode_of_variation(model, k, multiplier):
    """exp_{mu(t)}(multiplier * sqrt(lambda_k) * phi_k(t)) for k in 1..k_max."""
    if not 1 <= k <= model.k_max:
        raise KOutOfRange(f"mode {k} outside [1, {model.k_max}]")
    v = multiplier * np.sqrt(model.eigenvalues[k - 1]) * model.eigenfunctions[k - 1]
    return mf._exp(model.spec, model.mean_curve, v)
