"""Cyclic Jacobi eigensolver for dense symmetric matrices.

Row-cyclic ordering (p < q swept row by row), compiled with numba. The
covariance matrices handled here are at most a few hundred rows, where
Jacobi is accurate, deterministic and fast enough.
"""

import numba
import numpy as np

from rfpca.errors import NoConvergence, ValidationError


@numba.njit(cache=True)
def _off_norm(a):
    n = a.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                total += a[i, j] * a[i, j]
    return np.sqrt(total)


@numba.njit(cache=True)
def _rotate(a, v, p, q, c, s):
    n = a.shape[0]
    for k in range(n):
        akp = a[k, p]
        akq = a[k, q]
        a[k, p] = c * akp - s * akq
        a[k, q] = s * akp + c * akq
    for k in range(n):
        apk = a[p, k]
        aqk = a[q, k]
        a[p, k] = c * apk - s * aqk
        a[q, k] = s * apk + c * aqk
    a[p, q] = 0.0
    a[q, p] = 0.0
    for k in range(n):
        vkp = v[k, p]
        vkq = v[k, q]
        v[k, p] = c * vkp - s * vkq
        v[k, q] = s * vkp + c * vkq


@numba.njit(cache=True)
def _sweeps(a, v, threshold, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = _off_norm(a)
        if off <= threshold:
            return sweep, off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if np.isinf(theta):
                    continue
                if theta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                _rotate(a, v, p, q, c, t * c)
    return max_sweeps, _off_norm(a)


def off_diagonal_norm(a):
    return float(_off_norm(np.ascontiguousarray(a, dtype=float)))


def jacobi_eigh(a, tol=1e-12, max_sweeps=60):
    """Eigen-decompose the symmetric matrix ``a``.

    Sweeps until the off-diagonal Frobenius norm is at most ``tol * ||a||_F``.
    Returns ``(eigenvalues, eigenvectors)``, eigenvectors in columns, in the
    order the sweeps leave them (unsorted).
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    scale = float(np.linalg.norm(a))
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 * max(scale, 1.0):
        raise ValidationError("matrix is not symmetric")
    a = np.ascontiguousarray(0.5 * (a + a.T))
    v = np.eye(a.shape[0])
    _, off = _sweeps(a, v, tol * scale, max_sweeps)
    if off > tol * scale:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3g})")
    return np.diag(a).copy(), v
