"""Closed-form geometry of the unit sphere S^d and the rotation group SO(3).

Points and tangent vectors are plain numpy arrays in ambient coordinates.
A sphere point is a unit vector of length d+1; an SO(3) point is a rotation
matrix flattened row-major to length 9. SO(3) tangent vectors are flattened
skew-symmetric matrices under the right-translated identification
``exp_p(v) = Exp(v) p``, so the Euclidean inner product of the flattened
coordinates is the metric ``tr(u^T v)`` and both manifolds share one
downstream pipeline.

Every public function accepts leading batch dimensions.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from rfpca.errors import (
    AntipodalPair,
    DegenerateInput,
    DimensionMismatch,
    InvalidTangent,
    LogUndefined,
    NotSkew,
    OffManifold,
)

#: sphere logs fail when <p, q> <= -1 + ANTIPODAL_TOL
ANTIPODAL_TOL = 1e-10
#: SO(3) logs fail when the rotation angle exceeds pi - SO3_CUT_TOL
SO3_CUT_TOL = 1e-6
#: below this rotation angle the SO(3) maps use their Taylor forms
SO3_SMALL_ANGLE = 1e-6
TANGENT_TOL = 1e-6
POLAR_TOL = 1e-12


class ManifoldKind(str, Enum):
    SPHERE = "sphere"
    SO3 = "so3"


@dataclass(frozen=True)
class ManifoldSpec:
    """Which geometry is active: ``ManifoldSpec.sphere(d)`` or ``ManifoldSpec.so3()``."""

    kind: ManifoldKind
    intrinsic_dim: int

    def __post_init__(self):
        object.__setattr__(self, "kind", ManifoldKind(self.kind))
        if self.intrinsic_dim < 1:
            raise DimensionMismatch(f"intrinsic_dim must be positive, got {self.intrinsic_dim}")
        if self.kind is ManifoldKind.SO3 and self.intrinsic_dim != 3:
            raise DimensionMismatch("SO(3) has intrinsic dimension 3")

    @classmethod
    def sphere(cls, d):
        return cls(ManifoldKind.SPHERE, int(d))

    @classmethod
    def so3(cls):
        return cls(ManifoldKind.SO3, 3)

    @classmethod
    def parse(cls, text):
        """Parse ``sphere:<d>`` or ``so3``."""
        text = text.strip().lower()
        if text in ("so3", "so(3)"):
            return cls.so3()
        if text.startswith("sphere:"):
            try:
                return cls.sphere(int(text.split(":", 1)[1]))
            except ValueError:
                pass
        raise DimensionMismatch(f"unknown manifold {text!r}; expected 'sphere:<d>' or 'so3'")

    @property
    def ambient_dim(self):
        return self.intrinsic_dim + 1 if self.is_sphere else 9

    @property
    def is_sphere(self):
        return self.kind is ManifoldKind.SPHERE

    def __str__(self):
        return f"sphere:{self.intrinsic_dim}" if self.is_sphere else "so3"


def _coords(spec, x, name="point"):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != spec.ambient_dim:
        raise DimensionMismatch(
            f"{name} has trailing dimension {x.shape[-1] if x.ndim else 0}, "
            f"expected ambient_dim={spec.ambient_dim} for {spec}"
        )
    return x


def _as_mat(x):
    return x.reshape(x.shape[:-1] + (3, 3))


def _as_flat(x):
    return x.reshape(x.shape[:-2] + (9,))


def _transpose(a):
    return np.swapaxes(a, -1, -2)


# ---------------------------------------------------------------------------
# skew matrices

def iota_embed(a, b, c):
    """Skew matrix ``[[0, -a, -b], [a, 0, -c], [b, c, 0]]``."""
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c)))
    out = np.zeros(a.shape + (3, 3))
    out[..., 0, 1] = -a
    out[..., 0, 2] = -b
    out[..., 1, 0] = a
    out[..., 1, 2] = -c
    out[..., 2, 0] = b
    out[..., 2, 1] = c
    return out


def iota_extract(skew, tol=1e-9):
    """Inverse of :func:`iota_embed`; returns the (a, b, c) triple."""
    s = np.asarray(skew, dtype=float)
    if s.shape[-2:] != (3, 3):
        raise DimensionMismatch(f"expected 3x3 matrices, got shape {s.shape}")
    asym = np.max(np.abs(s + _transpose(s)), initial=0.0)
    if asym > tol:
        raise NotSkew(f"matrix deviates from skew-symmetry by {asym:.3g}")
    a, b, c = s[..., 1, 0], s[..., 2, 0], s[..., 2, 1]
    if s.ndim == 2:
        return float(a), float(b), float(c)
    return a, b, c


def _rotation_angle_of_skew(s):
    return np.sqrt(np.sum(s * s, axis=(-2, -1)) / 2.0)


def so3_exp(s):
    """Matrix exponential of skew 3x3 matrices (Rodrigues)."""
    s = np.asarray(s, dtype=float)
    theta = _rotation_angle_of_skew(s)[..., None, None]
    small = theta < SO3_SMALL_ANGLE
    safe = np.where(small, 1.0, theta)
    a = np.where(small, 1.0, np.sin(safe) / safe)
    b = np.where(small, 0.5, 2.0 * np.sin(safe / 2.0) ** 2 / safe**2)
    return np.eye(3) + a * s + b * (s @ s)


def so3_log(r):
    """Principal matrix logarithm of rotation matrices; raises near angle pi."""
    r = np.asarray(r, dtype=float)
    skew = 0.5 * (r - _transpose(r))
    sin_t = _rotation_angle_of_skew(skew)
    cos_t = 0.5 * (np.trace(r, axis1=-2, axis2=-1) - 1.0)
    theta = np.arctan2(sin_t, cos_t)
    if np.any(theta > np.pi - SO3_CUT_TOL):
        raise LogUndefined(
            f"rotation angle {float(np.max(theta)):.12g} is within {SO3_CUT_TOL:g} of pi; "
            "log is undefined at the cut locus"
        )
    small = theta < SO3_SMALL_ANGLE
    factor = np.where(small, 1.0, theta / np.where(small, 1.0, sin_t))
    return factor[..., None, None] * skew


# ---------------------------------------------------------------------------
# validation

def point_deviation(spec, p):
    """How far ``p`` is from satisfying the point invariants (max over batch)."""
    p = _coords(spec, p)
    if spec.is_sphere:
        return float(np.max(np.abs(np.linalg.norm(p, axis=-1) - 1.0), initial=0.0))
    r = _as_mat(p)
    orth = np.max(np.abs(_transpose(r) @ r - np.eye(3)), initial=0.0)
    det = np.max(np.abs(np.linalg.det(r) - 1.0), initial=0.0)
    return float(max(orth, det))


def check_point(spec, p, tol=1e-9):
    dev = point_deviation(spec, p)
    if not dev <= tol:
        raise OffManifold(f"point deviates from {spec} by {dev:.3g} (tolerance {tol:g})")
    return np.asarray(p, dtype=float)


def tangent_deviation(spec, base, v):
    base = _coords(spec, base, "base")
    v = _coords(spec, v, "tangent vector")
    if spec.is_sphere:
        return float(np.max(np.abs(np.sum(base * v, axis=-1)), initial=0.0))
    m = _as_mat(v)
    return float(np.max(np.abs(m + _transpose(m)), initial=0.0))


def project_to_tangent(spec, base, v):
    """Orthogonal projection of ambient vectors onto the tangent space at ``base``."""
    base = _coords(spec, base, "base")
    v = _coords(spec, v, "vector")
    if spec.is_sphere:
        return v - np.sum(base * v, axis=-1, keepdims=True) * base
    m = _as_mat(v)
    return _as_flat(0.5 * (m - _transpose(m)))


# ---------------------------------------------------------------------------
# unchecked kernels, used in hot loops after inputs were validated once

def _sphere_angle(p, q):
    # equals the clamped arccos of <p, q>, but accurate at 0 and pi and exactly symmetric
    return 2.0 * np.arctan2(np.linalg.norm(p - q, axis=-1), np.linalg.norm(p + q, axis=-1))


def _distance(spec, p, q):
    if spec.is_sphere:
        return _sphere_angle(p, q)
    rel = _as_mat(q) @ _transpose(_as_mat(p))
    skew = 0.5 * (rel - _transpose(rel))
    sin_t = _rotation_angle_of_skew(skew)
    cos_t = 0.5 * (np.trace(rel, axis1=-2, axis2=-1) - 1.0)
    return np.sqrt(2.0) * np.arctan2(sin_t, cos_t)


def _exp(spec, base, v):
    if spec.is_sphere:
        r = np.linalg.norm(v, axis=-1, keepdims=True)
        zero = r == 0.0
        safe = np.where(zero, 1.0, r)
        out = np.cos(r) * base + np.where(zero, 0.0, np.sin(safe) / safe) * v
        # renormalise to suppress drift; the zero vector returns the base unchanged
        out = out / np.linalg.norm(out, axis=-1, keepdims=True)
        return np.where(zero, base, out)
    return _as_flat(so3_exp(_as_mat(v)) @ _as_mat(base))


def _log(spec, p, q):
    if spec.is_sphere:
        c = np.sum(p * q, axis=-1)
        if np.any(c <= -1.0 + ANTIPODAL_TOL):
            raise LogUndefined("points are antipodal (or numerically so); log is undefined")
        u = q - c[..., None] * p
        nu = np.linalg.norm(u, axis=-1, keepdims=True)
        theta = _sphere_angle(p, q)[..., None]
        zero = nu == 0.0
        return np.where(zero, 0.0, u * (theta / np.where(zero, 1.0, nu)))
    rel = _as_mat(q) @ _transpose(_as_mat(p))
    return _as_flat(so3_log(rel))


# ---------------------------------------------------------------------------
# public API

def geodesic_distance(spec, p, q):
    """Geodesic distance: great-circle angle on S^d, ``||Log(q p^T)||_F`` on SO(3)."""
    p = _coords(spec, p)
    q = _coords(spec, q)
    d = _distance(spec, p, q)
    return float(d) if np.ndim(d) == 0 else d


def exp_map(spec, base, v):
    """Riemannian exponential of tangent vector ``v`` at ``base``."""
    base = _coords(spec, base, "base")
    v = _coords(spec, v, "tangent vector")
    dev = tangent_deviation(spec, base, v)
    if dev > TANGENT_TOL:
        raise InvalidTangent(f"vector is not tangent at base (deviation {dev:.3g})")
    return _exp(spec, base, v)


def log_map(spec, p, q):
    """Riemannian logarithm ``log_p(q)``; raises LogUndefined at the cut locus."""
    p = _coords(spec, p)
    q = _coords(spec, q)
    return _log(spec, p, q)


def metric_norm(spec, v):
    """Norm of tangent coordinates (Euclidean on S^d, Frobenius on SO(3))."""
    v = _coords(spec, v, "tangent vector")
    return np.linalg.norm(v, axis=-1)


def project_to_manifold(spec, raw):
    """Nearest manifold point: normalisation on S^d, polar projection on SO(3)."""
    raw = _coords(spec, raw, "vector")
    if spec.is_sphere:
        norm = np.linalg.norm(raw, axis=-1, keepdims=True)
        if np.any(norm == 0.0) or not np.all(np.isfinite(norm)):
            raise DegenerateInput("cannot project the zero vector onto the sphere")
        return raw / norm
    return _as_flat(_polar_so3(_as_mat(raw)))


def _polar_so3(x):
    det = np.linalg.det(x)
    if np.any(~np.isfinite(det)) or np.any(np.abs(det) < 1e-14):
        raise DegenerateInput("cannot project a singular matrix onto SO(3)")
    if np.any(det < 0):
        # the polar factor would be a reflection; take the SO(3) point from the SVD
        u, _, vt = np.linalg.svd(x)
        flip = np.sign(np.linalg.det(u @ vt))
        u[..., :, 2] *= flip[..., None]
        return u @ vt
    y = x.copy()
    for _ in range(100):
        nxt = 0.5 * (y + _transpose(np.linalg.inv(y)))
        done = np.max(np.abs(nxt - y)) <= POLAR_TOL
        y = nxt
        if done:
            break
    return y


def rotation_between(a, b):
    """Minimal rotation taking unit vector ``a`` to unit vector ``b``.

    Acts as the identity on the orthogonal complement of span{a, b}.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch("a and b must be vectors of equal length")
    c = float(a @ b)
    if 1.0 + c <= ANTIPODAL_TOL:
        raise AntipodalPair("rotation between antipodal points is not unique")
    k = np.outer(b, a) - np.outer(a, b)
    return np.eye(a.size) + k + (k @ k) / (1.0 + c)
