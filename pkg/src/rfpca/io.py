"""File formats: trajectory/count/proportion CSVs and model JSON.

All reals are written with 17 significant digits so files round-trip exactly.
"""

import csv
import json
import math
from collections import OrderedDict

import numpy as np

from rfpca import manifold as mf
from rfpca.data import TrajectorySample, stack_samples
from rfpca.errors import GridMismatch, LatitudeOutOfRange, OffManifold, ParseError, ValidationError

INGEST_TOL = 1e-6


def fmt(x):
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# geographic coordinates

def lonlat_to_s2(lon, lat):
    """Longitude/latitude in degrees to points on the unit sphere."""
    lon = np.asarray(lon, dtype=float)
    lat = np.asarray(lat, dtype=float)
    if np.any(np.abs(lat) > 90.0):
        raise LatitudeOutOfRange("latitude must lie in [-90, 90] degrees")
    lon_r, lat_r = np.radians(lon), np.radians(lat)
    return np.stack([np.cos(lat_r) * np.cos(lon_r), np.cos(lat_r) * np.sin(lon_r), np.sin(lat_r)], axis=-1)


def s2_to_lonlat(points):
    points = np.asarray(points, dtype=float)
    lon = np.degrees(np.arctan2(points[..., 1], points[..., 0]))
    lat = np.degrees(np.arcsin(np.clip(points[..., 2], -1.0, 1.0)))
    return lon, lat


# ---------------------------------------------------------------------------
# CSV

def _read_grouped(path, prefix):
    """Read ``id,t,<prefix>1..<prefix>J`` rows grouped by id, in file order."""
    groups = OrderedDict()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        expected = ["id", "t"] + [f"{prefix}{j}" for j in range(1, len(header) - 1)]
        if len(header) < 3 or header != expected:
            raise ParseError(f"{path}: row 1: header {header} should be id,t,{prefix}1,...")
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}: row {row_no}: expected {len(header)} columns, got {len(row)}")
            values = []
            for col, text in enumerate(row[1:], start=2):
                try:
                    values.append(float(text))
                except ValueError:
                    raise ParseError(f"{path}: row {row_no}, column {col}: not a number: {text!r}") from None
            key = row[0].strip()
            if groups and key in groups and next(reversed(groups)) != key:
                raise ParseError(f"{path}: row {row_no}: rows for id {key!r} are not contiguous")
            groups.setdefault(key, []).append(values)
    if not groups:
        raise ParseError(f"{path}: no data rows")
    out = []
    for key, rows in groups.items():
        arr = np.array(rows)
        if np.any(np.diff(arr[:, 0]) <= 0):
            raise ParseError(f"{path}: id {key!r}: times are not strictly increasing")
        out.append((key, arr[:, 0], arr[:, 1:]))
    return out


def ingest_trajectories_csv(path, spec):
    """Read trajectories; points within INGEST_TOL of the manifold are projected onto it."""
    groups = _read_grouped(path, "x")
    samples = []
    for key, times, points in groups:
        if points.shape[1] != spec.ambient_dim:
            raise ParseError(f"{path}: {points.shape[1]} coordinates, {spec} needs {spec.ambient_dim}")
        for j in range(points.shape[0]):
            dev = mf.point_deviation(spec, points[j])
            if not dev <= INGEST_TOL + 1e-12:
                raise OffManifold(f"id={key} t={fmt(times[j])} deviation={dev:.3g}")
        samples.append(TrajectorySample(key, times, mf.project_to_manifold(spec, points)))
    try:
        stack_samples(samples)
    except GridMismatch as exc:
        raise GridMismatch(f"{path}: {exc}") from None
    return samples


def write_trajectories_csv(path, samples, extra=None):
    """Write ``id,t,x1..xD``; ``extra`` maps a column name to per-sample arrays."""
    samples = list(samples)
    d = samples[0].points.shape[1]
    extra = extra or {}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "t"] + [f"x{j}" for j in range(1, d + 1)] + list(extra))
        for i, s in enumerate(samples):
            for j, t in enumerate(s.grid):
                w.writerow([s.subject_id, fmt(t)] + [fmt(x) for x in s.points[j]] +
                           [str(col[i][j]) for col in extra.values()])


def read_counts_csv(path):
    from rfpca.compositional import CountPanel

    return [CountPanel(key, times, counts) for key, times, counts in _read_grouped(path, "c")]


def write_compositions_csv(path, curves, flags=None):
    curves = list(curves)
    j_dim = curves[0].proportions.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "t"] + [f"y{j}" for j in range(1, j_dim + 1)] + (["outside"] if flags else []))
        for i, c in enumerate(curves):
            for j, t in enumerate(c.times):
                row = [c.subject_id, fmt(t)] + [fmt(y) for y in c.proportions[j]]
                if flags:
                    row.append(str(int(flags[i][j])))
                w.writerow(row)


# ---------------------------------------------------------------------------
# JSON

def _encode(obj):
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return "null"
        text = fmt(obj)
        # keep floats (and the sign of zero) distinguishable from JSON integers
        return text if any(c in text for c in ".e") else text + ".0"
    return json.dumps(obj)


def dumps(obj):
    return _encode(obj) + "\n"


def model_to_dict(model):
    from rfpca.baseline import L2Model

    if isinstance(model, L2Model):
        manifold = {"kind": "euclidean-ambient", "intrinsic_dim": int(model.mean.shape[1]), "chart": model.chart}
        mean = model.mean
    else:
        manifold = {"kind": model.spec.kind.value, "intrinsic_dim": model.spec.intrinsic_dim}
        mean = model.mean_curve
    out = {
        "manifold": manifold,
        "grid": model.grid,
        "mean": mean,
        "eigenvalues": model.eigenvalues,
        "eigenfunctions": model.eigenfunctions,
        "scores": model.scores,
        "fve": model.fve,
        "subject_ids": list(model.subject_ids),
    }
    if getattr(model, "compositional", False):
        out["compositional"] = True
    return out


def _array(values, ndim):
    arr = np.array([np.nan if v is None else v for v in values] if ndim == 1 else values, dtype=float)
    if arr.size == 0:
        arr = arr.reshape((0,) * ndim)
    return arr


def model_from_dict(doc):
    from rfpca.baseline import L2Model
    from rfpca.fpca import RfpcaModel

    try:
        man = doc["manifold"]
        grid = _array(doc["grid"], 1)
        mean = _array(doc["mean"], 2)
        eigenvalues = _array(doc["eigenvalues"], 1)
        k, m = eigenvalues.size, grid.size
        eigenfunctions = np.array(doc["eigenfunctions"], dtype=float).reshape(k, m, mean.shape[1])
        scores = np.array(doc["scores"], dtype=float).reshape(-1, k)
        fve = _array(doc["fve"], 1)
        ids = tuple(str(s) for s in doc["subject_ids"])
        kind = man["kind"]
        if kind == "euclidean-ambient":
            return L2Model(grid, mean, eigenvalues, eigenfunctions, scores, fve, ids, man.get("chart", "ambient"))
        spec = mf.ManifoldSpec(kind, int(man["intrinsic_dim"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed model document: {exc}") from None
    return RfpcaModel(spec, grid, mean, eigenvalues, eigenfunctions, scores, fve, ids,
                      bool(doc.get("compositional", False)))


def save_model(path, model):
    with open(path, "w") as fh:
        fh.write(dumps(model_to_dict(model)))


def load_model(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    return model_from_dict(doc)
