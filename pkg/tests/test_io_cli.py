import json

import numpy as np
import pytest

from rfpca import io
from rfpca import manifold as mf
from rfpca.cli import main
from rfpca.errors import GridMismatch, LatitudeOutOfRange, OffManifold, ParseError
from rfpca.fpca import fit_rfpca
from rfpca.simulate import SimConfig, gen_samples

from conftest import S2, SO3


def write(path, text):
    path.write_text(text)
    return path


VALID = """id,t,x1,x2,x3
a,0,1,0,0
a,0.5,0,1,0
a,1,0,0,1
b,0,0,0,1
b,0.5,0,1,0
b,1,1,0,0
"""


def test_ingest_valid(tmp_path):
    samples = io.ingest_trajectories_csv(write(tmp_path / "v.csv", VALID), S2)
    assert [s.subject_id for s in samples] == ["a", "b"]
    assert all(s.points.shape == (3, 3) for s in samples)


def test_ingest_projects_near_points(tmp_path):
    text = VALID.replace("a,0,1,0,0", "a,0,1.000001,0,0")
    samples = io.ingest_trajectories_csv(write(tmp_path / "v.csv", text), S2)
    np.testing.assert_array_equal(samples[0].points[0], [1, 0, 0])


def test_ingest_rejects_far_points(tmp_path):
    text = VALID.replace("a,0.5,0,1,0", "a,0.5,0,1.01,0")
    with pytest.raises(OffManifold, match="id=a t=0.5"):
        io.ingest_trajectories_csv(write(tmp_path / "v.csv", text), S2)


def test_ingest_grid_mismatch(tmp_path):
    text = VALID.replace("b,0,0,0,1\nb,0.5,0,1,0\n", "b,0,0,0,1\n")
    with pytest.raises(GridMismatch, match="grid"):
        io.ingest_trajectories_csv(write(tmp_path / "v.csv", text), S2)


@pytest.mark.parametrize("text, where", [
    (VALID.replace("a,0.5,0,1,0", "a,0.5,zero,1,0"), "row 3, column 3"),
    (VALID.replace("id,t", "name,t"), "row 1"),
    (VALID.replace("b,1,1,0,0", "a,1.5,1,0,0"), "row 7"),
    (VALID.replace("a,1,0,0,1", "a,0.2,0,0,1"), "not strictly increasing"),
])
def test_ingest_parse_errors(tmp_path, text, where):
    with pytest.raises(ParseError, match=where):
        io.ingest_trajectories_csv(write(tmp_path / "v.csv", text), S2)


def test_ingest_so3_dimension(tmp_path):
    with pytest.raises(ParseError):
        io.ingest_trajectories_csv(write(tmp_path / "v.csv", VALID), SO3)


@pytest.mark.parametrize("lon, lat, expected", [(0, 0, [1, 0, 0]), (0, 90, [0, 0, 1]), (90, 0, [0, 1, 0])])
def test_lonlat(lon, lat, expected):
    np.testing.assert_allclose(io.lonlat_to_s2(lon, lat), expected, atol=1e-15)


def test_lonlat_round_trip_and_range(rng):
    lon, lat = rng.uniform(-180, 180, 100), rng.uniform(-89, 89, 100)
    back = io.s2_to_lonlat(io.lonlat_to_s2(lon, lat))
    np.testing.assert_allclose(back, (lon, lat), atol=1e-10)
    with pytest.raises(LatitudeOutOfRange):
        io.lonlat_to_s2(0.0, 90.5)


@pytest.mark.parametrize("spec", [S2, SO3], ids=str)
def test_model_json_round_trip(tmp_path, spec):
    data = gen_samples(SimConfig(manifold=spec, n=15, seed=2))
    model = fit_rfpca(spec, data.samples, 3)
    io.save_model(tmp_path / "m.json", model)
    back = io.load_model(tmp_path / "m.json")
    assert back.spec == spec and back.subject_ids == model.subject_ids
    for name in ("grid", "mean_curve", "eigenvalues", "eigenfunctions", "scores", "fve"):
        assert getattr(back, name).tobytes() == getattr(model, name).tobytes(), name


def test_json_nan_is_null():
    assert json.loads(io.dumps({"x": np.array([1.0, np.nan])})) == {"x": [1.0, None]}


# ---------------------------------------------------------------------------
# command line


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert run("simulate", "--manifold", "sphere:2", "--n", 100, "--m", 20, "--seed", 1, "--out", d / "sim.csv") == 0
    return d


def _table(out):
    rows = [line.split("\t") for line in out.strip().splitlines()]
    return rows


def test_simulate_writes_truth(pipeline):
    truth = json.loads((pipeline / "sim.truth.json").read_text())
    assert truth["manifold"] == "sphere:2" and len(truth["scores"]) == 100
    assert truth["true_fve"][0] == pytest.approx(0.7346, abs=1e-3)


def test_fit_and_fve(pipeline, capsys):
    assert run("fit", "--manifold", "sphere:2", "--input", pipeline / "sim.csv", "--kmax", 6,
               "--gamma", 0.95, "--out", pipeline / "model.json") == 0
    rows = _table(capsys.readouterr().out)
    assert rows[0] == ["K", "FVE"]
    assert 0.71 <= float(rows[1][1]) <= 0.77
    assert rows[-1][:2] == ["K_selected", "3"]

    assert run("fve", "--model", pipeline / "model.json", "--input", pipeline / "sim.csv", "--baseline", "l2") == 0
    rows = _table(capsys.readouterr().out)
    assert rows[0] == ["K", "U_K", "FVE", "U_K_L2", "FVE_L2"]
    assert rows[1][0] == "0" and float(rows[1][2]) == 0.0
    fve1, fve1_l2 = float(rows[2][2]), float(rows[2][4])
    assert 0.71 <= fve1 <= 0.77 and fve1_l2 < fve1
    assert rows[-1][0] == "U_0"


def test_fit_selects_three_in_most_seeds(tmp_path, capsys):
    chosen = []
    for seed in range(5):
        run("simulate", "--n", 100, "--seed", seed, "--out", tmp_path / "s.csv")
        run("fit", "--manifold", "sphere:2", "--input", tmp_path / "s.csv", "--kmax", 6, "--out", tmp_path / "m.json")
        chosen.append(_table(capsys.readouterr().out)[-1][1])
    assert chosen.count("3") >= 3


def test_reconstruct_k0_is_mean(pipeline):
    if not (pipeline / "model.json").exists():
        run("fit", "--manifold", "sphere:2", "--input", pipeline / "sim.csv", "--out", pipeline / "model.json")
    assert run("reconstruct", "--model", pipeline / "model.json", "--K", 0, "--out", pipeline / "k0.csv") == 0
    model = io.load_model(pipeline / "model.json")
    rows = np.loadtxt(pipeline / "k0.csv", delimiter=",", skiprows=1, usecols=(1, 2, 3, 4))
    assert rows.shape == (100 * 20, 4)
    # rows are written verbatim at 17 significant digits, so they parse back bit for bit
    np.testing.assert_array_equal(rows[:, 1:], np.tile(model.mean_curve, (100, 1)))
    np.testing.assert_array_equal(rows[:20, 0], model.grid)


def _round_trip_error(tmp_path, manifold, n, rank, kmax):
    spec = mf.ManifoldSpec.parse(manifold)
    run("simulate", "--manifold", manifold, "--n", n, "--seed", 3, "--rank", rank, "--out", tmp_path / "s.csv")
    run("fit", "--manifold", manifold, "--input", tmp_path / "s.csv", "--kmax", kmax, "--out", tmp_path / "m.json")
    assert run("reconstruct", "--model", tmp_path / "m.json", "--K", kmax, "--out", tmp_path / "r.csv") == 0
    original = np.stack([s.points for s in io.ingest_trajectories_csv(tmp_path / "s.csv", spec)])
    recon = np.stack([s.points for s in io.ingest_trajectories_csv(tmp_path / "r.csv", spec)])
    return np.max(mf.geodesic_distance(spec, original, recon))


@pytest.mark.parametrize("manifold", ["sphere:2", "so3"])
def test_round_trip_rank_one(tmp_path, manifold):
    assert _round_trip_error(tmp_path, manifold, n=30, rank=1, kmax=1) < 1e-5


@pytest.mark.parametrize("manifold", ["sphere:2", "so3"])
def test_round_trip_full_rank(tmp_path, manifold):
    # n = 10 curves span at most 9 tangent directions at their Frechet mean
    assert _round_trip_error(tmp_path, manifold, n=10, rank=2, kmax=9) < 1e-5


def test_byte_identical_outputs(tmp_path):
    for tag in ("a", "b"):
        run("simulate", "--manifold", "so3", "--n", 20, "--seed", 7, "--out", tmp_path / f"{tag}.csv")
        run("fit", "--manifold", "so3", "--input", tmp_path / f"{tag}.csv", "--kmax", 3, "--out", tmp_path / f"{tag}.json")
        run("reconstruct", "--model", tmp_path / f"{tag}.json", "--K", 2, "--out", tmp_path / f"{tag}.r.csv")
    for suffix in (".csv", ".truth.json", ".json", ".r.csv"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes(), suffix


def test_modes_of_variation(tmp_path):
    run("simulate", "--n", 30, "--seed", 2, "--out", tmp_path / "s.csv")
    run("fit", "--manifold", "sphere:2", "--input", tmp_path / "s.csv", "--kmax", 2, "--out", tmp_path / "m.json")
    assert run("reconstruct", "--model", tmp_path / "m.json", "--mode", 1, "--out", tmp_path / "mode.csv") == 0
    ids = [s.subject_id for s in io.ingest_trajectories_csv(tmp_path / "mode.csv", S2)]
    assert ids == ["mode1_minus", "mode1_plus"]


COUNTS = "id,t,c1,c2,c3\n" + "".join(
    f"{sid},{t},{3 + (t % 4)},{2 + (t % 3) + o},{1 + (t % 2)}\n" for sid, o in (("u", 0), ("v", 4)) for t in range(0, 30, 2))


def test_compositional_pipeline(tmp_path):
    write(tmp_path / "counts.csv", COUNTS)
    assert run("compositional", "--counts", tmp_path / "counts.csv", "--bandwidth", 5, "--grid", 12,
               "--out", tmp_path / "sphere.csv") == 0
    samples = io.ingest_trajectories_csv(tmp_path / "sphere.csv", mf.ManifoldSpec.sphere(2))
    assert len(samples) == 2 and samples[0].points.shape == (12, 3)
    assert np.all(samples[0].points >= 0)
    assert run("fit", "--manifold", "sphere:2", "--input", tmp_path / "sphere.csv", "--kmax", 1,
               "--compositional", "--out", tmp_path / "m.json") == 0
    assert run("reconstruct", "--model", tmp_path / "m.json", "--K", 1, "--out", tmp_path / "r.csv") == 0
    lines = (tmp_path / "r.composition.csv").read_text().splitlines()
    assert lines[0] == "id,t,y1,y2,y3,outside" and len(lines) == 25
    props = np.array([[float(x) for x in line.split(",")[2:5]] for line in lines[1:]])
    np.testing.assert_allclose(props.sum(axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("argv, code, kind", [
    (["fit", "--manifold", "sphere:2", "--input", "{d}/missing.csv", "--out", "{d}/m.json"], 4, "FileNotFoundError"),
    (["fit", "--manifold", "sphere:2", "--input", "{d}/bad.csv", "--out", "{d}/m.json"], 2, "OffManifold"),
    (["fit", "--manifold", "sphere:2", "--input", "{d}/ok.csv", "--kmax", 9, "--out", "{d}/m.json"], 2, "KOutOfRange"),
    (["compositional", "--counts", "{d}/zero.csv", "--bandwidth", 0.1, "--grid", 3, "--out", "{d}/o.csv"], 2,
     "EmptyKernelWindow"),
])
def test_error_lines(tmp_path, capsys, argv, code, kind):
    write(tmp_path / "ok.csv", VALID)
    write(tmp_path / "bad.csv", VALID.replace("a,0.5,0,1,0", "a,0.5,0,2,0"))
    write(tmp_path / "zero.csv", "id,t,c1\nu,0,1\nu,10,1\n")
    assert run(*[str(a).format(d=tmp_path) for a in argv]) == code
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith(f"error kind={kind} message=")


def test_frechet_failure_exit_code(tmp_path, capsys):
    run("simulate", "--n", 20, "--seed", 1, "--out", tmp_path / "s.csv")
    assert run("fit", "--manifold", "sphere:2", "--input", tmp_path / "s.csv", "--max-iter", 1, "--tol", 1e-15,
               "--out", tmp_path / "m.json") == 3
    assert capsys.readouterr().err.startswith("error kind=NoConvergence")
