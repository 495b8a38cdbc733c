import csv

import numpy as np
import pytest

from slpca.cli import main
from slpca.data import load_csv
from slpca.model import predict
from slpca.modelfile import load_model

from conftest import SUITE_SEED


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def report_values(text):
    return dict(line.split("\t", 1) for line in text.strip().splitlines() if "\t" in line)


def read_tsv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh, delimiter="\t"))


@pytest.fixture
def helix_csv(tmp_path, capsys):
    path = tmp_path / "helix.csv"
    assert run(capsys, "simulate", "helix", "--n", 1000, "--sigma-x", 3, "--sigma", 1,
               "--seed", SUITE_SEED, "-o", path)[0] == 0
    return path


@pytest.fixture
def hat_csv(tmp_path, capsys):
    path = tmp_path / "hat.csv"
    assert run(capsys, "simulate", "hat", "--n", 1000, "--sigma", 0.5, "--seed", SUITE_SEED,
               "-o", path)[0] == 0
    return path


def test_simulate_outputs(tmp_path, capsys, helix_csv, hat_csv):
    for path in (helix_csv, hat_csv):
        data = load_csv(path, has_header=True)
        assert (data.n, data.p) == (1000, 3)
        assert data.column_names == ("x", "y", "z")
    code, out = run(capsys, "simulate", "helix", "--seed", 7, "-o", tmp_path / "h7.csv")
    assert code == 0 and "var(x)" in out.out


def test_simulate_usage_errors(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "helix", "--seed", "7"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "hat", "-o", str(tmp_path / "x.csv")])
    assert exc.value.code == 2


def test_simulate_is_byte_identical(tmp_path, capsys):
    for name in ("a.csv", "b.csv"):
        run(capsys, "simulate", "hat", "--seed", 3, "-o", tmp_path / name)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_axes_contiguity_on_helix(capsys, helix_csv, tmp_path):
    code, out = run(capsys, "axes", "-i", helix_csv, "--method", "contiguity", "--k", 3,
                    "-o", tmp_path / "axes.txt")
    assert code == 0
    first = out.out.splitlines()[1].split("\t")
    assert first[0] == "Proj_1" and abs(float(first[1])) > 0.99
    assert (tmp_path / "axes.txt").read_text().startswith("# slpca axes source=contiguity")


def test_axes_pca_on_diagonal_data(capsys, tmp_path):
    n = 400
    t = 2 * np.pi * np.arange(n) / n
    y = np.column_stack([3 * np.cos(t), 2 * np.cos(2 * t), np.cos(3 * t)])
    np.savetxt(tmp_path / "d.csv", y, delimiter=",")
    code, _ = run(capsys, "axes", "-i", tmp_path / "d.csv", "--method", "pca",
                  "-o", tmp_path / "a.txt")
    assert code == 0
    np.testing.assert_allclose(np.abs(np.loadtxt(tmp_path / "a.txt")), np.eye(3), atol=1e-10)


def test_axes_k_too_large(capsys, helix_csv):
    code, out = run(capsys, "axes", "-i", helix_csv, "--method", "contiguity", "--k", 1000)
    assert code == 2 and "k must be" in out.err


def test_axes_singular_local_covariance(capsys, tmp_path):
    # all points on a line: the local covariance has no spread off the line
    x = np.arange(20.0)
    np.savetxt(tmp_path / "line.csv", np.column_stack([x, 2 * x]), delimiter=",")
    code, out = run(capsys, "axes", "-i", tmp_path / "line.csv", "--method", "contiguity")
    assert code == 1 and "increase k" in out.err


def test_fit_helix_spline(capsys, helix_csv, tmp_path):
    code, out = run(capsys, "fit", "-i", helix_csv, "--method", "contiguity", "--k", 3,
                    "--d", 1, "--kind", "spline", "--m", 12, "--model-out", tmp_path / "m.json")
    assert code == 0
    values = report_values(out.out)
    assert 0.85 <= float(values["sigma2"]) <= 1.10
    for key in ("log_likelihood", "bic", "gamma", "projected_variance_1"):
        assert key in values


def test_fit_hat_linear(capsys, hat_csv, tmp_path):
    code, out = run(capsys, "fit", "-i", hat_csv, "--method", "contiguity", "--k", 2,
                    "--d", 2, "--kind", "linear", "--model-out", tmp_path / "m.json")
    assert code == 0
    assert 1.0 <= float(report_values(out.out)["sigma2"]) <= 1.45


def test_fit_is_reproducible(capsys, hat_csv, tmp_path):
    for name in ("a.json", "b.json"):
        run(capsys, "fit", "-i", hat_csv, "--method", "contiguity", "--k", 2, "--d", 2,
            "--m", 7, "--model-out", tmp_path / name)
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_fit_requires_m_for_splines(capsys, hat_csv, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["fit", "-i", str(hat_csv), "--d", "1", "--model-out", str(tmp_path / "m.json")])
    assert exc.value.code == 2


def test_fit_with_axes_file(capsys, helix_csv, tmp_path):
    run(capsys, "axes", "-i", helix_csv, "--method", "contiguity", "-o", tmp_path / "a.txt")
    code, out = run(capsys, "fit", "-i", helix_csv, "--axes-file", tmp_path / "a.txt", "--d", 1,
                    "--m", 10, "--model-out", tmp_path / "m.json")
    assert code == 0 and report_values(out.out)["axes_source"] == "contiguity"


def test_refit_from_sampled_data(capsys, helix_csv, tmp_path):
    run(capsys, "fit", "-i", helix_csv, "--method", "contiguity", "--d", 1, "--m", 12,
        "--model-out", tmp_path / "gen.json")
    code, _ = run(capsys, "sample", "--model", tmp_path / "gen.json", "--n", 1000, "--seed", 5,
                  "-o", tmp_path / "s.csv")
    assert code == 0
    code, out = run(capsys, "fit", "-i", tmp_path / "s.csv", "--method", "contiguity", "--d", 1,
                    "--m", 12, "--model-out", tmp_path / "re.json")
    sigma2 = load_model(tmp_path / "gen.json").sigma2
    assert abs(float(report_values(out.out)["sigma2"]) - sigma2) <= 0.15 * sigma2


def test_sample_requires_seed(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--model", "m.json", "--n", "5", "-o", str(tmp_path / "o.csv")])
    assert exc.value.code == 2


def test_select_hat(capsys, hat_csv, tmp_path):
    code, out = run(capsys, "select", "-i", hat_csv, "--method", "contiguity", "--k", 2,
                    "--d-max", 2, "--m-list", "6-9", "--report", tmp_path / "r.tsv",
                    "--model-out", tmp_path / "best.json")
    assert code == 0
    rows = read_tsv(tmp_path / "r.tsv")
    assert len(rows) == 10
    chosen = [r for r in rows if r["selected"] == "1"]
    assert len(chosen) == 1 and chosen[0]["d"] == "2"
    assert load_model(tmp_path / "best.json").d == 2


def test_select_single_candidate(capsys, hat_csv, tmp_path):
    code, _ = run(capsys, "select", "-i", hat_csv, "--d-max", 1, "--kinds", "linear",
                  "--report", tmp_path / "r.tsv", "--model-out", tmp_path / "b.json")
    assert code == 0
    rows = read_tsv(tmp_path / "r.tsv")
    assert len(rows) == 1 and rows[0]["selected"] == "1"


def test_select_helix_spline_grid(capsys, helix_csv, tmp_path):
    code, out = run(capsys, "select", "-i", helix_csv, "--method", "contiguity", "--d-max", 1,
                    "--kinds", "spline", "--m-list", "9-14", "--report", tmp_path / "r.tsv")
    assert code == 0
    rows = read_tsv(tmp_path / "r.tsv")
    best = min(rows, key=lambda r: float(r["bic"]))
    assert best["selected"] == "1"
    assert [int(r["m"]) for r in rows] == list(range(9, 15))


def test_select_all_candidates_fail(capsys, tmp_path):
    rng = np.random.default_rng(0)
    np.savetxt(tmp_path / "small.csv", rng.normal(size=(12, 3)), delimiter=",")
    code, out = run(capsys, "select", "-i", tmp_path / "small.csv", "--d-max", 1, "--kinds",
                    "spline", "--m-list", "20", "--report", tmp_path / "r.tsv")
    assert code == 1 and "every candidate" in out.err


def test_predict_training_identity(capsys, helix_csv, tmp_path):
    _, out = run(capsys, "fit", "-i", helix_csv, "--method", "contiguity", "--d", 1, "--m", 11,
                 "--model-out", tmp_path / "m.json")
    sigma2 = float(report_values(out.out)["sigma2"])
    code, out = run(capsys, "predict", "--model", tmp_path / "m.json", "-i", helix_csv,
                    "-o", tmp_path / "p.csv")
    assert code == 0
    msr = float(report_values(out.out)["mean_squared_residual"])
    assert msr == pytest.approx(2 * sigma2, rel=1e-9)
    pred = load_csv(tmp_path / "p.csv", has_header=True)
    assert pred.column_names == ("hat_x", "hat_y", "hat_z", "residual_norm")


def test_predict_on_manifold_points(capsys, helix_csv, tmp_path):
    run(capsys, "fit", "-i", helix_csv, "--d", 1, "--m", 10, "--model-out", tmp_path / "m.json")
    run(capsys, "predict", "--model", tmp_path / "m.json", "-i", helix_csv, "-o",
        tmp_path / "p.csv")
    recon = load_csv(tmp_path / "p.csv", has_header=True).values[:, :3]
    np.savetxt(tmp_path / "on.csv", recon, delimiter=",")
    run(capsys, "predict", "--model", tmp_path / "m.json", "-i", tmp_path / "on.csv",
        "-o", tmp_path / "p2.csv")
    assert load_csv(tmp_path / "p2.csv", has_header=True).values[:, 3].max() < 1e-8


def test_predict_wrong_width(capsys, helix_csv, tmp_path):
    run(capsys, "fit", "-i", helix_csv, "--d", 1, "--kind", "linear",
        "--model-out", tmp_path / "m.json")
    np.savetxt(tmp_path / "w.csv", np.ones((3, 2)), delimiter=",")
    code, _ = run(capsys, "predict", "--model", tmp_path / "m.json", "-i", tmp_path / "w.csv",
                  "-o", tmp_path / "p.csv")
    assert code == 2


def test_curves(capsys, hat_csv, tmp_path):
    run(capsys, "fit", "-i", hat_csv, "--method", "contiguity", "--k", 2, "--d", 2, "--m", 7,
        "--model-out", tmp_path / "m.json")
    code, out = run(capsys, "curves", "--model", tmp_path / "m.json", "--grid", 11,
                    "-o", tmp_path / "c.tsv")
    assert code == 0
    rows = read_tsv(tmp_path / "c.tsv")
    assert sorted({r["axis"] for r in rows}) == ["1", "2"] and len(rows) == 22
    model = load_model(tmp_path / "m.json")
    intercept = np.array([float(v) for v in out.out.split("\t")[1:]])
    a, b = rows[3], rows[11 + 7]
    point = np.array([float(a["t"]), float(b["t"])])
    total = intercept + float(a["component_1"]) + float(b["component_1"])
    assert total == pytest.approx(predict(model.regression, point)[0], abs=1e-9)

    code, _ = run(capsys, "curves", "--model", tmp_path / "m.json", "--grid", 1,
                  "-o", tmp_path / "c1.tsv")
    rows = read_tsv(tmp_path / "c1.tsv")
    assert len(rows) == 2
    lo, hi = model.regression.bases[0].domain
    assert float(rows[0]["t"]) == pytest.approx(0.5 * (lo + hi))


def test_curves_reject_linear_model(capsys, hat_csv, tmp_path):
    run(capsys, "fit", "-i", hat_csv, "--d", 2, "--kind", "linear",
        "--model-out", tmp_path / "m.json")
    code, out = run(capsys, "curves", "--model", tmp_path / "m.json", "-o", tmp_path / "c.tsv")
    assert code == 2 and "linear" in out.err
