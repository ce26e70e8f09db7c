import json

import numpy as np
import pytest

from concomitant import Dataset, __version__, lambda_max, load_csv
from concomitant.cli import main
from concomitant.data import save_csv


def _lines(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


@pytest.fixture(scope="module")
def gen_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("gen")
    rc = main(["gen", "--n", "30", "--p", "50", "--rho", "0.6", "--snr", "5",
               "--s", "0.9", "--seed", "1", "--out", str(out)])
    assert rc == 0
    return out


def test_gen_writes_data_and_truth(gen_dir):
    ds = load_csv(gen_dir / "data.csv")
    assert (ds.n, ds.p) == (30, 50)
    truth = json.loads((gen_dir / "truth.json").read_text())
    assert len(truth["S_star"]) == 5 and truth["spec"]["seed"] == 1


def test_solve_above_lambda_max(gen_dir, tmp_path):
    ds = load_csv(gen_dir / "data.csv")
    lam = 1.01 * lambda_max(ds, ds.default_sigma0())
    out = tmp_path / "s.jsonl"
    rc = main(["solve", "--data", str(gen_dir / "data.csv"), "--lambda",
               repr(lam), "--out", str(out)])
    meta, rec = _lines(out)
    assert rc == 0 and rec["support_size"] == 0 and rec["converged"]
    assert meta["record"] == "metadata" and meta["version"] == __version__
    assert meta["config"]["sigma0"] == pytest.approx(ds.default_sigma0())


def test_path_has_T_decreasing_records(gen_dir, tmp_path):
    out = tmp_path / "p.jsonl"
    rc = main(["path", "--data", str(gen_dir / "data.csv"), "--T", "12",
               "--delta", "1.5", "--screening", "gap++", "--out", str(out)])
    recs = _lines(out)
    fits = [r for r in recs if r["record"] == "fit"]
    assert rc == 0 and len(fits) == 12
    lams = [r["lambda"] for r in fits]
    assert all(a > b for a, b in zip(lams, lams[1:]))
    assert recs[0]["grid"] == pytest.approx(lams)


def test_cv_record(gen_dir, tmp_path):
    out = tmp_path / "c.jsonl"
    rc = main(["cv", "--data", str(gen_dir / "data.csv"), "--method", "sc",
               "--T", "10", "--out", str(out)])
    meta, rec = _lines(out)
    assert rc == 0 and rec["method"] == "SC_CV" and rec["sigma_hat"] > 0
    assert meta["config"]["folds"] == 5


def test_sigma_bench_records(tmp_path):
    out = tmp_path / "b.jsonl"
    rc = main(["sigma-bench", "--n", "30", "--p", "40", "--reps", "2",
               "--methods", "OR,L_U,D2", "--jobs", "1", "--out", str(out)])
    meta, *recs = _lines(out)
    assert rc == 0 and len(recs) == 6
    assert {r["method"] for r in recs} == {"OR", "L_U", "D2"}
    fields = {"method", "n", "p", "rho", "snr", "s", "seed", "sigma_hat",
              "sigma_star", "support_size", "lambda", "wall_time_ms",
              "converged", "gap"}
    assert all(fields <= set(r) for r in recs)
    assert "jobs" not in meta["config"]


def test_screen_bench_records(gen_dir, tmp_path):
    out = tmp_path / "sb.jsonl"
    rc = main(["screen-bench", "--data", str(gen_dir / "data.csv"),
               "--eps-list", "1e-4", "--modes", "none,gap", "--T", "5",
               "--out", str(out)])
    meta, *recs = _lines(out)
    assert rc == 0 and [r["mode"] for r in recs] == ["none", "gap"]
    assert all(len(r["screened_fraction"]) == 5 for r in recs)


def test_missing_file_is_input_error(tmp_path):
    out = tmp_path / "e.jsonl"
    rc = main(["solve", "--data", str(tmp_path / "nope.csv"), "--lambda",
               "0.1", "--out", str(out)])
    assert rc == 1 and _lines(out)[-1]["record"] == "error"


@pytest.mark.parametrize("argv", [
    ["solve", "--data", "x.csv", "--lambda", "-1"],
    ["path", "--data", "x.csv", "--T", "0"],
    ["cv", "--data", "x.csv", "--method", "ridge"],
    ["sigma-bench", "--methods", "OR,XX"],
    ["nonsense"],
])
def test_bad_flags_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 1


def test_degenerate_fit_exits_2(tmp_path):
    rng = np.random.default_rng(4)
    X, y = rng.standard_normal((10, 60)), rng.standard_normal(10)
    data = tmp_path / "d.csv"
    save_csv(Dataset(X, y), data)
    out = tmp_path / "e.jsonl"
    rc = main(["cv", "--data", str(data), "--method", "lasso", "--folds",
               "2", "--delta", "6", "--T", "30", "--out", str(out)])
    rec = _lines(out)[-1]
    assert rc == 2 and rec["kind"] == "degeneracy"
