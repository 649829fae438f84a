import csv
import json

import numpy as np
import pytest

from andermeans.cli import EXIT_DATA, EXIT_INVARIANT, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE, main
from andermeans.errors import InvariantViolation
from andermeans.matrix_io import read_numeric_matrix


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


def _toy_run(toy_file, toy_seed_file, out, *extra):
    return main(
        ["run", "-q", "--data", str(toy_file), "--k", "2", "--init", f"file:{toy_seed_file}", "--out", str(out), *extra]
    )


@pytest.mark.parametrize("solver", ["lloyd", "aa-fixed", "aa-dynamic"])
def test_toy_run_json(tmp_path, toy_file, toy_seed_file, solver):
    out = tmp_path / "report.json"
    assert _toy_run(toy_file, toy_seed_file, out, "--solver", solver, "--format", "json") == EXIT_OK
    (record,) = json.loads(out.read_text())["records"]
    assert record["mse"] == 0.25
    assert record["converged"] is True
    assert record["solver"] == solver


def test_toy_run_csv(tmp_path, toy_file, toy_seed_file):
    out = tmp_path / "report.csv"
    assert _toy_run(toy_file, toy_seed_file, out, "--solver", "lloyd", "--format", "csv", "--trace") == EXIT_OK
    (row,) = list(csv.DictReader(out.open()))
    assert float(row["mse"]) == 0.25
    assert row["converged"] == "true"
    assert row["energy_trace"] == "2.0;1.0"


def test_report_goes_to_stdout(toy_file, toy_seed_file, capsys):
    code = main(["run", "-q", "--data", str(toy_file), "--k", "2", "--init", f"file:{toy_seed_file}"])
    assert code == EXIT_OK
    assert json.loads(capsys.readouterr().out)["records"][0]["mse"] == 0.25


def test_strict_exit_when_not_converged(tmp_path, toy_file, toy_seed_file):
    out = tmp_path / "r.json"
    assert _toy_run(toy_file, toy_seed_file, out, "--max-iters", "1", "--strict") == EXIT_NOT_CONVERGED
    assert json.loads(out.read_text())["records"][0]["converged"] is False
    assert _toy_run(toy_file, toy_seed_file, out, "--max-iters", "1") == EXIT_OK


def test_config_file(tmp_path, toy_file, toy_seed_file):
    config = tmp_path / "andermeans.toml"
    config.write_text("[solver]\nmax_iters = 1\n\n[output]\nstrict = true\nformat = \"csv\"\n")
    out = tmp_path / "r.csv"
    assert _toy_run(toy_file, toy_seed_file, out, "--config", str(config)) == EXIT_NOT_CONVERGED
    assert out.read_text().startswith("format,")


def test_missing_data_file(tmp_path):
    assert main(["run", "-q", "--data", str(tmp_path / "nope.csv"), "--k", "2"]) == EXIT_DATA


def test_ragged_data_file(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3\n")
    assert main(["run", "-q", "--data", str(path), "--k", "1"]) == EXIT_DATA


def test_k_larger_than_n(toy_file):
    assert main(["run", "-q", "--data", str(toy_file), "--k", "9"]) == EXIT_DATA


def test_invariant_violation_has_its_own_code(toy_file, monkeypatch):
    def broken_run(spec, jobs=1):
        raise InvariantViolation("energy rose from 1.0 to 2.0")

    monkeypatch.setattr("andermeans.cli.run", broken_run)
    assert main(["run", "-q", "--data", str(toy_file), "--k", "2"]) == EXIT_INVARIANT
    assert len({EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NOT_CONVERGED, EXIT_INVARIANT}) == 5


def test_usage_errors(toy_file):
    with pytest.raises(SystemExit) as excinfo:
        main(["run", "--k", "2"])
    assert excinfo.value.code == EXIT_USAGE
    assert main(["run", "-q", "--data", str(toy_file), "--k", "2", "--init", "forgy"]) == EXIT_USAGE
    assert main(["run", "-q", "--data", str(toy_file), "--k", "2", "--m0", "40"]) == EXIT_USAGE
    assert main(["run", "-q", "--data", str(toy_file), "--k", "2", "--seeds", "1,2", "--reps", "3"]) == EXIT_USAGE


def test_bench(tmp_path, mixture_file):
    out = tmp_path / "bench.json"
    code = main(
        [
            "bench", "-q", "--data", str(mixture_file), "--k", "4", "--reps", "2",
            "--solver", "lloyd", "--solver", "aa-fixed", "--m0", "0,3", "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["comparison"]["solvers"] == ["lloyd", "aa-fixed@m0=0", "aa-fixed@m0=3"]
    assert payload["comparison"]["seeds"] == [0, 1]
    assert len(payload["records"]) == 6
    by_solver = {}
    for record in payload["records"]:
        by_solver.setdefault(record["solver"], []).append(record["total_iters"])
    assert by_solver["aa-fixed@m0=0"] == by_solver["lloyd"]


def test_bench_needs_two_variants(mixture_file):
    assert main(["bench", "-q", "--data", str(mixture_file), "--k", "2", "--solver", "lloyd"]) == EXIT_USAGE


def test_gen(tmp_path):
    out, means = tmp_path / "g.csv", tmp_path / "means.csv"
    code = main(
        [
            "gen", "-q", "--kind", "grid", "--n", "40", "--d", "2", "--components", "4",
            "--jitter", "0", "--out", str(out), "--means-out", str(means),
        ]
    )
    assert code == EXIT_OK
    points = read_numeric_matrix(out)
    assert points.shape == (40, 2)
    np.testing.assert_array_equal(np.unique(points, axis=0), read_numeric_matrix(means))
