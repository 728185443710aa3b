import json

import numpy as np
import pytest

from src import __version__
from src.components.data_ingestion import write_csv
from src.models.var_types import TimeSeriesDataset
from src.pipeline.cli import build_parser, cli_main


@pytest.fixture
def data_csv(tmp_path, make_exog_dataset):
    ds = make_exog_dataset(7, T=150)
    renamed = TimeSeriesDataset(ds.observations, ("a", "b", "c"), ds.roles)
    return write_csv(renamed, str(tmp_path / "d.csv"))


@pytest.fixture
def future_csv(write_text):
    return write_text("future.csv", "c\n0.5\n-0.25\n1.0\n")


def _run_json(tmp_path, argv, name="report.json"):
    out_json = str(tmp_path / name)
    code = cli_main(argv + ["--out", str(tmp_path / "report.txt"), "--out-json", out_json])
    assert code == 0
    with open(out_json, "rb") as f:
        return f.read()


def test_select_example(data_csv, tmp_path):
    argv = ["select", "--input", data_csv, "--dependent", "a", "--dependent", "b", "--criterion", "bic",
            "--method", "ga", "--p-max", "6", "--seed", "42"]
    document = json.loads(_run_json(tmp_path, argv))
    assert document["kind"] == "selection"
    assert document["run_config"]["seed"] == 42
    assert document["run_config"]["dependent"] == ["a", "b"]
    assert document["payload"]["method"] == "ga"
    assert document["payload"]["best_config"]["independent"] == ["c"]
    assert (tmp_path / "report.txt").read_text().startswith(f"varselect {__version__} selection report")


def test_human_report_goes_to_stdout(data_csv, capsysbinary):
    assert cli_main(["fit", "--input", data_csv, "--independent", "c", "--p", "2", "--q", "1"]) == 0
    out = capsysbinary.readouterr().out.decode()
    assert out.startswith(f"varselect {__version__} fit report")
    assert "B_1" in out


def test_usage_errors_exit_1(data_csv, capsys):
    assert cli_main(["fit"]) == 1
    assert "--input" in capsys.readouterr().err
    assert cli_main(["fit", "--input", data_csv, "--bogus"]) == 1
    assert cli_main(["select", "--input", data_csv, "--method", "annealing"]) == 1
    assert cli_main(["compare", "--input", data_csv, "--method", "exhaustive"]) == 1
    assert cli_main(["fit", "--input", data_csv, "--p", "0"]) == 1
    assert cli_main([]) == 1


def test_help_and_version_exit_0(capsys):
    assert cli_main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out
    assert cli_main(["select", "--help"]) == 0


def test_data_errors_exit_2(write_text, data_csv, tmp_path, capsys):
    bad = write_text("bad.csv", "t1,t2\n1,10\nabc,20\n")
    assert cli_main(["fit", "--input", bad]) == 2
    assert "abc" in capsys.readouterr().err
    assert cli_main(["fit", "--input", str(tmp_path / "absent.csv")]) == 2
    assert cli_main(["fit", "--input", data_csv, "--dependent", "zzz"]) == 2
    assert cli_main(["fit", "--input", data_csv, "--p", "500"]) == 2
    assert cli_main(["select", "--input", data_csv, "--p-max", "8", "--budget", "3"]) == 2


def test_forecast_needs_future_values(data_csv, future_csv, tmp_path):
    argv = ["forecast", "--input", data_csv, "--independent", "c", "--p", "2", "--q", "1", "--horizon", "3"]
    assert cli_main(argv) == 2
    document = json.loads(_run_json(tmp_path, argv + ["--future-z", future_csv]))
    assert document["kind"] == "forecast"
    assert np.asarray(document["payload"]["predictions"]).shape == (3, 2)
    assert document["payload"]["names"] == ["a", "b"]


def test_simulate_writes_dataset(tmp_path):
    out_csv = tmp_path / "sim" / "data.csv"
    argv = ["simulate", "--out-csv", str(out_csv), "--n", "2", "--n-exog", "1", "--true-p", "2", "--true-q", "1",
            "--T", "120", "--seed", "5"]
    document = json.loads(_run_json(tmp_path, argv))
    assert document["payload"]["T"] == 120
    assert document["payload"]["seed"] == 5
    assert document["payload"]["spectral_radius"] <= 0.8 + 1e-6
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "y1,y2,z1"
    assert len(lines) == 121
    assert cli_main(["simulate", "--out-csv", str(out_csv), "--true-q", "1", "--n-exog", "0"]) == 1


def test_warm_start_compare_has_zero_gap(data_csv, tmp_path):
    argv = ["compare", "--input", data_csv, "--independent", "c", "--p", "1", "--q", "1",
            "--budget", "200", "--warm-start"]
    payload = json.loads(_run_json(tmp_path, argv))["payload"]
    assert payload["gap"] == pytest.approx(0.0, abs=1e-9)
    assert payload["method"] == "ga"


def test_budget_flags_override_config(data_csv, tmp_path):
    argv = ["select", "--input", data_csv, "--independent", "c", "--method", "tabu", "--p-max", "5",
            "--q-max", "2", "--budget", "7", "--stagnation", "50"]
    document = json.loads(_run_json(tmp_path, argv))
    assert document["run_config"]["max_evaluations"] == 7
    assert document["run_config"]["stagnation_limit"] == 50
    assert document["run_config"]["method_params"]["tenure"] == 7
    assert document["payload"]["evaluations_used"] <= 7


COMMANDS = {
    "fit": ["fit", "--independent", "c", "--p", "2", "--q", "1", "--criterion", "hqc"],
    "select": ["select", "--independent", "c", "--method", "hybrid", "--p-max", "4", "--q-max", "2",
               "--search-partition", "--budget", "40"],
    "search-coeffs": ["search-coeffs", "--independent", "c", "--p", "1", "--q", "1", "--method", "scatter",
                      "--budget", "150"],
    "compare": ["compare", "--independent", "c", "--p", "1", "--method", "grasp", "--budget", "150"],
    "forecast": ["forecast", "--independent", "c", "--p", "2", "--q", "1", "--horizon", "3"],
}


@pytest.mark.parametrize("command", sorted(COMMANDS))
def test_machine_reports_are_byte_identical(command, data_csv, future_csv, tmp_path):
    argv = COMMANDS[command][:1] + ["--input", data_csv] + COMMANDS[command][1:] + ["--seed", "11"]
    if command == "forecast":
        argv += ["--future-z", future_csv]
    reports = [_run_json(tmp_path, argv + ["--workers", str(w)], f"r{i}_{w}.json")
               if command not in ("fit", "forecast") else _run_json(tmp_path, argv, f"r{i}_{w}.json")
               for i, w in enumerate((1, 1, 4, 8))]
    assert all(r == reports[0] for r in reports[1:])


def test_simulate_is_byte_identical(tmp_path):
    outputs = []
    for i in range(2):
        argv = ["simulate", "--out-csv", str(tmp_path / f"sim{i}.csv"), "--n", "3", "--T", "80", "--seed", "9"]
        outputs.append((_run_json(tmp_path, argv, f"sim{i}.json"), (tmp_path / f"sim{i}.csv").read_bytes()))
    assert outputs[0] == outputs[1]


def test_parser_lists_all_subcommands():
    help_text = build_parser().format_help()
    for command in ("fit", "select", "search-coeffs", "compare", "simulate", "forecast"):
        assert command in help_text


def test_unexpected_failures_exit_2(data_csv, monkeypatch):
    from src.components import config_search, ols_estimator

    def broken(*args, **kwargs):
        raise np.linalg.LinAlgError("factorization failed")

    monkeypatch.setattr(ols_estimator, "solve_least_squares", broken)
    assert cli_main(["fit", "--input", data_csv, "--independent", "c", "--p", "1"]) == 2
    monkeypatch.setattr(config_search, "parallel_evaluate", broken)
    assert cli_main(["select", "--input", data_csv, "--independent", "c", "--method", "tabu",
                     "--p-max", "3", "--budget", "5"]) == 2
