import csv
import json

import pytest

from freelevy import cli
from freelevy.errors import DomainError
from freelevy.laws import FreeBessel, MarchenkoPastur, TwoPoint


def test_parse_law_cases():
    assert isinstance(cli.parse_law("mp"), MarchenkoPastur)
    fb = cli.parse_law("freebessel:1,2")
    assert isinstance(fb, FreeBessel) and (fb.r, fb.s) == (1.0, 2.0)
    tp = cli.parse_law("TwoPoint:2,0.5")
    assert isinstance(tp, TwoPoint) and tp.w == 0.5
    with pytest.raises(DomainError, match="unknown law"):
        cli.parse_law("gaussian")
    with pytest.raises(DomainError, match="parameters"):
        cli.parse_law("freebessel:1")
    with pytest.raises(DomainError, match="numbers"):
        cli.parse_law("mu:a,b")
    with pytest.raises(DomainError, match=r"1-1/alpha"):
        cli.parse_law("freestable:1.5,0.9")


def test_density_subcommand(tmp_path, capsys):
    code = cli.main(["density", "--law", "mp", "--t", "0.5", "--K", "0.5,2", "--grid", "16",
                     "--out", str(tmp_path)])
    assert code == 0
    rows = list(csv.reader(open(tmp_path / "density.csv")))
    assert rows[0] == ["x", "density"] and len(rows) == 17
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["convolution"] == "boolean" and 0 < summary["mass_on_K"] <= 1
    assert capsys.readouterr().out.strip() == "PASS"


def test_bad_law_exits_with_json_error(tmp_path, capsys):
    code = cli.main(["density", "--law", "freestable:1.5,0.9", "--t", "0.5", "--K", "0.5,2",
                     "--out", str(tmp_path)])
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "DomainError" and "rho" in err["message"]


@pytest.mark.parametrize("kind,csv_name", [("unitary-bm", "unitary_bm.csv"),
                                           ("free-bessel-moments", "moments.csv"),
                                           ("boolean-logcauchy", "distances.csv")])
def test_limit_kinds_pass(tmp_path, kind, csv_name):
    assert cli.main(["limit", kind, "--out", str(tmp_path)]) == 0
    assert (tmp_path / csv_name).exists()
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["passed"] is True and summary["threshold"] == cli.DEFAULT_THRESHOLDS[kind]


def test_lambda_wrap_threshold_flag(tmp_path):
    # an impossible threshold turns the run into a failure with exit code 1
    assert cli.main(["run", "lambda-wrap", "--threshold", "1e-30", "--out", str(tmp_path)]) == 1
    assert json.loads((tmp_path / "summary.json").read_text())["passed"] is False


@pytest.mark.filterwarnings("ignore:.*numerically zero")
def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small run\nn = 40\ntrials = 2\nseed = 9\n")
    out = tmp_path / "o"
    cli.main(["randmat", "--config", str(cfg), "--trials", "3", "--out", str(out)])
    summary = json.loads((out / "summary.json").read_text())
    assert (summary["N"], summary["trials"], summary["seed"]) == (40, 3, 9)
    bad = tmp_path / "bad.cfg"
    bad.write_text("n 40\n")
    assert cli.main(["randmat", "--config", str(bad), "--out", str(out)]) == 2


@pytest.mark.filterwarnings("ignore:.*numerically zero")
def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("FREELEVY_SEED", "123")
    cli.main(["randmat", "--n", "20", "--trials", "2", "--out", str(tmp_path)])
    assert json.loads((tmp_path / "summary.json").read_text())["seed"] == 123


def test_verify_budget_skips_expensive_criteria(tmp_path, capsys):
    code = cli.main(["verify", "--budget", "1", "--only", "4,9,10", "--out", str(tmp_path)])
    report = json.loads((tmp_path / "verify_report.json").read_text())
    assert report["skipped"] == [9] and report["complete"] is False
    assert [r["number"] for r in report["results"]] == [4, 10]
    assert code == (0 if report["all_passed"] else 1)
    assert "SKIP criterion 9" in capsys.readouterr().out
