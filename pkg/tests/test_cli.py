import json
import math
import subprocess
import sys

import numpy as np
import pytest

from skellam_fields import PmfTable
from skellam_fields.cli import main, parse_config_text
from skellam_fields.errors import ValidationError


def run_cli(*args, capsys=None):
    code = main(list(args))
    return code


def test_parse_config_text():
    raw = parse_config_text("model = SRF\nlambda1=2.0  # rate\n\n# comment\nn_min = -3\n")
    assert raw == {"model": "SRF", "lambda1": "2.0", "n_min": "-3"}
    with pytest.raises(ValidationError):
        parse_config_text("just a line\n")


def test_pmf_csv(tmp_path, capsys):
    out = tmp_path / "pmf.csv"
    code = main(["pmf", "--set", "model=SRF", "--set", "lambda1=2", "--set", "lambda2=1",
                 "--set", "s=1", "--set", "t=1", "--set", "n_min=-10", "--set", "n_max=10",
                 "--output", str(out)])
    assert code == 0
    text = out.read_text()
    lines = text.strip().split("\n")
    assert lines[0] == "n,prob"
    assert len(lines) == 22
    table = PmfTable.from_csv(text)
    assert 0.0 < float(table.probs.sum()) < 1.0
    assert table.tail_mass > 0.0


def test_pmf_zero_area_point_mass(tmp_path):
    out = tmp_path / "pmf.csv"
    code = main(["pmf", "--set", "model=SRF", "--set", "lambda1=2", "--set", "lambda2=1",
                 "--set", "s=0", "--set", "t=1", "--output", str(out)])
    assert code == 0
    table = PmfTable.from_csv(out.read_text())
    assert table.prob(0) == 1.0


def test_pmf_round_trip_json_csv(tmp_path):
    args = ["pmf", "--set", "model=FSRF2", "--set", "lambda1=1", "--set", "lambda2=0.5",
            "--set", "alpha=0.7", "--set", "s=1", "--set", "t=1",
            "--set", "n_min=-6", "--set", "n_max=6"]
    csv_path = tmp_path / "t.csv"
    json_path = tmp_path / "t.json"
    assert main(args + ["--output", str(csv_path)]) == 0
    assert main(args + ["--output", str(json_path), "--format", "json"]) == 0
    a = PmfTable.from_csv(csv_path.read_text())
    b = PmfTable.from_json(json_path.read_text())
    assert np.allclose(a.probs, b.probs, rtol=0, atol=1e-15)
    assert abs(a.tail_mass - b.tail_mass) <= 1e-15


def test_pmf_fractional_wide_window(tmp_path):
    # far-tail entries sit at the series noise floor; the clamp keeps the
    # table valid
    out = tmp_path / "t.csv"
    code = main(["pmf", "--set", "model=FSRF1", "--set", "lambda1=1",
                 "--set", "lambda2=0.5", "--set", "alpha=0.7", "--set", "beta=0.7",
                 "--set", "s=1", "--set", "t=1", "--set", "n_min=-12",
                 "--set", "n_max=12", "--output", str(out)])
    assert code == 0
    table = PmfTable.from_csv(out.read_text())
    assert table.tail_mass < 1e-4


def test_invalid_rate_names_field(capsys):
    code = main(["pmf", "--set", "model=SRF", "--set", "lambda1=2", "--set", "lambda2=0",
                 "--set", "s=1", "--set", "t=1"])
    assert code == 2
    err = capsys.readouterr().err
    assert "lambda2" in err


def test_unknown_key_rejected(capsys):
    code = main(["pmf", "--set", "model=SRF", "--set", "lambda1=2", "--set", "lambda2=1",
                 "--set", "s=1", "--set", "t=1", "--set", "bogus_key=3"])
    assert code == 2
    assert "bogus_key" in capsys.readouterr().err


def test_sample_reproducible(tmp_path):
    args = ["sample", "--set", "model=FSRF1", "--set", "lambda1=1", "--set", "lambda2=0.5",
            "--set", "alpha=0.7", "--set", "beta=0.7", "--set", "s=1", "--set", "t=1",
            "--set", "replicates=200", "--seed", "42"]
    f1, f2 = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(args + ["--output", str(f1)]) == 0
    assert main(args + ["--output", str(f2)]) == 0
    assert f1.read_bytes() == f2.read_bytes()
    assert len(f1.read_text().strip().split("\n")) == 200


def test_sample_zero_replicates_rejected(capsys):
    code = main(["sample", "--set", "model=SRF", "--set", "lambda1=1", "--set", "lambda2=1",
                 "--set", "s=1", "--set", "t=1", "--set", "replicates=0"])
    assert code == 2
    assert "replicates" in capsys.readouterr().err


def test_fsrf1_unit_orders_matches_srf(tmp_path):
    common = ["--set", "lambda1=2", "--set", "lambda2=1", "--set", "s=1", "--set", "t=1",
              "--set", "replicates=20000", "--seed", "7"]
    f_frak = tmp_path / "frak.txt"
    f_srf = tmp_path / "srf.txt"
    assert main(["sample", "--set", "model=FSRF1", "--set", "alpha=1", "--set", "beta=1",
                 *common, "--output", str(f_frak)]) == 0
    assert main(["sample", "--set", "model=SRF", *common, "--output", str(f_srf)]) == 0
    a = np.array([float(v) for v in f_frak.read_text().split()])
    b = np.array([float(v) for v in f_srf.read_text().split()])
    from skellam_fields import empirical_pmf, tv_distance

    tv = tv_distance(empirical_pmf(a, -15, 15), empirical_pmf(b, -15, 15))
    assert tv < 0.05


def test_moments_json(capsys):
    code = main(["moments", "--set", "model=FSRF2", "--set", "lambda1=2",
                 "--set", "lambda2=1", "--set", "alpha=0.5", "--set", "s=1", "--set", "t=1",
                 "--format", "json"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["mean"] == pytest.approx(2.0 / math.sqrt(math.pi), abs=1e-12)


def test_cf_command(capsys):
    code = main(["cf", "--set", "model=INTEGRAL", "--set", "lambda=1",
                 "--set", "s=1", "--set", "t=1", "--set", "xi=0,1", "--format", "json"])
    assert code == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows[0] == {"xi": 0.0, "re": 1.0, "im": 0.0}
    assert rows[1]["re"] == pytest.approx(0.92039561879573, rel=1e-10)


def test_config_file_with_overrides(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("model = SRF\nlambda1 = 2.0\nlambda2 = 1.0\ns = 1\nt = 1\n"
                   "n_min = -2\nn_max = 2\n")
    code = main(["pmf", "--config", str(cfg), "--set", "n_max=3"])
    assert code == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert len(lines) == 1 + 6  # header + n in [-2, 3]


def test_converge_command(capsys):
    code = main(["converge", "--set", "model=SRF", "--set", "lambda1=2",
                 "--set", "lambda2=1", "--set", "s=1", "--set", "t=1",
                 "--set", "k_values=8,16", "--set", "replicates=20000", "--seed", "3"])
    assert code == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "k,tv,threshold,noise_floor,pass"
    assert len(lines) == 3


def test_verify_unknown_suite(capsys):
    code = main(["verify", "--suite", "nope"])
    assert code == 2
    err = capsys.readouterr().err
    assert "srf-oracle" in err and "theorem31" in err


def test_verify_fast_suite(tmp_path, capsys):
    report = tmp_path / "report.json"
    code = main(["verify", "--suite", "srf-oracle", "--output", str(report)])
    assert code == 0
    data = json.loads(report.read_text())
    assert data[0]["suite"] == "srf-oracle"
    assert data[0]["pass"] is True
    out = capsys.readouterr().out
    assert "[pass]" in out


def test_cli_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "skellam_fields.cli", "pmf",
                           "--set", "model=SRF", "--set", "lambda1=1",
                           "--set", "lambda2=1", "--set", "s=1", "--set", "t=1",
                           "--set", "n_min=0", "--set", "n_max=0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("n,prob\n")
