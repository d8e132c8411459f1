"""
Tests for the command-line front end.
"""
import json
import math

import pandas as pd
import pytest

from app import REFERENCE_PARAMETERS, main, merge_settings, build_parser
from config.settings import config
from core.errors import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK
from models.run import ResultRow

HEADER = "swept_value,w_10,w_01,w_11,c_1,c_2,a_1_10,a_0_11,a_2_11,a_2_00,validity_warning"
GHZ_ARGS = ["--unit", "ghz_linear", "--omega1", "5", "--omega2", "3.75", "--e0", "3.721", "--lambda", "0.2"]


def angular(value):
    return repr(value * (2 * math.pi))


def run_sweep(path, *extra):
    return main(["sweep", *GHZ_ARGS, "--sweep", "omega2=3.8:4.6:10", "--output", str(path), *extra])


def test_reproduce_reference(capsys):
    assert main(["reproduce"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in ("w_10", "w_11", "c_1", "c_2", "non_factorization"):
        assert name in out


def test_sweep_writes_ten_rows(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    assert run_sweep(path) == EXIT_OK
    lines = path.read_text().splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 11
    assert str(path) in capsys.readouterr().out

    frame = pd.read_csv(path)
    assert frame["swept_value"].iloc[0] == pytest.approx(3.8)
    assert frame["swept_value"].iloc[-1] == pytest.approx(4.6)
    # c_2 grows as omega2 approaches E0 from above
    assert frame["c_2"].iloc[0] > frame["c_2"].iloc[-1]


def test_sweep_is_deterministic(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_sweep(first) == EXIT_OK
    assert run_sweep(second) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_unit_invariance(tmp_path):
    ghz, rad = tmp_path / "ghz.csv", tmp_path / "rad.csv"
    assert run_sweep(ghz) == EXIT_OK
    assert main(["sweep", "--unit", "angular", "--omega1", angular(5.0), "--omega2", angular(3.75),
                 "--e0", angular(3.721), "--lambda", angular(0.2),
                 "--sweep", f"omega2={angular(3.8)}:{angular(4.6)}:10", "--output", str(rad)]) == EXIT_OK

    def dimensionless(path):
        return [line.split(",", 1)[1] for line in path.read_text().splitlines()]

    assert dimensionless(ghz) == dimensionless(rad)


def test_sweep_through_initial_resonance(tmp_path):
    out = tmp_path / "omega1.csv"
    assert main(["sweep", "--unit", "angular", "--omega1", "5", "--omega2", "5.5", "--e0", "4",
                 "--lambda", "0.1", "--sweep", "omega1=3:5:3", "--output", str(out)]) == EXIT_OK
    frame = pd.read_csv(out)
    assert frame["swept_value"].tolist() == pytest.approx([3.0, 4.0, 5.0])
    assert frame["w_10"].iloc[1] == pytest.approx((0.1 * (1 / 9.5 - 1 / 8.0)) ** 2, rel=1e-8)


def test_resonance_exits_with_parameter(capsys):
    assert main(["reproduce", "--omega2", "3.721"]) == EXIT_NUMERICAL
    assert "omega2" in capsys.readouterr().err


def test_config_file_and_json(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# reference point\nunit=ghz_linear\nomega1=5\nomega2=3.75\ne0=3.721\nlambda=0.2\nformat=json\n")
    out = tmp_path / "lambda.json"
    assert main(["sweep", "--config", str(conf), "--sweep", "lambda=0.1:0.2:3", "--output", str(out)]) == EXIT_OK
    records = json.loads(out.read_text())
    assert len(records) == 3
    assert list(records[0]) == list(ResultRow.COLUMNS)
    assert isinstance(records[0]["validity_warning"], bool)


def test_flags_override_config_file(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("unit=ghz_linear\nomega1=5\nomega2=3.75\ne0=3.721\nlambda=0.2\n")
    args = build_parser().parse_args(["sweep", "--config", str(conf), "--lambda", "0.1"])
    merged = merge_settings(args)
    assert merged["lambda"] == 0.1
    assert merged["omega1"] == "5"


def test_reference_defaults_only_for_reproduce():
    assert merge_settings(build_parser().parse_args(["reproduce"]))["e0"] == REFERENCE_PARAMETERS["e0"]
    assert "e0" not in merge_settings(build_parser().parse_args(["sweep"]))


@pytest.mark.parametrize("argv", [
    ["sweep", "--omega1", "5", "--omega2", "3.75", "--e0", "3.721", "--lambda", "0.2", "--sweep", "omega2=4:5:3"],
    ["sweep", *GHZ_ARGS, "--sweep", "omega2=3.8:4.6:1"],
    ["sweep", *GHZ_ARGS, "--sweep", "kappa=1:2:3"],
    ["sweep", *GHZ_ARGS],
    ["reproduce", "--cutoff", "1"],
    ["sweep", *GHZ_ARGS, "--sweep", "lambda=0.1:5:3"],
])
def test_configuration_errors(argv, tmp_path):
    assert main([*argv, "--output", str(tmp_path / "x.csv")]) == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    assert main(["reproduce", "--config", str(tmp_path / "absent.conf")]) == EXIT_CONFIG


def test_default_output_location(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(config, "EXPORTS_DIR", str(tmp_path))
    assert main(["sweep", *GHZ_ARGS, "--sweep", "e0=3.5:3.6:2"]) == EXIT_OK
    written = capsys.readouterr().out.strip().splitlines()[-1]
    assert written.startswith(str(tmp_path))
    assert written.endswith(".csv")


def test_oracle_compare(tmp_path):
    out = tmp_path / "oracle.csv"
    assert main(["oracle-compare", "--unit", "angular", "--omega1", "5", "--omega2", "4.4", "--e0", "3",
                 "--lambda", "0.01", "--cutoff", "20", "--output", str(out)]) == EXIT_OK
    frame = pd.read_csv(out)
    assert set(frame["table"]) == {"amplitudes", "spectral"}
    amplitudes = frame[frame["table"] == "amplitudes"]
    assert list(amplitudes["amplitude"]) == ["a_1_10", "a_1_01", "a_0_11", "a_2_11", "a_2_00"]
    assert (amplitudes["rel_err_reference"] < 0.05).all()
    spectral = frame[frame["table"] == "spectral"]
    assert len(spectral) > 0
    assert spectral["ratio"].between(12.0, 20.0).all()


def test_evolve_scan(tmp_path):
    out = tmp_path / "ramp.csv"
    assert main(["evolve", "--unit", "angular", "--omega1", "5", "--omega2", "4.4", "--e0", "3",
                 "--lambda", "0.05", "--cutoff", "8", "--shape", "linear", "--tau-min", "0.001",
                 "--tau-max", "0.01", "--points", "2", "--output", str(out)]) == EXIT_OK
    frame = pd.read_csv(out)
    assert len(frame) == 2
    assert frame["tau_omega1"].tolist() == pytest.approx([0.001, 0.01])
