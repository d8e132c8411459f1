"""
Tests for number formatting, run configuration parsing and result export.
"""
import json
import math
import os
import unittest

import numpy as np
import pandas as pd
import pytest

from core.errors import ConfigError
from models.run import TWO_PI, ResultRow, RunConfig, SweepSpec, to_angular
from services.data_export import DataExportService, records_frame
from services.sweep import compute_row, run_sweep
from utils.formatting import comparison_row, format_data_as_table, format_float, relative_deviation

REFERENCE_VALUES = {"unit": "ghz_linear", "omega1": "5", "omega2": "3.75", "e0": "3.721", "lambda": "0.2"}


class TestFormatting(unittest.TestCase):
    """Number and table formatting."""

    def test_format_float(self):
        self.assertEqual(format_float(1.0), "1.000000000e+00")
        self.assertEqual(format_float(-0.00123, digits=3), "-1.23e-03")
        self.assertEqual(format_float(None), "")
        self.assertEqual(format_float(True), "True")
        self.assertEqual(format_float(float("nan")), "nan")
        self.assertEqual(format_float("w_10"), "w_10")

    def test_relative_deviation(self):
        self.assertAlmostEqual(relative_deviation(1.01, 1.0), 0.01)
        self.assertEqual(relative_deviation(0.5, 0.0), 0.5)

    def test_table(self):
        table = format_data_as_table([{"observable": "w_10", "computed": 1.47226e-5},
                                      {"observable": "w_11", "computed": 0.10006}])
        lines = table.splitlines()
        self.assertEqual(len(lines), 4)
        self.assertIn("observable", lines[0])
        self.assertIn("1.47226e-05", lines[2])
        self.assertEqual(format_data_as_table([]), "<no rows>")

    def test_comparison_row(self):
        row = comparison_row("w_10", 1.47226e-5, 1.472e-5, 1e-3)
        self.assertTrue(row["ok"])
        self.assertNotIn("note", row)
        bad = comparison_row("c_2", 2e-3, 1.553e-3, 1e-3, note="off")
        self.assertFalse(bad["ok"])
        self.assertEqual(bad["note"], "off")


class TestRunConfig(unittest.TestCase):
    """Parsing of merged file and flag settings."""

    def test_unit_conversion(self):
        run = RunConfig.from_mapping(REFERENCE_VALUES)
        self.assertEqual(run.quench.omega1, 5.0 * TWO_PI)
        self.assertEqual(run.params.e0, 3.721 * TWO_PI)
        self.assertEqual(run.cutoff, 20)
        angular = RunConfig.from_mapping({**REFERENCE_VALUES, "unit": "angular"})
        self.assertEqual(angular.quench.omega1, 5.0)

    def test_unit_required(self):
        values = dict(REFERENCE_VALUES)
        del values["unit"]
        with self.assertRaises(ConfigError) as ctx:
            RunConfig.from_mapping(values)
        self.assertEqual(ctx.exception.parameter, "unit")

    def test_rejections(self):
        cases = [
            ({"unit": "hz"}, "unit"),
            ({"format": "xml"}, "format"),
            ({"omega1": "five"}, "omega1"),
            ({"cutoff": "1"}, "cutoff"),
            ({"colour": "red"}, "colour"),
            ({"shape": "cubic"}, "shape"),
            ({"e0": "-1"}, "e0"),
        ]
        for override, parameter in cases:
            with self.subTest(override=override):
                with self.assertRaises(ConfigError) as ctx:
                    RunConfig.from_mapping({**REFERENCE_VALUES, **override})
                self.assertEqual(ctx.exception.parameter, parameter)

    def test_ramp_and_tolerances(self):
        run = RunConfig.from_mapping({**REFERENCE_VALUES, "drive": "false", "tau_min": "0.01",
                                      "points": "3", "tol_rtol": "1e-9"})
        self.assertFalse(run.ramp.drive)
        self.assertEqual(run.ramp.tau_min, 0.01)
        self.assertEqual(run.ramp.points, 3)
        self.assertEqual(run.tolerance("tol_rtol", 1.0), 1e-9)
        self.assertEqual(run.tolerance("tol_atol", 1e-13), 1e-13)


class TestSweepSpec(unittest.TestCase):
    """name=start:stop:steps parsing."""

    def test_parse(self):
        spec = SweepSpec.from_string("omega2=3.8:4.6:10")
        self.assertEqual((spec.name, spec.start, spec.stop, spec.steps), ("omega2", 3.8, 4.6, 10))
        np.testing.assert_allclose(spec.user_grid()[[0, -1]], [3.8, 4.6])
        np.testing.assert_allclose(spec.internal_grid("ghz_linear"), spec.user_grid() * TWO_PI)
        np.testing.assert_array_equal(spec.internal_grid("angular"), spec.user_grid())

    def test_malformed(self):
        for text in ("omega2", "omega2=3.8:4.6", "omega2=a:b:c", "omega2=1:2:1", "kappa=1:2:3"):
            with self.subTest(text=text):
                with self.assertRaises(ConfigError):
                    SweepSpec.from_string(text)

    def test_sweep_endpoints_validated(self):
        for sweep in ("lambda=0.1:5:3", "e0=-1:3:3", "omega1=0:5:4"):
            with self.subTest(sweep=sweep):
                with self.assertRaises(ConfigError) as ctx:
                    RunConfig.from_mapping({**REFERENCE_VALUES, "sweep": sweep})
                self.assertEqual(ctx.exception.parameter, "sweep")

    def test_to_angular(self):
        self.assertEqual(to_angular(1.0, "ghz_linear"), 2 * math.pi)
        self.assertEqual(to_angular(1.0, "angular"), 1.0)


def test_sweep_rows_in_grid_order():
    run = RunConfig.from_mapping({**REFERENCE_VALUES, "sweep": "lambda=0.05:0.2:4"})
    rows = run_sweep(run, workers=3)
    assert [row.swept_value for row in rows] == pytest.approx([0.05, 0.1, 0.15, 0.2])
    assert all(b.w_10 > a.w_10 for a, b in zip(rows, rows[1:]))
    single = run_sweep(RunConfig.from_mapping(REFERENCE_VALUES))
    assert len(single) == 1 and single[0].swept_value is None


def test_csv_export_is_stable(tmp_path):
    run = RunConfig.from_mapping(REFERENCE_VALUES)
    frame = DataExportService.frame_from_rows([compute_row(run.params, run.quench, swept_value=1.0)])
    text = DataExportService.to_csv_text(frame)
    assert text == DataExportService.to_csv_text(frame)
    header, row = text.splitlines()
    assert header.split(",") == list(ResultRow.COLUMNS)
    assert row.split(",")[0] == "1.000000000e+00"

    path = DataExportService.save(frame, str(tmp_path / "nested" / "row.csv"))
    assert DataExportService.read_columns(path) == list(ResultRow.COLUMNS)


def test_json_export_nulls():
    frame = records_frame([{"amplitude": "a_1_10", "exact": float("nan"), "ok": np.bool_(True)}])
    records = json.loads(DataExportService.render(frame, "json"))
    assert records == [{"amplitude": "a_1_10", "exact": None, "ok": True}]


def test_default_output_path_depends_on_run():
    a = DataExportService.default_output_path("sweep", "run-a", "csv")
    b = DataExportService.default_output_path("sweep", "run-b", "csv")
    assert a != b
    assert a.endswith(".csv")
    assert isinstance(records_frame([], columns=["x"]), pd.DataFrame)


def test_tagged_frame_stacks_tables():
    frame = DataExportService.tagged_frame({
        "amplitudes": records_frame([{"amplitude": "a_1_10", "exact": 1e-3}]),
        "spectral": records_frame([{"label": "0;00", "ratio": 16.0}, {"label": "0;11", "ratio": 15.9}]),
    })
    assert list(frame.columns) == ["table", "amplitude", "exact", "label", "ratio"]
    assert frame["table"].tolist() == ["amplitudes", "spectral", "spectral"]
    assert frame["ratio"].isna().tolist() == [True, False, False]


def test_runner_arguments():
    import run_tests

    args = run_tests.build_args(["oracle", "--fast", "-k", "cutoff"])
    assert args[0].endswith(os.path.join("tests", "test_oracle.py"))
    assert args[-4:] == ["-m", "not slow", "-k", "cutoff"]
    assert run_tests.build_args([])[0].endswith("tests")
