import json

import numpy as np
import pytest

from boxdet.cli import format_rows_csv, main, parse_box, read_matrix
from boxdet.cli import InputError
from boxdet.chart import render_chart
from boxdet.experiment import ExperimentConfig, run_experiment

EX1_TEXT = "2 -1\n0 1\n"


@pytest.fixture
def ex1(tmp_path):
    path = tmp_path / "ex1.txt"
    path.write_text(EX1_TEXT)
    return str(path)


@pytest.fixture
def y_zero(tmp_path):
    path = tmp_path / "y.txt"
    path.write_text("0\n0\n")
    return str(path)


def _config_file(tmp_path, **overrides):
    doc = {
        "n": 2,
        "box": {"lower": 0, "upper": 3},
        "sigma_grid": [0.2, 0.4],
        "num_matrices": 2,
        "trials_per_matrix": 1000,
        "seed": 3,
        "integrator": {"method": "qmc", "samples": 1024},
        "compute_exact_br": True,
    }
    doc.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestFileParsing:
    def test_read_matrix(self, ex1):
        np.testing.assert_array_equal(
            read_matrix(ex1), np.array([[2.0, -1.0], [0.0, 1.0]])
        )

    def test_malformed_line_is_named(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 2\n3 oops\n")
        with pytest.raises(InputError, match="line 2"):
            read_matrix(str(path))

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "ragged.txt"
        path.write_text("1 2\n3\n")
        with pytest.raises(InputError, match="line 2"):
            read_matrix(str(path))

    def test_parse_box(self):
        box = parse_box("0..3", 2)
        assert box.num_points() == 16
        box = parse_box("0..1,-2..2", 2)
        assert list(box.lower) == [0, -2]
        with pytest.raises(InputError):
            parse_box("3..0", 1)
        with pytest.raises(InputError):
            parse_box("0..3,0..3", 3)
        with pytest.raises(InputError):
            parse_box("abc", 1)


class TestDetect:
    def test_noiseless_both_modes(self, ex1, y_zero, capsys):
        assert main(["detect", ex1, y_zero, "--box", "0..3", "--mode", "both"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out == ["BR: 0 0", "BB: 0 0"]

    def test_single_mode_prints_bare_vector(self, ex1, y_zero, capsys):
        assert main(["detect", ex1, y_zero, "--box", "0..3", "--mode", "rounding"]) == 0
        assert capsys.readouterr().out.strip() == "0 0"

    def test_bils_mode(self, ex1, y_zero, capsys):
        assert main(["detect", ex1, y_zero, "--box", "0..3", "--mode", "bils"]) == 0
        assert capsys.readouterr().out.strip() == "0 0"

    def test_clamping_instance(self, ex1, tmp_path, capsys):
        # ytilde = (-1.2, -0.4) with Q1 = I: rounding clamps to the box,
        # Babai rounds c2 = -0.4 to 0 then c1 = -0.6/2 to 0
        y = tmp_path / "yc.txt"
        y.write_text("-1.2\n-0.4\n")
        assert main(["detect", ex1, str(y), "--box", "0..3", "--mode", "both"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "BR: 0 0"
        assert out[1].startswith("BB: ")

    def test_malformed_matrix_exits_2(self, tmp_path, y_zero, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("2 -1\nzz 1\n")
        assert main(["detect", str(bad), y_zero, "--box", "0..3"]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_dimension_mismatch_exits_2(self, ex1, tmp_path):
        y = tmp_path / "y3.txt"
        y.write_text("1\n2\n3\n")
        assert main(["detect", ex1, str(y), "--box", "0..3"]) == 2

    def test_missing_file_exits_2(self, y_zero):
        assert main(["detect", "/nonexistent.txt", y_zero, "--box", "0..3"]) == 2

    def test_bils_guard_exits_3(self, tmp_path, capsys):
        a = tmp_path / "a3.txt"
        a.write_text("1 0 0\n0 1 0\n0 0 1\n")
        y = tmp_path / "y3.txt"
        y.write_text("0\n0\n0\n")
        code = main(["detect", str(a), str(y), "--box", "0..100", "--mode", "bils"])
        assert code == 3


class TestExactSp:
    def test_example_output(self, ex1, capsys):
        code = main(["exact-sp", ex1, "--sigma", "1", "--box", "0..3",
                     "--pattern", "LL"])
        assert code == 0
        out = capsys.readouterr().out
        values = {}
        for line in out.strip().splitlines():
            key, _, val = line.rpartition("=")
            values[key.strip()] = float(val)
        assert values["P_R^BB"] == pytest.approx(0.409351, abs=1e-6)
        assert values["P_D^BB lower bound"] == pytest.approx(0.261419, abs=1e-6)
        assert values["P_D^BB"] == pytest.approx(0.5818, abs=5e-4)
        assert values["P_D^BB upper bound"] == values["P_D^BB"]

    def test_pattern_length_mismatch_exits_2(self, ex1):
        assert main(["exact-sp", ex1, "--sigma", "1", "--box", "0..3",
                     "--pattern", "LLL"]) == 2

    def test_pattern_inconsistent_with_box_exits_2(self, ex1):
        assert main(["exact-sp", ex1, "--sigma", "1", "--box", "0..3",
                     "--pattern", "SS"]) == 2


class TestMcSp:
    def test_pattern_estimate(self, ex1, capsys):
        code = main(["mc-sp", ex1, "--sigma", "1", "--box", "0..3",
                     "--pattern", "LL", "--samples", "100000", "--seed", "0"])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("P_D^BR = ")
        value = float(out.split("=")[1].split("+/-")[0])
        stderr = float(out.split("+/-")[1].split("(")[0])
        assert abs(value - 0.6192) <= 3 * stderr + 1e-3

    def test_same_seed_same_output(self, ex1, capsys):
        argv = ["mc-sp", ex1, "--sigma", "0.5", "--box", "0..3",
                "--samples", "20000", "--seed", "7"]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        assert capsys.readouterr().out == first

    def test_uniform_quadrature_matches_exact_for_diagonal(self, tmp_path, capsys):
        a = tmp_path / "diag.txt"
        a.write_text("1 0\n0 2\n")
        assert main(["mc-sp", str(a), "--sigma", "0.8", "--box", "0..3",
                     "--method", "quad"]) == 0
        br_line = capsys.readouterr().out
        br = float(br_line.split("=")[1].split("+/-")[0])
        assert main(["exact-sp", str(a), "--sigma", "0.8", "--box", "0..3"]) == 0
        bb_line = capsys.readouterr().out.splitlines()[0]
        bb = float(bb_line.split("=")[1])
        assert br == pytest.approx(bb, abs=1e-6)

    def test_pattern_budget_exits_3(self, tmp_path):
        n = 11
        a = tmp_path / "big.txt"
        a.write_text("\n".join(
            " ".join("1" if i == j else "0" for j in range(n)) for i in range(n)
        ))
        code = main(["mc-sp", str(a), "--sigma", "0.5", "--box", "0..3",
                     "--method", "quad"])
        assert code == 3


class TestExperimentCommand:
    def test_csv_schema_and_determinism(self, tmp_path, capsys):
        cfg = _config_file(tmp_path)
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(["experiment", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["experiment", "--config", cfg, "--out", str(out2)]) == 0
        data1 = out1.read_bytes()
        assert data1 == out2.read_bytes()
        lines = data1.decode().splitlines()
        assert lines[0] == ("sigma,theo_pbb,theo_pbr,theo_pbr_stderr,"
                            "emp_pbb,emp_pbb_stderr,emp_pbr,emp_pbr_stderr")
        assert len(lines) == 3
        first = lines[1].split(",")
        assert len(first) == 8
        assert float(first[0]) == 0.2

    def test_missing_br_columns_empty(self, tmp_path):
        cfg = _config_file(tmp_path, compute_exact_br=False)
        out = tmp_path / "c.csv"
        assert main(["experiment", "--config", cfg, "--out", str(out)]) == 0
        row = out.read_text().splitlines()[1].split(",")
        assert row[2] == "" and row[3] == ""

    def test_svg_written_and_valid(self, tmp_path):
        import xml.etree.ElementTree as ET

        cfg = _config_file(tmp_path)
        out = tmp_path / "d.csv"
        svg = tmp_path / "d.svg"
        assert main(["experiment", "--config", cfg, "--out", str(out),
                     "--svg", str(svg)]) == 0
        tree = ET.parse(svg)
        text = svg.read_text()
        assert "http" not in text.replace("http://www.w3.org/2000/svg", "")
        assert "Average success probabilit" in text

    def test_bad_config_exits_2(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["experiment", "--config", str(path), "--out",
                     str(tmp_path / "x.csv")]) == 2
        path.write_text(json.dumps({"n": 2}))
        assert main(["experiment", "--config", str(path), "--out",
                     str(tmp_path / "x.csv")]) == 2

    def test_csv_round_trip(self, tmp_path):
        cfg = ExperimentConfig.from_json_file(_config_file(tmp_path))
        rows = run_experiment(cfg)
        text = format_rows_csv(rows)
        parsed = [line.split(",") for line in text.strip().splitlines()[1:]]
        for row, fields in zip(rows, parsed):
            assert float(fields[0]) == pytest.approx(row.sigma, abs=1e-6)
            assert float(fields[1]) == pytest.approx(row.theo_p_bb, abs=1e-6)
            assert float(fields[4]) == pytest.approx(row.emp_p_bb.value, abs=1e-6)

    def test_chart_handles_missing_theoretical_series(self, tmp_path):
        cfg = ExperimentConfig.from_json_file(
            _config_file(tmp_path, compute_exact_br=False)
        )
        rows = run_experiment(cfg)
        text = render_chart(rows)
        assert text.startswith("<?xml")
        assert "Theo. P_R^BR" not in text
