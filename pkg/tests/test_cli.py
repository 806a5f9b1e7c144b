"""End-to-end tests of the command line."""

import csv
import json

import pytest
from conftest import d

from thompson_approx.__main__ import (
    EXIT_CERTIFICATION,
    EXIT_INVALID,
    EXIT_OK,
    EXIT_USAGE,
    exit_code_for,
    main,
)
from thompson_approx.core.errors import (
    ConstructionError,
    InvalidElementError,
    ParameterOutOfRangeError,
)
from thompson_approx.core.plmap import Space, from_pairs, identity
from thompson_approx.services.element_io import load_element, load_report, save_element


@pytest.fixture
def circle_file(tmp_path, circle_element):
    path = tmp_path / "circle.json"
    save_element(circle_element, path)
    return path


@pytest.fixture
def non_element_file(tmp_path):
    path = tmp_path / "bad.json"
    save_element(from_pairs(Space.INTERVAL, [(0, 0), (d("1/2"), d("3/8")), (1, 1)]), path)
    return path


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestApproximate:
    def test_interval_family(self, tmp_path, capsys):
        out, report = tmp_path / "g.json", tmp_path / "report.json"
        code = main(
            [
                "approximate",
                "--family",
                "bump:0.3",
                "--epsilon",
                "0.015625",
                "--out",
                str(out),
                "--report",
                str(report),
            ]
        )
        assert code == EXIT_OK
        g = load_element(out)
        assert g.space is Space.INTERVAL
        loaded = load_report(report)
        assert loaded.validation.ok
        assert loaded.certificate.upper < 0.015625
        assert loaded.pieces == g.pieces
        assert "pieces:" in capsys.readouterr().out

    def test_circle_family(self, tmp_path):
        out = tmp_path / "g.json"
        code = main(["approximate", "--family", "rot:0.3", "--epsilon", "0.0625", "--out", str(out)])
        assert code == EXIT_OK
        assert load_element(out).space is Space.CIRCLE

    def test_expression(self, tmp_path):
        out = tmp_path / "g.json"
        code = main(
            ["approximate", "--f", "x + 0.2*x*(1 - x)", "--epsilon", "0.125", "--out", str(out)]
        )
        assert code == EXIT_OK

    def test_invalid_function(self, tmp_path):
        out = tmp_path / "g.json"
        code = main(["approximate", "--f", "x^2", "--epsilon", "0.1", "--out", str(out)])
        assert code == EXIT_INVALID
        assert not out.exists()

    def test_epsilon_out_of_range(self, tmp_path):
        out = tmp_path / "g.json"
        code = main(["approximate", "--f", "x", "--epsilon", "1.5", "--out", str(out)])
        assert code == EXIT_USAGE

    def test_family_space_mismatch(self, tmp_path):
        out = tmp_path / "g.json"
        args = ["approximate", "--family", "rot:0.3", "--space", "interval"]
        assert main([*args, "--epsilon", "0.1", "--out", str(out)]) == EXIT_INVALID


class TestGroupCommands:
    def test_compose_with_inverse(self, tmp_path, circle_file):
        inverse, product = tmp_path / "inv.json", tmp_path / "prod.json"
        assert main(["invert", str(circle_file), "--out", str(inverse)]) == EXIT_OK
        assert main(["compose", str(circle_file), str(inverse), "--out", str(product)]) == EXIT_OK
        assert load_element(product) == identity(Space.CIRCLE)
        assert len(json.loads(product.read_text())["points"]) == 2

    def test_compose_non_element(self, tmp_path, non_element_file):
        out = tmp_path / "out.json"
        code = main(["compose", str(non_element_file), str(non_element_file), "--out", str(out)])
        assert code == EXIT_INVALID

    def test_validate(self, circle_file, capsys):
        assert main(["validate", str(circle_file)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "valid T element, 3 pieces" in out
        assert "slopes: [1/2, 1, 2]" in out

    def test_validate_non_element(self, non_element_file, capsys):
        assert main(["validate", str(non_element_file)]) == EXIT_INVALID
        out = capsys.readouterr().out
        assert out.startswith("invalid F element")
        assert "3/4" in out

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "nope.json")]) == EXIT_USAGE

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        assert main(["validate", str(path)]) == EXIT_USAGE


class TestSample:
    def test_identity(self, tmp_path):
        g, out = tmp_path / "id.json", tmp_path / "s.csv"
        save_element(identity(), g)
        assert main(["sample", str(g), "--points", "2", "--csv", str(out)]) == EXIT_OK
        assert _read_csv(out) == [["x", "g"], ["0", "0"], ["0.5", "0.5"], ["1", "1"]]

    def test_circle_values(self, tmp_path, circle_file):
        out = tmp_path / "s.csv"
        assert main(["sample", str(circle_file), "--points", "4", "--csv", str(out)]) == EXIT_OK
        rows = _read_csv(out)
        assert rows[2] == ["0.25", "0.625"]
        assert rows[-1] == ["1", "1.5"]

    def test_with_function(self, tmp_path, circle_file):
        out = tmp_path / "s.csv"
        args = ["sample", str(circle_file), "--points", "4", "--family", "rot:0.5"]
        assert main([*args, "--csv", str(out)]) == EXIT_OK
        rows = _read_csv(out)
        assert rows[0] == ["x", "g", "f", "diff"]
        assert rows[1] == ["0", "0.5", "0.5", "0"]

    def test_expression_takes_element_space(self, tmp_path, circle_file):
        out = tmp_path / "s.csv"
        args = ["sample", str(circle_file), "--points", "4", "--f", "x + 0.5"]
        assert main([*args, "--csv", str(out)]) == EXIT_OK
        rows = _read_csv(out)
        assert rows[1] == ["0", "0.5", "0.5", "0"]
        assert rows[-1] == ["1", "1.5", "1.5", "0"]

    def test_too_few_points(self, tmp_path, circle_file):
        out = tmp_path / "s.csv"
        assert main(["sample", str(circle_file), "--points", "1", "--csv", str(out)]) == EXIT_USAGE


class TestGap:
    def test_bump(self, capsys):
        assert main(["gap", "--family", "bump:0.3"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert float(lines[0].split(":")[1]) == pytest.approx(0.0)
        assert float(lines[1].split(":")[1]) == pytest.approx(0.3)

    @pytest.mark.parametrize("name", ["rot:0.25", "identity"])
    def test_rotation(self, name, capsys):
        assert main(["gap", "--family", name]) == EXIT_INVALID
        assert capsys.readouterr().out.strip() == "rotation"


class TestInterp:
    def test_golden(self, tmp_path, capsys):
        out = tmp_path / "interp.json"
        assert main(["interp", "0", "0", "1/4", "11/64", "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload == json.loads(capsys.readouterr().out)
        assert payload["l"] == 4
        assert payload["refined_side"] == "x"
        assert len(payload["points"]) == 12
        assert payload["points"][-1] == ["1/4", "11/64"]
        assert payload["slopes"] == ["1"] * 6 + ["1/2"] * 5

    def test_bad_number(self):
        assert main(["interp", "0", "0", "abc", "1"]) == EXIT_USAGE

    def test_degenerate(self):
        assert main(["interp", "0", "0", "0", "1"]) == EXIT_INVALID


class TestExperiment:
    def test_short_table(self, tmp_path, capsys):
        out = tmp_path / "table.csv"
        args = ["experiment", "--family", "bump:0.3", "--min-exp", "3", "--max-exp", "4"]
        assert main([*args, "--csv", str(out)]) == EXIT_OK
        rows = _read_csv(out)
        assert rows[0][:3] == ["epsilon", "Delta", "n"]
        assert len(rows) == 3
        assert capsys.readouterr().out.startswith("epsilon,Delta,n")

    def test_bad_range(self):
        args = ["experiment", "--family", "bump:0.3", "--min-exp", "5", "--max-exp", "4"]
        assert main(args) == EXIT_USAGE


def test_plot(tmp_path, circle_file):
    png = tmp_path / "g.png"
    args = ["plot", str(circle_file), "--family", "sine:0.2", "--mode", "circle"]
    assert main([*args, "--png", str(png)]) == EXIT_OK
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_plot_expression_on_circle_element(tmp_path, circle_file):
    png = tmp_path / "g.png"
    args = ["plot", str(circle_file), "--f", "x + 0.5", "--mode", "circle"]
    assert main([*args, "--png", str(png)]) == EXIT_OK
    assert png.exists()


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["approximate", "--family", "bump:0.3", "--out", "g.json"],
        ["approximate", "--f", "x", "--family", "bump:0.3", "--epsilon", "0.1", "--out", "g.json"],
        ["approximate", "--family", "wobble:1", "--epsilon", "0.1", "--out", "g.json"],
        ["approximate", "--f", "x +", "--epsilon", "0.1", "--out", "g.json"],
    ],
)
def test_usage_errors(tmp_path, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == EXIT_USAGE


def test_exit_code_mapping():
    assert exit_code_for(ConstructionError("x")) == EXIT_CERTIFICATION
    assert exit_code_for(InvalidElementError("x")) == EXIT_INVALID
    assert exit_code_for(ParameterOutOfRangeError("x")) == EXIT_USAGE
