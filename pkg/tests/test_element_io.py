"""Tests for element and report files."""

import json

import pytest
from conftest import random_element

from thompson_approx.core.analysis import Certificate
from thompson_approx.core.dyadic import Dyadic
from thompson_approx.core.errors import ElementFormatError
from thompson_approx.core.plmap import Space, from_pairs, validate_thompson
from thompson_approx.services.element_io import (
    ReportFile,
    element_from_file,
    element_to_file,
    load_element,
    load_report,
    save_element,
    save_report,
)


def test_round_trip(tmp_path, circle_element, quarter_element):
    for g in (circle_element, quarter_element):
        path = tmp_path / f"{g.space.value}.json"
        save_element(g, path)
        assert load_element(path) == g


def test_random_round_trip(tmp_path, rng):
    for i in range(20):
        g = random_element(rng, Space.CIRCLE if i % 2 else Space.INTERVAL)
        assert element_from_file(element_to_file(g)) == g


def test_rewrite_is_byte_stable(tmp_path, circle_element):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    save_element(circle_element, first)
    save_element(load_element(first), second)
    assert first.read_bytes() == second.read_bytes()
    assert not (tmp_path / "a.json.tmp").exists()


def test_file_layout(tmp_path, quarter_element):
    path = tmp_path / "g.json"
    save_element(quarter_element, path)
    data = json.loads(path.read_text())
    assert data["version"] == 1
    assert data["space"] == "interval"
    assert data["points"][1] == {"x": [1, 1], "y": [1, 2]}


def test_big_numerators_are_strings(tmp_path):
    m = (1 << 70) + 1
    g = from_pairs(Space.INTERVAL, [(0, 0), (Dyadic(m, 71), Dyadic(m, 72)), (1, 1)])
    path = tmp_path / "big.json"
    save_element(g, path)
    data = json.loads(path.read_text())
    assert data["points"][1]["x"] == [str(m), 71]
    assert load_element(path) == g


@pytest.mark.parametrize(
    "data",
    [
        {"version": 2, "space": "interval", "points": [{"x": [0, 0], "y": [0, 0]}] * 2},
        {"version": 1, "space": "line", "points": [{"x": [0, 0], "y": [0, 0]}] * 2},
        {"version": 1, "space": "interval", "points": [{"x": [0, 0], "y": [0, 0]}]},
        {"version": 1, "space": "interval"},
        {
            "version": 1,
            "space": "interval",
            "points": [{"x": ["abc", 0], "y": [0, 0]}, {"x": [1, 0], "y": [1, 0]}],
        },
        {
            "version": 1,
            "space": "interval",
            "points": [{"x": [0, -1], "y": [0, 0]}, {"x": [1, 0], "y": [1, 0]}],
        },
        {
            "version": 1,
            "space": "interval",
            "points": [{"x": [1, 0], "y": [0, 0]}, {"x": [0, 0], "y": [1, 0]}],
        },
        {
            "version": 1,
            "space": "circle",
            "points": [{"x": [0, 0], "y": [1, 2]}, {"x": [1, 0], "y": [1, 0]}],
        },
    ],
)
def test_malformed_elements(tmp_path, data):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ElementFormatError):
        load_element(path)


@pytest.mark.parametrize("text", ["{not json", "[1, 2]", "null"])
def test_malformed_json(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(ElementFormatError):
        load_element(path)


def test_report_round_trip(tmp_path, quarter_element):
    report = ReportFile(
        command="approximate",
        source="bump:0.3",
        space=Space.INTERVAL,
        epsilon=0.125,
        S=1.625,
        Delta=6,
        n=64,
        delta=0.0625,
        pieces=quarter_element.pieces,
        certificate=Certificate(lower=0.1, upper=0.11, grid_size=4096, witness=0.5),
        validation=validate_thompson(quarter_element),
        timing={"approximate": 0.01},
    )
    path = tmp_path / "report.json"
    save_report(report, path)
    loaded = load_report(path)
    assert loaded == report
    assert loaded.validation.ok
    assert loaded.validation.slopes == ["1/2", "1", "2"]
