"""Tests for PNG rendering."""

import pytest
from PIL import Image

from thompson_approx.core import funcspec
from thompson_approx.core.plmap import identity
from thompson_approx.services.plot_service import PlotTheme, render_element, save_png, theme


def test_default_size(quarter_element):
    image = render_element(quarter_element)
    assert image.size == (theme.dimensions.width, theme.dimensions.height)
    assert image.mode == "RGB"


def test_custom_size(circle_element):
    image = render_element(circle_element, size=(320, 200))
    assert image.size == (320, 200)


def test_element_is_drawn(quarter_element):
    image = render_element(quarter_element)
    colors = {c for _, c in image.getcolors(maxcolors=1 << 16)}
    assert theme.colors.element in colors
    assert theme.colors.background in colors


def test_overlay_is_drawn():
    f = funcspec.parse_family("bump:0.5")
    image = render_element(identity(), f)
    colors = {c for _, c in image.getcolors(maxcolors=1 << 16)}
    assert theme.colors.overlay in colors


@pytest.mark.parametrize("mode", ["lift", "circle"])
def test_circle_modes(circle_element, mode):
    f = funcspec.parse_family("sine:0.2")
    image = render_element(circle_element, f, mode=mode)
    assert image.size == (theme.dimensions.width, theme.dimensions.height)


def test_modes_differ(circle_element):
    lift = render_element(circle_element, mode="lift")
    circle = render_element(circle_element, mode="circle")
    assert lift.tobytes() != circle.tobytes()


def test_bad_mode(quarter_element):
    with pytest.raises(ValueError):
        render_element(quarter_element, mode="polar")


def test_plot_area():
    area = PlotTheme().plot_area
    assert area == (40, 40, 440, 440)


def test_save_png(tmp_path, circle_element):
    path = tmp_path / "figs" / "g.png"
    save_png(render_element(circle_element, mode="circle"), path)
    with Image.open(path) as loaded:
        assert loaded.format == "PNG"
        assert loaded.size == (theme.dimensions.width, theme.dimensions.height)
