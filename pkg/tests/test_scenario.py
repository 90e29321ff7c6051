"""Scenario INI parsing and validation."""

from pathlib import Path

import numpy as np
import pytest

from ssie2d.operators import Medium
from ssie2d.scenario import ConfigError, Scenario, load_scenario, parse_scenario

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"

FULL = """\
[geometry]
shape = circle
center = 0.5, -0.25
radius = 1.0
max_seg_len = 0.1

[object]
eps_r = 4
mu_r = 1.5
sigma = 0.01

[background]
eps_r = 1.0

[source]
frequencies = 100e6, 200e6
angle_deg = 30
amplitude = 2

[solver]
alpha = 0.25
quadrature_order = 6
resonance_threshold = 2.0

[grid]
extent = 3, 2
spacing = 0.05
center = 0, 0

[reference]
mode = none

[output]
directory = results
rcs_angles = 180

[sweep]
parameter = frequency
values = 50e6, 60e6

[convergence]
meshes = 0.2, 0.1
"""


def test_full_schema_round_trip():
    s = parse_scenario(FULL)
    assert s.geometry.shape == "circle"
    assert s.geometry.center == (0.5, -0.25)
    assert s.obj == Medium(eps_r=4.0, mu_r=1.5, sigma=0.01)
    assert s.frequencies == (100e6, 200e6)
    assert s.angle_deg == 30 and s.amplitude == 2
    assert (s.alpha, s.quadrature_order, s.resonance_threshold) == (0.25, 6, 2.0)
    assert s.grid_extent == (3.0, 2.0) and s.grid_spacing == 0.05 and s.center == (0.0, 0.0)
    assert s.output_dir == "results" and s.rcs_angles == 180
    assert s.sweep_parameter == "frequency" and s.sweep_values == (50e6, 60e6)
    assert s.meshes == (0.2, 0.1)
    cfg = s.cfie()
    assert cfg.alpha == 0.25 and cfg.quadrature_order == 6
    wave = s.wave(100e6)
    assert wave.angle == pytest.approx(np.pi / 6)
    assert s.contour().n_segments == 63


def test_defaults():
    s = parse_scenario("[geometry]\nshape = circle\nradius = 1\nmax_seg_len = 0.1\n")
    assert s.obj == Medium()
    assert s.frequencies == (300e6,)
    assert s.alpha == 0.5
    assert s.grid_extent == (4.0, 4.0) and s.grid_spacing == 0.04
    assert s.reference == "none"
    assert s.center == (0.0, 0.0)


def test_rectangle_and_polygon():
    rect = parse_scenario("[geometry]\nshape = rectangle\nwidth = 1\nheight = 1\nmax_seg_len = 0.05\n")
    assert rect.contour().n_segments == 80
    poly = parse_scenario("[geometry]\nshape = polygon\nvertices = 0 0; 1 0; 0 1\nmax_seg_len = 0.5\n")
    assert poly.geometry.vertices == ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
    assert poly.contour().signed_area == pytest.approx(0.5)


@pytest.mark.parametrize("text,where,line", [
    ("[geometry]\nshape = circle\nradus = 1\nmax_seg_len = 0.1\n", "geometry.radus", 3),
    ("[geometry]\nshape = circle\nradius = 1\nmax_seg_len = 0.1\n[solver]\nalpah = 0.5\n", "solver.alpah", 6),
    ("[geometry]\nshape = circle\nradius = abc\nmax_seg_len = 0.1\n", "geometry.radius", 3),
    ("[geometry]\nshape = circle\nradius = 1\nmax_seg_len = 0.1\n[grid]\nextent = 1\n", "grid.extent", 6),
])
def test_errors_name_the_key_and_line(text, where, line):
    with pytest.raises(ConfigError) as info:
        parse_scenario(text)
    assert info.value.where == where
    assert info.value.line == line
    assert where in str(info.value)


@pytest.mark.parametrize("text,where", [
    ("[geometry]\nshape = circle\nradius = 1\nmax_seg_len = 0.1\n[extras]\na = 1\n", "extras"),
    ("[object]\neps_r = 2\n", "geometry"),
    ("[geometry]\nradius = 1\nmax_seg_len = 0.1\n", "geometry.shape"),
    ("[geometry]\nshape = circle\nradius = 1\n", "geometry.max_seg_len"),
    ("[geometry]\nshape = hexagon\nmax_seg_len = 0.1\n", "geometry.shape"),
    ("[geometry]\nshape = circle\nradius = -1\nmax_seg_len = 0.1\n", "geometry.radius"),
    ("[geometry]\nshape = circle\nradius = 1\nmax_seg_len = 0\n", "geometry.max_seg_len"),
    ("[geometry]\nshape = circle\nradius = 1\nmax_seg_len = 0.1\n[source]\nfrequencies = -3\n",
     "source.frequencies"),
    ("[geometry]\nshape = circle\nradius = 1\nmax_seg_len = 0.1\n[solver]\nalpha = 2\n", "solver.alpha"),
    ("[geometry]\nshape = circle\nradius = 1\nmax_seg_len = 0.1\n[grid]\nspacing = 0\n", "grid.spacing"),
    ("[geometry]\nshape = rectangle\nwidth = 1\nheight = 1\nmax_seg_len = 0.1\n[reference]\nmode = mie\n",
     "reference.mode"),
    ("[geometry]\nshape = circle\nradius = 1\nmax_seg_len = 0.1\n[reference]\nmode = file\n", "reference.file"),
    ("[geometry]\nshape = circle\nradius = 1\nmax_seg_len = 0.1\n[sweep]\nparameter = mu_r\n",
     "sweep.parameter"),
    ("[geometry]\nshape = circle\nradius = 1\nmax_seg_len = 0.1\n[object]\neps_r = -4\n", "object"),
])
def test_validation_errors(text, where):
    with pytest.raises(ConfigError) as info:
        parse_scenario(text)
    assert info.value.where == where


def test_malformed_file():
    with pytest.raises(ConfigError):
        parse_scenario("shape = circle\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "absent.ini")


def test_overrides_ignore_none():
    s = parse_scenario(FULL)
    t = s.with_overrides(alpha=None, quadrature_order=8)
    assert t.alpha == 0.25 and t.quadrature_order == 8
    with pytest.raises(ConfigError):
        s.with_overrides(alpha=-0.1)


def test_scenario_is_hashable_and_comparable():
    a = parse_scenario(FULL)
    b = parse_scenario(FULL, source_path="elsewhere.ini")
    assert a == b
    assert isinstance(a, Scenario)


@pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.ini")), ids=lambda p: p.stem)
def test_shipped_scenarios_parse(path):
    s = load_scenario(path)
    assert s.contour().n_segments > 0
