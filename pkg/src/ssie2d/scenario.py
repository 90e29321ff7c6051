"""Scenario description and its INI configuration format.

A scenario fixes one scatterer, the media, the incident wave(s), the solver
settings, the field grid and the reference used for error metrics::

    [geometry]
    shape = circle            ; circle | rectangle | polygon
    center = 0, 0             ; m
    radius = 1.0              ; m (circle)
    width = 1.0               ; m (rectangle)
    height = 1.0              ; m (rectangle)
    vertices = 0 0; 1 0; 0 1  ; m (polygon, "x y" pairs separated by ';')
    max_seg_len = 0.1         ; m

    [object]                  ; and [background]
    eps_r = 4
    mu_r = 1
    sigma = 0                 ; S/m

    [source]
    frequencies = 300e6       ; Hz, comma-separated
    angle_deg = 0             ; propagation direction
    amplitude = 1             ; V/m

    [solver]
    alpha = 0.5
    quadrature_order = 4
    resonance_threshold = 3.0

    [grid]
    extent = 4, 4             ; m
    spacing = 0.04            ; m
    center = 0, 0             ; m, defaults to the geometry center

    [reference]
    mode = mie                ; mie | none | file
    file = fields.csv         ; for mode = file

    [output]
    directory = out
    rcs_angles = 360

    [sweep]
    parameter = eps_r         ; eps_r | frequency
    values = 1.1, 2, 4, 8, 15

    [convergence]
    meshes = 0.2, 0.1, 0.05   ; m, strictly descending

Every section and key is optional except the geometry; unknown sections or
keys are rejected with the offending ``section.key`` in the message.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import geometry
from .operators import DEFAULT_QUADRATURE_ORDER, FREE_SPACE, Medium
from .solver import CfieConfig, PlaneWave

SHAPES = ("circle", "rectangle", "polygon")
REFERENCE_MODES = ("mie", "none", "file")
SWEEP_PARAMETERS = ("eps_r", "frequency")

_SCHEMA: dict[str, tuple[str, ...]] = {
    "geometry": ("shape", "center", "radius", "width", "height", "vertices", "max_seg_len"),
    "object": ("eps_r", "mu_r", "sigma"),
    "background": ("eps_r", "mu_r", "sigma"),
    "source": ("frequencies", "angle_deg", "amplitude"),
    "solver": ("alpha", "quadrature_order", "resonance_threshold"),
    "grid": ("extent", "spacing", "center"),
    "reference": ("mode", "file"),
    "output": ("directory", "rcs_angles"),
    "sweep": ("parameter", "values"),
    "convergence": ("meshes",),
}


class ConfigError(ValueError):
    """Invalid scenario configuration; ``where`` names the section.key at fault."""

    def __init__(self, message: str, where: str | None = None, line: int | None = None):
        prefix = f"{where}: " if where else ""
        suffix = f" (line {line})" if line else ""
        super().__init__(f"{prefix}{message}{suffix}")
        self.where = where
        self.line = line


@dataclass(frozen=True)
class GeometryConfig:
    shape: str
    center: tuple[float, float] = (0.0, 0.0)
    radius: float | None = None
    width: float | None = None
    height: float | None = None
    vertices: tuple[tuple[float, float], ...] | None = None

    def contour(self, max_seg_len: float) -> geometry.Contour:
        if self.shape == "circle":
            return geometry.discretize_circle(self.center, self.radius, max_seg_len)
        if self.shape == "rectangle":
            verts = geometry.rectangle_vertices(self.center, self.width, self.height)
        else:
            verts = np.asarray(self.vertices, dtype=float)
        return geometry.discretize_polygon(verts, max_seg_len)


@dataclass(frozen=True)
class Scenario:
    """Everything needed to run and evaluate one scattering configuration."""

    geometry: GeometryConfig
    max_seg_len: float
    obj: Medium
    background: Medium = FREE_SPACE
    frequencies: tuple[float, ...] = (300e6,)
    angle_deg: float = 0.0
    amplitude: float = 1.0
    alpha: float = 0.5
    quadrature_order: int = DEFAULT_QUADRATURE_ORDER
    resonance_threshold: float = CfieConfig.resonance_threshold
    grid_extent: tuple[float, float] = (4.0, 4.0)
    grid_spacing: float = 0.04
    grid_center: tuple[float, float] | None = None
    reference: str = "none"
    reference_file: str | None = None
    output_dir: str = "out"
    rcs_angles: int = 360
    sweep_parameter: str | None = None
    sweep_values: tuple[float, ...] = ()
    meshes: tuple[float, ...] = ()
    source_path: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        validate(self)

    @property
    def center(self) -> tuple[float, float]:
        return self.grid_center if self.grid_center is not None else self.geometry.center

    def contour(self, max_seg_len: float | None = None) -> geometry.Contour:
        return self.geometry.contour(self.max_seg_len if max_seg_len is None else max_seg_len)

    def wave(self, frequency: float) -> PlaneWave:
        return PlaneWave(frequency=frequency, amplitude=self.amplitude, angle=math.radians(self.angle_deg))

    def cfie(self) -> CfieConfig:
        return CfieConfig(alpha=self.alpha, background=self.background,
                          quadrature_order=self.quadrature_order,
                          resonance_threshold=self.resonance_threshold)

    def with_overrides(self, **changes) -> Scenario:
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def validate(s: Scenario) -> None:
    g = s.geometry
    if g.shape not in SHAPES:
        raise ConfigError(f"unknown shape {g.shape!r}; expected one of {SHAPES}", "geometry.shape")
    if g.shape == "circle" and not (g.radius and g.radius > 0):
        raise ConfigError("circle needs a positive radius", "geometry.radius")
    if g.shape == "rectangle" and not (g.width and g.width > 0 and g.height and g.height > 0):
        raise ConfigError("rectangle needs positive width and height", "geometry.width")
    if g.shape == "polygon" and (g.vertices is None or len(g.vertices) < 3):
        raise ConfigError("polygon needs at least 3 vertices", "geometry.vertices")
    if not s.max_seg_len > 0:
        raise ConfigError("must be positive", "geometry.max_seg_len")
    if not s.frequencies or any(not f > 0 for f in s.frequencies):
        raise ConfigError("frequencies must be positive", "source.frequencies")
    if not 0.0 <= s.alpha <= 1.0:
        raise ConfigError("must lie in [0, 1]", "solver.alpha")
    if s.quadrature_order < 1:
        raise ConfigError("must be >= 1", "solver.quadrature_order")
    if not s.resonance_threshold >= 0:
        raise ConfigError("must be >= 0", "solver.resonance_threshold")
    if not s.grid_spacing > 0:
        raise ConfigError("must be positive", "grid.spacing")
    if any(not e > 0 for e in s.grid_extent):
        raise ConfigError("must be positive", "grid.extent")
    if s.reference not in REFERENCE_MODES:
        raise ConfigError(f"unknown mode {s.reference!r}; expected one of {REFERENCE_MODES}", "reference.mode")
    if s.reference == "mie" and g.shape != "circle":
        raise ConfigError("the mie reference requires circle geometry", "reference.mode")
    if s.reference == "file" and not s.reference_file:
        raise ConfigError("mode = file needs a file", "reference.file")
    if s.rcs_angles < 1:
        raise ConfigError("must be >= 1", "output.rcs_angles")
    if s.sweep_parameter is not None and s.sweep_parameter not in SWEEP_PARAMETERS:
        raise ConfigError(f"unknown parameter {s.sweep_parameter!r}; expected one of {SWEEP_PARAMETERS}",
                          "sweep.parameter")
    if s.sweep_parameter == "frequency" and any(not v > 0 for v in s.sweep_values):
        raise ConfigError("frequencies must be positive", "sweep.values")
    if s.sweep_parameter == "eps_r" and any(not v > 0 for v in s.sweep_values):
        raise ConfigError("permittivities must be positive", "sweep.values")
    if any(not m > 0 for m in s.meshes):
        raise ConfigError("mesh sizes must be positive", "convergence.meshes")


# ---------------------------------------------------------------------------
# INI parsing
# ---------------------------------------------------------------------------
class _Reader:
    def __init__(self, parser: configparser.ConfigParser, lines: dict[str, int]):
        self.parser = parser
        self.lines = lines

    def has(self, section: str, key: str) -> bool:
        return self.parser.has_option(section, key)

    def raw(self, section: str, key: str) -> str:
        return self.parser.get(section, key).strip()

    def _fail(self, section: str, key: str, message: str):
        where = f"{section}.{key}"
        raise ConfigError(message, where, self.lines.get(where))

    def float(self, section: str, key: str, default=None):
        if not self.has(section, key):
            return default
        try:
            return float(self.raw(section, key))
        except ValueError:
            self._fail(section, key, f"expected a number, got {self.raw(section, key)!r}")

    def int(self, section: str, key: str, default=None):
        if not self.has(section, key):
            return default
        try:
            return int(self.raw(section, key))
        except ValueError:
            self._fail(section, key, f"expected an integer, got {self.raw(section, key)!r}")

    def floats(self, section: str, key: str, default=None, count: int | None = None):
        if not self.has(section, key):
            return default
        text = self.raw(section, key)
        try:
            values = tuple(float(v) for v in text.replace(",", " ").split())
        except ValueError:
            self._fail(section, key, f"expected numbers, got {text!r}")
        if not values or (count is not None and len(values) != count):
            self._fail(section, key, f"expected {count or 'at least one'} value(s), got {text!r}")
        return values

    def str(self, section: str, key: str, default=None):
        return self.raw(section, key) if self.has(section, key) else default

    def vertices(self, section: str, key: str):
        if not self.has(section, key):
            return None
        text = self.raw(section, key)
        try:
            pts = tuple(tuple(float(v) for v in item.replace(",", " ").split()) for item in text.split(";") if item.strip())
        except ValueError:
            self._fail(section, key, f"expected 'x y; x y; ...', got {text!r}")
        if any(len(p) != 2 for p in pts):
            self._fail(section, key, f"every vertex needs exactly two coordinates, got {text!r}")
        return pts

    def medium(self, section: str, default: Medium) -> Medium:
        try:
            return Medium(eps_r=self.float(section, "eps_r", default.eps_r),
                          mu_r=self.float(section, "mu_r", default.mu_r),
                          sigma=self.float(section, "sigma", default.sigma))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc), section) from None


def _key_lines(text: str) -> dict[str, int]:
    """Line number of every ``section.key`` for error messages."""
    lines: dict[str, int] = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip().lower()
        elif section and stripped and stripped[0] not in "#;" and ("=" in stripped or ":" in stripped):
            key = stripped.split("=", 1)[0].split(":", 1)[0].strip().lower()
            lines[f"{section}.{key}"] = number
    return lines


def parse_scenario(text: str, source_path: str | None = None) -> Scenario:
    """Build a :class:`Scenario` from INI text."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        parser.read_string(text, source=source_path or "<config>")
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    lines = _key_lines(text)
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", section)
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                where = f"{section}.{key}"
                raise ConfigError("unknown key", where, lines.get(where))
    if not parser.has_section("geometry"):
        raise ConfigError("missing [geometry] section", "geometry")
    r = _Reader(parser, lines)
    shape = r.str("geometry", "shape")
    if shape is None:
        raise ConfigError("missing key", "geometry.shape")
    geo = GeometryConfig(
        shape=shape.lower(),
        center=r.floats("geometry", "center", (0.0, 0.0), count=2),
        radius=r.float("geometry", "radius"),
        width=r.float("geometry", "width"),
        height=r.float("geometry", "height"),
        vertices=r.vertices("geometry", "vertices"),
    )
    if not r.has("geometry", "max_seg_len"):
        raise ConfigError("missing key", "geometry.max_seg_len")
    sweep_parameter = r.str("sweep", "parameter")
    return Scenario(
        geometry=geo,
        max_seg_len=r.float("geometry", "max_seg_len"),
        obj=r.medium("object", Medium()),
        background=r.medium("background", FREE_SPACE),
        frequencies=r.floats("source", "frequencies", (300e6,)),
        angle_deg=r.float("source", "angle_deg", 0.0),
        amplitude=r.float("source", "amplitude", 1.0),
        alpha=r.float("solver", "alpha", 0.5),
        quadrature_order=r.int("solver", "quadrature_order", DEFAULT_QUADRATURE_ORDER),
        resonance_threshold=r.float("solver", "resonance_threshold", CfieConfig.resonance_threshold),
        grid_extent=r.floats("grid", "extent", (4.0, 4.0), count=2),
        grid_spacing=r.float("grid", "spacing", 0.04),
        grid_center=r.floats("grid", "center", None, count=2),
        reference=(r.str("reference", "mode", "none") or "none").lower(),
        reference_file=r.str("reference", "file"),
        output_dir=r.str("output", "directory", "out"),
        rcs_angles=r.int("output", "rcs_angles", 360),
        sweep_parameter=sweep_parameter.lower() if sweep_parameter else None,
        sweep_values=r.floats("sweep", "values", ()),
        meshes=r.floats("convergence", "meshes", ()),
        source_path=source_path,
    )


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc}") from None
    return parse_scenario(text, source_path=str(p))
