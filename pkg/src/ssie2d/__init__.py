"""Two-dimensional TM scattering by penetrable cylinders.

A single equivalent electric current ``J_s = Y_s E`` on each object's
boundary, with the differential surface admittance ``Y_s`` built from
boundary-element discretisations of the interior problems, radiates the
scattered field in the background medium. The boundary field ``E`` comes
from a combined-field equation.

Modules
-------
specfun     Bessel and Hankel functions.
geometry    Contour discretisation and point classification.
operators   Media, Green kernels, boundary integral matrices, admittances.
solver      Combined-field solve, field reconstruction, scattering width.
oracle      Eigenfunction series for a circular cylinder.
scenario    Scenario description and INI configuration.
acceptance  Acceptance criteria shared by the CLI and the tests.
cli         Command-line interface.
"""

from .geometry import Contour, discretize_circle, discretize_polygon, rectangle_vertices
from .operators import FREE_SPACE, Medium
from .solver import CfieConfig, PlaneWave, assemble_multi, solve

__all__ = [
    "CfieConfig",
    "Contour",
    "FREE_SPACE",
    "Medium",
    "PlaneWave",
    "assemble_multi",
    "discretize_circle",
    "discretize_polygon",
    "rectangle_vertices",
    "solve",
]
__version__ = "0.1.0"
