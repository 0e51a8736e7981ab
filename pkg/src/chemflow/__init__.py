"""Finite element solver for a 2-D chemotaxis-Navier-Stokes system.

Mixed P1 / P1-bubble discretization with a gradient-flux splitting of the
chemical signal, skew-symmetrized transport, and first-order semi-coupled
time stepping, plus a manufactured-solution harness that measures the
spatial convergence orders of the scheme.
"""

from .mesh import Mesh, ElementGeometry, build_rect_mesh, classify_boundary, element_geometry
from .quadrature import TriangleRule, integrate, triangle_rule
from .scheme import InitialData, ModelParams, SimulationResult, State, StepForcing, Stepper, TimeGrid
from .spaces import DofLayout, build_layout, eval_basis

__version__ = "0.1.0"

__all__ = [
    "Mesh",
    "ElementGeometry",
    "build_rect_mesh",
    "classify_boundary",
    "element_geometry",
    "TriangleRule",
    "triangle_rule",
    "integrate",
    "DofLayout",
    "build_layout",
    "eval_basis",
    "ModelParams",
    "TimeGrid",
    "StepForcing",
    "State",
    "InitialData",
    "SimulationResult",
    "Stepper",
    "__version__",
]
