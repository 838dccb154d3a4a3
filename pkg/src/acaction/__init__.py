"""Allen-Cahn action toolkit.

Computes the diffuse action of space-time phase-field paths, minimizes it
over switching paths with fixed endpoints, extracts sharp-interface
observables (velocity, mean curvature, discrepancy, multiplicity), and
evaluates reduced sharp-interface actions with nucleation costs.
"""

from .errors import ConfigError, NumericalFailure
from .functionals import (
    ActionBreakdown,
    SpaceTimePath,
    action,
    action_density,
    action_gradient,
    chemical_potential,
    discrepancy_density,
    energy,
    energy_density,
    willmore_term,
)
from .mesh import Grid, ScalarField, gradient, integrate, laplacian
from .potential import SURFACE_TENSION, optimal_profile, surface_tension, well_value

__version__ = "0.1.0"

__all__ = [
    "ActionBreakdown",
    "ConfigError",
    "Grid",
    "NumericalFailure",
    "ScalarField",
    "SpaceTimePath",
    "SURFACE_TENSION",
    "action",
    "action_density",
    "action_gradient",
    "chemical_potential",
    "discrepancy_density",
    "energy",
    "energy_density",
    "gradient",
    "integrate",
    "laplacian",
    "optimal_profile",
    "surface_tension",
    "well_value",
    "willmore_term",
]
